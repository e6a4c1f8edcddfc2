#pragma once

namespace risklab {

/// Replica-symmetric state of the realisable perceptron at load alpha = m/p.
struct ReplicaState {
    double alpha = 0.0;
    double q = 0.0;  ///< overlap between replica weight vectors
    double r = 0.5;  ///< Gibbs risk arccos(q)/pi
    double residual = 0.0;
};

/// Log typical training ratio per example, mu(r, q)/m:
/// 2 \int N(t) log Phi(sqrt(q/(1-q)) t) Phi(t cos(pi r)/sqrt(q - cos^2(pi r))) dt.
/// Requires cos^2(pi r) < q < 1.
double mu_per_example(double r, double q);

/// Replica entropy (p/2) (log(1-q) + (q - cos^2(pi r))/(1-q)).
double entropy_rq(double r, double q, double p);

/// Right-hand side of the overlap equation,
/// (alpha/pi) \int exp(-(1+q) t^2 / (2(1-q))) / Phi(sqrt(q/(1-q)) t) dt/sqrt(2 pi).
double overlap_map(double q, double alpha);

/// Solve q = overlap_map(q, alpha) on [1e-6, 1 - 1e-6] to |residual| <= 1e-8.
/// Throws NumericalError with both end residuals if no root is bracketed.
ReplicaState solve_saddle(double alpha);

}  // namespace risklab
