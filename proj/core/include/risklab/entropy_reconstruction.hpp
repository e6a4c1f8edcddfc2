#pragma once

#include <vector>

#include "risklab/mcmc.hpp"

namespace risklab {

struct EntropyPoint {
    double r = 0.0;
    double s = 0.0;
    double beta = 0.0;
    bool pooled = false;  ///< r was adjusted by isotonic pooling
};

/// Risk-entropy curve known up to an additive constant, stored in
/// decreasing-r order with the anchor first.
struct EntropyCurve {
    std::vector<EntropyPoint> points;
    double anchor_r = 0.0;
    double anchor_s = 0.0;
    bool pooled = false;
};

/// Trapezium integration of s'(r) = beta along a Boltzmann curve:
/// s(r_n) = s0 + sum_i (beta_i + beta_{i-1})/2 (r_i - r_{i-1}).
/// The smallest-beta point is the anchor. Risks that increase with beta are
/// pooled (weighted by 1/stderr^2) into a non-increasing sequence first;
/// pooled runs collapse into one point and are flagged.
EntropyCurve reconstruct(const BoltzmannCurve& curve, double anchor_s0);

struct QuadraticFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double residual_rms = 0.0;
};

/// Least-squares s ~ c0 + c1 r + c2 r^2; needs >= 3 points.
QuadraticFit quadratic_fit(const EntropyCurve& curve);

/// Annealed Gibbs risk for m examples from the interpolated curve. When
/// s'(r) - m/(1-r) keeps one sign over the covered range, the maximiser is
/// the corresponding end of the range. Without `extrapolate` the search
/// never leaves the measured risks.
double predicted_annealed_risk(const EntropyCurve& curve, double m, bool extrapolate = false);

}  // namespace risklab
