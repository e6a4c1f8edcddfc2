#pragma once

#include <cstdint>
#include <vector>

namespace risklab {

/// Two isotropic unit-variance Gaussian classes with means +-delta * t in
/// p dimensions, equal priors. The minimum achievable risk of a linear
/// separator through the origin is Phi(-delta).
struct GaussianClassSpec {
    int p = 2;
    double delta = 0.0;
    std::vector<double> t;  ///< unit-norm target direction, length p

    /// Spec with t = e_0.
    static GaussianClassSpec make(int p, double delta);
    /// Throws DomainError if p < 2, delta < 0 or |t| != 1.
    void validate() const;

    double min_risk() const;
};

/// Phi(-delta cos theta), the risk of a separator at angle theta from t.
double perceptron_risk(double theta, double delta);

/// Density of the angle between a uniformly random direction and a fixed
/// one in p dimensions: sin^{p-2}(theta) / B(1/2, (p-1)/2).
double angle_density(double theta, int p);

/// Log density of risks up to an additive constant:
/// ((p-3)/2) log(1 - (z/delta)^2) + z^2/2 with z = Phi^{-1}(r).
double risk_entropy(double r, const GaussianClassSpec& spec);

/// d s / d r of `risk_entropy`.
double risk_entropy_derivative(double r, const GaussianClassSpec& spec);

/// Large-p limit of s(r)/p: (1/2) log(1 - (z/delta)^2).
double risk_entropy_per_feature_limit(double r, double delta);

/// Normalised probability density of the risk of a uniformly random
/// direction, over (Phi(-delta), Phi(delta)).
double risk_density(double r, const GaussianClassSpec& spec);

/// Expected risk under the weight density exp(-beta R(w)) on the sphere,
/// by adaptive quadrature over the angle (relative tolerance `rel_tol`).
double boltzmann_risk_exact(double beta, const GaussianClassSpec& spec, double rel_tol = 1e-10);

/// Hebb-rule learning curve Phi(-delta / sqrt(1 + p/(m delta^2))).
/// delta = 0 returns 0.5.
double hebbian_expected_risk(double m, const GaussianClassSpec& spec);

/// Large-m expansion Phi(-delta) (1 + p/(2m)).
double hebbian_asymptote(double m, const GaussianClassSpec& spec);

struct HebbianSimulation {
    double mean_risk = 0.0;
    double stderr_ = 0.0;
    std::vector<double> run_risks;
};

/// Draw m examples per run, form w = sum_k y_k x_k and record its exact
/// risk Phi(-delta cos(w, t)). Run k uses RNG stream (seed, k) so the
/// result does not depend on thread scheduling.
HebbianSimulation hebbian_simulate(std::int64_t m, const GaussianClassSpec& spec, int runs,
                                   std::uint64_t seed, int threads = 1);

}  // namespace risklab
