#pragma once

#include <functional>
#include <optional>
#include <span>

namespace risklab {

using RealFunction = std::function<double(double)>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Log typical training ratio mu(r) and optional fluctuation variance
/// sigma^2(r). `annealed_m` is set for the annealed model so its derivative
/// can be taken analytically.
struct TrainingRatioModel {
    RealFunction mu;
    RealFunction sigma2;  ///< empty means identically zero
    std::optional<double> annealed_m;

    double mu_derivative(double r) const;
};

/// mu(r) = m log(1 - r), sigma^2 = 0.
TrainingRatioModel annealed_mu(double m);

/// Risk r* in `bracket` with s'(r*) + mu'(r*) = 0, to
/// |G'(r*)| <= 1e-10 |s'(r*)| (or bracket exhausted at double precision).
/// Throws NumericalError when G' does not change sign on the bracket.
double gibbs_risk_saddle(const RealFunction& s_prime, const TrainingRatioModel& model,
                         Interval bracket);

/// Gibbs risk \int r e^{G(r)} dr / \int e^{G(r)} dr over `support`, with
/// G = s + mu + sigma chi. Points where G is not finite carry no weight.
double gibbs_risk_integral(const RealFunction& s, const TrainingRatioModel& model,
                           const RealFunction& chi = {}, Interval support = {0.0, 1.0});

/// Growth exponent d1 + d2/2 - 1 from the counts of directions in which
/// the risk rises linearly (d1) and quadratically (d2).
double growth_exponent(double d1, double d2);

struct ExponentFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    int bins = 0;
    std::size_t samples_used = 0;
};

/// Slope of log(bin density) against log(r - r_min) on log-spaced bins.
/// Bins span from the 1% quantile of the in-window excesses to window.hi;
/// counts weight the fit. Needs >= 100 samples in the window; an empty bin
/// is reported as a NumericalError.
ExponentFit estimate_local_exponent(std::span<const double> risk_samples, double r_min,
                                    Interval window, int bins = 8);

}  // namespace risklab
