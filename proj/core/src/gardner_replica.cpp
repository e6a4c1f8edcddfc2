#include "risklab/gardner_replica.hpp"

#include <cmath>
#include <sstream>

#include "risklab/errors.hpp"
#include "risklab/quadrature.hpp"
#include "risklab/roots.hpp"
#include "risklab/special.hpp"

namespace risklab {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kQLow = 1e-6;
constexpr double kQHigh = 1.0 - 1e-6;

}  // namespace

double mu_per_example(double r, double q) {
    const double c = std::cos(kPi * r);
    const double c2 = c * c;
    if (!(q > c2 && q < 1.0)) {
        throw DomainError("mu_per_example: need cos^2(pi r) < q < 1");
    }
    const double slope_a = std::sqrt(q / (1.0 - q));
    const double slope_b = c / std::sqrt(q - c2);
    auto integrand = [&](double t) {
        const double log_phi = log_normal_cdf(slope_a * t);
        const double weight = normal_cdf(slope_b * t);
        if (weight == 0.0) return 0.0;
        return normal_pdf(t) * log_phi * weight;
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    const auto res = integrate_real_line(integrand, opt);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "mu_per_example: quadrature error " << res.abs_error << " not converged";
        throw NumericalError(msg.str());
    }
    return 2.0 * res.value;
}

double entropy_rq(double r, double q, double p) {
    if (!(q < 1.0)) throw DomainError("entropy_rq: q must be < 1");
    const double c = std::cos(kPi * r);
    return 0.5 * p * (std::log1p(-q) + (q - c * c) / (1.0 - q));
}

double overlap_map(double q, double alpha) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("overlap_map: q outside (0, 1)");
    const double slope = std::sqrt(q / (1.0 - q));
    const double width = std::sqrt(1.0 - q);
    // Substitute t = width * u: both tails then decay on the unit scale.
    auto integrand = [&](double u) {
        const double t = width * u;
        const double log_value =
            -(1.0 + q) * t * t / (2.0 * (1.0 - q)) - log_normal_cdf(slope * t) - kLogSqrt2Pi;
        return width * std::exp(log_value);
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    const auto res = integrate_real_line(integrand, opt);
    if (!res.converged) throw NumericalError("overlap_map: quadrature did not converge");
    return alpha / kPi * res.value;
}

ReplicaState solve_saddle(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("solve_saddle: alpha must be > 0");
    auto residual = [alpha](double q) { return overlap_map(q, alpha) - q; };
    const double f_lo = residual(kQLow);
    const double f_hi = residual(kQHigh);
    if ((f_lo > 0) == (f_hi > 0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "solve_saddle: no root bracketed for alpha=" << alpha << " (residual " << f_lo
            << " at q=" << kQLow << ", " << f_hi << " at q=" << kQHigh << ")";
        throw NumericalError(msg.str());
    }
    RootOptions opt;
    opt.f_tol = 1e-12;
    opt.bisections = 30;
    const auto root = find_root(residual, kQLow, kQHigh, opt);
    if (!(std::abs(root.residual) <= 1e-8)) {
        std::ostringstream msg;
        msg << "solve_saddle: residual " << root.residual << " above 1e-8";
        throw NumericalError(msg.str());
    }
    ReplicaState state;
    state.alpha = alpha;
    state.q = root.x;
    state.r = std::acos(root.x) / kPi;
    state.residual = root.residual;
    return state;
}

}  // namespace risklab
