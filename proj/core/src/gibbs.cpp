#include "risklab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "risklab/errors.hpp"
#include "risklab/quadrature.hpp"
#include "risklab/roots.hpp"
#include "risklab/stats.hpp"

namespace risklab {

double TrainingRatioModel::mu_derivative(double r) const {
    if (annealed_m) return -*annealed_m / (1.0 - r);
    // Central difference; the step shrinks near r = 0 and r = 1 so both
    // probes stay inside (0, 1).
    double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(r), 1e-3);
    h = std::min({h, 0.5 * r, 0.5 * (1.0 - r)});
    if (!(h > 0.0)) throw DomainError("mu_derivative: r on the boundary of (0, 1)");
    const volatile double up = r + h;
    const volatile double down = r - h;
    return (mu(up) - mu(down)) / (up - down);
}

TrainingRatioModel annealed_mu(double m) {
    if (!(m >= 0.0)) throw DomainError("annealed_mu: m must be >= 0");
    TrainingRatioModel model;
    model.mu = [m](double r) { return m == 0.0 ? 0.0 : m * std::log1p(-r); };
    model.annealed_m = m;
    return model;
}

double gibbs_risk_saddle(const RealFunction& s_prime, const TrainingRatioModel& model,
                         Interval bracket) {
    if (!(bracket.lo < bracket.hi)) throw DomainError("gibbs_risk_saddle: empty bracket");
    auto g = [&](double r) { return s_prime(r) + model.mu_derivative(r); };
    const double g_lo = g(bracket.lo);
    const double g_hi = g(bracket.hi);
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi) || (g_lo > 0) == (g_hi > 0)) {
        if (g_lo == 0.0) return bracket.lo;
        if (g_hi == 0.0) return bracket.hi;
        std::ostringstream msg;
        msg.precision(17);
        msg << "gibbs_risk_saddle: G0' has no sign change on [" << bracket.lo << ", "
            << bracket.hi << "] (" << g_lo << ", " << g_hi << ")";
        throw NumericalError(msg.str());
    }
    // |G'| <= 1e-10 |s'| is tested inside the search; the bisection fallback
    // stops at adjacent doubles.
    double lo = bracket.lo, hi = bracket.hi;
    double f_lo = g_lo;
    double best = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double sp = s_prime(mid);
        const double gm = sp + model.mu_derivative(mid);
        best = mid;
        if (std::abs(gm) <= 1e-10 * std::abs(sp) || gm == 0.0) break;
        if ((gm > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = gm;
        } else {
            hi = mid;
        }
    }
    return best;
}

double gibbs_risk_integral(const RealFunction& s, const TrainingRatioModel& model,
                           const RealFunction& chi, Interval support) {
    if (!(support.lo < support.hi)) throw DomainError("gibbs_risk_integral: empty support");
    auto exponent = [&](double r) {
        double v = s(r) + model.mu(r);
        if (model.sigma2 && chi) v += std::sqrt(std::max(0.0, model.sigma2(r))) * chi(r);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    constexpr int kGrid = 8192;
    const double step = (support.hi - support.lo) / kGrid;
    double peak = 0.5 * (support.lo + support.hi);
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
        // Interior sample points avoid evaluating singular endpoints.
        const double r = support.lo + step * (i == 0 ? 0.5 : (i == kGrid ? kGrid - 0.5 : i));
        const double v = exponent(r);
        if (v > shift) {
            shift = v;
            peak = r;
        }
    }
    if (!std::isfinite(shift)) throw NumericalError("gibbs_risk_integral: exponent never finite");
    double lo = std::max(support.lo, peak - step), hi = std::min(support.hi, peak + step);
    constexpr double kGolden = 0.6180339887498949;
    for (int it = 0; it < 80; ++it) {
        const double a = hi - kGolden * (hi - lo);
        const double b = lo + kGolden * (hi - lo);
        if (exponent(a) < exponent(b)) lo = a;
        else hi = b;
    }
    peak = 0.5 * (lo + hi);
    shift = std::max(shift, exponent(peak));

    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.initial_panels = 64;
    auto weight = [&](double r) {
        const double v = exponent(r) - shift;
        return v < -745.0 ? 0.0 : std::exp(v);
    };
    auto weighted = [&](double r) { return r * weight(r); };
    const auto den = integrate(weight, support.lo, peak, opt).value +
                     integrate(weight, peak, support.hi, opt).value;
    const auto num = integrate(weighted, support.lo, peak, opt).value +
                     integrate(weighted, peak, support.hi, opt).value;
    if (!(den > 0.0) || !std::isfinite(num)) {
        throw NumericalError("gibbs_risk_integral: normalising integral underflowed");
    }
    return num / den;
}

double growth_exponent(double d1, double d2) { return d1 + 0.5 * d2 - 1.0; }

ExponentFit estimate_local_exponent(std::span<const double> risk_samples, double r_min,
                                    Interval window, int bins) {
    if (!(window.lo >= r_min) || !(window.hi > window.lo)) {
        throw DomainError("estimate_local_exponent: window must lie above r_min");
    }
    if (bins < 2) throw DomainError("estimate_local_exponent: need >= 2 bins");
    std::vector<double> excess;
    for (double r : risk_samples) {
        if (r > window.lo && r <= window.hi && r > r_min) excess.push_back(r - r_min);
    }
    if (excess.size() < 100) {
        std::ostringstream msg;
        msg << "estimate_local_exponent: only " << excess.size() << " samples in window";
        throw DomainError(msg.str());
    }
    std::sort(excess.begin(), excess.end());
    const double top = window.hi - r_min;
    const double bottom = std::max(excess[excess.size() / 100], window.lo - r_min);
    if (!(bottom > 0.0 && bottom < top)) throw NumericalError("estimate_local_exponent: degenerate range");
    const double log_lo = std::log(bottom), log_hi = std::log(top);
    const double log_step = (log_hi - log_lo) / bins;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    std::size_t used = 0;
    for (double x : excess) {
        if (x < bottom) continue;
        auto b = static_cast<int>((std::log(x) - log_lo) / log_step);
        b = std::clamp(b, 0, bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
        ++used;
    }
    std::vector<double> xs, ys, ws;
    for (int b = 0; b < bins; ++b) {
        const double c = counts[static_cast<std::size_t>(b)];
        if (c == 0.0) {
            std::ostringstream msg;
            msg << "estimate_local_exponent: bin " << b << " is empty";
            throw NumericalError(msg.str());
        }
        const double left = std::exp(log_lo + b * log_step);
        const double right = std::exp(log_lo + (b + 1) * log_step);
        xs.push_back(0.5 * (std::log(left) + std::log(right)));
        // Density at the geometric bin centre; the count's Poisson error
        // gives log-variance 1/c.
        ys.push_back(std::log(c / (right - left)));
        ws.push_back(c);
    }
    const auto fit = weighted_line_fit(xs, ys, ws);
    ExponentFit out;
    out.exponent = fit.slope;
    out.stderr_ = fit.slope_stderr;
    out.bins = bins;
    out.samples_used = used;
    return out;
}

}  // namespace risklab
