#include "risklab/analytic_perceptron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "risklab/errors.hpp"
#include "risklab/parallel.hpp"
#include "risklab/quadrature.hpp"
#include "risklab/random.hpp"
#include "risklab/special.hpp"
#include "risklab/stats.hpp"

namespace risklab {

GaussianClassSpec GaussianClassSpec::make(int p, double delta) {
    GaussianClassSpec spec;
    spec.p = p;
    spec.delta = delta;
    spec.t.assign(static_cast<std::size_t>(std::max(p, 0)), 0.0);
    if (p > 0) spec.t[0] = 1.0;
    spec.validate();
    return spec;
}

void GaussianClassSpec::validate() const {
    if (p < 2) throw DomainError("GaussianClassSpec: p must be >= 2");
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw DomainError("GaussianClassSpec: delta must be finite and >= 0");
    }
    if (t.size() != static_cast<std::size_t>(p)) {
        throw DomainError("GaussianClassSpec: target direction has wrong length");
    }
    const double norm2 = std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
        throw DomainError("GaussianClassSpec: target direction is not unit norm");
    }
}

double GaussianClassSpec::min_risk() const { return normal_cdf(-delta); }

double perceptron_risk(double theta, double delta) {
    if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("perceptron_risk: theta outside [0, pi]");
    if (!(delta >= 0.0)) throw DomainError("perceptron_risk: delta < 0");
    return normal_cdf(-delta * std::cos(theta));
}

double angle_density(double theta, int p) {
    if (p < 2) throw DomainError("angle_density: p must be >= 2");
    if (!(theta >= 0.0 && theta <= kPi)) return 0.0;
    const double log_norm = log_beta(0.5, 0.5 * (p - 1));
    if (p == 2) return std::exp(-log_norm);
    const double s = std::sin(theta);
    if (s <= 0.0) return 0.0;
    return std::exp((p - 2) * std::log(s) - log_norm);
}

namespace {

// z = Phi^{-1}(r) and u = z / delta, validated to lie strictly inside the
// achievable risk range.
struct RiskCoordinates {
    double z, u;
};

RiskCoordinates risk_coordinates(double r, const GaussianClassSpec& spec, const char* who) {
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError(std::string(who) + ": risk outside (0, 1)");
    }
    if (spec.delta == 0.0) {
        throw DomainError(std::string(who) + ": zero separation leaves no risk range");
    }
    const double z = normal_quantile(r);
    const double u = z / spec.delta;
    if (!(std::abs(u) < 1.0)) {
        throw DomainError(std::string(who) + ": risk outside (Phi(-delta), Phi(delta))");
    }
    return {z, u};
}

}  // namespace

double risk_entropy(double r, const GaussianClassSpec& spec) {
    const auto [z, u] = risk_coordinates(r, spec, "risk_entropy");
    return 0.5 * (spec.p - 3) * std::log1p(-u * u) + 0.5 * z * z;
}

double risk_entropy_derivative(double r, const GaussianClassSpec& spec) {
    const auto [z, u] = risk_coordinates(r, spec, "risk_entropy_derivative");
    // ds/dz times dz/dr = 1/phi(z)
    const double ds_dz = z - (spec.p - 3) * z / (spec.delta * spec.delta * (1.0 - u * u));
    return ds_dz / normal_pdf(z);
}

double risk_entropy_per_feature_limit(double r, double delta) {
    auto spec = GaussianClassSpec::make(2, delta);
    const auto [z, u] = risk_coordinates(r, spec, "risk_entropy_per_feature_limit");
    (void)z;
    return 0.5 * std::log1p(-u * u);
}

double risk_density(double r, const GaussianClassSpec& spec) {
    const auto [z, u] = risk_coordinates(r, spec, "risk_density");
    const double log_prefactor = 0.5 * std::log(2.0 * kPi) - std::log(spec.delta) -
                                 log_beta(0.5, 0.5 * (spec.p - 1));
    return std::exp(log_prefactor + 0.5 * (spec.p - 3) * std::log1p(-u * u) + 0.5 * z * z);
}

double boltzmann_risk_exact(double beta, const GaussianClassSpec& spec, double rel_tol) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw DomainError("boltzmann_risk_exact: beta must be finite and >= 0");
    }
    spec.validate();
    const double delta = spec.delta;
    const int p = spec.p;
    auto log_weight = [&](double theta) {
        const double risk = normal_cdf(-delta * std::cos(theta));
        double lw = -beta * risk;
        if (p > 2) {
            const double s = std::sin(theta);
            if (s <= 0.0) return -std::numeric_limits<double>::infinity();
            lw += (p - 2) * std::log(s);
        }
        return lw;
    };

    // Locate the peak of the log weight so it can be subtracted and used as
    // a panel boundary.
    constexpr int kGrid = 4096;
    double best_theta = 0.5 * kPi;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < kGrid; ++i) {
        const double theta = kPi * i / kGrid;
        const double v = log_weight(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    double lo = std::max(0.0, best_theta - kPi / kGrid);
    double hi = std::min(kPi, best_theta + kPi / kGrid);
    constexpr double kGolden = 0.6180339887498949;
    for (int it = 0; it < 80; ++it) {
        const double a = hi - kGolden * (hi - lo);
        const double b = lo + kGolden * (hi - lo);
        if (log_weight(a) < log_weight(b)) lo = a;
        else hi = b;
    }
    const double peak = 0.5 * (lo + hi);
    const double shift = std::max(best, log_weight(peak));

    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    opt.initial_panels = 32;
    auto weight = [&](double theta) { return std::exp(log_weight(theta) - shift); };
    auto weighted_risk = [&](double theta) {
        return normal_cdf(-delta * std::cos(theta)) * weight(theta);
    };
    auto den_l = integrate(weight, 0.0, peak, opt);
    auto den_r = integrate(weight, peak, kPi, opt);
    auto num_l = integrate(weighted_risk, 0.0, peak, opt);
    auto num_r = integrate(weighted_risk, peak, kPi, opt);
    const double den = den_l.value + den_r.value;
    const double num = num_l.value + num_r.value;
    const double den_err = den_l.abs_error + den_r.abs_error;
    const double num_err = num_l.abs_error + num_r.abs_error;
    if (!(den > 0.0) || den_err > rel_tol * den || num_err > rel_tol * std::abs(num)) {
        std::ostringstream msg;
        msg << "boltzmann_risk_exact: quadrature did not converge (achieved relative error "
            << std::max(den_err / den, num_err / std::abs(num)) << ")";
        throw NumericalError(msg.str());
    }
    return num / den;
}

double hebbian_expected_risk(double m, const GaussianClassSpec& spec) {
    if (spec.delta == 0.0) return 0.5;
    if (!(m > 0.0)) throw DomainError("hebbian_expected_risk: m must be >= 1");
    const double d = spec.delta;
    return normal_cdf(-d / std::sqrt(1.0 + spec.p / (m * d * d)));
}

double hebbian_asymptote(double m, const GaussianClassSpec& spec) {
    if (!(m > 0.0)) throw DomainError("hebbian_asymptote: m must be >= 1");
    return normal_cdf(-spec.delta) * (1.0 + spec.p / (2.0 * m));
}

HebbianSimulation hebbian_simulate(std::int64_t m, const GaussianClassSpec& spec, int runs,
                                   std::uint64_t seed, int threads) {
    if (m <= 0) throw DomainError("hebbian_simulate: m must be >= 1");
    if (runs < 2) throw DomainError("hebbian_simulate: runs must be >= 2");
    spec.validate();
    HebbianSimulation out;
    out.run_risks.assign(static_cast<std::size_t>(runs), 0.0);
    const auto p = static_cast<std::size_t>(spec.p);
    parallel_for(static_cast<std::size_t>(runs), threads, [&](std::size_t run) {
        auto rng = Rng::stream(seed, {run});
        std::vector<double> w(p, 0.0);
        for (std::int64_t k = 0; k < m; ++k) {
            const double y = rng.uniform() < 0.5 ? -1.0 : 1.0;
            // y * x = delta * t + y * eta
            for (std::size_t j = 0; j < p; ++j) w[j] += spec.delta * spec.t[j] + y * rng.normal();
        }
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        const double cosine =
            std::clamp(std::inner_product(w.begin(), w.end(), spec.t.begin(), 0.0) / norm, -1.0, 1.0);
        out.run_risks[run] = normal_cdf(-spec.delta * cosine);
    });
    const auto est = mean_and_stderr(out.run_risks);
    out.mean_risk = est.mean;
    out.stderr_ = est.stderr_;
    return out;
}

}  // namespace risklab
