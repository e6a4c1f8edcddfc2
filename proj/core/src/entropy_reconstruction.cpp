#include "risklab/entropy_reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include "risklab/errors.hpp"
#include "risklab/gibbs.hpp"
#include "risklab/interpolation.hpp"
#include "risklab/stats.hpp"

namespace risklab {

EntropyCurve reconstruct(const BoltzmannCurve& curve, double anchor_s0) {
    const auto& pts = curve.points;
    if (pts.empty()) throw DomainError("reconstruct: empty Boltzmann curve");
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].beta > pts[i - 1].beta)) {
            throw DomainError("reconstruct: beta values must be strictly increasing");
        }
    }
    std::vector<double> rs, weights;
    bool all_positive = true;
    for (const auto& p : pts) {
        rs.push_back(p.mean_risk);
        all_positive = all_positive && p.stderr_ > 0.0;
    }
    for (const auto& p : pts) weights.push_back(all_positive ? 1.0 / (p.stderr_ * p.stderr_) : 1.0);
    const auto iso = isotonic_nonincreasing(rs, weights);

    EntropyCurve out;
    out.anchor_r = iso.values.front();
    out.anchor_s = anchor_s0;
    out.pooled = iso.pooled;
    double s = anchor_s0;
    out.points.push_back({iso.values.front(), s, pts.front().beta, iso.values.front() != rs.front()});
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double dr = iso.values[i] - iso.values[i - 1];
        s += 0.5 * (pts[i].beta + pts[i - 1].beta) * dr;
        const bool pooled = iso.values[i] != rs[i];
        if (dr == 0.0) {
            // Same pooled risk as the previous point: fold into it.
            out.points.back().pooled = out.points.back().pooled || pooled;
            continue;
        }
        out.points.push_back({iso.values[i], s, pts[i].beta, pooled});
    }
    return out;
}

QuadraticFit quadratic_fit(const EntropyCurve& curve) {
    if (curve.points.size() < 3) throw DomainError("quadratic_fit: need at least 3 points");
    std::vector<double> rs, ss;
    for (const auto& p : curve.points) {
        rs.push_back(p.r);
        ss.push_back(p.s);
    }
    const auto c = polynomial_fit(rs, ss, 2);
    QuadraticFit fit{c[0], c[1], c[2], 0.0};
    double sq = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double e = ss[i] - (c[0] + c[1] * rs[i] + c[2] * rs[i] * rs[i]);
        sq += e * e;
    }
    fit.residual_rms = std::sqrt(sq / static_cast<double>(rs.size()));
    return fit;
}

double predicted_annealed_risk(const EntropyCurve& curve, double m, bool extrapolate) {
    if (curve.points.size() < 2) throw DomainError("predicted_annealed_risk: need >= 2 points");
    std::vector<double> rs, ss;
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
        rs.push_back(it->r);
        ss.push_back(it->s);
    }
    const MonotoneCubic s_of_r(rs, ss, extrapolate);
    const auto model = annealed_mu(m);
    Interval range{rs.front(), rs.back()};
    if (extrapolate) range.lo = std::max(1e-12, range.lo - (range.hi - range.lo));
    auto s_prime = [&](double r) { return s_of_r.derivative(r); };
    const double g_lo = s_prime(range.lo) + model.mu_derivative(range.lo);
    const double g_hi = s_prime(range.hi) + model.mu_derivative(range.hi);
    if (g_lo > 0.0 && g_hi > 0.0) return range.hi;
    if (g_lo < 0.0 && g_hi < 0.0) return range.lo;
    return gibbs_risk_saddle(s_prime, model, range);
}

}  // namespace risklab
