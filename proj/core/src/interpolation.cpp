#include "risklab/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "risklab/errors.hpp"

namespace risklab {

MonotoneCubic::MonotoneCubic(std::span<const double> xs, std::span<const double> ys,
                             bool extrapolate)
    : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()), extrapolate_(extrapolate) {
    const auto n = xs_.size();
    if (n < 2 || ys_.size() != n) throw DomainError("MonotoneCubic: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw DomainError("MonotoneCubic: nodes not increasing");
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    slopes_.assign(n, 0.0);
    if (n == 2) {
        slopes_[0] = slopes_[1] = delta[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) continue;
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
        return d;
    };
    slopes_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slopes_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::segment(double x) const {
    if (!extrapolate_ && (x < xs_.front() || x > xs_.back())) {
        throw DomainError("MonotoneCubic: evaluation outside the node range");
    }
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(i, xs_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const auto i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
           (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    const auto i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * ys_[i] + (-6 * t2 + 6 * t) * ys_[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
}

}  // namespace risklab
