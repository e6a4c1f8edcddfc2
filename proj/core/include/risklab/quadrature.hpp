#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace risklab {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
    /// Number of equal panels the interval is split into before adaptation.
    /// Sharply peaked integrands need enough panels that one node lands
    /// inside the peak.
    int initial_panels = 1;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature on a finite interval.
/// The segment with the largest error estimate is bisected until the summed
/// error meets max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    const int panels = std::max(1, opt.initial_panels);
    const double width = (b - a) / panels;
    double total = 0.0;
    double error = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == panels) ? b : a + (i + 1) * width;
        auto seg = detail::gk15(f, lo, hi);
        total += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    out.evaluations = 15 * panels;
    int splits = 0;
    while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
           splits < opt.max_subdivisions) {
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
        heap.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    // Re-sum to shed accumulated cancellation from the running totals.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = error;
    out.converged = std::isfinite(total) &&
                    error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return out;
}

/// Integral over the whole real line using x = u / (1 - u^2), u in (-1, 1).
template <class F>
QuadratureResult integrate_real_line(F&& f, const QuadratureOptions& opt = {}) {
    auto mapped = [&f](double u) {
        const double d = 1.0 - u * u;
        if (d <= 0.0) return 0.0;
        const double x = u / d;
        const double v = f(x);
        if (v == 0.0) return 0.0;
        return v * (1.0 + u * u) / (d * d);
    };
    return integrate(mapped, -1.0, 1.0, opt);
}

}  // namespace risklab
