#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "risklab/errors.hpp"

namespace risklab {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct RootOptions {
    /// Stop when |f(x)| <= f_tol.
    double f_tol = 0.0;
    /// Stop when the bracket is narrower than x_tol (0 = adjacent doubles).
    double x_tol = 0.0;
    /// Bisections performed before secant steps are attempted.
    int bisections = 20;
    int max_iterations = 400;
};

/// Root of f on [lo, hi] given a sign change. Bisection first, then
/// secant steps kept inside the bracket (falls back to bisection when a
/// secant step leaves it or fails to shrink the bracket enough).
template <class F>
RootResult find_root(F&& f, double lo, double hi, const RootOptions& opt = {}) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || (f_lo > 0) == (f_hi > 0)) {
        if (f_lo == 0.0) return {lo, 0.0, 0};
        if (f_hi == 0.0) return {hi, 0.0, 0};
        std::ostringstream msg;
        msg.precision(17);
        msg << "find_root: no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo
            << ", f(hi)=" << f_hi;
        throw NumericalError(msg.str());
    }
    RootResult best{std::abs(f_lo) < std::abs(f_hi) ? lo : hi,
                    std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi, 0};
    int retained = 0;  // +1: lo kept last step, -1: hi kept (Illinois bookkeeping)
    for (int it = 0; it < opt.max_iterations; ++it) {
        double x;
        if (it >= opt.bisections) {
            x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        } else {
            x = 0.5 * (lo + hi);
        }
        if (!(x > lo && x < hi)) break;  // adjacent doubles
        const double fx = f(x);
        if (!std::isfinite(fx)) throw NumericalError("find_root: non-finite function value");
        if (std::abs(fx) < std::abs(best.residual)) best = {x, fx, it + 1};
        best.iterations = it + 1;
        if (std::abs(fx) <= opt.f_tol) return {x, fx, it + 1};
        if ((fx > 0) == (f_lo > 0)) {
            lo = x;
            f_lo = fx;
            if (retained == -1) f_hi *= 0.5;
            retained = -1;
        } else {
            hi = x;
            f_hi = fx;
            if (retained == 1) f_lo *= 0.5;
            retained = 1;
        }
        if (opt.x_tol > 0 && hi - lo <= opt.x_tol) break;
    }
    return best;
}

}  // namespace risklab
