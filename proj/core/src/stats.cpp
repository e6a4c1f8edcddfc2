#include "risklab/stats.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "risklab/errors.hpp"

namespace risklab {

MeanEstimate mean_and_stderr(std::span<const double> xs) {
    const auto n = xs.size();
    if (n < 2) throw DomainError("mean_and_stderr: need at least two samples");
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), static_cast<double>(n)};
}

MeanEstimate batch_means(std::span<const double> xs, std::size_t batches) {
    const auto n = xs.size();
    if (n < 2) throw DomainError("batch_means: need at least two samples");
    batches = std::min(batches, n);
    if (batches < 2) batches = 2;
    const std::size_t size = n / batches;
    // Leading samples that do not fill a batch are dropped from the error
    // estimate but kept in the mean.
    const std::size_t offset = n - size * batches;
    std::vector<double> block(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < size; ++i) s += xs[offset + b * size + i];
        block[b] = s / static_cast<double>(size);
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const auto block_est = mean_and_stderr(block);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n - 1);
    const double se = block_est.stderr_;
    const double ess = se > 0.0 ? var / (se * se) : static_cast<double>(n);
    return {mean, se, std::min(ess, static_cast<double>(n))};
}

MeanEstimate combine_equal(std::span<const MeanEstimate> parts) {
    if (parts.empty()) throw DomainError("combine_equal: no estimates");
    const double k = static_cast<double>(parts.size());
    MeanEstimate out;
    double var = 0.0;
    for (const auto& p : parts) {
        out.mean += p.mean;
        var += p.stderr_ * p.stderr_;
        out.effective_samples += p.effective_samples;
    }
    out.mean /= k;
    out.stderr_ = std::sqrt(var) / k;
    return out;
}

IsotonicResult isotonic_nonincreasing(std::span<const double> ys,
                                      std::span<const double> weights) {
    struct Block {
        double sum_wy, sum_w;
        std::size_t count;
    };
    std::vector<Block> blocks;
    IsotonicResult out;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        blocks.push_back({w * ys[i], w, 1});
        while (blocks.size() > 1) {
            auto& last = blocks.back();
            auto& prev = blocks[blocks.size() - 2];
            if (prev.sum_wy / prev.sum_w >= last.sum_wy / last.sum_w) break;
            prev.sum_wy += last.sum_wy;
            prev.sum_w += last.sum_w;
            prev.count += last.count;
            blocks.pop_back();
            out.pooled = true;
        }
    }
    out.values.reserve(ys.size());
    for (const auto& b : blocks) out.values.insert(out.values.end(), b.count, b.sum_wy / b.sum_w);
    return out;
}

LineFit weighted_line_fit(std::span<const double> xs, std::span<const double> ys,
                          std::span<const double> weights) {
    if (xs.size() != ys.size() || xs.size() != weights.size() || xs.size() < 2) {
        throw DomainError("weighted_line_fit: need >= 2 points of matching length");
    }
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += weights[i];
        sx += weights[i] * xs[i];
        sy += weights[i] * ys[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += weights[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += weights[i] * (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0) throw DomainError("weighted_line_fit: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.slope_stderr = std::sqrt(1.0 / sxx);
    return fit;
}

std::vector<double> polynomial_fit(std::span<const double> xs, std::span<const double> ys,
                                   int degree) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    if (xs.size() != ys.size() || n < degree + 1) {
        throw DomainError("polynomial_fit: need at least degree+1 points");
    }
    Eigen::MatrixXd design(n, degree + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = 1.0;
        for (int k = 0; k <= degree; ++k) {
            design(i, k) = v;
            v *= xs[static_cast<std::size_t>(i)];
        }
        rhs(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
    return {c.data(), c.data() + c.size()};
}

}  // namespace risklab
