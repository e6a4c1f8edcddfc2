#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace risklab {

struct MeanEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    /// Effective number of independent samples behind `stderr_`.
    double effective_samples = 0.0;
};

/// Sample mean with the naive i.i.d. standard error (n >= 2).
MeanEstimate mean_and_stderr(std::span<const double> xs);

/// Mean with a batch-means standard error: the series is cut into
/// `batches` contiguous blocks and the spread of block means is used.
/// Falls back to fewer batches for short series.
MeanEstimate batch_means(std::span<const double> xs, std::size_t batches = 20);

/// Combine independent estimates of the same quantity with equal weight.
MeanEstimate combine_equal(std::span<const MeanEstimate> parts);

struct IsotonicResult {
    std::vector<double> values;
    bool pooled = false;  ///< true if any adjacent violators were merged
};

/// Weighted least-squares non-increasing fit (pool adjacent violators).
IsotonicResult isotonic_nonincreasing(std::span<const double> ys,
                                      std::span<const double> weights = {});

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

/// Weighted least-squares straight line. The slope error assumes the
/// weights are inverse variances of the ys.
LineFit weighted_line_fit(std::span<const double> xs, std::span<const double> ys,
                          std::span<const double> weights);

/// Least-squares polynomial coefficients c0 + c1 x + ... + c_d x^d.
std::vector<double> polynomial_fit(std::span<const double> xs, std::span<const double> ys,
                                   int degree);

}  // namespace risklab
