#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace risklab {

/// Feature matrix (row-major, n x p) with integer class labels in [0, c).
struct LabelledDataset {
    std::size_t n = 0;
    std::size_t p = 0;
    int class_count = 2;
    std::vector<double> features;
    std::vector<int> labels;

    std::span<const double> row(std::size_t i) const { return {features.data() + i * p, p}; }
    std::span<double> row(std::size_t i) { return {features.data() + i * p, p}; }

    /// Throws DataError on out-of-range labels, wrong sizes, n = 0 or
    /// non-finite features.
    void validate() const;

    /// Rows selected by `indices`, in that order.
    LabelledDataset subset(std::span<const std::size_t> indices) const;

    /// Fraction of examples carrying each label.
    std::vector<double> label_marginal() const;
};

}  // namespace risklab
