#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "risklab/analytic_perceptron.hpp"
#include "risklab/dataset.hpp"
#include "risklab/predictors.hpp"

namespace risklab {

/// n examples of the two-Gaussian problem: label y uniform on {0,1},
/// x = (2y - 1) delta t + eta with eta ~ N(0, I_p).
LabelledDataset gen_gaussian_pair(const GaussianClassSpec& spec, std::size_t n,
                                  std::uint64_t seed);

/// Parse IDX image (magic 0x00000803, dims n x rows x cols, unsigned bytes)
/// and label (magic 0x00000801, dim n) files. Pixels are scaled by 1/255
/// and flattened row-major. class_count is max label + 1 (at least 2).
LabelledDataset load_idx(const std::filesystem::path& image_path,
                         const std::filesystem::path& label_path);
LabelledDataset parse_idx(std::istream& images, std::istream& labels);

/// Inverse of parse_idx for datasets whose features are k/255 values and
/// whose labels fit in a byte. `rows * cols` must equal p.
void write_idx(const LabelledDataset& data, std::uint32_t rows, std::uint32_t cols,
               std::ostream& images, std::ostream& labels);

/// Same features, labels replaced by the teacher's predictions.
LabelledDataset teacher_relabel(const LabelledDataset& data, const PredictorSpec& spec,
                                const WeightVector& teacher);

/// Random disjoint partition: the first part has ceil(fraction * n) rows.
std::pair<LabelledDataset, LabelledDataset> split(const LabelledDataset& data, double fraction,
                                                  std::uint64_t seed);

/// Index form of `split`, for callers that want to keep one dataset.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed);

/// CSV with header `label,f0,f1,...`, 17 significant digits.
void write_dataset_csv(const LabelledDataset& data, std::ostream& out);
LabelledDataset read_dataset_csv(std::istream& in, int class_count = 0);

/// FNV-1a 64-bit hash of the labels and the IEEE bits of the features.
std::uint64_t dataset_fingerprint(const LabelledDataset& data);

}  // namespace risklab
