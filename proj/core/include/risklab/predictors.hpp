#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "risklab/dataset.hpp"
#include "risklab/random.hpp"

namespace risklab {

enum class PredictorKind { sphere_linear, mlp };

/// Architecture of a forward-only classifier. For an MLP, `layer_sizes`
/// lists the widths after the input (the last one is the class count);
/// hidden layers use a rectifier, the output layer raw scores.
struct PredictorSpec {
    PredictorKind kind = PredictorKind::sphere_linear;
    int input_dim = 1;
    std::vector<int> layer_sizes;

    static PredictorSpec sphere_linear(int input_dim);
    static PredictorSpec mlp(int input_dim, std::vector<int> layer_sizes);

    int class_count() const;
    void validate() const;
};

enum class WeightConstraint { unit_sphere, unconstrained };

struct WeightVector {
    std::vector<double> values;
    WeightConstraint constraint = WeightConstraint::unconstrained;
};

/// sphere_linear: input_dim; mlp: sum over layers of (fan_in + 1) * fan_out.
std::size_t weight_count(const PredictorSpec& spec);

/// Throws DomainError if the vector does not fit the spec (length, or unit
/// norm for sphere_linear within 1e-10).
void check_weights(const PredictorSpec& spec, const WeightVector& w);

/// Class index for one feature vector. sphere_linear: [w.x > 0];
/// mlp: argmax of the output scores, lowest index on ties.
int predict(const PredictorSpec& spec, const WeightVector& w, std::span<const double> x);

/// Fraction of misclassified examples among `indices` (all rows when empty).
double empirical_risk(const PredictorSpec& spec, const WeightVector& w,
                      const LabelledDataset& data, std::span<const std::size_t> indices = {});

/// Misclassification count, the exact integer behind `empirical_risk`.
std::size_t misclassified(const PredictorSpec& spec, const WeightVector& w,
                          const LabelledDataset& data, std::span<const std::size_t> indices = {});

/// Independent N(0, scale^2) entries; sphere_linear vectors are then
/// projected to unit norm.
WeightVector random_weights(const PredictorSpec& spec, double scale, std::uint64_t seed);
WeightVector random_weights(const PredictorSpec& spec, double scale, Rng& rng);

}  // namespace risklab
