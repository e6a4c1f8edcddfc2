#include "risklab/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "risklab/errors.hpp"

namespace risklab {

PredictorSpec PredictorSpec::sphere_linear(int input_dim) {
    PredictorSpec spec;
    spec.kind = PredictorKind::sphere_linear;
    spec.input_dim = input_dim;
    spec.validate();
    return spec;
}

PredictorSpec PredictorSpec::mlp(int input_dim, std::vector<int> layer_sizes) {
    PredictorSpec spec;
    spec.kind = PredictorKind::mlp;
    spec.input_dim = input_dim;
    spec.layer_sizes = std::move(layer_sizes);
    spec.validate();
    return spec;
}

int PredictorSpec::class_count() const {
    return kind == PredictorKind::sphere_linear ? 2 : layer_sizes.back();
}

void PredictorSpec::validate() const {
    if (input_dim < 1) throw DomainError("PredictorSpec: input_dim must be positive");
    if (kind == PredictorKind::sphere_linear) {
        if (!layer_sizes.empty()) throw DomainError("PredictorSpec: sphere_linear takes no layers");
        return;
    }
    if (layer_sizes.empty()) throw DomainError("PredictorSpec: mlp needs at least one layer");
    for (int s : layer_sizes) {
        if (s < 1) throw DomainError("PredictorSpec: layer sizes must be positive");
    }
    if (layer_sizes.back() < 2) throw DomainError("PredictorSpec: mlp needs >= 2 output classes");
}

std::size_t weight_count(const PredictorSpec& spec) {
    spec.validate();
    if (spec.kind == PredictorKind::sphere_linear) return static_cast<std::size_t>(spec.input_dim);
    std::size_t total = 0;
    std::size_t fan_in = static_cast<std::size_t>(spec.input_dim);
    for (int s : spec.layer_sizes) {
        total += (fan_in + 1) * static_cast<std::size_t>(s);
        fan_in = static_cast<std::size_t>(s);
    }
    return total;
}

void check_weights(const PredictorSpec& spec, const WeightVector& w) {
    if (w.values.size() != weight_count(spec)) {
        throw DomainError("weights: length " + std::to_string(w.values.size()) +
                          " does not match spec (" + std::to_string(weight_count(spec)) + ")");
    }
    if (spec.kind == PredictorKind::sphere_linear) {
        if (w.constraint != WeightConstraint::unit_sphere) {
            throw DomainError("weights: sphere_linear needs unit_sphere weights");
        }
        const double norm = std::sqrt(
            std::inner_product(w.values.begin(), w.values.end(), w.values.begin(), 0.0));
        if (std::abs(norm - 1.0) > 1e-10) throw DomainError("weights: not unit norm");
    }
}

namespace {

// Forward pass with caller-owned scratch; returns the predicted class.
class Forward {
  public:
    explicit Forward(const PredictorSpec& spec) : spec_(spec) {
        std::size_t widest = static_cast<std::size_t>(spec.input_dim);
        for (int s : spec.layer_sizes) widest = std::max(widest, static_cast<std::size_t>(s));
        a_.resize(widest);
        b_.resize(widest);
    }

    int operator()(std::span<const double> w, std::span<const double> x) {
        if (spec_.kind == PredictorKind::sphere_linear) {
            return std::inner_product(w.begin(), w.end(), x.begin(), 0.0) > 0.0 ? 1 : 0;
        }
        std::copy(x.begin(), x.end(), a_.begin());
        std::size_t fan_in = x.size();
        std::size_t offset = 0;
        const std::size_t layers = spec_.layer_sizes.size();
        for (std::size_t l = 0; l < layers; ++l) {
            const auto fan_out = static_cast<std::size_t>(spec_.layer_sizes[l]);
            const bool hidden = l + 1 < layers;
            for (std::size_t j = 0; j < fan_out; ++j) {
                const double* row = w.data() + offset + j * (fan_in + 1);
                double z = row[fan_in];
                for (std::size_t i = 0; i < fan_in; ++i) z += row[i] * a_[i];
                b_[j] = hidden ? std::max(z, 0.0) : z;
            }
            offset += (fan_in + 1) * fan_out;
            fan_in = fan_out;
            std::swap(a_, b_);
        }
        std::size_t best = 0;
        for (std::size_t j = 1; j < fan_in; ++j) {
            if (a_[j] > a_[best]) best = j;
        }
        return static_cast<int>(best);
    }

  private:
    const PredictorSpec& spec_;
    std::vector<double> a_, b_;
};

}  // namespace

int predict(const PredictorSpec& spec, const WeightVector& w, std::span<const double> x) {
    check_weights(spec, w);
    if (x.size() != static_cast<std::size_t>(spec.input_dim)) {
        throw DomainError("predict: feature length does not match input_dim");
    }
    Forward forward(spec);
    return forward(w.values, x);
}

std::size_t misclassified(const PredictorSpec& spec, const WeightVector& w,
                          const LabelledDataset& data, std::span<const std::size_t> indices) {
    check_weights(spec, w);
    if (data.p != static_cast<std::size_t>(spec.input_dim)) {
        throw DomainError("empirical_risk: dataset dimension does not match input_dim");
    }
    Forward forward(spec);
    std::size_t wrong = 0;
    if (indices.empty()) {
        for (std::size_t i = 0; i < data.n; ++i) wrong += forward(w.values, data.row(i)) != data.labels[i];
    } else {
        for (auto i : indices) {
            if (i >= data.n) throw DomainError("empirical_risk: index out of range");
            wrong += forward(w.values, data.row(i)) != data.labels[i];
        }
    }
    return wrong;
}

double empirical_risk(const PredictorSpec& spec, const WeightVector& w,
                      const LabelledDataset& data, std::span<const std::size_t> indices) {
    const std::size_t total = indices.empty() ? data.n : indices.size();
    if (total == 0) throw DomainError("empirical_risk: empty evaluation set");
    return static_cast<double>(misclassified(spec, w, data, indices)) / static_cast<double>(total);
}

WeightVector random_weights(const PredictorSpec& spec, double scale, Rng& rng) {
    if (!(scale > 0.0)) throw DomainError("random_weights: scale must be positive");
    WeightVector w;
    w.values.resize(weight_count(spec));
    for (auto& v : w.values) v = scale * rng.normal();
    if (spec.kind == PredictorKind::sphere_linear) {
        w.constraint = WeightConstraint::unit_sphere;
        const double norm = std::sqrt(
            std::inner_product(w.values.begin(), w.values.end(), w.values.begin(), 0.0));
        for (auto& v : w.values) v /= norm;
    }
    return w;
}

WeightVector random_weights(const PredictorSpec& spec, double scale, std::uint64_t seed) {
    auto rng = Rng::stream(seed, {});
    return random_weights(spec, scale, rng);
}

}  // namespace risklab
