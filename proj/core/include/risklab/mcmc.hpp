#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "risklab/analytic_perceptron.hpp"
#include "risklab/dataset.hpp"
#include "risklab/predictors.hpp"
#include "risklab/random.hpp"
#include "risklab/stats.hpp"

namespace risklab {

using RiskFunction = std::function<double(const WeightVector&)>;
/// Risk of a weight vector on a minibatch given by row indices.
using BatchRiskFunction = std::function<double(const WeightVector&, std::span<const std::size_t>)>;
/// Symmetric proposal kernel q(w'|w) = q(w|w').
using ProposalFunction = std::function<WeightVector(const WeightVector&, double, Rng&)>;

enum class SamplerKind {
    boltzmann,  ///< target exp(-beta R(w))
    annealed,   ///< target (1 - R(w))^m
    minibatch,  ///< exp(-beta R(w)) with minibatch compound proposals
};

struct ChainConfig {
    SamplerKind kind = SamplerKind::boltzmann;
    /// Inverse temperature, or the sample count m for the annealed sampler.
    double beta = 0.0;
    double proposal_scale = 0.1;
    std::size_t burn_in = 1000;
    std::size_t samples = 1000;
    std::size_t thin = 10;
    std::uint64_t seed = 0;
    /// Scale of the random initial weights (ignored on the sphere).
    double init_scale = 1.0;

    /// Optional pre-burn-in tuning of proposal_scale towards an acceptance
    /// rate inside [calibration_low, calibration_high].
    bool calibrate = false;
    std::size_t calibration_steps = 4000;
    double calibration_low = 0.2;
    double calibration_high = 0.4;

    /// Minibatch sampler settings.
    std::size_t inner_steps = 2;
    std::size_t batch_size = 0;

    /// Recompute the acceptance risk at every record and compare with the
    /// cached value.
    bool validate_cache = false;

    void validate() const;
};

struct ChainState {
    WeightVector w;
    double current_acceptance_risk = 0.0;
    std::uint64_t steps_taken = 0;
    std::uint64_t accepts = 0;
    bool last_accepted = false;
};

/// What a chain is driven by and what it reports. `acceptance` is the risk
/// inside the acceptance rule (training split); `report` is recorded at
/// sample time (held-out split) and defaults to the acceptance risk.
struct RiskTarget {
    RiskFunction acceptance;
    RiskFunction report;
    BatchRiskFunction minibatch;
    std::size_t dataset_size = 0;
    ProposalFunction proposal;  ///< empty means `propose`
};

/// Risk target backed by datasets: acceptance on `acceptance_data`, report
/// on `report_data`, minibatches drawn from `acceptance_data`. The datasets
/// must outlive the target.
RiskTarget dataset_risk_target(const PredictorSpec& spec, const LabelledDataset& acceptance_data,
                               const LabelledDataset& report_data);

/// Exact risk Phi(-delta cos(w, t)) of a sphere-linear machine on the
/// two-Gaussian problem; no data involved.
RiskTarget exact_perceptron_target(const GaussianClassSpec& spec);

/// Gaussian random-walk step; on the sphere the step is followed by
/// renormalisation, which keeps the kernel symmetric.
WeightVector propose(const WeightVector& w, double scale, Rng& rng);

/// Metropolis update for exp(-beta R): moves to lower or equal risk are
/// always taken, others with probability exp(-beta dR).
void metropolis_step(ChainState& state, const ChainConfig& config, const RiskTarget& target,
                     Rng& rng);

/// Metropolis update for (1 - R)^m, computed in log space. Moves into R = 1
/// are rejected (unless m = 0), moves out of R = 1 accepted.
void annealed_step(ChainState& state, double m, const ChainConfig& config,
                   const RiskTarget& target, Rng& rng);

/// Compound proposal from `n_inner` Metropolis steps on fresh minibatches,
/// then an outer test on the full acceptance risk: accept if
/// R(w_n) <= R_B(w_n), else with probability exp(-beta (R(w_n) - R_B(w_n))).
/// On rejection the state reverts to w_0.
void minibatch_proposal_step(ChainState& state, const ChainConfig& config, std::size_t n_inner,
                             std::size_t batch_size, const RiskTarget& target, Rng& rng);

struct ChainSample {
    std::uint64_t step = 0;
    double risk_acceptance = 0.0;
    double risk_report = 0.0;
    bool accepted = false;
};

struct ChainResult {
    std::vector<ChainSample> samples;
    ChainState final_state;
    MeanEstimate report;       ///< batch-means estimate of the reported risk
    MeanEstimate acceptance;   ///< same for the acceptance risk
    double acceptance_rate = 0.0;  ///< over burn-in and sampling steps
    double proposal_scale = 0.0;   ///< after calibration
};

/// Burn-in, then `samples` records every `thin` steps. Fully determined by
/// config.seed (and the initial state, when given).
ChainResult run_chain(const ChainConfig& config, const PredictorSpec& spec,
                      const RiskTarget& target, std::optional<WeightVector> initial = {});

struct BoltzmannPoint {
    double beta = 0.0;
    double mean_risk = 0.0;
    double stderr_ = 0.0;
    double acceptance_rate = 0.0;
    double effective_samples = 0.0;
};

struct BoltzmannCurve {
    std::vector<BoltzmannPoint> points;
};

struct SweepOptions {
    int chains = 4;
    /// Start each grid value from the previous value's final state.
    bool warm_start = true;
    int threads = 1;
};

struct SweepResult {
    BoltzmannCurve curve;
    /// chains[i][c]: chain c at grid value i.
    std::vector<std::vector<ChainResult>> chains;
};

/// One chain set per grid value, in grid order. Chain c at grid index i
/// uses seed stream (base.seed, i, c). `base.kind` selects the sampler;
/// for the annealed sampler the grid holds m values.
SweepResult boltzmann_sweep(std::span<const double> beta_grid, const ChainConfig& base,
                            const PredictorSpec& spec, const RiskTarget& target,
                            const SweepOptions& options = {});

}  // namespace risklab
