#include "risklab/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "risklab/errors.hpp"
#include "risklab/parallel.hpp"
#include "risklab/special.hpp"

namespace risklab {

void ChainConfig::validate() const {
    if (samples < 1) throw DomainError("ChainConfig: samples must be >= 1");
    if (thin < 1) throw DomainError("ChainConfig: thin must be >= 1");
    if (!(proposal_scale > 0.0)) throw DomainError("ChainConfig: proposal_scale must be > 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("ChainConfig: beta must be >= 0");
    if (kind == SamplerKind::minibatch && inner_steps < 1) {
        throw DomainError("ChainConfig: inner_steps must be >= 1");
    }
}

RiskTarget dataset_risk_target(const PredictorSpec& spec, const LabelledDataset& acceptance_data,
                               const LabelledDataset& report_data) {
    RiskTarget target;
    target.acceptance = [&spec, &acceptance_data](const WeightVector& w) {
        return empirical_risk(spec, w, acceptance_data);
    };
    target.report = [&spec, &report_data](const WeightVector& w) {
        return empirical_risk(spec, w, report_data);
    };
    target.minibatch = [&spec, &acceptance_data](const WeightVector& w,
                                                 std::span<const std::size_t> batch) {
        return empirical_risk(spec, w, acceptance_data, batch);
    };
    target.dataset_size = acceptance_data.n;
    return target;
}

RiskTarget exact_perceptron_target(const GaussianClassSpec& spec) {
    spec.validate();
    RiskTarget target;
    target.acceptance = [spec](const WeightVector& w) {
        double dot = 0.0, norm2 = 0.0;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            dot += w.values[i] * spec.t[i];
            norm2 += w.values[i] * w.values[i];
        }
        return normal_cdf(-spec.delta * std::clamp(dot / std::sqrt(norm2), -1.0, 1.0));
    };
    return target;
}

WeightVector propose(const WeightVector& w, double scale, Rng& rng) {
    WeightVector next = w;
    for (auto& v : next.values) v += scale * rng.normal();
    if (next.constraint == WeightConstraint::unit_sphere) {
        const double norm = std::sqrt(
            std::inner_product(next.values.begin(), next.values.end(), next.values.begin(), 0.0));
        if (!(norm > 0.0)) return w;
        for (auto& v : next.values) v /= norm;
    }
    return next;
}

namespace {

WeightVector draw_proposal(const RiskTarget& target, const WeightVector& w, double scale,
                           Rng& rng) {
    return target.proposal ? target.proposal(w, scale, rng) : propose(w, scale, rng);
}

void require_finite(double risk, const ChainState& state) {
    if (!std::isfinite(risk)) {
        std::ostringstream msg;
        msg << "mcmc: non-finite risk after " << state.steps_taken << " steps ("
            << state.accepts << " accepted, current risk " << state.current_acceptance_risk << ")";
        throw NumericalError(msg.str());
    }
}

void commit(ChainState& state, bool accept, WeightVector&& proposal, double risk) {
    ++state.steps_taken;
    state.last_accepted = accept;
    if (accept) {
        ++state.accepts;
        state.w = std::move(proposal);
        state.current_acceptance_risk = risk;
    }
}

// Metropolis test for a log target difference; ties and improvements are
// accepted without consuming a variate.
bool metropolis_accept(double log_ratio, Rng& rng) {
    if (log_ratio >= 0.0) return true;
    return rng.uniform() < std::exp(log_ratio);
}

}  // namespace

void metropolis_step(ChainState& state, const ChainConfig& config, const RiskTarget& target,
                     Rng& rng) {
    auto proposal = draw_proposal(target, state.w, config.proposal_scale, rng);
    const double risk = target.acceptance(proposal);
    require_finite(risk, state);
    const double log_ratio = -config.beta * (risk - state.current_acceptance_risk);
    const bool accept = risk <= state.current_acceptance_risk || metropolis_accept(log_ratio, rng);
    commit(state, accept, std::move(proposal), risk);
}

void annealed_step(ChainState& state, double m, const ChainConfig& config,
                   const RiskTarget& target, Rng& rng) {
    if (!(m >= 0.0)) throw DomainError("annealed_step: m must be >= 0");
    auto proposal = draw_proposal(target, state.w, config.proposal_scale, rng);
    const double risk = target.acceptance(proposal);
    require_finite(risk, state);
    const double current = state.current_acceptance_risk;
    bool accept;
    if (m == 0.0 || risk <= current) {
        accept = true;
    } else if (risk >= 1.0) {
        accept = false;
    } else {
        // current < risk < 1 here, so both logs are finite.
        accept = metropolis_accept(m * (std::log1p(-risk) - std::log1p(-current)), rng);
    }
    commit(state, accept, std::move(proposal), risk);
}

void minibatch_proposal_step(ChainState& state, const ChainConfig& config, std::size_t n_inner,
                             std::size_t batch_size, const RiskTarget& target, Rng& rng) {
    if (n_inner < 1) throw DomainError("minibatch_proposal_step: n_inner must be >= 1");
    const std::size_t n = target.dataset_size;
    if (batch_size < 1 || batch_size > n) {
        throw DomainError("minibatch_proposal_step: batch_size must be in [1, dataset size]");
    }
    if (!target.minibatch) throw DomainError("minibatch_proposal_step: no minibatch risk");

    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    const bool full_batch = batch_size == n;
    std::vector<std::size_t> batch;

    WeightVector current = state.w;
    bool moved = false;
    double batch_risk_last = 0.0;
    for (std::size_t i = 0; i < n_inner; ++i) {
        if (full_batch) {
            batch = pool;
        } else {
            // Partial Fisher-Yates: first batch_size entries form the batch.
            for (std::size_t k = 0; k < batch_size; ++k) {
                const auto j = k + static_cast<std::size_t>(rng.below(n - k));
                std::swap(pool[k], pool[j]);
            }
            batch.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(batch_size));
        }
        auto candidate = draw_proposal(target, current, config.proposal_scale, rng);
        const double r_current = target.minibatch(current, batch);
        const double r_candidate = target.minibatch(candidate, batch);
        require_finite(r_current, state);
        require_finite(r_candidate, state);
        const bool accept = r_candidate <= r_current ||
                            metropolis_accept(-config.beta * (r_candidate - r_current), rng);
        if (accept) {
            current = std::move(candidate);
            batch_risk_last = r_candidate;
            moved = true;
        } else {
            batch_risk_last = r_current;
        }
    }
    if (!moved) {
        // Identity proposal: the outer test passes trivially and the state is
        // unchanged, which is counted as a non-move.
        commit(state, false, std::move(current), state.current_acceptance_risk);
        return;
    }
    const double full = target.acceptance(current);
    require_finite(full, state);
    const bool accept = full <= batch_risk_last ||
                        metropolis_accept(-config.beta * (full - batch_risk_last), rng);
    commit(state, accept, std::move(current), full);
}

namespace {

void advance(ChainState& state, const ChainConfig& config, const RiskTarget& target, Rng& rng) {
    switch (config.kind) {
        case SamplerKind::boltzmann:
            metropolis_step(state, config, target, rng);
            break;
        case SamplerKind::annealed:
            annealed_step(state, config.beta, config, target, rng);
            break;
        case SamplerKind::minibatch:
            minibatch_proposal_step(state, config, config.inner_steps,
                                    config.batch_size ? config.batch_size : target.dataset_size,
                                    target, rng);
            break;
    }
}

}  // namespace

ChainResult run_chain(const ChainConfig& config_in, const PredictorSpec& spec,
                      const RiskTarget& target, std::optional<WeightVector> initial) {
    config_in.validate();
    if (!target.acceptance) throw DomainError("run_chain: no acceptance risk");
    ChainConfig config = config_in;
    auto rng = Rng::stream(config.seed, {0});

    ChainState state;
    if (initial) {
        check_weights(spec, *initial);
        state.w = std::move(*initial);
    } else {
        auto init_rng = Rng::stream(config.seed, {1});
        state.w = random_weights(spec, config.init_scale, init_rng);
    }
    state.current_acceptance_risk = target.acceptance(state.w);
    require_finite(state.current_acceptance_risk, state);

    if (config.calibrate) {
        constexpr std::size_t kWindow = 200;
        for (std::size_t done = 0; done < config.calibration_steps; done += kWindow) {
            const auto before = state.accepts;
            for (std::size_t k = 0; k < kWindow; ++k) advance(state, config, target, rng);
            const double rate = static_cast<double>(state.accepts - before) / kWindow;
            if (rate < config.calibration_low) config.proposal_scale *= 0.7;
            else if (rate > config.calibration_high) config.proposal_scale *= 1.4;
        }
        state.steps_taken = 0;
        state.accepts = 0;
    }

    ChainResult result;
    result.proposal_scale = config.proposal_scale;
    for (std::size_t k = 0; k < config.burn_in; ++k) advance(state, config, target, rng);
    result.samples.reserve(config.samples);
    std::vector<double> report, acceptance;
    report.reserve(config.samples);
    acceptance.reserve(config.samples);
    for (std::size_t s = 0; s < config.samples; ++s) {
        for (std::size_t k = 0; k < config.thin; ++k) advance(state, config, target, rng);
        if (config.validate_cache) {
            const double fresh = target.acceptance(state.w);
            if (fresh != state.current_acceptance_risk) {
                throw NumericalError("run_chain: cached acceptance risk is stale");
            }
        }
        const double rep = target.report ? target.report(state.w) : state.current_acceptance_risk;
        result.samples.push_back({state.steps_taken, state.current_acceptance_risk, rep,
                                  state.last_accepted});
        report.push_back(rep);
        acceptance.push_back(state.current_acceptance_risk);
    }
    if (report.size() >= 2) {
        result.report = batch_means(report);
        result.acceptance = batch_means(acceptance);
    } else {
        result.report = {report.front(), 0.0, 1.0};
        result.acceptance = {acceptance.front(), 0.0, 1.0};
    }
    result.acceptance_rate =
        state.steps_taken ? static_cast<double>(state.accepts) / static_cast<double>(state.steps_taken)
                          : 0.0;
    result.final_state = std::move(state);
    return result;
}

SweepResult boltzmann_sweep(std::span<const double> beta_grid, const ChainConfig& base,
                            const PredictorSpec& spec, const RiskTarget& target,
                            const SweepOptions& options) {
    if (beta_grid.empty()) throw DomainError("boltzmann_sweep: empty grid");
    for (std::size_t i = 1; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > beta_grid[i - 1])) {
            throw DomainError("boltzmann_sweep: grid must be strictly increasing");
        }
    }
    if (options.chains < 1) throw DomainError("boltzmann_sweep: need at least one chain");
    const std::size_t levels = beta_grid.size();
    const auto chains = static_cast<std::size_t>(options.chains);
    SweepResult out;
    out.chains.assign(levels, std::vector<ChainResult>(chains));

    auto config_for = [&](std::size_t i, std::size_t c) {
        ChainConfig cfg = base;
        cfg.beta = beta_grid[i];
        cfg.seed = Rng::stream(base.seed, {i, c}).key();
        return cfg;
    };

    if (options.warm_start) {
        parallel_for(chains, options.threads, [&](std::size_t c) {
            std::optional<WeightVector> start;
            for (std::size_t i = 0; i < levels; ++i) {
                auto cfg = config_for(i, c);
                if (start) cfg.proposal_scale = out.chains[i - 1][c].proposal_scale;
                out.chains[i][c] = run_chain(cfg, spec, target, start);
                start = out.chains[i][c].final_state.w;
            }
        });
    } else {
        parallel_for(levels * chains, options.threads, [&](std::size_t job) {
            const std::size_t i = job / chains, c = job % chains;
            out.chains[i][c] = run_chain(config_for(i, c), spec, target);
        });
    }

    for (std::size_t i = 0; i < levels; ++i) {
        std::vector<MeanEstimate> parts;
        double rate = 0.0;
        for (const auto& ch : out.chains[i]) {
            parts.push_back(ch.report);
            rate += ch.acceptance_rate;
        }
        auto combined = combine_equal(parts);
        if (parts.size() >= 2) {
            // Chains that have not mixed disagree by more than their own
            // batch-means errors suggest; the spread of chain means bounds that.
            std::vector<double> means;
            for (const auto& part : parts) means.push_back(part.mean);
            combined.stderr_ = std::max(combined.stderr_, mean_and_stderr(means).stderr_);
        }
        out.curve.points.push_back({beta_grid[i], combined.mean, combined.stderr_,
                                    rate / static_cast<double>(chains),
                                    combined.effective_samples});
    }
    return out;
}

}  // namespace risklab
