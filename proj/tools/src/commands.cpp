#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "context.hpp"
#include "risklab/analytic_perceptron.hpp"
#include "risklab/cli.hpp"
#include "risklab/datasets.hpp"
#include "risklab/entropy_reconstruction.hpp"
#include "risklab/errors.hpp"
#include "risklab/gardner_replica.hpp"
#include "risklab/io.hpp"
#include "risklab/mcmc.hpp"
#include "risklab/parallel.hpp"

namespace risklab::cli {

namespace {

template <class Opts>
std::shared_ptr<Opts> leaf(CLI::App& group, const std::string& name, const std::string& help,
                           Registry& reg, std::function<void(const Opts&, RunContext&)> run,
                           CLI::App** out_app) {
    auto opts = std::make_shared<Opts>();
    CLI::App* app = group.add_subcommand(name, help);
    add_common_options(*app, *reg.common);
    reg.actions[app] = [opts, run](RunContext& ctx) { run(*opts, ctx); };
    *out_app = app;
    return opts;
}

GaussianClassSpec gaussian_spec(int p, double delta) {
    try {
        return GaussianClassSpec::make(p, delta);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

LabelledDataset read_dataset(const std::string& path, int class_count = 0) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset " + path);
    return read_dataset_csv(in, class_count);
}

std::string table_csv(std::vector<std::string> header, std::vector<std::vector<double>> rows) {
    CsvTable t{std::move(header), std::move(rows)};
    return to_csv(t);
}

void write_dataset(RunContext& ctx, const LabelledDataset& data) {
    std::ostringstream s;
    write_dataset_csv(data, s);
    ctx.emit(s.str());
}

// ---------------------------------------------------------------- analytic

struct EntropyOpts {
    int p = 0;
    double delta = 0;
    int points = 99;
};

void run_perceptron_entropy(const EntropyOpts& o, RunContext& ctx) {
    const auto spec = gaussian_spec(o.p, o.delta);
    if (!(o.delta > 0)) throw UsageError("--delta must be positive");
    const double lo = spec.min_risk(), hi = 1.0 - lo;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < o.points; ++i) {
        const double r = lo + (hi - lo) * (i + 1) / (o.points + 1);
        rows.push_back({r, risk_entropy(r, spec), risk_entropy_per_feature_limit(r, o.delta),
                        std::log(risk_density(r, spec))});
    }
    ctx.emit(table_csv({"r", "s", "s_per_feature", "log_density"}, std::move(rows)));
}

struct BoltzmannRiskOpts {
    int p = 0;
    double delta = 0;
    std::string beta_grid;
    double rel_tol = 1e-10;
};

void run_boltzmann_risk(const BoltzmannRiskOpts& o, RunContext& ctx) {
    const auto spec = gaussian_spec(o.p, o.delta);
    const auto grid = parse_grid(o.beta_grid, "--beta-grid");
    std::vector<double> risk(grid.size());
    parallel_for(grid.size(), ctx.common().threads,
                 [&](std::size_t i) { risk[i] = boltzmann_risk_exact(grid[i], spec, o.rel_tol); });
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], risk[i]});
    ctx.emit(table_csv({"beta", "risk"}, std::move(rows)));
}

struct HebbianOpts {
    int p = 0;
    double delta = 0;
    std::string m_grid;
    int runs = 100;
};

void run_hebbian(const HebbianOpts& o, RunContext& ctx) {
    const auto spec = gaussian_spec(o.p, o.delta);
    std::vector<std::vector<double>> rows;
    for (double m : parse_grid(o.m_grid, "--m-grid")) rows.push_back({m, hebbian_expected_risk(m, spec)});
    ctx.emit(table_csv({"m", "risk"}, std::move(rows)));
}

struct GardnerOpts {
    std::string alpha_grid;
};

void run_gardner(const GardnerOpts& o, RunContext& ctx) {
    const auto grid = parse_grid(o.alpha_grid, "--alpha-grid");
    std::vector<ReplicaState> states(grid.size());
    parallel_for(grid.size(), ctx.common().threads,
                 [&](std::size_t i) { states[i] = solve_saddle(grid[i]); });
    std::vector<std::vector<double>> rows;
    for (const auto& s : states) rows.push_back({s.alpha, s.q, s.r, s.r * s.alpha});
    ctx.emit(table_csv({"alpha", "q", "r", "r_times_alpha"}, std::move(rows)));
}

EntropyCurve read_entropy_curve(const std::string& path) {
    const auto table = read_csv_file(path);
    const auto rs = table.values("r");
    const auto ss = table.values("s");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < rs.size(); ++i) pts.emplace_back(rs[i], ss[i]);
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
    EntropyCurve curve;
    for (const auto& [r, s] : pts) curve.points.push_back({r, s, 0.0, false});
    if (curve.points.empty()) throw DataError("entropy curve " + path + " has no rows");
    curve.anchor_r = curve.points.front().r;
    curve.anchor_s = curve.points.front().s;
    return curve;
}

struct GibbsOpts {
    std::string entropy;
    std::string m_grid;
    bool extrapolate = false;
};

void run_gibbs_annealed(const GibbsOpts& o, RunContext& ctx) {
    const auto grid = parse_grid(o.m_grid, "--m-grid");
    const auto curve = read_entropy_curve(o.entropy);
    std::vector<std::vector<double>> rows;
    for (double m : grid) rows.push_back({m, predicted_annealed_risk(curve, m, o.extrapolate)});
    ctx.emit(table_csv({"m", "risk"}, std::move(rows)));
}

// ---------------------------------------------------------------- simulate

void run_simulate_hebbian(const HebbianOpts& o, RunContext& ctx) {
    const auto spec = gaussian_spec(o.p, o.delta);
    const auto grid = parse_grid(o.m_grid, "--m-grid");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = grid[i];
        if (m != std::floor(m) || m < 1) throw UsageError("--m-grid: sample counts must be positive integers");
        const auto seed = Rng::stream(ctx.common().seed, {i}).key();
        const auto sim = hebbian_simulate(static_cast<std::int64_t>(m), spec, o.runs, seed,
                                          ctx.common().threads);
        rows.push_back({m, sim.mean_risk, sim.stderr_, hebbian_expected_risk(m, spec)});
        ctx.add_steps(static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(o.runs));
    }
    ctx.emit(table_csv({"m", "risk", "stderr", "closed_form"}, std::move(rows)));
}

// ---------------------------------------------------------------- data

struct GenOpts {
    int p = 0;
    double delta = 0;
    std::size_t n = 0;
};

void run_gen_gaussian(const GenOpts& o, RunContext& ctx) {
    const auto spec = gaussian_spec(o.p, o.delta);
    if (o.n == 0) throw UsageError("--n must be positive");
    const auto data = gen_gaussian_pair(spec, o.n, ctx.common().seed);
    ctx.record_dataset("generated", "gen-gaussian", data);
    write_dataset(ctx, data);
}

struct IdxOpts {
    std::string images;
    std::string labels;
};

void run_load_idx(const IdxOpts& o, RunContext& ctx) {
    const auto data = load_idx(o.images, o.labels);
    ctx.record_dataset("images", o.images, data);
    ctx.extra()["pixel_scaling"] = "byte/255";
    write_dataset(ctx, data);
}

struct ModelOpts {
    std::string model = "linear";
    std::string layers;
};

PredictorSpec make_predictor(const ModelOpts& o, std::size_t input_dim) {
    const int dim = static_cast<int>(input_dim);
    if (o.model == "linear") {
        if (!o.layers.empty()) throw UsageError("--layers only applies to --model mlp");
        return PredictorSpec::sphere_linear(dim);
    }
    if (o.model == "mlp") {
        if (o.layers.empty()) throw UsageError("--model mlp needs --layers");
        try {
            return PredictorSpec::mlp(dim, parse_int_list(o.layers, "--layers"));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    throw UsageError("--model must be linear or mlp");
}

struct RelabelOpts {
    std::string data;
    ModelOpts model;
    double teacher_scale = 1.0;
    std::string weights_out;
};

void run_relabel(const RelabelOpts& o, RunContext& ctx) {
    const auto data = read_dataset(o.data);
    const auto spec = make_predictor(o.model, data.p);
    const auto teacher = random_weights(spec, o.teacher_scale, ctx.common().seed);
    const auto relabelled = teacher_relabel(data, spec, teacher);
    ctx.record_dataset("input", o.data, data);
    ctx.record_dataset("relabelled", "teacher", relabelled);
    ctx.extra()["label_marginal"] = relabelled.label_marginal();
    if (!o.weights_out.empty()) {
        std::ostringstream w;
        write_weights(teacher, w);
        write_file_atomic(o.weights_out, w.str());
    }
    write_dataset(ctx, relabelled);
}

// ---------------------------------------------------------------- sample

struct SampleOpts {
    std::string grid;
    std::string data;
    std::string holdout;
    double holdout_fraction = 0.0;
    bool exact_perceptron = false;
    int p = 0;
    double delta = 0.0;
    ModelOpts model;
    int chains = 4;
    std::size_t burn_in = 1000;
    std::size_t samples = 1000;
    std::size_t thin = 10;
    double proposal_scale = 0.1;
    double init_scale = 1.0;
    bool calibrate = false;
    bool cold_start = false;
    std::string sampler = "boltzmann";
    std::size_t batch_size = 0;
    std::size_t inner_steps = 2;
};

void add_sample_options(CLI::App& app, SampleOpts& o) {
    app.add_option("--data", o.data, "Dataset CSV used inside the acceptance rule");
    app.add_option("--holdout", o.holdout, "Dataset CSV for the reported risk");
    app.add_option("--holdout-fraction", o.holdout_fraction,
                   "Split this fraction of --data off as the report set")
        ->check(CLI::Range(0.0, 1.0));
    app.add_flag("--exact-perceptron", o.exact_perceptron,
                 "Use the exact two-Gaussian risk of a linear separator instead of data");
    app.add_option("--p", o.p, "Dimension for --exact-perceptron");
    app.add_option("--delta", o.delta, "Class separation for --exact-perceptron");
    app.add_option("--model", o.model.model, "linear or mlp");
    app.add_option("--layers", o.model.layers, "MLP widths after the input, e.g. 16,2");
    app.add_option("--chains", o.chains, "Chains per grid value")->check(CLI::PositiveNumber);
    app.add_option("--burn-in", o.burn_in, "Discarded steps per chain");
    app.add_option("--samples", o.samples, "Recorded samples per chain")->check(CLI::PositiveNumber);
    app.add_option("--thin", o.thin, "Steps between recorded samples")->check(CLI::PositiveNumber);
    app.add_option("--proposal-scale", o.proposal_scale, "Random-walk step size")->check(CLI::PositiveNumber);
    app.add_option("--init-scale", o.init_scale, "Scale of random initial weights")->check(CLI::PositiveNumber);
    app.add_flag("--calibrate", o.calibrate, "Tune the step size before burn-in");
    app.add_flag("--cold-start", o.cold_start, "Start every grid value from fresh random weights");
}

struct SamplingProblem {
    PredictorSpec spec;
    LabelledDataset train;
    LabelledDataset report;
    RiskTarget target;
};

std::unique_ptr<SamplingProblem> build_problem(const SampleOpts& o, RunContext& ctx) {
    auto prob = std::make_unique<SamplingProblem>();
    if (o.exact_perceptron) {
        if (!o.data.empty()) throw UsageError("--exact-perceptron and --data are exclusive");
        if (o.model.model != "linear") throw UsageError("--exact-perceptron needs --model linear");
        const auto g = gaussian_spec(o.p, o.delta);
        prob->spec = PredictorSpec::sphere_linear(o.p);
        prob->target = exact_perceptron_target(g);
        return prob;
    }
    if (o.data.empty()) throw UsageError("need --data or --exact-perceptron");
    if (!o.holdout.empty() && o.holdout_fraction > 0) {
        throw UsageError("--holdout and --holdout-fraction are exclusive");
    }
    // Model validation first so that usage errors precede file reads.
    const int classes = o.model.model == "mlp" && !o.model.layers.empty()
                            ? parse_int_list(o.model.layers, "--layers").back()
                            : 0;
    auto data = read_dataset(o.data, classes);
    prob->spec = make_predictor(o.model, data.p);
    ctx.record_dataset("data", o.data, data);
    if (o.holdout_fraction > 0) {
        const auto split_seed = Rng::stream(ctx.common().seed, {0x5b1e}).key();
        auto [a, b] = split(data, 1.0 - o.holdout_fraction, split_seed);
        prob->train = std::move(a);
        prob->report = std::move(b);
        ctx.record_dataset("acceptance", "split of --data", prob->train);
        ctx.record_dataset("report", "split of --data", prob->report);
    } else if (!o.holdout.empty()) {
        prob->train = std::move(data);
        prob->report = read_dataset(o.holdout, prob->train.class_count);
        if (prob->report.p != prob->train.p) throw DataError("--holdout has a different feature count");
        ctx.record_dataset("report", o.holdout, prob->report);
    } else {
        prob->train = std::move(data);
        prob->report = prob->train;
    }
    prob->target = dataset_risk_target(prob->spec, prob->train, prob->report);
    return prob;
}

void run_sample(const SampleOpts& o, RunContext& ctx, SamplerKind kind, const std::string& grid_name) {
    const auto grid = parse_grid(o.grid, "--" + grid_name + "-grid");
    ChainConfig cfg;
    cfg.kind = kind;
    if (o.sampler == "minibatch") {
        if (kind == SamplerKind::annealed) throw UsageError("--sampler minibatch is for boltzmann sweeps");
        cfg.kind = SamplerKind::minibatch;
    } else if (o.sampler != "boltzmann") {
        throw UsageError("--sampler must be boltzmann or minibatch");
    }
    cfg.proposal_scale = o.proposal_scale;
    cfg.burn_in = o.burn_in;
    cfg.samples = o.samples;
    cfg.thin = o.thin;
    cfg.seed = ctx.common().seed;
    cfg.init_scale = o.init_scale;
    cfg.calibrate = o.calibrate;
    cfg.inner_steps = o.inner_steps;
    cfg.batch_size = o.batch_size;
    const auto prob = build_problem(o, ctx);
    if (cfg.kind == SamplerKind::minibatch && o.exact_perceptron) {
        throw UsageError("--sampler minibatch needs --data");
    }

    SweepOptions sweep{o.chains, !o.cold_start, ctx.common().threads};
    const auto res = boltzmann_sweep(grid, cfg, prob->spec, prob->target, sweep);

    std::vector<std::vector<double>> rows;
    for (const auto& pt : res.curve.points) {
        rows.push_back({pt.beta, pt.mean_risk, pt.stderr_, pt.acceptance_rate, pt.effective_samples});
    }
    for (std::size_t i = 0; i < res.chains.size(); ++i) {
        for (std::size_t c = 0; c < res.chains[i].size(); ++c) {
            const auto& ch = res.chains[i][c];
            ctx.add_steps(ch.final_state.steps_taken);
            if (!ctx.writes_files()) continue;
            std::vector<std::vector<double>> srows;
            for (const auto& s : ch.samples) {
                srows.push_back({static_cast<double>(s.step), s.risk_acceptance, s.risk_report,
                                 s.accepted ? 1.0 : 0.0});
            }
            ctx.emit_extra(".grid" + std::to_string(i) + ".chain" + std::to_string(c) + ".csv",
                           table_csv({"step", "risk_acc", "risk_rep", "accepted"}, std::move(srows)));
        }
    }
    ctx.emit(table_csv({grid_name, "risk", "stderr", "acceptance_rate", "ess"}, std::move(rows)));
}

// ---------------------------------------------------------------- reconstruct / fit

struct ReconstructOpts {
    std::string curve;
    double anchor_s = 0.0;
};

void run_reconstruct(const ReconstructOpts& o, RunContext& ctx) {
    const auto table = read_csv_file(o.curve);
    const auto betas = table.values("beta");
    const auto risks = table.values("risk");
    std::vector<double> errs(betas.size(), 0.0);
    if (std::find(table.header.begin(), table.header.end(), "stderr") != table.header.end()) {
        errs = table.values("stderr");
    }
    BoltzmannCurve curve;
    for (std::size_t i = 0; i < betas.size(); ++i) curve.points.push_back({betas[i], risks[i], errs[i], 0.0, 0.0});
    const auto e = reconstruct(curve, o.anchor_s);
    std::vector<std::vector<double>> rows;
    for (const auto& p : e.points) rows.push_back({p.r, p.s, p.pooled ? 1.0 : 0.0});
    ctx.extra()["anchor"] = {{"r", e.anchor_r}, {"s", e.anchor_s}, {"beta", curve.points.front().beta}};
    ctx.extra()["pooled"] = e.pooled;
    ctx.emit(table_csv({"r", "s", "pooled_flag"}, std::move(rows)));
}

struct FitOpts {
    std::string entropy;
};

void run_fit(const FitOpts& o, RunContext& ctx) {
    const auto f = quadratic_fit(read_entropy_curve(o.entropy));
    ctx.extra()["fit"] = {{"c0", f.c0}, {"c1", f.c1}, {"c2", f.c2}, {"residual_rms", f.residual_rms}};
    ctx.emit(table_csv({"c0", "c1", "c2", "residual_rms"}, {{f.c0, f.c1, f.c2, f.residual_rms}}));
}

}  // namespace

void register_commands(CLI::App& app, Registry& reg) {
    auto* analytic = app.add_subcommand("analytic", "Closed-form and quadrature results");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo checks of closed forms");
    auto* data = app.add_subcommand("data", "Generate, import and relabel datasets");
    auto* sample = app.add_subcommand("sample", "Markov-chain sampling of weight space");
    auto* recon = app.add_subcommand("reconstruct", "Entropy reconstruction");
    auto* fit = app.add_subcommand("fit", "Curve fits");
    for (auto* g : {analytic, simulate, data, sample, recon, fit}) g->require_subcommand(1);

    CLI::App* sub = nullptr;
    {
        auto o = leaf<EntropyOpts>(*analytic, "perceptron-entropy",
                                   "Risk entropy of a linear separator on two Gaussians", reg,
                                   run_perceptron_entropy, &sub);
        sub->add_option("--p", o->p, "Dimension")->required();
        sub->add_option("--delta", o->delta, "Class separation")->required();
        sub->add_option("--points", o->points, "Grid points across the risk range")->check(CLI::PositiveNumber);
    }
    {
        auto o = leaf<BoltzmannRiskOpts>(*analytic, "boltzmann-risk",
                                         "Exact Boltzmann risk of the perceptron", reg,
                                         run_boltzmann_risk, &sub);
        sub->add_option("--p", o->p, "Dimension")->required();
        sub->add_option("--delta", o->delta, "Class separation")->required();
        sub->add_option("--beta-grid", o->beta_grid, "Comma-separated inverse temperatures")->required();
        sub->add_option("--rel-tol", o->rel_tol, "Quadrature relative tolerance");
    }
    {
        auto o = leaf<HebbianOpts>(*analytic, "hebbian", "Hebb-rule learning curve", reg, run_hebbian, &sub);
        sub->add_option("--p", o->p, "Dimension")->required();
        sub->add_option("--delta", o->delta, "Class separation")->required();
        sub->add_option("--m-grid", o->m_grid, "Comma-separated sample counts")->required();
    }
    {
        auto o = leaf<GardnerOpts>(*analytic, "gardner", "Replica saddle of the realisable perceptron",
                                   reg, run_gardner, &sub);
        sub->add_option("--alpha-grid,--alpha", o->alpha_grid, "Comma-separated loads m/p")->required();
    }
    {
        auto o = leaf<GibbsOpts>(*analytic, "gibbs-annealed",
                                 "Annealed Gibbs risk from an entropy curve", reg, run_gibbs_annealed, &sub);
        sub->add_option("--entropy", o->entropy, "CSV with columns r,s")->required();
        sub->add_option("--m-grid", o->m_grid, "Comma-separated sample counts")->required();
        sub->add_flag("--extrapolate", o->extrapolate, "Allow risks below the measured range");
    }
    {
        auto o = leaf<HebbianOpts>(*simulate, "hebbian", "Simulated Hebb-rule learning curve", reg,
                                   run_simulate_hebbian, &sub);
        sub->add_option("--p", o->p, "Dimension")->required();
        sub->add_option("--delta", o->delta, "Class separation")->required();
        sub->add_option("--m-grid", o->m_grid, "Comma-separated sample counts")->required();
        sub->add_option("--runs", o->runs, "Independent runs per sample count")->check(CLI::Range(2, 1 << 30));
    }
    {
        auto o = leaf<GenOpts>(*data, "gen-gaussian", "Sample the two-Gaussian problem", reg,
                               run_gen_gaussian, &sub);
        sub->add_option("--p", o->p, "Dimension")->required();
        sub->add_option("--delta", o->delta, "Class separation")->required();
        sub->add_option("--n", o->n, "Number of examples")->required();
    }
    {
        auto o = leaf<IdxOpts>(*data, "load-idx", "Convert IDX image and label files to CSV", reg,
                               run_load_idx, &sub);
        sub->add_option("--images", o->images, "IDX image file")->required();
        sub->add_option("--labels", o->labels, "IDX label file")->required();
    }
    {
        auto o = leaf<RelabelOpts>(*data, "relabel", "Replace labels by a random teacher's predictions",
                                   reg, run_relabel, &sub);
        sub->add_option("--data", o->data, "Dataset CSV")->required();
        sub->add_option("--model", o->model.model, "linear or mlp");
        sub->add_option("--layers", o->model.layers, "MLP widths after the input, e.g. 16,10");
        sub->add_option("--teacher-scale", o->teacher_scale, "Scale of the teacher weights")
            ->check(CLI::PositiveNumber);
        sub->add_option("--weights-out", o->weights_out, "Write the teacher weights here");
    }
    {
        auto o = leaf<SampleOpts>(*sample, "boltzmann-sweep", "Boltzmann risk over a beta grid", reg,
                                  [](const SampleOpts& opts, RunContext& ctx) {
                                      run_sample(opts, ctx, SamplerKind::boltzmann, "beta");
                                  },
                                  &sub);
        sub->add_option("--beta-grid", o->grid, "Increasing inverse temperatures")->required();
        add_sample_options(*sub, *o);
        sub->add_option("--sampler", o->sampler, "boltzmann or minibatch");
        sub->add_option("--batch-size", o->batch_size, "Minibatch size (0: whole dataset)");
        sub->add_option("--inner-steps", o->inner_steps, "Inner minibatch steps per proposal")
            ->check(CLI::PositiveNumber);
    }
    {
        auto o = leaf<SampleOpts>(*sample, "annealed", "Annealed-weight sampling over an m grid", reg,
                                  [](const SampleOpts& opts, RunContext& ctx) {
                                      run_sample(opts, ctx, SamplerKind::annealed, "m");
                                  },
                                  &sub);
        sub->add_option("--m-grid", o->grid, "Increasing sample counts")->required();
        add_sample_options(*sub, *o);
    }
    {
        auto o = leaf<ReconstructOpts>(*recon, "entropy", "Risk entropy from a Boltzmann curve", reg,
                                       run_reconstruct, &sub);
        sub->add_option("--curve", o->curve, "CSV with beta,risk[,stderr] columns")->required();
        sub->add_option("--anchor-s", o->anchor_s, "Entropy assigned to the smallest-beta point");
    }
    {
        auto o = leaf<FitOpts>(*fit, "quadratic", "Least-squares quadratic through an entropy curve", reg,
                               run_fit, &sub);
        sub->add_option("--entropy", o->entropy, "CSV with columns r,s")->required();
    }
}

}  // namespace risklab::cli
