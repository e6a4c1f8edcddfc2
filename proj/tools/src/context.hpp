#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "risklab/dataset.hpp"

namespace risklab::cli {

/// Options every leaf command accepts.
struct CommonOptions {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// State of one command run: where results go and what the manifest records.
class RunContext {
  public:
    RunContext(std::string command, std::ostream& stdout_stream, const CommonOptions& common);

    const CommonOptions& common() const { return common_; }
    bool writes_files() const { return !common_.out.empty(); }

    /// Primary CSV: --out (atomically) or standard output.
    void emit(const std::string& csv);
    /// Additional CSV next to --out; ignored without --out.
    void emit_extra(const std::string& suffix, const std::string& csv);

    void record_dataset(const std::string& role, const std::string& source,
                        const LabelledDataset& data);
    void add_steps(std::uint64_t n) { steps_ += n; }
    nlohmann::json& extra() { return extra_; }

    /// Write `<out>.manifest.json` when writing files.
    void finish(const nlohmann::json& parameters, double wall_seconds);

  private:
    std::string command_;
    std::ostream& stdout_;
    CommonOptions common_;
    std::vector<std::string> outputs_;
    nlohmann::json datasets_ = nlohmann::json::array();
    nlohmann::json extra_ = nlohmann::json::object();
    std::uint64_t steps_ = 0;
};

using Action = std::function<void(RunContext&)>;

/// Leaf subcommands and what they run.
struct Registry {
    std::map<const CLI::App*, Action> actions;
    std::shared_ptr<CommonOptions> common = std::make_shared<CommonOptions>();
};

/// Add --config, --out, --seed and --threads to a leaf command.
void add_common_options(CLI::App& leaf, CommonOptions& common);

void register_commands(CLI::App& app, Registry& registry);

// Shared parsing helpers; malformed values raise UsageError.
std::vector<double> parse_grid(const std::string& text, const std::string& flag);
std::vector<int> parse_int_list(const std::string& text, const std::string& flag);

}  // namespace risklab::cli
