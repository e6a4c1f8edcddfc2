#include "risklab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "context.hpp"
#include "risklab/datasets.hpp"
#include "risklab/errors.hpp"
#include "risklab/io.hpp"
#include "risklab/parallel.hpp"

namespace risklab::cli {

namespace {

std::string key_to_flag(const std::string& key) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return "--" + flag;
}

std::string flag_to_key(const std::string& lname) {
    std::string key = lname;
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

bool is_reserved(const std::string& lname) { return lname == "help" || lname == "config"; }

std::set<std::string> config_keys(const CLI::App& leaf) {
    std::set<std::string> keys;
    for (const auto* opt : leaf.get_options()) {
        for (const auto& l : opt->get_lnames()) {
            if (!is_reserved(l)) keys.insert(flag_to_key(l));
        }
    }
    return keys;
}

const CLI::Option* find_option(const CLI::App& leaf, const std::string& lname) {
    for (const auto* opt : leaf.get_options()) {
        const auto& names = opt->get_lnames();
        if (std::find(names.begin(), names.end(), lname) != names.end()) return opt;
    }
    return nullptr;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw UsageError("config: unsupported value for key '" + key + "'");
}

// Arguments equivalent to the config file, placed before the user's flags
// so that the flags win.
std::vector<std::string> config_arguments(const nlohmann::json& config, const CLI::App& leaf) {
    std::vector<std::string> args;
    for (const auto& [key, value] : config.items()) {
        const auto* opt = find_option(leaf, key_to_flag(key).substr(2));
        const bool is_flag = opt && opt->get_expected_min() == 0;
        if (is_flag) {
            if (!value.is_boolean()) throw UsageError("config: key '" + key + "' takes true or false");
            if (value.get<bool>()) args.push_back(key_to_flag(key));
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) text += ',';
                text += json_scalar(value[i], key);
            }
        } else {
            text = json_scalar(value, key);
        }
        args.push_back(key_to_flag(key));
        args.push_back(text);
    }
    return args;
}

nlohmann::json final_parameters(const CLI::App& leaf) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto* opt : leaf.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help") continue;
        const auto key = flag_to_key(names.front());
        if (opt->get_expected_min() == 0) {
            params[key] = opt->count() > 0;
        } else if (opt->count() > 0) {
            params[key] = opt->results().back();
        } else {
            params[key] = opt->get_default_str();
        }
    }
    return params;
}

// Pre-scan for the leaf command and a --config value without parsing.
struct Prescan {
    CLI::App* leaf = nullptr;
    std::size_t leaf_depth = 0;
    std::optional<std::string> config;
};

Prescan prescan(CLI::App& app, const std::vector<std::string>& args) {
    Prescan out;
    CLI::App* cur = &app;
    std::size_t i = 0;
    while (i < args.size() && cur) {
        const auto& a = args[i];
        if (a.rfind("-", 0) == 0) break;
        CLI::App* next = nullptr;
        try {
            next = cur->get_subcommand(a);
        } catch (const CLI::OptionNotFound&) {
            break;
        }
        cur = next;
        ++i;
    }
    if (cur != &app && cur->get_subcommands({}).empty()) {
        out.leaf = cur;
        out.leaf_depth = i;
    }
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) out.config = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0) out.config = args[k].substr(9);
    }
    return out;
}

const CLI::App* selected_leaf(const CLI::App& app) {
    const CLI::App* cur = &app;
    while (true) {
        auto subs = cur->get_subcommands();
        if (subs.empty()) return cur;
        cur = subs.front();
    }
}

std::string command_path(const CLI::App* leaf) {
    std::string path;
    for (const CLI::App* a = leaf; a && a->get_parent(); a = a->get_parent()) {
        path = path.empty() ? a->get_name() : a->get_name() + " " + path;
    }
    return path;
}

}  // namespace

nlohmann::json load_config(const std::filesystem::path& path,
                           const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config: malformed JSON in ") + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config: top level must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!allowed_keys.count(key)) throw UsageError("config: unknown key '" + key + "'");
    }
    return doc;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const auto& cell : split_csv_line(text)) {
        try {
            out.push_back(parse_double(cell));
        } catch (const DataError&) {
            throw UsageError(flag + ": cannot parse '" + cell + "' as a number");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    for (double v : parse_grid(text, flag)) {
        if (v != std::floor(v) || v < 1 || v > 1e9) throw UsageError(flag + ": expected positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void add_common_options(CLI::App& leaf, CommonOptions& common) {
    leaf.add_option("--config", common.config, "JSON file of flag values (flags override it)");
    leaf.add_option("--out", common.out, "Output CSV path; a manifest is written alongside");
    leaf.add_option("--seed", common.seed, "Master seed");
    leaf.add_option("--threads", common.threads, "Worker threads (default from RISKLAB_THREADS)")
        ->check(CLI::PositiveNumber);
}

RunContext::RunContext(std::string command, std::ostream& stdout_stream, const CommonOptions& common)
    : command_(std::move(command)), stdout_(stdout_stream), common_(common) {}

void RunContext::emit(const std::string& csv) {
    if (writes_files()) {
        write_file_atomic(common_.out, csv);
        outputs_.push_back(common_.out);
    } else {
        stdout_ << csv;
    }
}

void RunContext::emit_extra(const std::string& suffix, const std::string& csv) {
    if (!writes_files()) return;
    const std::string path = common_.out + suffix;
    write_file_atomic(path, csv);
    outputs_.push_back(path);
}

void RunContext::record_dataset(const std::string& role, const std::string& source,
                                const LabelledDataset& data) {
    std::ostringstream hex;
    hex << std::hex << dataset_fingerprint(data);
    datasets_.push_back({{"role", role},
                         {"source", source},
                         {"fingerprint", hex.str()},
                         {"n", data.n},
                         {"p", data.p},
                         {"class_count", data.class_count}});
}

void RunContext::finish(const nlohmann::json& parameters, double wall_seconds) {
    if (!writes_files()) return;
    nlohmann::json manifest = {{"command", command_},
                               {"parameters", parameters},
                               {"seed", common_.seed},
                               {"version", RISKLAB_VERSION},
                               {"datasets", datasets_},
                               {"wall_clock_seconds", wall_seconds},
                               {"steps", steps_},
                               {"outputs", outputs_}};
    if (!extra_.empty()) manifest["results"] = extra_;
    write_file_atomic(common_.out + ".manifest.json", manifest.dump(2) + "\n");
}

int dispatch(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Risk-entropy and Boltzmann-risk toolkit for simple classifiers", "risklab"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.option_defaults()->always_capture_default();
    Registry registry;
    registry.common->threads = default_thread_count();
    register_commands(app, registry);

    std::vector<std::string> args = args_in;
    try {
        const auto pre = prescan(app, args);
        if (pre.config) {
            if (!pre.leaf) throw UsageError("--config needs a command");
            const auto config = load_config(*pre.config, config_keys(*pre.leaf));
            const auto extra = config_arguments(config, *pre.leaf);
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(pre.leaf_depth), extra.begin(),
                        extra.end());
        }
    } catch (const UsageError& e) {
        err << "risklab: " << e.what() << "\n";
        return 1;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const CLI::App* leaf = selected_leaf(app);
    const auto it = registry.actions.find(leaf);
    if (it == registry.actions.end()) {
        err << app.help();
        return 1;
    }
    RunContext ctx(command_path(leaf), out, *registry.common);
    const auto start = std::chrono::steady_clock::now();
    try {
        it->second(ctx);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        ctx.finish(final_parameters(*leaf), elapsed.count());
    } catch (const UsageError& e) {
        err << "risklab " << command_path(leaf) << ": " << e.what() << "\n" << leaf->help();
        return 1;
    } catch (const std::exception& e) {
        err << "risklab " << command_path(leaf) << ": error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace risklab::cli
