#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace risklab::cli {

/// Bad invocation: reported with usage text and exit code 1.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Run one command line (without the program name). Results go to `out`
/// unless --out is given; diagnostics go to `err`. Returns 0 on success,
/// 1 on usage errors and 2 on runtime or numerical failures.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Read a JSON object whose keys name flags (underscores for dashes).
/// Throws UsageError on malformed JSON, a non-object document, or a key
/// outside `allowed_keys`.
nlohmann::json load_config(const std::filesystem::path& path,
                           const std::set<std::string>& allowed_keys);

}  // namespace risklab::cli
