#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "risklab/predictors.hpp"

namespace risklab {

/// 17 significant digits, locale-independent ("%.17g").
std::string format_double(double v);

/// Strict full-string parse; throws DataError on junk.
double parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Minimal CSV table: header plus rows of numeric cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const;  ///< throws if absent
    std::vector<double> values(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);
/// Header, then one line per row, '\n' line endings.
std::string to_csv(const CsvTable& table);

/// Write via a sibling temporary file and rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

class Fnv1a {
  public:
    void add(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) add_byte(static_cast<unsigned char>(v >> (8 * i)));
    }
    void add(std::string_view bytes) {
        for (char c : bytes) add_byte(static_cast<unsigned char>(c));
    }
    std::uint64_t value() const { return state_; }

  private:
    void add_byte(unsigned char b) {
        state_ ^= b;
        state_ *= 0x100000001b3ULL;
    }
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Little-endian uint64 length followed by little-endian float64 values.
void write_weights(const WeightVector& w, std::ostream& out);
WeightVector read_weights(std::istream& in, WeightConstraint constraint);

}  // namespace risklab
