#include "risklab/datasets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "risklab/errors.hpp"
#include "risklab/io.hpp"
#include "risklab/random.hpp"

namespace risklab {

void LabelledDataset::validate() const {
    if (n == 0) throw DataError("dataset: no examples");
    if (features.size() != n * p || labels.size() != n) {
        throw DataError("dataset: feature/label sizes inconsistent with n x p");
    }
    if (class_count < 1) throw DataError("dataset: class_count must be positive");
    for (int y : labels) {
        if (y < 0 || y >= class_count) throw DataError("dataset: label out of range");
    }
    for (double v : features) {
        if (!std::isfinite(v)) throw DataError("dataset: non-finite feature");
    }
}

LabelledDataset LabelledDataset::subset(std::span<const std::size_t> indices) const {
    LabelledDataset out;
    out.n = indices.size();
    out.p = p;
    out.class_count = class_count;
    out.features.reserve(out.n * p);
    out.labels.reserve(out.n);
    for (auto i : indices) {
        if (i >= n) throw DataError("dataset: subset index out of range");
        auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

std::vector<double> LabelledDataset::label_marginal() const {
    std::vector<double> freq(static_cast<std::size_t>(class_count), 0.0);
    for (int y : labels) freq[static_cast<std::size_t>(y)] += 1.0;
    for (auto& f : freq) f /= static_cast<double>(n);
    return freq;
}

LabelledDataset gen_gaussian_pair(const GaussianClassSpec& spec, std::size_t n,
                                  std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw DomainError("gen_gaussian_pair: n must be positive");
    LabelledDataset data;
    data.n = n;
    data.p = static_cast<std::size_t>(spec.p);
    data.class_count = 2;
    data.features.resize(n * data.p);
    data.labels.resize(n);
    auto rng = Rng::stream(seed, {});
    for (std::size_t i = 0; i < n; ++i) {
        const int y = rng.uniform() < 0.5 ? 0 : 1;
        const double sign = 2.0 * y - 1.0;
        data.labels[i] = y;
        auto x = data.row(i);
        for (std::size_t j = 0; j < data.p; ++j) x[j] = sign * spec.delta * spec.t[j] + rng.normal();
    }
    return data;
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw TruncatedPayloadError(std::string("idx: truncated header in ") + what);
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b, 4);
}

}  // namespace

LabelledDataset parse_idx(std::istream& images, std::istream& labels) {
    const auto image_magic = read_be32(images, "image file");
    if (image_magic != kImageMagic) {
        std::ostringstream msg;
        msg << "idx: image magic 0x" << std::hex << image_magic << " != 0x803";
        throw MagicMismatchError(msg.str());
    }
    const auto label_magic = read_be32(labels, "label file");
    if (label_magic != kLabelMagic) {
        std::ostringstream msg;
        msg << "idx: label magic 0x" << std::hex << label_magic << " != 0x801";
        throw MagicMismatchError(msg.str());
    }
    const std::size_t n = read_be32(images, "image file");
    const std::size_t rows = read_be32(images, "image file");
    const std::size_t cols = read_be32(images, "image file");
    const std::size_t n_labels = read_be32(labels, "label file");
    if (n != n_labels) {
        throw DimensionMismatchError("idx: " + std::to_string(n) + " images but " +
                                     std::to_string(n_labels) + " labels");
    }
    if (n == 0) throw DataError("idx: empty dataset");
    LabelledDataset data;
    data.n = n;
    data.p = rows * cols;
    std::vector<unsigned char> pixels(n * data.p);
    if (!images.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()))) {
        throw TruncatedPayloadError("idx: image payload shorter than header claims");
    }
    std::vector<unsigned char> raw_labels(n);
    if (!labels.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n))) {
        throw TruncatedPayloadError("idx: label payload shorter than header claims");
    }
    data.features.resize(pixels.size());
    std::transform(pixels.begin(), pixels.end(), data.features.begin(),
                   [](unsigned char b) { return b / 255.0; });
    data.labels.assign(raw_labels.begin(), raw_labels.end());
    const int max_label = *std::max_element(data.labels.begin(), data.labels.end());
    data.class_count = std::max(2, max_label + 1);
    return data;
}

LabelledDataset load_idx(const std::filesystem::path& image_path,
                         const std::filesystem::path& label_path) {
    std::ifstream images(image_path, std::ios::binary);
    if (!images) throw DataError("idx: cannot open " + image_path.string());
    std::ifstream labels(label_path, std::ios::binary);
    if (!labels) throw DataError("idx: cannot open " + label_path.string());
    return parse_idx(images, labels);
}

void write_idx(const LabelledDataset& data, std::uint32_t rows, std::uint32_t cols,
               std::ostream& images, std::ostream& labels) {
    if (static_cast<std::size_t>(rows) * cols != data.p) {
        throw DimensionMismatchError("write_idx: rows * cols != p");
    }
    write_be32(images, kImageMagic);
    write_be32(images, static_cast<std::uint32_t>(data.n));
    write_be32(images, rows);
    write_be32(images, cols);
    for (double v : data.features) {
        const double scaled = std::round(v * 255.0);
        if (!(scaled >= 0.0 && scaled <= 255.0)) throw DataError("write_idx: feature outside [0, 1]");
        images.put(static_cast<char>(static_cast<unsigned char>(scaled)));
    }
    write_be32(labels, kLabelMagic);
    write_be32(labels, static_cast<std::uint32_t>(data.n));
    for (int y : data.labels) {
        if (y < 0 || y > 255) throw DataError("write_idx: label does not fit in a byte");
        labels.put(static_cast<char>(static_cast<unsigned char>(y)));
    }
}

LabelledDataset teacher_relabel(const LabelledDataset& data, const PredictorSpec& spec,
                                const WeightVector& teacher) {
    LabelledDataset out = data;
    out.class_count = spec.class_count();
    for (std::size_t i = 0; i < data.n; ++i) out.labels[i] = predict(spec, teacher, data.row(i));
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double fraction,
                                                                            std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("split: fraction outside (0, 1)");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = Rng::stream(seed, {});
    rng.shuffle(std::span<std::size_t>(order));
    const auto first = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::vector<std::size_t> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::size_t> b(order.begin() + static_cast<std::ptrdiff_t>(first), order.end());
    return {std::move(a), std::move(b)};
}

std::pair<LabelledDataset, LabelledDataset> split(const LabelledDataset& data, double fraction,
                                                  std::uint64_t seed) {
    auto [a, b] = split_indices(data.n, fraction, seed);
    return {data.subset(a), data.subset(b)};
}

void write_dataset_csv(const LabelledDataset& data, std::ostream& out) {
    out << "label";
    for (std::size_t j = 0; j < data.p; ++j) out << ",f" << j;
    out << '\n';
    for (std::size_t i = 0; i < data.n; ++i) {
        out << data.labels[i];
        for (double v : data.row(i)) out << ',' << format_double(v);
        out << '\n';
    }
}

LabelledDataset read_dataset_csv(std::istream& in, int class_count) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset csv: missing header");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "label") throw DataError("dataset csv: header must start with 'label'");
    LabelledDataset data;
    data.p = header.size() - 1;
    int max_label = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("dataset csv: row " + std::to_string(data.n + 1) + " has wrong width");
        }
        const int y = static_cast<int>(parse_double(cells[0]));
        max_label = std::max(max_label, y);
        data.labels.push_back(y);
        for (std::size_t j = 1; j < cells.size(); ++j) data.features.push_back(parse_double(cells[j]));
        ++data.n;
    }
    data.class_count = class_count > 0 ? class_count : std::max(2, max_label + 1);
    data.validate();
    return data;
}

std::uint64_t dataset_fingerprint(const LabelledDataset& data) {
    Fnv1a hash;
    hash.add(static_cast<std::uint64_t>(data.n));
    hash.add(static_cast<std::uint64_t>(data.p));
    hash.add(static_cast<std::uint64_t>(data.class_count));
    for (int y : data.labels) hash.add(static_cast<std::uint64_t>(y));
    for (double v : data.features) hash.add(std::bit_cast<std::uint64_t>(v));
    return hash.value();
}

}  // namespace risklab
