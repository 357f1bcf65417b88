#include "nbm/model_io.hpp"

#include "nbm/error.hpp"
#include "nbm/knn.hpp"
#include "nbm/mlp.hpp"
#include "nbm/tree.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nbm {

void PayloadWriter::write_u8(std::uint8_t v) {
    out_.put(static_cast<char>(v));
    ++bytes_;
}

void PayloadWriter::write_u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out_.put(static_cast<char>((v >> shift) & 0xFF));
    }
    bytes_ += 4;
}

void PayloadWriter::write_u64(std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) {
        out_.put(static_cast<char>((v >> shift) & 0xFF));
    }
    bytes_ += 8;
}

void PayloadWriter::write_f64(double v) {
    write_u64(std::bit_cast<std::uint64_t>(v));
}

void PayloadReader::fill(unsigned char* buf, std::size_t n) {
    in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
        throw IoError("truncated payload at offset " +
                      std::to_string(offset_ + static_cast<std::size_t>(in_.gcount())));
    }
    offset_ += n;
}

std::uint8_t PayloadReader::read_u8() {
    unsigned char b;
    fill(&b, 1);
    return b;
}

std::uint32_t PayloadReader::read_u32() {
    unsigned char b[4];
    fill(b, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t PayloadReader::read_u64() {
    unsigned char b[8];
    fill(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double PayloadReader::read_f64() {
    return std::bit_cast<double>(read_u64());
}

void PayloadReader::expect_eof() {
    if (in_.peek() != std::char_traits<char>::eof()) {
        throw IoError("trailing bytes at offset " + std::to_string(offset_));
    }
}

std::string format_hexfloat(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw IoError("malformed float field '" + text + "'");
    }
    return v;
}

namespace {

std::string join_csv(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> items;
    if (text.empty()) return items;
    std::string cell;
    for (char c : text) {
        if (c == ',') {
            items.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    items.push_back(cell);
    return items;
}

std::string join_hexfloats(const std::vector<double>& values) {
    std::vector<std::string> items;
    items.reserve(values.size());
    for (double v : values) items.push_back(format_hexfloat(v));
    return join_csv(items);
}

std::vector<double> parse_hexfloats(const std::string& text) {
    std::vector<double> values;
    for (const auto& item : split_csv(text)) values.push_back(parse_hexfloat(item));
    return values;
}

std::string join_flags(const std::vector<std::uint8_t>& flags) {
    std::vector<std::string> items;
    items.reserve(flags.size());
    for (auto f : flags) items.emplace_back(f ? "1" : "0");
    return join_csv(items);
}

std::vector<std::uint8_t> parse_flags(const std::string& text) {
    std::vector<std::uint8_t> flags;
    for (const auto& item : split_csv(text)) {
        if (item != "0" && item != "1") throw IoError("malformed flag field '" + item + "'");
        flags.push_back(item == "1" ? 1 : 0);
    }
    return flags;
}

void append_norm(std::ostringstream& out, const char* prefix, const NormalizationParams& p) {
    out << prefix << ".labels=" << join_csv(p.labels) << '\n';
    out << prefix << ".mean=" << join_hexfloats(p.mean) << '\n';
    out << prefix << ".std=" << join_hexfloats(p.std_dev) << '\n';
    out << prefix << ".zero_variance=" << join_flags(p.zero_variance) << '\n';
}

/// Canonical metadata block. Field order is fixed so identical models
/// serialize to identical bytes; hyperparameter keys follow map order.
std::string format_metadata(const ModelMetadata& meta) {
    std::ostringstream out;
    out << "format_version=" << meta.format_version << '\n';
    out << "family=" << meta.family << '\n';
    out << "seed=" << meta.seed << '\n';
    out << "direction_mode=" << to_string(meta.direction_mode) << '\n';
    out << "split.train=" << format_hexfloat(meta.split.train) << '\n';
    out << "split.validation=" << format_hexfloat(meta.split.validation) << '\n';
    out << "split.test=" << format_hexfloat(meta.split.test) << '\n';
    out << "split.mode=" << to_string(meta.split_mode) << '\n';
    out << "split.seed=" << meta.split_seed << '\n';
    out << "target_labels=" << join_csv(meta.target_labels) << '\n';
    append_norm(out, "input_norm", meta.input_norm);
    append_norm(out, "target_norm", meta.target_norm);
    for (const auto& [key, value] : meta.hyperparams) {
        out << "hp." << key << '=' << value << '\n';
    }
    return out.str();
}

ModelMetadata parse_metadata(const std::string& block) {
    ModelMetadata meta;
    meta.format_version = -1;
    std::istringstream in(block);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("metadata line " + std::to_string(line_no) + " has no '='");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (key == "format_version") {
            meta.format_version = std::atoi(value.c_str());
        } else if (key == "family") {
            meta.family = value;
        } else if (key == "seed") {
            meta.seed = std::strtoull(value.c_str(), nullptr, 10);
        } else if (key == "direction_mode") {
            meta.direction_mode = direction_mode_from_string(value);
        } else if (key == "split.train") {
            meta.split.train = parse_hexfloat(value);
        } else if (key == "split.validation") {
            meta.split.validation = parse_hexfloat(value);
        } else if (key == "split.test") {
            meta.split.test = parse_hexfloat(value);
        } else if (key == "split.mode") {
            meta.split_mode = split_mode_from_string(value);
        } else if (key == "split.seed") {
            meta.split_seed = std::strtoull(value.c_str(), nullptr, 10);
        } else if (key == "target_labels") {
            meta.target_labels = split_csv(value);
        } else if (key == "input_norm.labels") {
            meta.input_norm.labels = split_csv(value);
        } else if (key == "input_norm.mean") {
            meta.input_norm.mean = parse_hexfloats(value);
        } else if (key == "input_norm.std") {
            meta.input_norm.std_dev = parse_hexfloats(value);
        } else if (key == "input_norm.zero_variance") {
            meta.input_norm.zero_variance = parse_flags(value);
        } else if (key == "target_norm.labels") {
            meta.target_norm.labels = split_csv(value);
        } else if (key == "target_norm.mean") {
            meta.target_norm.mean = parse_hexfloats(value);
        } else if (key == "target_norm.std") {
            meta.target_norm.std_dev = parse_hexfloats(value);
        } else if (key == "target_norm.zero_variance") {
            meta.target_norm.zero_variance = parse_flags(value);
        } else if (key.rfind("hp.", 0) == 0) {
            meta.hyperparams[key.substr(3)] = value;
        } else {
            throw IoError("unknown metadata key '" + key + "'");
        }
    }
    return meta;
}

} // namespace

std::size_t save_model(const Regressor& model, std::ostream& out) {
    const std::string metadata = format_metadata(model.metadata());

    out.write(kModelMagic, sizeof(kModelMagic));
    PayloadWriter writer(out);
    writer.write_u64(metadata.size());
    out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));

    const std::string& family = model.metadata().family;
    if (family == "tree") {
        write_tree_payload(static_cast<const TreeModel&>(model), writer);
    } else if (family == "forest") {
        write_forest_payload(static_cast<const ForestModel&>(model), writer);
    } else if (family == "knn") {
        write_knn_payload(static_cast<const KnnModel&>(model), writer);
    } else if (family == "mlp") {
        write_mlp_payload(static_cast<const MlpModel&>(model), writer);
    } else {
        throw IoError("save_model: unknown family '" + family + "'");
    }

    if (!out) throw IoError("save_model: stream write failure");
    return sizeof(kModelMagic) + metadata.size() + writer.bytes_written();
}

std::unique_ptr<Regressor> load_model(std::istream& in) {
    char magic[4];
    in.read(magic, sizeof(magic));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(magic) ||
        std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw IoError("not a model file: bad magic");
    }

    PayloadReader header(in, sizeof(magic));
    const std::uint64_t metadata_size = header.read_u64();
    if (metadata_size > (1ull << 30)) {
        throw IoError("corrupt metadata length at offset 4");
    }
    std::string block(metadata_size, '\0');
    in.read(block.data(), static_cast<std::streamsize>(metadata_size));
    if (static_cast<std::size_t>(in.gcount()) != metadata_size) {
        throw IoError("truncated metadata block at offset " +
                      std::to_string(sizeof(magic) + 8 + static_cast<std::size_t>(in.gcount())));
    }

    ModelMetadata meta = parse_metadata(block);
    if (meta.format_version != kModelFormatVersion) {
        throw IoError("unsupported model format version " +
                      std::to_string(meta.format_version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    }

    PayloadReader reader(in, sizeof(magic) + 8 + metadata_size);
    const std::size_t input_count = meta.input_norm.column_count();
    const std::size_t target_count = meta.target_norm.column_count();

    std::unique_ptr<Regressor> model;
    if (meta.family == "tree") {
        model = std::make_unique<TreeModel>(read_tree_payload(reader, input_count, target_count));
    } else if (meta.family == "forest") {
        model = std::make_unique<ForestModel>(
            read_forest_payload(reader, input_count, target_count));
    } else if (meta.family == "knn") {
        model = std::make_unique<KnnModel>(read_knn_payload(reader));
    } else if (meta.family == "mlp") {
        model = std::make_unique<MlpModel>(read_mlp_payload(reader));
    } else {
        throw IoError("unknown model family '" + meta.family + "'");
    }
    reader.expect_eof();

    if (model->input_count() != input_count || model->target_count() != target_count) {
        throw IoError("payload dimensions disagree with metadata");
    }
    model->metadata() = std::move(meta);
    return model;
}

std::size_t save_model_file(const Regressor& model, const std::string& path) {
    const std::string tmp = path + ".tmp";
    std::size_t bytes = 0;
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + tmp);
        bytes = save_model(model, out);
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
    return bytes;
}

std::unique_ptr<Regressor> load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    return load_model(in);
}

} // namespace nbm
