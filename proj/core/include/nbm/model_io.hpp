#pragma once

#include "nbm/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

namespace nbm {

/// Little-endian binary writer for model payloads. All multi-byte values are
/// written byte by byte so files are identical across hosts.
class PayloadWriter {
public:
    explicit PayloadWriter(std::ostream& out) : out_(out) {}

    void write_u8(std::uint8_t v);
    void write_u32(std::uint32_t v);
    void write_u64(std::uint64_t v);
    void write_f64(double v);

    std::size_t bytes_written() const { return bytes_; }

private:
    std::ostream& out_;
    std::size_t bytes_ = 0;
};

/// Counterpart reader; throws IoError naming the absolute file offset on
/// truncation.
class PayloadReader {
public:
    PayloadReader(std::istream& in, std::size_t start_offset)
        : in_(in), offset_(start_offset) {}

    std::uint8_t read_u8();
    std::uint32_t read_u32();
    std::uint64_t read_u64();
    double read_f64();

    std::size_t offset() const { return offset_; }

    /// Throws IoError if any bytes remain.
    void expect_eof();

private:
    void fill(unsigned char* buf, std::size_t n);

    std::istream& in_;
    std::size_t offset_;
};

/// Lossless text form of a double (printf %a hex-float); strtod parses it
/// back bit-exactly.
std::string format_hexfloat(double v);
double parse_hexfloat(const std::string& text);

/// Serializes the model: magic "NBM1", length-prefixed key=value metadata
/// block in canonical field order, then the family payload. Returns the
/// total byte count. Same model -> byte-identical output.
std::size_t save_model(const Regressor& model, std::ostream& out);

/// Reads a model written by save_model. Throws IoError on bad magic,
/// unsupported format version, truncation (with offset), or trailing bytes.
std::unique_ptr<Regressor> load_model(std::istream& in);

/// File wrappers; save goes through a temp file + rename.
std::size_t save_model_file(const Regressor& model, const std::string& path);
std::unique_ptr<Regressor> load_model_file(const std::string& path);

} // namespace nbm
