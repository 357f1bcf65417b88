#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace nbm::cli {

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

/// Resolved-run manifest written next to each output (`<out>.manifest`):
/// subcommand, format versions, and every resolved option, sorted by key.
/// Any reported number is reproducible from the manifest alone.
class Manifest {
public:
    explicit Manifest(std::string command) : command_(std::move(command)) {}

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value);

    void write_next_to(const std::string& output_path) const;

private:
    std::string command_;
    std::map<std::string, std::string> entries_;
};

} // namespace nbm::cli
