#include "output.hpp"

#include "nbm/error.hpp"
#include "nbm/model.hpp"
#include "nbm/scada.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace nbm::cli {

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void Manifest::set(const std::string& key, double value) {
    entries_[key] = format_double(value);
}

void Manifest::set(const std::string& key, std::uint64_t value) {
    entries_[key] = std::to_string(value);
}

void Manifest::write_next_to(const std::string& output_path) const {
    std::ostringstream out;
    out << "command=" << command_ << '\n';
    out << "model_format_version=" << kModelFormatVersion << '\n';
    for (const auto& [key, value] : entries_) {
        out << key << '=' << value << '\n';
    }
    write_text_atomic(output_path + ".manifest", out.str());
}

} // namespace nbm::cli
