#include "nbm/scada.hpp"

#include "nbm/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nbm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_double_cell(const std::string& cell, std::size_t line_no, const char* column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed numeric cell '" +
                         cell + "' in column " + column);
    }
    if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value in column " +
                         std::string(column));
    }
    return v;
}

std::int64_t parse_timestamp_cell(const std::string& cell, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": malformed timestamp cell '" + cell + "'");
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

void validate_record(const SCADARecord& rec, std::size_t row) {
    const auto fail = [row](const std::string& msg) {
        throw ParseError("row " + std::to_string(row) + ": " + msg);
    };
    if (rec.wind_speed < 0.0) fail("wind_speed must be >= 0");
    if (rec.wind_direction < 0.0 || rec.wind_direction >= 360.0) {
        fail("wind_direction must be in [0, 360), got " + format_double(rec.wind_direction));
    }
    if (rec.rotor_speed < 0.0) fail("rotor_speed must be >= 0");
    if (rec.generator_speed < 0.0) fail("generator_speed must be >= 0");
}

SCADADataset parse_scada_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty input: missing header row");
    }
    line = strip_cr(line);
    if (line != kScadaHeader) {
        throw ParseError("schema error: header must be exactly '" + std::string(kScadaHeader) +
                         "', got '" + line + "'");
    }

    SCADADataset dataset;
    std::size_t line_no = 1; // header was line 1
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue; // tolerate a trailing blank line

        const auto cells = split_csv_line(line);
        if (cells.size() != kScadaColumns.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(kScadaColumns.size()) + " columns, got " +
                             std::to_string(cells.size()));
        }

        SCADARecord rec;
        rec.timestamp = parse_timestamp_cell(cells[0], line_no);
        rec.wind_speed = parse_double_cell(cells[1], line_no, "wind_speed");
        rec.wind_direction = parse_double_cell(cells[2], line_no, "wind_direction");
        rec.active_power = parse_double_cell(cells[3], line_no, "active_power");
        rec.rotor_speed = parse_double_cell(cells[4], line_no, "rotor_speed");
        rec.generator_speed = parse_double_cell(cells[5], line_no, "generator_speed");
        rec.current = parse_double_cell(cells[6], line_no, "current");

        validate_record(rec, dataset.records.size() + 1);

        if (!dataset.records.empty() && rec.timestamp <= dataset.records.back().timestamp) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": timestamps must be strictly increasing (" +
                             std::to_string(rec.timestamp) + " after " +
                             std::to_string(dataset.records.back().timestamp) + ")");
        }
        dataset.records.push_back(rec);
    }
    return dataset;
}

SCADADataset read_scada_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open SCADA file: " + path);
    return parse_scada_table(in);
}

std::string format_double(double v) {
    char buf[64];
    // Integers print plainly; everything else gets the shortest decimal
    // string that round-trips.
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_scada_table(const SCADADataset& dataset, std::ostream& out) {
    out << kScadaHeader << '\n';
    for (const auto& r : dataset.records) {
        out << r.timestamp << ',' << format_double(r.wind_speed) << ','
            << format_double(r.wind_direction) << ',' << format_double(r.active_power) << ','
            << format_double(r.rotor_speed) << ',' << format_double(r.generator_speed) << ','
            << format_double(r.current) << '\n';
    }
}

void write_scada_file(const SCADADataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    write_scada_table(dataset, out);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace nbm
