#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nbm {

/// One 10-minute SCADA record in raw physical units.
struct SCADARecord {
    std::int64_t timestamp = 0; ///< seconds since epoch, UTC
    double wind_speed = 0.0;    ///< m/s, 10-min mean
    double wind_direction = 0.0;///< degrees, [0, 360)
    double active_power = 0.0;  ///< kW
    double rotor_speed = 0.0;   ///< rpm
    double generator_speed = 0.0; ///< rpm
    double current = 0.0;       ///< A

    friend bool operator==(const SCADARecord&, const SCADARecord&) = default;
};

/// Time-ordered collection of SCADA records. Timestamps are strictly
/// increasing; nominal spacing is 600 s but gaps are tolerated.
struct SCADADataset {
    std::vector<SCADARecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    friend bool operator==(const SCADADataset&, const SCADADataset&) = default;
};

/// Canonical column order of the on-disk table.
inline constexpr std::array<const char*, 7> kScadaColumns = {
    "timestamp",       "wind_speed",      "wind_direction", "active_power",
    "rotor_speed",     "generator_speed", "current"};

inline constexpr const char* kScadaHeader =
    "timestamp,wind_speed,wind_direction,active_power,rotor_speed,generator_speed,current";

/// Validates one record's physical ranges. Throws ParseError naming the
/// offending field; `row` is only used in the message (1-based data row).
void validate_record(const SCADARecord& rec, std::size_t row);

/// Parses the comma-delimited SCADA table format. The header row must match
/// kScadaHeader exactly. Throws ParseError on malformed cells (with line
/// number), schema mismatches, range violations, and non-monotonic
/// timestamps.
SCADADataset parse_scada_table(std::istream& in);

/// Convenience file wrapper around parse_scada_table.
SCADADataset read_scada_file(const std::string& path);

/// Writes the table in the canonical format; parse(write(d)) == d.
/// Floating-point cells use shortest round-trip decimal text.
void write_scada_table(const SCADADataset& dataset, std::ostream& out);

void write_scada_file(const SCADADataset& dataset, const std::string& path);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

} // namespace nbm
