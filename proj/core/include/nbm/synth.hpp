#pragma once

#include "nbm/scada.hpp"
#include "nbm/turbine.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nbm {

/// Site wind climate: Weibull marginal sampled through a Gaussian copula
/// with AR(1) step-to-step correlation, plus a wrapped random walk for the
/// direction and a direction-dependent wake power deficit.
struct WindFieldConfig {
    double weibull_shape = 2.0;
    double weibull_scale = 8.0;      ///< m/s
    double ar1_rho = 0.97;           ///< lag-1 correlation of the Gaussian driver
    double direction_drift_deg = 5.0;///< std dev of the per-step direction walk
    double wake_sector_center = 225.0; ///< degrees
    double wake_sector_width = 40.0;   ///< degrees, full width
    double wake_deficit = 0.03;        ///< fractional power loss inside the sector

    void validate() const;
};

/// Additive Gaussian sensor noise, expressed per channel as a fraction of
/// that channel's rated/nominal value. Draws are truncated at +/-5 sigma so
/// generated channels stay inside their physical envelopes.
struct NoiseConfig {
    double power = 0.015;
    double rotor = 0.015;
    double generator = 0.015;
    double current = 0.015;

    void validate() const;
};

enum class FaultKind { kPowerDerate, kRotorBias, kStuckSensor };

const char* to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string& text);

/// Channels a stuck-sensor fault can hold.
enum class Channel { kWindSpeed, kWindDirection, kActivePower, kRotorSpeed,
                     kGeneratorSpeed, kCurrent };

const char* to_string(Channel channel);
Channel channel_from_string(const std::string& text);

struct FaultSpec {
    FaultKind kind = FaultKind::kPowerDerate;
    std::size_t onset = 0;      ///< first affected row
    double magnitude = 0.1;     ///< fraction (derate), rpm (bias); unused for stuck
    Channel channel = Channel::kRotorSpeed; ///< stuck-sensor target channel
};

/// AR(1)-correlated Weibull wind speeds and wrapped random-walk directions.
/// Deterministic in (n, config, seed).
std::pair<std::vector<double>, std::vector<double>>
simulate_wind(std::size_t n, const WindFieldConfig& config, std::uint64_t seed);

/// True if the direction falls inside the wake sector (circular distance to
/// the sector center at most half the width).
bool in_wake_sector(double direction_deg, const WindFieldConfig& config);

/// 144*days rows of 10-minute records: ideal curves, wake deficit on power
/// (current follows the derated power), truncated Gaussian noise, physical
/// floors at zero.
SCADADataset generate_dataset(std::size_t days, const TurbineSpec& spec,
                              const WindFieldConfig& wind, const NoiseConfig& noise,
                              std::uint64_t seed);

/// Applies the fault from its onset onward; returns the modified dataset and
/// a 0/1 label per row (1 = affected).
std::pair<SCADADataset, std::vector<std::uint8_t>>
inject_fault(const SCADADataset& dataset, const FaultSpec& fault);

/// Sidecar metadata (key=value lines) recording the generator inputs.
std::string format_generation_metadata(std::size_t days, const TurbineSpec& spec,
                                       const WindFieldConfig& wind, const NoiseConfig& noise,
                                       std::uint64_t seed);

/// Two-column `timestamp,label` table for injected-fault ground truth.
void write_label_table(const SCADADataset& dataset, const std::vector<std::uint8_t>& labels,
                       std::ostream& out);

} // namespace nbm
