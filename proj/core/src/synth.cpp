#include "nbm/synth.hpp"

#include "nbm/error.hpp"
#include "nbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nbm {

namespace {

constexpr std::int64_t kEpochStart = 1577836800; // 2020-01-01T00:00:00Z
constexpr std::int64_t kStepSeconds = 600;
constexpr std::size_t kRowsPerDay = 144;

double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

double clamp_floor(double v) { return v < 0.0 ? 0.0 : v; }

/// Gaussian draw truncated at +/-5 sigma.
double truncated_noise(Rng& rng, double sigma) {
    if (sigma <= 0.0) {
        rng.gaussian(); // keep the draw count independent of sigma
        return 0.0;
    }
    const double g = std::clamp(rng.gaussian(), -5.0, 5.0);
    return g * sigma;
}

} // namespace

void WindFieldConfig::validate() const {
    if (weibull_shape <= 0.0 || weibull_scale <= 0.0) {
        throw ConfigError("WindFieldConfig: Weibull shape and scale must be > 0");
    }
    if (ar1_rho < 0.0 || ar1_rho >= 1.0) {
        throw ConfigError("WindFieldConfig: ar1_rho must be in [0, 1)");
    }
    if (wake_deficit < 0.0 || wake_deficit >= 1.0) {
        throw ConfigError("WindFieldConfig: wake_deficit must be in [0, 1)");
    }
    if (wake_sector_width < 0.0 || direction_drift_deg < 0.0) {
        throw ConfigError("WindFieldConfig: widths must be >= 0");
    }
}

void NoiseConfig::validate() const {
    if (power < 0.0 || rotor < 0.0 || generator < 0.0 || current < 0.0) {
        throw ConfigError("NoiseConfig: sigmas must be >= 0");
    }
}

const char* to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::kPowerDerate: return "power-derate";
        case FaultKind::kRotorBias: return "rotor-bias";
        case FaultKind::kStuckSensor: return "stuck-sensor";
    }
    return "unknown";
}

FaultKind fault_kind_from_string(const std::string& text) {
    if (text == "power-derate") return FaultKind::kPowerDerate;
    if (text == "rotor-bias") return FaultKind::kRotorBias;
    if (text == "stuck-sensor") return FaultKind::kStuckSensor;
    throw ConfigError("unknown fault kind '" + text + "'");
}

const char* to_string(Channel channel) {
    switch (channel) {
        case Channel::kWindSpeed: return "wind_speed";
        case Channel::kWindDirection: return "wind_direction";
        case Channel::kActivePower: return "active_power";
        case Channel::kRotorSpeed: return "rotor_speed";
        case Channel::kGeneratorSpeed: return "generator_speed";
        case Channel::kCurrent: return "current";
    }
    return "unknown";
}

Channel channel_from_string(const std::string& text) {
    if (text == "wind_speed") return Channel::kWindSpeed;
    if (text == "wind_direction") return Channel::kWindDirection;
    if (text == "active_power") return Channel::kActivePower;
    if (text == "rotor_speed") return Channel::kRotorSpeed;
    if (text == "generator_speed") return Channel::kGeneratorSpeed;
    if (text == "current") return Channel::kCurrent;
    throw ConfigError("unknown channel '" + text + "'");
}

std::pair<std::vector<double>, std::vector<double>>
simulate_wind(std::size_t n, const WindFieldConfig& config, std::uint64_t seed) {
    if (n < 1) throw ConfigError("simulate_wind: need n >= 1");
    config.validate();

    Rng rng(mix_seed(seed, 0));
    std::vector<double> speeds(n);
    std::vector<double> directions(n);

    // Stationary AR(1) driver with standard normal marginal; each step's
    // Weibull speed is the copula transform of the driver.
    const double rho = config.ar1_rho;
    const double innovation_scale = std::sqrt(1.0 - rho * rho);
    double z = rng.gaussian();
    double direction = 360.0 * rng.uniform01();

    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            z = rho * z + innovation_scale * rng.gaussian();
            direction = wrap_degrees(direction + config.direction_drift_deg * rng.gaussian());
        }
        const double u = std::clamp(standard_normal_cdf(z), 1e-300, 1.0 - 1e-16);
        speeds[i] = config.weibull_scale * std::pow(-std::log1p(-u), 1.0 / config.weibull_shape);
        directions[i] = direction;
    }
    return {std::move(speeds), std::move(directions)};
}

bool in_wake_sector(double direction_deg, const WindFieldConfig& config) {
    const double delta = std::abs(wrap_degrees(direction_deg - config.wake_sector_center));
    const double dist = std::min(delta, 360.0 - delta);
    return dist <= config.wake_sector_width / 2.0;
}

SCADADataset generate_dataset(std::size_t days, const TurbineSpec& spec,
                              const WindFieldConfig& wind, const NoiseConfig& noise,
                              std::uint64_t seed) {
    if (days < 1) throw ConfigError("generate_dataset: need days >= 1");
    spec.validate();
    wind.validate();
    noise.validate();

    const std::size_t n = kRowsPerDay * days;
    const auto [speeds, directions] = simulate_wind(n, wind, seed);

    // Nominal channel values the sigma fractions refer to.
    const double nominal_power = spec.rated_power;
    const double nominal_rotor = spec.rotor_rated;
    const auto [nominal_generator, nominal_current] =
        derived_channels(spec.rated_power, spec.rotor_rated, spec);

    Rng noise_rng(mix_seed(seed, 1));

    SCADADataset dataset;
    dataset.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = speeds[i];
        const double dir = directions[i];

        double power = ideal_power(v, spec);
        if (in_wake_sector(dir, wind)) power *= 1.0 - wind.wake_deficit;
        const double rotor = ideal_rotor_speed(v, spec);
        const auto [generator, current] = derived_channels(power, rotor, spec);

        SCADARecord& r = dataset.records[i];
        r.timestamp = kEpochStart + static_cast<std::int64_t>(i) * kStepSeconds;
        r.wind_speed = v;
        r.wind_direction = dir;
        r.active_power = clamp_floor(power + truncated_noise(noise_rng, noise.power * nominal_power));
        r.rotor_speed = clamp_floor(rotor + truncated_noise(noise_rng, noise.rotor * nominal_rotor));
        r.generator_speed =
            clamp_floor(generator + truncated_noise(noise_rng, noise.generator * nominal_generator));
        r.current = clamp_floor(current + truncated_noise(noise_rng, noise.current * nominal_current));
    }
    return dataset;
}

std::pair<SCADADataset, std::vector<std::uint8_t>>
inject_fault(const SCADADataset& dataset, const FaultSpec& fault) {
    const std::size_t m = dataset.size();
    if (fault.onset >= m) {
        throw ConfigError("inject_fault: onset " + std::to_string(fault.onset) +
                          " out of range (dataset has " + std::to_string(m) + " rows)");
    }
    if (!std::isfinite(fault.magnitude)) {
        throw ConfigError("inject_fault: magnitude must be finite");
    }

    SCADADataset out = dataset;
    std::vector<std::uint8_t> labels(m, 0);

    const auto channel_ref = [](SCADARecord& r, Channel c) -> double& {
        switch (c) {
            case Channel::kWindSpeed: return r.wind_speed;
            case Channel::kWindDirection: return r.wind_direction;
            case Channel::kActivePower: return r.active_power;
            case Channel::kRotorSpeed: return r.rotor_speed;
            case Channel::kGeneratorSpeed: return r.generator_speed;
            case Channel::kCurrent: return r.current;
        }
        return r.active_power; // unreachable
    };

    const double held_value =
        fault.kind == FaultKind::kStuckSensor
            ? channel_ref(out.records[fault.onset], fault.channel)
            : 0.0;

    for (std::size_t i = fault.onset; i < m; ++i) {
        labels[i] = 1;
        SCADARecord& r = out.records[i];
        switch (fault.kind) {
            case FaultKind::kPowerDerate:
                r.active_power *= 1.0 - fault.magnitude;
                break;
            case FaultKind::kRotorBias:
                r.rotor_speed = clamp_floor(r.rotor_speed + fault.magnitude);
                break;
            case FaultKind::kStuckSensor:
                channel_ref(r, fault.channel) = held_value;
                break;
        }
    }
    return {std::move(out), std::move(labels)};
}

std::string format_generation_metadata(std::size_t days, const TurbineSpec& spec,
                                       const WindFieldConfig& wind, const NoiseConfig& noise,
                                       std::uint64_t seed) {
    std::ostringstream out;
    out << "format=scada-synth-v1\n";
    out << "rng=" << Rng::kAlgorithmTag << "\n";
    out << "seed=" << seed << "\n";
    out << "days=" << days << "\n";
    out << "rows=" << kRowsPerDay * days << "\n";
    out << "step_seconds=" << kStepSeconds << "\n";
    out << "epoch_start=" << kEpochStart << "\n";
    out << "spec.rated_power=" << format_double(spec.rated_power) << "\n";
    out << "spec.cut_in=" << format_double(spec.cut_in) << "\n";
    out << "spec.rated_wind=" << format_double(spec.rated_wind) << "\n";
    out << "spec.cut_out=" << format_double(spec.cut_out) << "\n";
    out << "spec.rotor_min=" << format_double(spec.rotor_min) << "\n";
    out << "spec.rotor_rated=" << format_double(spec.rotor_rated) << "\n";
    out << "spec.gearbox_ratio=" << format_double(spec.gearbox_ratio) << "\n";
    out << "spec.line_voltage=" << format_double(spec.line_voltage) << "\n";
    out << "spec.power_factor=" << format_double(spec.power_factor) << "\n";
    out << "wind.weibull_shape=" << format_double(wind.weibull_shape) << "\n";
    out << "wind.weibull_scale=" << format_double(wind.weibull_scale) << "\n";
    out << "wind.ar1_rho=" << format_double(wind.ar1_rho) << "\n";
    out << "wind.direction_drift_deg=" << format_double(wind.direction_drift_deg) << "\n";
    out << "wind.wake_sector_center=" << format_double(wind.wake_sector_center) << "\n";
    out << "wind.wake_sector_width=" << format_double(wind.wake_sector_width) << "\n";
    out << "wind.wake_deficit=" << format_double(wind.wake_deficit) << "\n";
    out << "noise.active_power=" << format_double(noise.power) << "\n";
    out << "noise.rotor_speed=" << format_double(noise.rotor) << "\n";
    out << "noise.generator_speed=" << format_double(noise.generator) << "\n";
    out << "noise.current=" << format_double(noise.current) << "\n";
    return out.str();
}

void write_label_table(const SCADADataset& dataset, const std::vector<std::uint8_t>& labels,
                       std::ostream& out) {
    if (labels.size() != dataset.size()) {
        throw DimensionError("write_label_table: label/dataset length mismatch");
    }
    out << "timestamp,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << dataset.records[i].timestamp << ',' << static_cast<int>(labels[i]) << '\n';
    }
}

} // namespace nbm
