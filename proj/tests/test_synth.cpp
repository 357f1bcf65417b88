#include "nbm/error.hpp"
#include "nbm/synth.hpp"
#include "nbm/turbine.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace nbm;

TEST_CASE("simulate_wind: deterministic in the seed") {
    const WindFieldConfig config;
    const auto a = simulate_wind(500, config, 42);
    const auto b = simulate_wind(500, config, 42);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    const auto c = simulate_wind(500, config, 43);
    CHECK(a.first != c.first);
}

TEST_CASE("simulate_wind: Weibull(2, 8) sample mean near 8*Gamma(1.5)") {
    const WindFieldConfig config; // shape 2, scale 8
    const auto [speeds, directions] = simulate_wind(50000, config, 42);
    double sum = 0.0;
    for (double v : speeds) sum += v;
    const double mean = sum / 50000.0;
    CHECK(mean > 7.09 - 0.15);
    CHECK(mean < 7.09 + 0.15);

    for (double d : directions) {
        CHECK(d >= 0.0);
        CHECK(d < 360.0);
    }
}

TEST_CASE("simulate_wind: ar1_rho 0 gives uncorrelated steps") {
    WindFieldConfig config;
    config.ar1_rho = 0.0;
    const auto [speeds, directions] = simulate_wind(50000, config, 7);

    double mean = 0.0;
    for (double v : speeds) mean += v;
    mean /= static_cast<double>(speeds.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < speeds.size(); ++i) {
        num += (speeds[i] - mean) * (speeds[i + 1] - mean);
        den += (speeds[i] - mean) * (speeds[i] - mean);
    }
    CHECK(std::abs(num / den) < 0.02);
}

TEST_CASE("generate_dataset: row count, spacing, physical floors") {
    const auto d = generate_dataset(3, {}, {}, {}, 1);
    REQUIRE(d.size() == 3 * 144);
    for (std::size_t i = 1; i < d.size(); ++i) {
        CHECK(d.records[i].timestamp - d.records[i - 1].timestamp == 600);
    }
    const TurbineSpec spec;
    const NoiseConfig noise;
    for (const auto& r : d.records) {
        CHECK(r.active_power >= 0.0);
        CHECK(r.active_power <= spec.rated_power * (1.0 + 5.0 * noise.power));
        CHECK(r.rotor_speed >= 0.0);
        CHECK(r.generator_speed >= 0.0);
        CHECK(r.current >= 0.0);
        CHECK(r.wind_direction >= 0.0);
        CHECK(r.wind_direction < 360.0);
    }
}

TEST_CASE("generate_dataset: zero noise hits the ideal curves exactly") {
    NoiseConfig noise;
    noise.power = noise.rotor = noise.generator = noise.current = 0.0;
    WindFieldConfig wind;
    const TurbineSpec spec;
    const auto d = generate_dataset(5, spec, wind, noise, 3);

    bool saw_rated = false;
    for (const auto& r : d.records) {
        if (r.wind_speed >= spec.rated_wind && r.wind_speed < spec.cut_out &&
            !in_wake_sector(r.wind_direction, wind)) {
            CHECK(r.active_power == 3300.0);
            saw_rated = true;
        }
        // Exact three-phase consistency of the noise-free channels.
        const auto [gen, cur] = derived_channels(r.active_power, 0.0, spec);
        CHECK(r.current * std::sqrt(3.0) * spec.line_voltage * 1000.0 * spec.power_factor ==
              doctest::Approx(r.active_power * 1000.0).epsilon(1e-12));
        (void)gen;
        (void)cur;
    }
    CHECK(saw_rated); // default climate reaches rated wind within 5 days
}

TEST_CASE("generate_dataset: byte-identical for the same seed") {
    const auto a = generate_dataset(2, {}, {}, {}, 9);
    const auto b = generate_dataset(2, {}, {}, {}, 9);
    std::ostringstream sa;
    std::ostringstream sb;
    write_scada_table(a, sa);
    write_scada_table(b, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("in_wake_sector: circular distance") {
    WindFieldConfig config;
    config.wake_sector_center = 10.0;
    config.wake_sector_width = 40.0;
    CHECK(in_wake_sector(10.0, config));
    CHECK(in_wake_sector(350.0, config));
    CHECK(in_wake_sector(30.0, config));
    CHECK_FALSE(in_wake_sector(31.0, config));
    CHECK_FALSE(in_wake_sector(190.0, config));
}

TEST_CASE("inject_fault: zero-magnitude derate changes labels only") {
    const auto d = generate_dataset(1, {}, {}, {}, 5);
    FaultSpec fault;
    fault.kind = FaultKind::kPowerDerate;
    fault.onset = 100;
    fault.magnitude = 0.0;
    const auto [out, labels] = inject_fault(d, fault);
    CHECK(out == d);
    REQUIRE(labels.size() == d.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        CHECK(labels[i] == (i >= 100 ? 1 : 0));
    }
}

TEST_CASE("inject_fault: 10% derate scales power from the onset") {
    const auto d = generate_dataset(2, {}, {}, {}, 5);
    FaultSpec fault;
    fault.kind = FaultKind::kPowerDerate;
    fault.onset = 100;
    fault.magnitude = 0.1;
    const auto [out, labels] = inject_fault(d, fault);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i < 100) {
            CHECK(out.records[i].active_power == d.records[i].active_power);
        } else {
            CHECK(out.records[i].active_power == d.records[i].active_power * 0.9);
        }
        CHECK(out.records[i].rotor_speed == d.records[i].rotor_speed);
    }
}

TEST_CASE("inject_fault: stuck sensor holds the onset value") {
    const auto d = generate_dataset(1, {}, {}, {}, 6);
    FaultSpec fault;
    fault.kind = FaultKind::kStuckSensor;
    fault.onset = 50;
    fault.channel = Channel::kRotorSpeed;
    const auto [out, labels] = inject_fault(d, fault);
    const double held = d.records[50].rotor_speed;
    for (std::size_t i = 50; i < d.size(); ++i) {
        CHECK(out.records[i].rotor_speed == held);
    }
    CHECK(out.records[49].rotor_speed == d.records[49].rotor_speed);
}

TEST_CASE("inject_fault: rotor bias adds rpm with a physical floor") {
    const auto d = generate_dataset(1, {}, {}, {}, 6);
    FaultSpec fault;
    fault.kind = FaultKind::kRotorBias;
    fault.onset = 0;
    fault.magnitude = 1.5;
    const auto [out, labels] = inject_fault(d, fault);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(out.records[i].rotor_speed ==
              doctest::Approx(d.records[i].rotor_speed + 1.5).epsilon(1e-12));
    }
}

TEST_CASE("inject_fault: onset out of range") {
    const auto d = generate_dataset(1, {}, {}, {}, 6);
    FaultSpec fault;
    fault.onset = d.size();
    CHECK_THROWS_AS(inject_fault(d, fault), ConfigError);
}

TEST_CASE("label table and metadata sidecar formats") {
    const auto d = generate_dataset(1, {}, {}, {}, 8);
    FaultSpec fault;
    fault.onset = d.size() - 2;
    const auto [out, labels] = inject_fault(d, fault);

    std::ostringstream table;
    write_label_table(out, labels, table);
    std::istringstream lines(table.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "timestamp,label");
    std::getline(lines, line);
    CHECK(line == std::to_string(out.records[0].timestamp) + ",0");

    const auto meta = format_generation_metadata(1, {}, {}, {}, 8);
    CHECK(meta.find("seed=8") != std::string::npos);
    CHECK(meta.find("rng=") != std::string::npos);
    CHECK(meta.find("spec.rated_power=3300") != std::string::npos);
}
