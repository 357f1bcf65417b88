#include "nbm/turbine.hpp"

#include "nbm/error.hpp"

#include <cmath>

namespace nbm {

void TurbineSpec::validate() const {
    if (!(0.0 < cut_in && cut_in < rated_wind && rated_wind < cut_out)) {
        throw ConfigError("TurbineSpec: need 0 < cut_in < rated_wind < cut_out");
    }
    if (rated_power <= 0.0) throw ConfigError("TurbineSpec: rated_power must be > 0");
    if (!(rotor_min < rotor_rated)) throw ConfigError("TurbineSpec: rotor_min must be < rotor_rated");
    if (gearbox_ratio <= 1.0) throw ConfigError("TurbineSpec: gearbox_ratio must be > 1");
    if (line_voltage <= 0.0 || power_factor <= 0.0 || power_factor > 1.0) {
        throw ConfigError("TurbineSpec: bad electrical parameters");
    }
}

double ideal_power(double wind_speed, const TurbineSpec& spec) {
    if (wind_speed < spec.cut_in || wind_speed >= spec.cut_out) return 0.0;
    if (wind_speed >= spec.rated_wind) return spec.rated_power;
    const double v3 = wind_speed * wind_speed * wind_speed;
    const double ci3 = spec.cut_in * spec.cut_in * spec.cut_in;
    const double rw3 = spec.rated_wind * spec.rated_wind * spec.rated_wind;
    return spec.rated_power * (v3 - ci3) / (rw3 - ci3);
}

double ideal_rotor_speed(double wind_speed, const TurbineSpec& spec) {
    if (wind_speed < spec.cut_in || wind_speed >= spec.cut_out) return 0.0;
    if (wind_speed >= spec.rated_wind) return spec.rotor_rated;
    const double frac = (wind_speed - spec.cut_in) / (spec.rated_wind - spec.cut_in);
    return spec.rotor_min + (spec.rotor_rated - spec.rotor_min) * frac;
}

std::pair<double, double> derived_channels(double power_kw, double rotor_rpm,
                                           const TurbineSpec& spec) {
    const double generator_rpm = rotor_rpm * spec.gearbox_ratio;
    // current [A] = P [W] / (sqrt(3) * U_line [V] * cos(phi))
    const double current = 1000.0 * power_kw /
                           (std::sqrt(3.0) * spec.line_voltage * 1000.0 * spec.power_factor);
    return {generator_rpm, current};
}

} // namespace nbm
