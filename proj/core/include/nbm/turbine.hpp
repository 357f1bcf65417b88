#pragma once

#include <utility>

namespace nbm {

/// Turbine ratings. Defaults follow a 3.3 MW onshore class machine; the
/// electrical and drivetrain values are configurable artifact choices.
struct TurbineSpec {
    double rated_power = 3300.0;  ///< kW
    double cut_in = 3.0;          ///< m/s
    double rated_wind = 13.0;     ///< m/s
    double cut_out = 25.0;        ///< m/s
    double rotor_min = 6.5;       ///< rpm at cut-in
    double rotor_rated = 13.6;    ///< rpm at rated wind
    double gearbox_ratio = 113.0;
    double line_voltage = 0.69;   ///< kV
    double power_factor = 0.95;

    void validate() const; ///< throws ConfigError on inconsistent ratings
};

/// Idealized power curve: zero outside [cut_in, cut_out), cubic ramp in
/// region II, rated in region III.
double ideal_power(double wind_speed, const TurbineSpec& spec);

/// Idealized rotor speed: zero outside [cut_in, cut_out), linear ramp
/// rotor_min -> rotor_rated over [cut_in, rated_wind], rotor_rated above.
double ideal_rotor_speed(double wind_speed, const TurbineSpec& spec);

/// Generator speed (rpm) and line current (A) implied by power and rotor
/// speed: generator = rotor * gearbox ratio, current from the three-phase
/// apparent-power relation.
std::pair<double, double> derived_channels(double power_kw, double rotor_rpm,
                                           const TurbineSpec& spec);

} // namespace nbm
