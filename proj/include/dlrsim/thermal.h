#pragma once

// Steady-state conductor heat balance (CIGRE TB 207 correlations) and the
// current ratings derived from it.

#include <stdexcept>
#include <string>
#include <vector>

namespace dlrsim::thermal {

struct ConductorSpec {
    std::string name = "Zebra 428-A1/S1A-54/7";
    double diameter_m = 0.02862;
    double r_dc_20 = 6.868e-5;    // ohm/m at 20 degC
    double alpha_r = 0.004;       // 1/degC
    double absorptivity = 0.5;
    double emissivity = 0.5;
    double t_max = 75.0;          // degC, average conductor temperature limit
    double surface_roughness = 0.0625;  // d / (2 (D - d)), d = outer strand diameter

    void validate() const;
};

struct AmbientConditions {
    double wind_speed = 0.0;       // m/s
    double wind_angle_deg = 45.0;  // between wind direction and conductor axis
    double solar_radiation = 0.0;  // W/m^2
    double air_temp = 20.0;        // degC

    void validate() const;
};

/// All terms in W/m.
struct HeatBalanceTerms {
    double p_joule = 0.0;
    double p_solar = 0.0;
    double p_conv = 0.0;
    double p_rad = 0.0;

    double residual() const { return p_conv + p_rad - p_joule - p_solar; }
};

namespace constants {
inline constexpr double stefan_boltzmann = 5.670e-8;  // W/(m^2 K^4)
inline constexpr double kelvin_offset = 273.0;
inline constexpr double gravity = 9.807;
}  // namespace constants

/// Thermal conductivity of air at film temperature, W/(m K).
double air_thermal_conductivity(double t_film);
/// Kinematic viscosity of air at film temperature, m^2/s.
double air_kinematic_viscosity(double t_film);
double air_prandtl(double t_film);

double forced_nusselt(const ConductorSpec& spec, double reynolds, double wind_angle_deg);
double natural_nusselt(double grashof_prandtl);

double joule_heating(const ConductorSpec& spec, double i_dc, double t_av);
double solar_heating(const ConductorSpec& spec, const AmbientConditions& amb);

struct ConvectiveCooling {
    double power = 0.0;
    double nusselt = 0.0;
    double nusselt_forced = 0.0;
    double nusselt_natural = 0.0;
};

/// Clamped to zero power when t_s < air temperature.
ConvectiveCooling convective_cooling(const ConductorSpec& spec, const AmbientConditions& amb,
                                     double t_s);
/// Signed: negative when the conductor is colder than the air.
double radiative_cooling(const ConductorSpec& spec, double t_s, double t_a);

HeatBalanceTerms heat_balance(const ConductorSpec& spec, const AmbientConditions& amb,
                              double i_dc, double t_av);

struct DcRating {
    double amps = 0.0;
    double headroom = 0.0;  // P_c + P_r - P_S at t_max, W/m
    bool negative_headroom() const { return headroom < 0.0; }
};

/// Current that holds the conductor exactly at t_max. A negative cooling
/// headroom yields 0 A and a logged warning instead of an error.
DcRating dc_rating(const ConductorSpec& spec, const AmbientConditions& amb);

double ac_rating(double i_dc);

/// Convenience: ac_rating(dc_rating(spec, amb).amps).
double ac_rating(const ConductorSpec& spec, const AmbientConditions& amb);

class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPhysical : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TemperatureOptions {
    double initial_guess = 50.0;
    double tolerance = 0.1;  // degC
    double upper_bound = 200.0;
    int max_iterations = 60;
};

struct TemperatureSolution {
    double temperature = 0.0;
    int iterations = 0;
};

/// Average conductor temperature carrying i_load under amb. Bisection on the
/// heat-balance residual over [air_temp, upper_bound]; the first probe is the
/// initial guess when it lies inside the bracket.
TemperatureSolution steady_state_temperature(const ConductorSpec& spec,
                                             const AmbientConditions& amb, double i_load,
                                             const TemperatureOptions& opts = {});

enum class AmbientParameter { AirTemp, WindSpeed, WindAngle, Solar };

class UnknownParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws UnknownParameter.
AmbientParameter parse_ambient_parameter(const std::string& name);
std::string to_string(AmbientParameter p);

void set_parameter(AmbientConditions& amb, AmbientParameter p, double value);

struct SweepPoint {
    double value = 0.0;
    double i_dc = 0.0;
    double i_ac = 0.0;
};

std::vector<SweepPoint> sweep_rating(const ConductorSpec& spec, const AmbientConditions& base,
                                     AmbientParameter parameter, double lo, double hi,
                                     int points);

class DegenerateRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SensitivityFit {
    double slope = 0.0;            // A (AC) per unit of the parameter
    double intercept = 0.0;        // A
    double percent_per_unit = 0.0; // 100 * slope / rating at the low end of the range
    double elasticity = 0.0;       // (%d rating) / (%d parameter) at the sweep mean
    int points = 0;
};

/// First-order least-squares fit of the AC rating against one ambient
/// parameter swept over [lo, hi]. Ranges must stay inside the sweep domains
/// T in [-20, 40] degC, V in [0, 25] m/s, S in [0, 1000] W/m^2.
SensitivityFit sensitivity_fit(const ConductorSpec& spec, const AmbientConditions& base,
                               AmbientParameter parameter, double lo, double hi,
                               int points = 61);

}  // namespace dlrsim::thermal
