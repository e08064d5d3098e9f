#include "dlrsim/thermal.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dlrsim::thermal {

namespace {

// CIGRE TB 207 coefficient tables (see docs/cigre_constants.md).

// Forced convection, Nu_90 = B1 * Re^n.
constexpr double kReynoldsBandEdge = 2650.0;
constexpr double kRoughnessEdge = 0.05;
constexpr double kLowReB1 = 0.641, kLowReN = 0.471;
constexpr double kSmoothB1 = 0.178, kSmoothN = 0.633;
constexpr double kRoughB1 = 0.048, kRoughN = 0.800;

// Attack-angle correction, Nu_delta = Nu_90 * (A1 + B2 sin(delta)^m1).
constexpr double kAngleBandEdgeDeg = 24.0;
constexpr double kAngleA1 = 0.42;
constexpr double kLowAngleB2 = 0.68, kLowAngleM1 = 1.08;
constexpr double kHighAngleB2 = 0.58, kHighAngleM1 = 0.90;

// Natural convection, Nu = A2 * (Gr Pr)^m2.
constexpr double kGrPrBandEdge = 1.0e4;
constexpr double kLowGrPrA2 = 0.850, kLowGrPrM2 = 0.188;
constexpr double kHighGrPrA2 = 0.480, kHighGrPrM2 = 0.250;

// Sea-level relative air density.
constexpr double kRelativeAirDensity = 1.0;

// Sweep domains accepted by sensitivity_fit.
constexpr double kTempLo = -20.0, kTempHi = 40.0;
constexpr double kWindLo = 0.0, kWindHi = 25.0;
constexpr double kSolarLo = 0.0, kSolarHi = 1000.0;

double resistance_factor(const ConductorSpec& spec, double t_av) {
    return spec.r_dc_20 * (1.0 + spec.alpha_r * (t_av - 20.0));
}

}  // namespace

void ConductorSpec::validate() const {
    if (!(diameter_m > 0.0)) throw std::invalid_argument("ConductorSpec: diameter_m must be > 0");
    if (!(r_dc_20 > 0.0)) throw std::invalid_argument("ConductorSpec: r_dc_20 must be > 0");
    if (absorptivity < 0.0 || absorptivity > 1.0)
        throw std::invalid_argument("ConductorSpec: absorptivity must be in [0, 1]");
    if (emissivity < 0.0 || emissivity > 1.0)
        throw std::invalid_argument("ConductorSpec: emissivity must be in [0, 1]");
    if (!(t_max > 40.0)) throw std::invalid_argument("ConductorSpec: t_max must be > 40 degC");
    if (surface_roughness < 0.0)
        throw std::invalid_argument("ConductorSpec: surface_roughness must be >= 0");
}

void AmbientConditions::validate() const {
    if (!(wind_speed >= 0.0)) throw std::invalid_argument("AmbientConditions: wind_speed must be >= 0");
    if (!(wind_angle_deg >= 0.0 && wind_angle_deg <= 90.0))
        throw std::invalid_argument("AmbientConditions: wind_angle_deg must be in [0, 90]");
    if (!(solar_radiation >= 0.0))
        throw std::invalid_argument("AmbientConditions: solar_radiation must be >= 0");
    if (!(air_temp >= -60.0 && air_temp <= 60.0))
        throw std::invalid_argument("AmbientConditions: air_temp must be in [-60, 60] degC");
}

double air_thermal_conductivity(double t_film) {
    return 2.368e-2 + 7.23e-5 * t_film - 2.763e-8 * t_film * t_film;
}

double air_kinematic_viscosity(double t_film) { return 1.32e-5 + 9.5e-8 * t_film; }

double air_prandtl(double t_film) { return 0.715 - 2.5e-4 * t_film; }

double forced_nusselt(const ConductorSpec& spec, double reynolds, double wind_angle_deg) {
    if (reynolds <= 0.0) return 0.0;
    double b1 = kLowReB1, n = kLowReN;
    if (reynolds >= kReynoldsBandEdge) {
        if (spec.surface_roughness <= kRoughnessEdge) {
            b1 = kSmoothB1;
            n = kSmoothN;
        } else {
            b1 = kRoughB1;
            n = kRoughN;
        }
    }
    const double nu_90 = b1 * std::pow(reynolds, n);
    const double s = std::sin(wind_angle_deg * std::numbers::pi / 180.0);
    const double factor = wind_angle_deg < kAngleBandEdgeDeg
                              ? kAngleA1 + kLowAngleB2 * std::pow(s, kLowAngleM1)
                              : kAngleA1 + kHighAngleB2 * std::pow(s, kHighAngleM1);
    return nu_90 * factor;
}

double natural_nusselt(double grashof_prandtl) {
    if (grashof_prandtl <= 0.0) return 0.0;
    if (grashof_prandtl < kGrPrBandEdge) return kLowGrPrA2 * std::pow(grashof_prandtl, kLowGrPrM2);
    return kHighGrPrA2 * std::pow(grashof_prandtl, kHighGrPrM2);
}

double joule_heating(const ConductorSpec& spec, double i_dc, double t_av) {
    return i_dc * i_dc * resistance_factor(spec, t_av);
}

double solar_heating(const ConductorSpec& spec, const AmbientConditions& amb) {
    return spec.absorptivity * amb.solar_radiation * spec.diameter_m;
}

ConvectiveCooling convective_cooling(const ConductorSpec& spec, const AmbientConditions& amb,
                                     double t_s) {
    ConvectiveCooling out;
    const double dt = t_s - amb.air_temp;
    if (dt <= 0.0) return out;

    const double t_film = 0.5 * (t_s + amb.air_temp);
    const double lambda = air_thermal_conductivity(t_film);
    const double nu_kin = air_kinematic_viscosity(t_film);

    const double reynolds = kRelativeAirDensity * amb.wind_speed * spec.diameter_m / nu_kin;
    out.nusselt_forced = forced_nusselt(spec, reynolds, amb.wind_angle_deg);

    const double d = spec.diameter_m;
    const double grashof = d * d * d * dt * constants::gravity /
                           ((t_film + constants::kelvin_offset) * nu_kin * nu_kin);
    out.nusselt_natural = natural_nusselt(grashof * air_prandtl(t_film));

    out.nusselt = std::max(out.nusselt_forced, out.nusselt_natural);
    out.power = std::numbers::pi * lambda * dt * out.nusselt;
    return out;
}

double radiative_cooling(const ConductorSpec& spec, double t_s, double t_a) {
    const double ts = t_s + constants::kelvin_offset;
    const double ta = t_a + constants::kelvin_offset;
    return std::numbers::pi * spec.diameter_m * spec.emissivity * constants::stefan_boltzmann *
           (ts * ts * ts * ts - ta * ta * ta * ta);
}

HeatBalanceTerms heat_balance(const ConductorSpec& spec, const AmbientConditions& amb,
                              double i_dc, double t_av) {
    HeatBalanceTerms terms;
    terms.p_joule = joule_heating(spec, i_dc, t_av);
    terms.p_solar = solar_heating(spec, amb);
    terms.p_conv = convective_cooling(spec, amb, t_av).power;
    terms.p_rad = radiative_cooling(spec, t_av, amb.air_temp);
    return terms;
}

DcRating dc_rating(const ConductorSpec& spec, const AmbientConditions& amb) {
    const auto terms = heat_balance(spec, amb, 0.0, spec.t_max);
    DcRating out;
    out.headroom = terms.p_conv + terms.p_rad - terms.p_solar;
    if (out.headroom < 0.0) {
        spdlog::warn("negative cooling headroom ({:.3f} W/m) at V={} m/s, T_a={} degC, S={} W/m^2; "
                     "rating set to 0 A",
                     out.headroom, amb.wind_speed, amb.air_temp, amb.solar_radiation);
        return out;
    }
    out.amps = std::sqrt(out.headroom / resistance_factor(spec, spec.t_max));
    return out;
}

double ac_rating(double i_dc) {
    if (i_dc < 0.0) throw std::invalid_argument("ac_rating: i_dc must be >= 0");
    return i_dc / std::sqrt(1.0123 + 2.319e-5 * i_dc);
}

double ac_rating(const ConductorSpec& spec, const AmbientConditions& amb) {
    return ac_rating(dc_rating(spec, amb).amps);
}

TemperatureSolution steady_state_temperature(const ConductorSpec& spec,
                                             const AmbientConditions& amb, double i_load,
                                             const TemperatureOptions& opts) {
    if (i_load < 0.0) throw std::invalid_argument("steady_state_temperature: i_load must be >= 0");

    auto residual = [&](double t) { return heat_balance(spec, amb, i_load, t).residual(); };

    double lo = amb.air_temp;
    double hi = opts.upper_bound;
    const double f_lo = residual(lo);
    if (f_lo >= 0.0) return {lo, 0};
    if (residual(hi) < 0.0) {
        throw NonPhysical("steady_state_temperature: no heat-balance root below " +
                          std::to_string(hi) + " degC for I=" + std::to_string(i_load) + " A");
    }

    double probe = (opts.initial_guess > lo && opts.initial_guess < hi) ? opts.initial_guess
                                                                        : 0.5 * (lo + hi);
    int it = 0;
    while (hi - lo > opts.tolerance) {
        if (++it > opts.max_iterations) {
            throw NoConvergence("steady_state_temperature: bracket [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] after " +
                                std::to_string(opts.max_iterations) + " iterations");
        }
        if (residual(probe) < 0.0) {
            lo = probe;
        } else {
            hi = probe;
        }
        probe = 0.5 * (lo + hi);
    }
    return {0.5 * (lo + hi), it};
}

AmbientParameter parse_ambient_parameter(const std::string& name) {
    if (name == "air_temp") return AmbientParameter::AirTemp;
    if (name == "wind_speed") return AmbientParameter::WindSpeed;
    if (name == "wind_angle") return AmbientParameter::WindAngle;
    if (name == "solar") return AmbientParameter::Solar;
    throw UnknownParameter("unknown ambient parameter '" + name +
                           "' (expected air_temp, wind_speed, wind_angle or solar)");
}

std::string to_string(AmbientParameter p) {
    switch (p) {
        case AmbientParameter::AirTemp: return "air_temp";
        case AmbientParameter::WindSpeed: return "wind_speed";
        case AmbientParameter::WindAngle: return "wind_angle";
        case AmbientParameter::Solar: return "solar";
    }
    return "unknown";
}

void set_parameter(AmbientConditions& amb, AmbientParameter p, double value) {
    switch (p) {
        case AmbientParameter::AirTemp: amb.air_temp = value; break;
        case AmbientParameter::WindSpeed: amb.wind_speed = value; break;
        case AmbientParameter::WindAngle: amb.wind_angle_deg = value; break;
        case AmbientParameter::Solar: amb.solar_radiation = value; break;
    }
}

std::vector<SweepPoint> sweep_rating(const ConductorSpec& spec, const AmbientConditions& base,
                                     AmbientParameter parameter, double lo, double hi,
                                     int points) {
    if (points < 2) throw DegenerateRange("sweep_rating: need at least 2 points");
    std::vector<SweepPoint> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
        AmbientConditions amb = base;
        set_parameter(amb, parameter, x);
        amb.validate();
        const double i_dc = dc_rating(spec, amb).amps;
        out.push_back({x, i_dc, ac_rating(i_dc)});
    }
    return out;
}

SensitivityFit sensitivity_fit(const ConductorSpec& spec, const AmbientConditions& base,
                               AmbientParameter parameter, double lo, double hi, int points) {
    if (points < 3) throw DegenerateRange("sensitivity_fit: fewer than 3 sweep points");
    if (!(hi > lo)) throw DegenerateRange("sensitivity_fit: empty parameter range");

    auto check = [&](double dlo, double dhi) {
        if (lo < dlo || hi > dhi) {
            throw std::invalid_argument("sensitivity_fit: range for " + to_string(parameter) +
                                        " must lie within [" + std::to_string(dlo) + ", " +
                                        std::to_string(dhi) + "]");
        }
    };
    switch (parameter) {
        case AmbientParameter::AirTemp: check(kTempLo, kTempHi); break;
        case AmbientParameter::WindSpeed: check(kWindLo, kWindHi); break;
        case AmbientParameter::Solar: check(kSolarLo, kSolarHi); break;
        case AmbientParameter::WindAngle: check(0.0, 90.0); break;
    }

    const auto sweep = sweep_rating(spec, base, parameter, lo, hi, points);
    double mx = 0.0, my = 0.0;
    for (const auto& p : sweep) {
        mx += p.value;
        my += p.i_ac;
    }
    mx /= points;
    my /= points;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : sweep) {
        sxy += (p.value - mx) * (p.i_ac - my);
        sxx += (p.value - mx) * (p.value - mx);
    }

    SensitivityFit fit;
    fit.points = points;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ref = sweep.front().i_ac;
    fit.percent_per_unit = ref > 0.0 ? 100.0 * fit.slope / ref : 0.0;
    fit.elasticity = my > 0.0 ? fit.slope * mx / my : 0.0;
    return fit;
}

}  // namespace dlrsim::thermal
