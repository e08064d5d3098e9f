#include <gtest/gtest.h>

#include "dlrsim/thermal.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace dlrsim::thermal;

namespace {

ConductorSpec zebra() { return ConductorSpec{}; }

AmbientConditions random_ambient(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> wind(0.0, 25.0), angle(0.0, 90.0), solar(0.0, 1000.0),
        temp(-20.0, 40.0);
    AmbientConditions a;
    a.wind_speed = wind(rng);
    a.wind_angle_deg = angle(rng);
    a.solar_radiation = solar(rng);
    a.air_temp = temp(rng);
    return a;
}

}  // namespace

TEST(JouleHeating, ZeroCurrent) {
    EXPECT_EQ(joule_heating(zebra(), 0.0, 63.0), 0.0);
}

TEST(JouleHeating, ReferenceTemperature) {
    EXPECT_NEAR(joule_heating(zebra(), 1000.0, 20.0), 68.68, 1e-9);
}

TEST(JouleHeating, HotConductor) {
    // 1000^2 * 6.868e-5 * (1 + 0.004 * 50)
    EXPECT_NEAR(joule_heating(zebra(), 1000.0, 70.0), 82.416, 1e-9);
}

TEST(SolarHeating, Values) {
    auto spec = zebra();
    AmbientConditions amb;
    amb.solar_radiation = 0.0;
    EXPECT_EQ(solar_heating(spec, amb), 0.0);
    amb.solar_radiation = 1000.0;
    EXPECT_NEAR(solar_heating(spec, amb), 14.31, 1e-9);
    spec.absorptivity = 0.23;
    EXPECT_NEAR(solar_heating(spec, amb), 6.5826, 1e-9);
}

TEST(ConvectiveCooling, ZeroTemperatureDifference) {
    AmbientConditions amb;
    amb.air_temp = 35.0;
    amb.wind_speed = 3.0;
    EXPECT_EQ(convective_cooling(zebra(), amb, 35.0).power, 0.0);
}

TEST(ConvectiveCooling, ColderConductorIsClamped) {
    AmbientConditions amb;
    amb.air_temp = 35.0;
    amb.wind_speed = 3.0;
    EXPECT_EQ(convective_cooling(zebra(), amb, 20.0).power, 0.0);
}

TEST(ConvectiveCooling, CalmAirUsesNaturalConvection) {
    AmbientConditions amb;
    amb.air_temp = 35.0;
    amb.wind_speed = 0.0;
    auto c = convective_cooling(zebra(), amb, 75.0);
    EXPECT_GT(c.power, 0.0);
    EXPECT_EQ(c.nusselt_forced, 0.0);
    EXPECT_EQ(c.nusselt, c.nusselt_natural);
}

TEST(ConvectiveCooling, StrongerWindCoolsMore) {
    AmbientConditions calm, windy;
    calm.air_temp = windy.air_temp = 35.0;
    calm.wind_speed = 1.0;
    windy.wind_speed = 5.0;
    EXPECT_GT(convective_cooling(zebra(), windy, 75.0).power,
              convective_cooling(zebra(), calm, 75.0).power);
}

TEST(ConvectiveCooling, UsesLargerNusselt) {
    AmbientConditions amb;
    amb.air_temp = 10.0;
    amb.wind_speed = 0.2;
    auto c = convective_cooling(zebra(), amb, 75.0);
    EXPECT_EQ(c.nusselt, std::max(c.nusselt_forced, c.nusselt_natural));
}

TEST(ForcedNusselt, PerpendicularWindHasUnitAngleFactor) {
    // At 90 degrees the correction is A1 + B2 = 1.
    auto spec = zebra();
    const double re = 5000.0;
    EXPECT_NEAR(forced_nusselt(spec, re, 90.0), 0.048 * std::pow(re, 0.8), 1e-9);
    spec.surface_roughness = 0.03;
    EXPECT_NEAR(forced_nusselt(spec, re, 90.0), 0.178 * std::pow(re, 0.633), 1e-9);
    EXPECT_NEAR(forced_nusselt(spec, 1000.0, 90.0), 0.641 * std::pow(1000.0, 0.471), 1e-9);
}

TEST(RadiativeCooling, Values) {
    auto spec = zebra();
    EXPECT_EQ(radiative_cooling(spec, 40.0, 40.0), 0.0);
    const double expected = std::numbers::pi * 0.02862 * 0.5 * 5.670e-8 *
                            (std::pow(348.0, 4) - std::pow(308.0, 4));
    EXPECT_NEAR(radiative_cooling(spec, 75.0, 35.0), expected, 1e-12);
    EXPECT_NEAR(radiative_cooling(spec, 75.0, 35.0), 14.45, 0.05);
    EXPECT_LT(radiative_cooling(spec, 10.0, 30.0), 0.0);
}

TEST(AcRating, Values) {
    EXPECT_EQ(ac_rating(0.0), 0.0);
    EXPECT_NEAR(ac_rating(1000.0), 1000.0 / std::sqrt(1.03549), 1e-9);
    EXPECT_NEAR(ac_rating(1000.0), 982.72, 0.01);
    EXPECT_NEAR(ac_rating(3000.0), 2884.25, 0.01);
    EXPECT_THROW(ac_rating(-1.0), std::invalid_argument);
}

TEST(DcRating, ZeroHeadroomGivesZero) {
    // Solar gain chosen to exactly cancel the cooling at t_max.
    auto spec = zebra();
    AmbientConditions amb;
    amb.air_temp = 35.0;
    amb.wind_speed = 0.5;
    amb.solar_radiation = 1000.0;
    const double cooling = convective_cooling(spec, amb, spec.t_max).power +
                           radiative_cooling(spec, spec.t_max, amb.air_temp);
    amb.solar_radiation = cooling / (spec.absorptivity * spec.diameter_m);
    const auto r = dc_rating(spec, amb);
    EXPECT_NEAR(r.headroom, 0.0, 1e-9);
    EXPECT_NEAR(r.amps, 0.0, 1e-3);
}

TEST(DcRating, NegativeHeadroomIsZeroAndFlagged) {
    auto spec = zebra();
    spec.t_max = 45.0;
    spec.absorptivity = 1.0;
    AmbientConditions amb;
    amb.air_temp = 44.0;
    amb.wind_speed = 0.0;
    amb.solar_radiation = 1400.0;
    auto r = dc_rating(spec, amb);
    EXPECT_TRUE(r.negative_headroom());
    EXPECT_EQ(r.amps, 0.0);
}

TEST(DcRating, ColdAirRaisesRating) {
    AmbientConditions cold, hot;
    cold.air_temp = -20.0;
    hot.air_temp = 40.0;
    cold.wind_speed = hot.wind_speed = 5.0;
    cold.solar_radiation = hot.solar_radiation = 1000.0;
    EXPECT_GT(dc_rating(zebra(), cold).amps, dc_rating(zebra(), hot).amps);
}

TEST(DcRating, ReproducesHeatBalanceAtLimit) {
    AmbientConditions amb;
    amb.wind_speed = 2.0;
    amb.solar_radiation = 600.0;
    amb.air_temp = 15.0;
    const auto spec = zebra();
    const double i = dc_rating(spec, amb).amps;
    EXPECT_NEAR(heat_balance(spec, amb, i, spec.t_max).residual(), 0.0, 1e-9);
}

TEST(SteadyStateTemperature, NoHeatingReturnsAirTemperature) {
    AmbientConditions amb;
    amb.air_temp = 12.0;
    amb.wind_speed = 3.0;
    auto sol = steady_state_temperature(zebra(), amb, 0.0);
    EXPECT_NEAR(sol.temperature, 12.0, 0.1);
}

TEST(SteadyStateTemperature, RatingCurrentGivesTemperatureLimit) {
    AmbientConditions amb;
    amb.air_temp = 20.0;
    amb.wind_speed = 5.0;
    amb.solar_radiation = 1000.0;
    const auto spec = zebra();
    const double i = dc_rating(spec, amb).amps;
    EXPECT_NEAR(steady_state_temperature(spec, amb, i).temperature, spec.t_max, 0.1);
}

TEST(SteadyStateTemperature, OverloadExceedsLimit) {
    AmbientConditions amb;
    amb.air_temp = 20.0;
    amb.wind_speed = 5.0;
    amb.solar_radiation = 1000.0;
    const auto spec = zebra();
    const double i = 1.1 * dc_rating(spec, amb).amps;
    EXPECT_GT(steady_state_temperature(spec, amb, i).temperature, spec.t_max);
}

TEST(SteadyStateTemperature, RejectsNegativeCurrent) {
    EXPECT_THROW(steady_state_temperature(zebra(), AmbientConditions{}, -1.0),
                 std::invalid_argument);
}

TEST(SteadyStateTemperature, ExtremeCurrentIsNonPhysical) {
    AmbientConditions amb;
    EXPECT_THROW(steady_state_temperature(zebra(), amb, 20000.0), NonPhysical);
}

TEST(SteadyStateTemperature, IterationCapReportsNoConvergence) {
    AmbientConditions amb;
    amb.wind_speed = 3.0;
    TemperatureOptions opts;
    opts.max_iterations = 2;
    EXPECT_THROW(steady_state_temperature(zebra(), amb, 800.0, opts), NoConvergence);
}

TEST(Validation, RejectsBadInputs) {
    auto spec = zebra();
    spec.diameter_m = 0.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = zebra();
    spec.t_max = 40.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    AmbientConditions amb;
    amb.wind_angle_deg = 91.0;
    EXPECT_THROW(amb.validate(), std::invalid_argument);
    amb = {};
    amb.air_temp = -61.0;
    EXPECT_THROW(amb.validate(), std::invalid_argument);
}

TEST(SensitivityFit, NeedsThreePoints) {
    EXPECT_THROW(sensitivity_fit(zebra(), AmbientConditions{}, AmbientParameter::WindSpeed, 0.0,
                                 25.0, 2),
                 DegenerateRange);
}

TEST(SensitivityFit, RejectsOutOfDomainRange) {
    EXPECT_THROW(sensitivity_fit(zebra(), AmbientConditions{}, AmbientParameter::AirTemp, -30.0,
                                 40.0),
                 std::invalid_argument);
}

TEST(SensitivityFit, SignsFollowPhysics) {
    AmbientConditions base;
    base.wind_speed = 5.0;
    base.solar_radiation = 1000.0;
    base.air_temp = 20.0;
    EXPECT_GT(sensitivity_fit(zebra(), base, AmbientParameter::WindSpeed, 0.0, 25.0).slope, 0.0);
    EXPECT_LT(sensitivity_fit(zebra(), base, AmbientParameter::AirTemp, -20.0, 40.0).slope, 0.0);
    EXPECT_LT(sensitivity_fit(zebra(), base, AmbientParameter::Solar, 0.0, 1000.0).slope, 0.0);
}

TEST(SensitivityFit, ExactOnLinearData) {
    // Solar heating enters the squared rating linearly, so over a tiny range the
    // fitted slope matches the finite-difference derivative.
    AmbientConditions base;
    base.wind_speed = 5.0;
    base.air_temp = 20.0;
    auto fit = sensitivity_fit(zebra(), base, AmbientParameter::Solar, 500.0, 501.0, 11);
    AmbientConditions a = base, b = base;
    a.solar_radiation = 500.0;
    b.solar_radiation = 501.0;
    const double fd = ac_rating(zebra(), b) - ac_rating(zebra(), a);
    EXPECT_NEAR(fit.slope, fd, 1e-6);
}

// Properties over the sweep domains.

// Strict monotonicity holds up to 1.5x the rating. Far beyond it, in calm air,
// the Joule term's temperature slope can exceed the convective slope just above
// T_a, so only the single sign change is asserted there.
TEST(ThermalProperties, ResidualStrictlyIncreasing) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> frac(0.0, 1.5);
    const auto spec = zebra();
    for (int s = 0; s < 200; ++s) {
        auto amb = random_ambient(rng);
        const double i = frac(rng) * dc_rating(spec, amb).amps;
        double prev = heat_balance(spec, amb, i, amb.air_temp + 1e-3).residual();
        for (double t = amb.air_temp + 0.5; t <= 200.0; t += 0.5) {
            const double r = heat_balance(spec, amb, i, t).residual();
            ASSERT_GT(r, prev) << "T=" << t << " I=" << i;
            prev = r;
        }
    }
}

TEST(ThermalProperties, ResidualHasSingleRoot) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> cur(0.0, 3000.0);
    const auto spec = zebra();
    for (int s = 0; s < 200; ++s) {
        auto amb = random_ambient(rng);
        const double i = cur(rng);
        int sign_changes = 0;
        bool prev_neg = heat_balance(spec, amb, i, amb.air_temp + 1e-3).residual() < 0.0;
        for (double t = amb.air_temp + 0.25; t <= 400.0; t += 0.25) {
            const bool neg = heat_balance(spec, amb, i, t).residual() < 0.0;
            if (neg != prev_neg) ++sign_changes;
            prev_neg = neg;
        }
        ASSERT_LE(sign_changes, 1) << "I=" << i;
    }
}

TEST(ThermalProperties, CoolingNonNegativeWhenHotter) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dt(0.0, 150.0);
    const auto spec = zebra();
    for (int s = 0; s < 1000; ++s) {
        auto amb = random_ambient(rng);
        const double ts = amb.air_temp + dt(rng);
        EXPECT_GE(convective_cooling(spec, amb, ts).power, 0.0);
        EXPECT_GE(radiative_cooling(spec, ts, amb.air_temp), 0.0);
    }
}

TEST(ThermalProperties, InverseConsistencyAndIterationCap) {
    std::mt19937_64 rng(13);
    const auto spec = zebra();
    for (int s = 0; s < 1000; ++s) {
        auto amb = random_ambient(rng);
        auto sol = steady_state_temperature(spec, amb, dc_rating(spec, amb).amps);
        ASSERT_LE(std::abs(sol.temperature - spec.t_max), 0.1);
        ASSERT_LE(sol.iterations, 60);
    }
}

TEST(ThermalProperties, RatingMonotoneInAmbient) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> step(0.0, 5.0);
    const auto spec = zebra();
    for (int s = 0; s < 500; ++s) {
        auto amb = random_ambient(rng);
        const double base = dc_rating(spec, amb).amps;

        auto up = amb;
        up.wind_speed += step(rng);
        EXPECT_GE(dc_rating(spec, up).amps, base);

        up = amb;
        up.wind_angle_deg = std::min(90.0, amb.wind_angle_deg + 10.0 * step(rng));
        EXPECT_GE(dc_rating(spec, up).amps, base);

        up = amb;
        up.air_temp += step(rng);
        EXPECT_LE(dc_rating(spec, up).amps, base);

        up = amb;
        up.solar_radiation += 40.0 * step(rng);
        EXPECT_LE(dc_rating(spec, up).amps, base);
    }
}

TEST(ThermalProperties, AcRatingBelowDcAndIncreasing) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> cur(1e-3, 5000.0);
    for (int s = 0; s < 1000; ++s) {
        const double x = cur(rng);
        EXPECT_LT(ac_rating(x), x);
        EXPECT_LT(ac_rating(x), ac_rating(x + 1e-3 * x));
    }
}
