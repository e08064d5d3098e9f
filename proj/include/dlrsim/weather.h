#pragma once

// Reconstruction of per-zone ambient conditions from RES feed-in series and
// daily temperature extremes.

#include "dlrsim/errors.h"
#include "dlrsim/thermal.h"
#include "dlrsim/timeutil.h"

#include <chrono>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlrsim::weather {

class AllZeroSeries : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using dlrsim::HorizonMismatch;

struct FeedInSeries {
    std::string zone;
    int step_seconds = 900;
    std::vector<double> values;  // MW

    void validate() const;
};

enum class Season { Winter, Spring, Summer, Autumn };

/// Meteorological seasons: Dec-Feb winter, Mar-May spring, Jun-Aug summer, Sep-Nov autumn.
Season season_of(std::chrono::month m);
std::string to_string(Season s);

struct DailyTempRecord {
    std::chrono::year_month_day date;
    double t_min = 0.0;
    double t_max = 0.0;

    Season season() const { return season_of(date.month()); }
    void validate() const;
};

struct WindCalibration {
    double v_rated = 15.0;
    double v_cut = 1.0;
    double c_w = 0.0;    // MW / (m/s)^3
    double p_max = 0.0;  // MW, feed-in mapped to v_rated
};

struct SolarCalibration {
    double s_mean = 0.0;     // W/m^2
    double p_pv_mean = 0.0;  // MW
};

WindCalibration calibrate_wind(const FeedInSeries& series, double v_rated = 15.0,
                               double v_cut = 1.0);

/// Feed-in above the calibration maximum is clamped to the rated speed.
double wind_speed(double p_w, const WindCalibration& cal);

SolarCalibration calibrate_solar(const FeedInSeries& series, double s_mean);

double solar_radiation(double p_pv, const SolarCalibration& cal);

struct DiurnalAnchors {
    double valley_hour;
    double peak_hour;
};

DiurnalAnchors diurnal_anchors(Season s);

/// Normalized diurnal temperature shape in [0, 1]: 0 at the seasonal valley
/// hour, 1 at the peak hour, half-cosine segments in between.
double diurnal_shape(double hour, Season s);

double air_temperature(const DailyTempRecord& record, double hour);

struct ReconstructionOptions {
    double wind_angle_deg = 45.0;
    double utc_offset_hours = 1.0;  // local time used for the diurnal cycle
};

using DailyRecords = std::map<Timestamp, DailyTempRecord>;  // keyed by local midnight

DailyRecords index_records(std::span<const DailyTempRecord> records);

struct ReconstructionResult {
    std::vector<thermal::AmbientConditions> ambient;
    int clamped_steps = 0;  // wind feed-in above calibration maximum
};

/// One AmbientConditions per time step. Throws HorizonMismatch when the series
/// lengths differ or a step has no temperature record for its local date.
ReconstructionResult reconstruct_zone(std::span<const Timestamp> timestamps,
                                      std::span<const double> wind_mw,
                                      std::span<const double> pv_mw, const DailyRecords& records,
                                      const WindCalibration& wind_cal,
                                      const SolarCalibration& solar_cal,
                                      const ReconstructionOptions& opts = {});

}  // namespace dlrsim::weather
