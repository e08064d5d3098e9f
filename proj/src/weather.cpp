#include "dlrsim/weather.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dlrsim::weather {

void FeedInSeries::validate() const {
    if (step_seconds <= 0) throw std::invalid_argument("FeedInSeries: step must be positive");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw std::invalid_argument("FeedInSeries " + zone + ": negative value at step " +
                                        std::to_string(i));
        }
    }
}

Season season_of(std::chrono::month m) {
    const unsigned mm = static_cast<unsigned>(m);
    if (mm == 12 || mm <= 2) return Season::Winter;
    if (mm <= 5) return Season::Spring;
    if (mm <= 8) return Season::Summer;
    return Season::Autumn;
}

std::string to_string(Season s) {
    switch (s) {
        case Season::Winter: return "winter";
        case Season::Spring: return "spring";
        case Season::Summer: return "summer";
        case Season::Autumn: return "autumn";
    }
    return "unknown";
}

void DailyTempRecord::validate() const {
    if (!date.ok()) throw std::invalid_argument("DailyTempRecord: invalid date");
    if (t_min > t_max) throw std::invalid_argument("DailyTempRecord: t_min > t_max");
}

WindCalibration calibrate_wind(const FeedInSeries& series, double v_rated, double v_cut) {
    if (!(v_rated > v_cut && v_cut >= 0.0)) {
        throw std::invalid_argument("calibrate_wind: need v_rated > v_cut >= 0");
    }
    series.validate();
    const double p_max =
        series.values.empty() ? 0.0 : *std::max_element(series.values.begin(), series.values.end());
    if (!(p_max > 0.0)) {
        throw AllZeroSeries("calibrate_wind: wind series for zone '" + series.zone +
                            "' is empty or all zero");
    }
    const double span = v_rated - v_cut;
    return {v_rated, v_cut, p_max / (span * span * span), p_max};
}

double wind_speed(double p_w, const WindCalibration& cal) {
    const double p = std::clamp(p_w, 0.0, cal.p_max);
    return std::cbrt(p / cal.c_w) + cal.v_cut;
}

SolarCalibration calibrate_solar(const FeedInSeries& series, double s_mean) {
    series.validate();
    if (!(s_mean > 0.0)) throw std::invalid_argument("calibrate_solar: s_mean must be > 0");
    if (series.values.empty()) throw AllZeroSeries("calibrate_solar: empty PV series");
    const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                        static_cast<double>(series.values.size());
    if (!(mean > 0.0)) {
        throw AllZeroSeries("calibrate_solar: PV series for zone '" + series.zone + "' is all zero");
    }
    return {s_mean, mean};
}

double solar_radiation(double p_pv, const SolarCalibration& cal) {
    if (p_pv < 0.0) throw std::invalid_argument("solar_radiation: p_pv must be >= 0");
    return cal.s_mean / cal.p_pv_mean * p_pv;
}

DiurnalAnchors diurnal_anchors(Season s) {
    switch (s) {
        case Season::Summer: return {4.0, 18.0};
        case Season::Winter: return {8.0, 14.0};
        case Season::Spring:
        case Season::Autumn: return {6.0, 16.0};
    }
    return {6.0, 16.0};
}

double diurnal_shape(double hour, Season s) {
    const auto [valley, peak] = diurnal_anchors(s);
    double h = std::fmod(hour, 24.0);
    if (h < 0.0) h += 24.0;
    if (h >= valley && h <= peak) {
        return 0.5 * (1.0 - std::cos(std::numbers::pi * (h - valley) / (peak - valley)));
    }
    // Falling segment from today's peak to the next valley, wrapping midnight.
    if (h < valley) h += 24.0;
    const double fall = valley + 24.0 - peak;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (h - peak) / fall));
}

double air_temperature(const DailyTempRecord& record, double hour) {
    return record.t_min + (record.t_max - record.t_min) * diurnal_shape(hour, record.season());
}

DailyRecords index_records(std::span<const DailyTempRecord> records) {
    DailyRecords out;
    for (const auto& r : records) {
        r.validate();
        out[to_timestamp(r.date)] = r;
    }
    return out;
}

ReconstructionResult reconstruct_zone(std::span<const Timestamp> timestamps,
                                      std::span<const double> wind_mw,
                                      std::span<const double> pv_mw, const DailyRecords& records,
                                      const WindCalibration& wind_cal,
                                      const SolarCalibration& solar_cal,
                                      const ReconstructionOptions& opts) {
    if (wind_mw.size() != timestamps.size() || pv_mw.size() != timestamps.size()) {
        throw HorizonMismatch("reconstruct_zone: series lengths differ (timestamps " +
                              std::to_string(timestamps.size()) + ", wind " +
                              std::to_string(wind_mw.size()) + ", pv " +
                              std::to_string(pv_mw.size()) + ")");
    }
    const auto offset = static_cast<Timestamp>(std::llround(opts.utc_offset_hours * 3600.0));

    ReconstructionResult out;
    out.ambient.reserve(timestamps.size());
    for (std::size_t k = 0; k < timestamps.size(); ++k) {
        const Timestamp local = timestamps[k] + offset;
        const Timestamp midnight = to_timestamp(civil_date(local));
        const auto it = records.find(midnight);
        if (it == records.end()) {
            throw HorizonMismatch("reconstruct_zone: no temperature record for local date of " +
                                  format_timestamp(timestamps[k]));
        }
        if (wind_mw[k] > wind_cal.p_max) ++out.clamped_steps;

        thermal::AmbientConditions amb;
        amb.wind_speed = wind_speed(wind_mw[k], wind_cal);
        amb.wind_angle_deg = opts.wind_angle_deg;
        amb.solar_radiation = solar_radiation(pv_mw[k], solar_cal);
        amb.air_temp = air_temperature(it->second, hour_of_day(local));
        out.ambient.push_back(amb);
    }
    if (out.clamped_steps > 0) {
        spdlog::warn("{} wind feed-in steps above calibration maximum {:.1f} MW clamped to rated speed",
                     out.clamped_steps, wind_cal.p_max);
    }
    return out;
}

}  // namespace dlrsim::weather
