#include "dlrsim/timeutil.h"

#include <cstdio>
#include <stdexcept>

namespace dlrsim {

namespace {
constexpr Timestamp kSecondsPerDay = 86400;

Timestamp floor_div(Timestamp a, Timestamp b) {
    Timestamp q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
}  // namespace

Timestamp to_timestamp(std::chrono::year_month_day date) {
    const auto days = std::chrono::sys_days{date}.time_since_epoch().count();
    return static_cast<Timestamp>(days) * kSecondsPerDay;
}

Timestamp parse_timestamp(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h,
                              &mi, &s, &consumed);
    if (n == 7 && (sep == 'T' || sep == ' ')) {
        const std::string rest = text.substr(static_cast<std::size_t>(consumed));
        if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
            throw std::invalid_argument("timestamp '" + text + "' is not UTC");
        }
    } else {
        consumed = 0;
        if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 ||
            static_cast<std::size_t>(consumed) != text.size()) {
            throw std::invalid_argument("cannot parse timestamp '" + text + "'");
        }
        h = mi = s = 0;
    }
    const std::chrono::year_month_day date{std::chrono::year{y},
                                           std::chrono::month{static_cast<unsigned>(mo)},
                                           std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) {
        throw std::invalid_argument("invalid timestamp '" + text + "'");
    }
    return to_timestamp(date) + h * 3600 + mi * 60 + s;
}

std::chrono::year_month_day civil_date(Timestamp t) {
    const auto days = floor_div(t, kSecondsPerDay);
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}};
}

double hour_of_day(Timestamp t) {
    const Timestamp secs = t - floor_div(t, kSecondsPerDay) * kSecondsPerDay;
    return static_cast<double>(secs) / 3600.0;
}

std::string format_timestamp(Timestamp t) {
    const auto date = civil_date(t);
    const Timestamp secs = t - floor_div(t, kSecondsPerDay) * kSecondsPerDay;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

}  // namespace dlrsim
