// Writes the synthetic six-zone demo month (December 2011 plus three days of
// horizon tail) into a directory: wind.csv, pv.csv, load.csv, tmin.csv, tmax.csv.

#include "dlrsim/timeutil.h"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace dlrsim;

namespace {

constexpr int kZones = 6;
constexpr std::array<const char*, kZones> kIds{"A", "B", "C", "D", "E", "F"};
constexpr int kStep = 900;
constexpr double kDay = 86400.0;

// Installed capacities and mean loads, MW.
constexpr std::array<double, kZones> kWindMw{10000, 4000, 500, 700, 11000, 800};
constexpr std::array<double, kZones> kPvMw{2500, 4000, 6000, 8000, 3500, 1500};
constexpr std::array<double, kZones> kLoadMw{7000, 15500, 14000, 8500, 7000, 7000};
// Mean hub-height wind speed, m/s; north windier.
constexpr std::array<double, kZones> kWindMean{7.5, 6.5, 5.0, 5.0, 7.2, 5.5};
constexpr std::array<double, kZones> kTminBase{-1.0, 1.0, -2.0, -4.0, -2.0, 0.0};

const char* kZoneComment =
    "# zones: A BREMEN (Bremen, Hamburg, Niedersachsen, Schleswig-Holstein); "
    "B COLOGNE (Nordrhein-Westfalen, Rheinland-Pfalz, Saarland); "
    "C STUTTGART (Baden-Wuerttemberg, south-east Bayern); "
    "D MUNICH (Bayern except the south-east); "
    "E BERLIN (Berlin, Brandenburg, Mecklenburg-Vorpommern, Sachsen, Sachsen-Anhalt, Thueringen); "
    "F FRANKFURT (Hessen)\n";

// Explicit transforms so the output does not depend on the standard
// library's distribution implementations.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

struct Ar1 {
    double phi;
    double x = 0.0;
    Ar1(double dt, double tau) : phi(std::exp(-dt / tau)) {}
    double next(Rng& rng) {
        x = phi * x + std::sqrt(1.0 - phi * phi) * rng.normal();
        return x;
    }
};

double wind_cf(double v) {
    if (v < 3.0) return 0.0;
    if (v >= 13.0) return 1.0;
    return (v * v * v - 27.0) / (13.0 * 13.0 * 13.0 - 27.0);
}

double load_shape(double hour) {
    static const std::array<std::pair<double, double>, 9> anchors{
        {{0, 0.86}, {4, 0.82}, {7, 0.95}, {10, 1.08}, {12, 1.10}, {17, 1.12}, {19, 1.08}, {22, 0.95}, {24, 0.86}}};
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (hour <= anchors[i].first) {
            const auto [h0, v0] = anchors[i - 1];
            const auto [h1, v1] = anchors[i];
            return v0 + (v1 - v0) * (hour - h0) / (h1 - h0);
        }
    }
    return anchors.back().second;
}

double day_factor(Timestamp local) {
    const auto ymd = civil_date(local);
    const std::chrono::weekday wd{std::chrono::sys_days{ymd}};
    const unsigned d = static_cast<unsigned>(ymd.day());
    const unsigned m = static_cast<unsigned>(ymd.month());
    double f = 1.0;
    if (wd == std::chrono::Saturday) f = 0.93;
    if (wd == std::chrono::Sunday) f = 0.88;
    if ((m == 12 && (d == 24 || d == 25 || d == 26 || d == 31)) || (m == 1 && d == 1)) f = std::min(f, 0.85);
    return f;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return std::string(buf) == "-0.0" ? "0.0" : buf;
}

void write(const std::filesystem::path& path, const std::string& title, const std::vector<Timestamp>& ts,
           const std::vector<std::array<double, kZones>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# " << title << "\n" << kZoneComment << "timestamp";
    for (const char* id : kIds) out << "," << id;
    out << "\n";
    for (std::size_t r = 0; r < ts.size(); ++r) {
        out << format_timestamp(ts[r]);
        for (double v : rows[r]) out << "," << fixed(v);
        out << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic demo dataset"};
    std::string out_dir = "data/demo";
    std::uint64_t seed = 2011;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed");
    CLI11_PARSE(app, argc, argv);

    const Timestamp t0 = parse_timestamp("2011-12-01T00:00:00Z");
    const Timestamp t1 = parse_timestamp("2012-01-04T00:00:00Z");
    const double utc_offset = 3600.0;
    Rng rng(seed);

    // Daily series cover one extra day so late-evening UTC steps find their local date.
    const int days = static_cast<int>((t1 - t0) / 86400) + 1;
    std::vector<Timestamp> day_ts;
    std::vector<std::array<double, kZones>> tmin(days), tmax(days);
    std::vector<std::array<double, kZones>> clear(days);
    Ar1 temp_anom(1.0, 3.0);
    for (int d = 0; d < days; ++d) {
        day_ts.push_back(t0 + static_cast<Timestamp>(d) * 86400);
        const double a = temp_anom.next(rng);
        const double sky = rng.uniform();
        for (int z = 0; z < kZones; ++z) {
            tmin[d][z] = kTminBase[z] + 3.0 * a + rng.normal();
            tmax[d][z] = tmin[d][z] + 4.0 + 3.0 * rng.uniform();
            const double u = std::clamp(0.7 * sky + 0.3 * rng.uniform(), 0.0, 1.0);
            clear[d][z] = 0.15 + 0.85 * u * u;
        }
    }

    std::vector<Timestamp> ts;
    std::vector<std::array<double, kZones>> wind, pv, load;
    Ar1 synoptic(kStep, 1.5 * kDay);
    std::array<Ar1, kZones> local{Ar1(kStep, 0.5 * kDay), Ar1(kStep, 0.5 * kDay), Ar1(kStep, 0.5 * kDay),
                                  Ar1(kStep, 0.5 * kDay), Ar1(kStep, 0.5 * kDay), Ar1(kStep, 0.5 * kDay)};
    std::array<Ar1, kZones> noise{Ar1(kStep, 3600), Ar1(kStep, 3600), Ar1(kStep, 3600),
                                  Ar1(kStep, 3600), Ar1(kStep, 3600), Ar1(kStep, 3600)};
    for (Timestamp t = t0; t < t1; t += kStep) {
        ts.push_back(t);
        const Timestamp lt = t + static_cast<Timestamp>(utc_offset);
        const double hour = static_cast<double>(lt % 86400) / 3600.0;
        const int day = static_cast<int>((lt - t0) / 86400);
        const double s = synoptic.next(rng);
        std::array<double, kZones> w{}, p{}, l{};
        for (int z = 0; z < kZones; ++z) {
            const double v = std::max(0.0, kWindMean[z] + 3.2 * s + 1.6 * local[z].next(rng));
            w[z] = kWindMw[z] * wind_cf(v);
            double sun = 0.0;
            if (hour > 8.25 && hour < 16.0) sun = std::sin(std::numbers::pi * (hour - 8.25) / 7.75);
            p[z] = std::max(0.0, kPvMw[z] * 0.55 * clear[day][z] * std::pow(sun, 1.2) * (1.0 + 0.05 * rng.normal()));
            l[z] = kLoadMw[z] * load_shape(hour) * day_factor(lt) * (1.0 + 0.01 * noise[z].next(rng));
        }
        wind.push_back(w);
        pv.push_back(p);
        load.push_back(l);
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write(dir / "wind.csv", "synthetic wind feed-in, MW, 15-min means, UTC", ts, wind);
    write(dir / "pv.csv", "synthetic PV feed-in, MW, 15-min means, UTC", ts, pv);
    write(dir / "load.csv", "synthetic load, MW, 15-min means, UTC", ts, load);
    write(dir / "tmin.csv", "synthetic daily minimum air temperature, degC, local days", day_ts, tmin);
    write(dir / "tmax.csv", "synthetic daily maximum air temperature, degC, local days", day_ts, tmax);
    std::cout << "wrote " << ts.size() << " steps and " << days << " days to " << out_dir << "\n";
    return 0;
}
