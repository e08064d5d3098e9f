#include "dlrsim/scenario.h"

#include <Eigen/Core>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef DLRSIM_VERSION
#define DLRSIM_VERSION "0.0.0"
#endif

namespace dlrsim::scenario {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

json read_json(const fs::path& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

thermal::AmbientConditions parse_ambient(const json& j, thermal::AmbientConditions a) {
    a.wind_speed = get_or(j, "wind_speed", a.wind_speed);
    a.wind_angle_deg = get_or(j, "wind_angle_deg", a.wind_angle_deg);
    a.solar_radiation = get_or(j, "solar_radiation", a.solar_radiation);
    a.air_temp = get_or(j, "air_temp", a.air_temp);
    return a;
}

json ambient_json(const thermal::AmbientConditions& a) {
    return {{"wind_speed", a.wind_speed},
            {"wind_angle_deg", a.wind_angle_deg},
            {"solar_radiation", a.solar_radiation},
            {"air_temp", a.air_temp}};
}

void set_weight(dispatch::Weights& w, const std::string& name, double v) {
    if (name == "shed") w.shed = v;
    else if (name == "curtailment") w.curtailment = v;
    else if (name == "generation") w.generation = v;
    else if (name == "storage_cycling") w.storage_cycling = v;
    else if (name == "soc_tracking") w.soc_tracking = v;
    else if (name == "soc_reference") w.soc_reference = v;
    else if (name == "ramp") w.ramp = v;
    else if (name == "control_quadratic") w.control_quadratic = v;
    else throw InputError("unknown weight '" + name + "'");
}

json weights_json(const dispatch::Weights& w) {
    return {{"shed", w.shed},
            {"curtailment", w.curtailment},
            {"generation", w.generation},
            {"storage_cycling", w.storage_cycling},
            {"soc_tracking", w.soc_tracking},
            {"soc_reference", w.soc_reference},
            {"ramp", w.ramp},
            {"control_quadratic", w.control_quadratic}};
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

template <typename T>
std::vector<T> slice(const std::vector<T>& v, std::size_t from) {
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(from), v.end());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

}  // namespace

const std::vector<double>& TimeSeriesTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return values[i];
    }
    throw SchemaError("no column '" + name + "'");
}

std::size_t TimeSeriesTable::row_of(Timestamp t) const {
    if (timestamps.empty() || t < timestamps.front() || t > timestamps.back() ||
        (t - timestamps.front()) % step_seconds != 0) {
        throw HorizonMismatch("series do not contain " + format_timestamp(t));
    }
    return static_cast<std::size_t>((t - timestamps.front()) / step_seconds);
}

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

TimeSeriesTable load_csv(const fs::path& path, const std::vector<std::string>& expected, int step_seconds) {
    const std::string file = path.string();
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        header = split(t, ',');
        break;
    }
    if (header.empty()) throw SchemaError(file + ": no header row");
    for (auto& h : header) h = trim(h);
    if (header[0] != "timestamp") throw SchemaError(file + ": first column must be 'timestamp'");

    std::vector<int> index;
    std::vector<std::string> missing;
    for (const auto& col : expected) {
        const auto it = std::find(header.begin() + 1, header.end(), col);
        if (it == header.end()) missing.push_back(col);
        index.push_back(static_cast<int>(it - header.begin()));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw SchemaError(file + ": missing columns: " + list);
    }

    TimeSeriesTable table;
    table.step_seconds = step_seconds;
    table.columns = expected;
    table.values.assign(expected.size(), {});
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cells = split(t, ',');
        if (cells.size() != header.size()) {
            throw ParseError(file, line_no,
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        Timestamp ts = 0;
        try {
            ts = parse_timestamp(trim(cells[0]));
        } catch (const std::invalid_argument& e) {
            throw ParseError(file, line_no, e.what());
        }
        if (!table.timestamps.empty()) {
            const Timestamp prev = table.timestamps.back();
            if (ts != prev + step_seconds) {
                if (ts <= prev) {
                    throw GapError(file + ":" + std::to_string(line_no) + ": timestamp " + format_timestamp(ts) +
                                   " does not follow " + format_timestamp(prev));
                }
                throw GapError(file + ":" + std::to_string(line_no) + ": missing step " +
                               format_timestamp(prev + step_seconds) + " (next row is " + format_timestamp(ts) +
                               ", step " + std::to_string(step_seconds) + " s)");
            }
        }
        table.timestamps.push_back(ts);
        for (std::size_t c = 0; c < index.size(); ++c) {
            const std::string cell = trim(cells[index[c]]);
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || r.ec != std::errc() || r.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw ParseError(file, line_no, "bad value '" + cell + "' in column " + expected[c]);
            }
            table.values[c].push_back(v);
        }
    }
    if (table.timestamps.empty()) throw SchemaError(file + ": no data rows");
    return table;
}

void write_csv(const fs::path& path, const TimeSeriesTable& table) {
    std::string out = "timestamp";
    for (const auto& c : table.columns) out += "," + c;
    out += "\n";
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
        out += format_timestamp(table.timestamps[r]);
        for (const auto& col : table.values) out += "," + format_number(col[r]);
        out += "\n";
    }
    write_text(path, out);
}

std::vector<std::string> Benchmark::zone_ids() const {
    std::vector<std::string> ids;
    for (const auto& z : zones) ids.push_back(z.id);
    return ids;
}

Benchmark load_benchmark(const fs::path& path) {
    const json j = read_json(path);
    const fs::path dir = path.parent_path();
    Benchmark b;
    try {
        b.name = get_or<std::string>(j, "name", "benchmark");
        b.grid.base_mva = get_or(j, "base_mva", 100.0);
        const auto& x = j.at("reactance_ohm_per_km");
        b.x_ohm_per_km_220 = x.at("220kv").get<double>();
        b.x_ohm_per_km_380 = x.at("380kv").get<double>();

        if (j.contains("conductor")) {
            const auto& c = j.at("conductor");
            auto& s = b.conductor;
            s.name = get_or(c, "name", s.name);
            s.diameter_m = get_or(c, "diameter_m", s.diameter_m);
            s.r_dc_20 = get_or(c, "r_dc_20", s.r_dc_20);
            s.alpha_r = get_or(c, "alpha_r", s.alpha_r);
            s.absorptivity = get_or(c, "absorptivity", s.absorptivity);
            s.emissivity = get_or(c, "emissivity", s.emissivity);
            s.t_max = get_or(c, "t_max", s.t_max);
            s.surface_roughness = get_or(c, "surface_roughness", s.surface_roughness);
        }
        b.reference_ambient = parse_ambient(j.at("reference_ambient"), {});
        b.sweep_ambient = parse_ambient(j.value("sweep_ambient", json::object()), {5.0, 45.0, 1000.0, 20.0});
        const json rec = j.value("reconstruction", json::object());
        b.reconstruction.wind_angle_deg = get_or(rec, "wind_angle_deg", 45.0);
        b.reconstruction.utc_offset_hours = get_or(rec, "utc_offset_hours", 1.0);
        b.v_rated = get_or(rec, "v_rated", 15.0);
        b.v_cut = get_or(rec, "v_cut", 1.0);

        for (const auto& z : j.at("zones")) {
            ZoneSpec s;
            s.id = z.at("id").get<std::string>();
            s.name = get_or<std::string>(z, "name", s.id);
            s.dispatchable_mw = z.at("dispatchable_mw").get<double>();
            if (z.contains("ramp_mw_per_step")) s.ramp_mw_per_step = z.at("ramp_mw_per_step").get<double>();
            s.solar_mean_w_m2 = z.at("solar_mean_w_m2").get<double>();
            if (z.contains("storage")) {
                const auto& st = z.at("storage");
                s.storage.energy_mwh = st.at("energy_mwh").get<double>();
                s.storage.charge_mw = st.at("charge_mw").get<double>();
                s.storage.discharge_mw = st.at("discharge_mw").get<double>();
                s.storage.round_trip_efficiency = get_or(st, "round_trip_efficiency", 0.75);
                s.storage.initial_soc = get_or(st, "initial_soc", 0.5);
            }
            b.zones.push_back(s);
            b.grid.nodes.push_back({s.id, s.name});
        }
        for (const auto& l : j.at("lines")) {
            grid::Line line;
            line.from = l.at("from").get<std::string>();
            line.to = l.at("to").get<std::string>();
            line.circuits_220kv = get_or(l, "circuits_220kv", 0);
            line.circuits_380kv = get_or(l, "circuits_380kv", 0);
            line.nlr_mva = l.at("nlr_mva").get<double>();
            const double km = l.at("length_km").get<double>();
            line.susceptance = grid::corridor_susceptance(km, line.circuits_220kv, line.circuits_380kv,
                                                          b.x_ohm_per_km_220, b.x_ohm_per_km_380,
                                                          b.grid.base_mva);
            b.grid.lines.push_back(line);
            b.length_km.push_back(km);
        }
        if (j.contains("weights")) {
            for (const auto& [k, v] : j.at("weights").items()) set_weight(b.weights, k, v.get<double>());
        }
        const auto& d = j.at("data");
        b.data.wind = resolve(dir, d.at("wind").get<std::string>());
        b.data.pv = resolve(dir, d.at("pv").get<std::string>());
        b.data.load = resolve(dir, d.at("load").get<std::string>());
        b.data.tmin = resolve(dir, d.at("tmin").get<std::string>());
        b.data.tmax = resolve(dir, d.at("tmax").get<std::string>());
        b.southern_import_zones = j.value("southern_import_zones", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    try {
        b.grid.validate();
        b.conductor.validate();
        b.reference_ambient.validate();
        b.weights.validate();
        for (const auto& z : b.zones) z.storage.validate();
    } catch (const std::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    for (const auto& s : b.southern_import_zones) {
        if (std::find_if(b.zones.begin(), b.zones.end(), [&](const ZoneSpec& z) { return z.id == s; }) ==
            b.zones.end()) {
            throw InputError(path.string() + ": unknown southern import zone '" + s + "'");
        }
    }
    return b;
}

void ScenarioConfig::validate() const {
    if (end <= start) throw InputError("scenario: span is empty (end must be after start)");
    if (!(res_scale > 0.0) || !(disp_scale > 0.0)) throw InputError("scenario: scale factors must be > 0");
    if (horizon < 1) throw InputError("scenario: horizon must be >= 1");
}

ScenarioConfig load_scenario(const fs::path& path) {
    const json j = read_json(path);
    ScenarioConfig c;
    try {
        c.benchmark = resolve(path.parent_path(), j.at("benchmark").get<std::string>());
        c.start = parse_timestamp(j.at("start").get<std::string>());
        c.end = parse_timestamp(j.at("end").get<std::string>());
        c.mode = grid::parse_rating_mode(get_or<std::string>(j, "rating_mode", "nlr"));
        c.res_scale = get_or(j, "res_scale", 1.0);
        c.disp_scale = get_or(j, "disp_scale", 1.0);
        c.horizon = get_or(j, "horizon", 256);
        if (j.contains("weights")) {
            for (const auto& [k, v] : j.at("weights").items()) c.weight_overrides[k] = v.get<double>();
        }
        c.output_dir = get_or<std::string>(j, "output_dir", "out");
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

dispatch::PowerNodeFleet apply_scaling(const dispatch::PowerNodeFleet& fleet, const ScenarioConfig& config) {
    dispatch::PowerNodeFleet out = fleet;
    for (auto& z : out.zones) {
        for (auto& v : z.wind_mw) v *= config.res_scale;
        for (auto& v : z.pv_mw) v *= config.res_scale;
        z.dispatchable_mw *= config.disp_scale;
    }
    return out;
}

InputData load_inputs(const Benchmark& bench) {
    const auto zones = bench.zone_ids();
    InputData d{load_csv(bench.data.wind, zones), load_csv(bench.data.pv, zones), load_csv(bench.data.load, zones),
                load_csv(bench.data.tmin, zones, 86400), load_csv(bench.data.tmax, zones, 86400)};
    if (d.wind.timestamps != d.pv.timestamps || d.wind.timestamps != d.load.timestamps) {
        throw HorizonMismatch("wind, PV and load files must cover the same timestamps");
    }
    return d;
}

Prepared prepare(const ScenarioConfig& config) {
    Prepared p;
    std::string stage = "input";
    try {
        config.validate();
        p.bench = load_benchmark(config.benchmark);
        const auto& b = p.bench;
        const InputData data = load_inputs(b);
        for (const auto& f : {b.data.wind, b.data.pv, b.data.load, b.data.tmin, b.data.tmax}) {
            p.input_digests[f.filename().string()] = "fnv1a64:" + fnv1a(read_file(f));
        }

        const int step = data.load.step_seconds;
        if ((config.end - config.start) % step != 0) {
            throw InputError("scenario: span is not a whole number of " + std::to_string(step) + " s steps");
        }
        const std::size_t first = data.load.row_of(config.start);
        p.span_steps = static_cast<std::size_t>((config.end - config.start) / step);
        const std::size_t available = data.load.num_rows() - first;
        if (available < p.span_steps) {
            throw HorizonMismatch("series end at " + format_timestamp(data.load.timestamps.back()) +
                                  ", before the span end " + format_timestamp(config.end));
        }
        if (available < p.span_steps + static_cast<std::size_t>(config.horizon) - 1) {
            spdlog::warn("data ends {} steps after the span; the last windows are shortened",
                         available - p.span_steps);
        }
        p.timestamps = slice(data.load.timestamps, first);

        stage = "weather";
        std::vector<std::vector<thermal::AmbientConditions>> ambient;
        for (std::size_t z = 0; z < b.zones.size(); ++z) {
            const auto& id = b.zones[z].id;
            weather::FeedInSeries wind{id, step, data.wind.column(id)};
            weather::FeedInSeries pv{id, step, data.pv.column(id)};
            p.wind_cal.push_back(weather::calibrate_wind(wind, b.v_rated, b.v_cut));
            p.solar_cal.push_back(weather::calibrate_solar(pv, b.zones[z].solar_mean_w_m2));
            std::vector<weather::DailyTempRecord> days;
            const auto& tmin = data.tmin.column(id);
            const auto& tmax = data.tmax.column(id);
            for (std::size_t r = 0; r < data.tmin.num_rows(); ++r) {
                days.push_back({civil_date(data.tmin.timestamps[r]), tmin[r], tmax[r]});
            }
            if (data.tmax.timestamps != data.tmin.timestamps) {
                throw HorizonMismatch("tmin and tmax files must cover the same days");
            }
            const auto records = weather::index_records(days);
            const auto w = slice(wind.values, first);
            const auto s = slice(pv.values, first);
            auto rec = weather::reconstruct_zone(p.timestamps, w, s, records, p.wind_cal.back(),
                                                 p.solar_cal.back(), b.reconstruction);
            p.clamped_steps += rec.clamped_steps;
            ambient.push_back(std::move(rec.ambient));
        }

        stage = "thermal";
        p.calibration = grid::calibrate_to_nlr(b.grid, b.conductor, b.reference_ambient);

        stage = "grid";
        p.ratings = grid::rating_series(b.grid, ambient, config.mode, b.conductor, p.calibration);

        stage = "dispatch";
        dispatch::PowerNodeFleet fleet;
        fleet.step_seconds = step;
        for (const auto& z : b.zones) {
            dispatch::ZoneFleet f;
            f.zone = z.id;
            f.dispatchable_mw = z.dispatchable_mw;
            f.ramp_mw_per_step = z.ramp_mw_per_step;
            f.wind_mw = slice(data.wind.column(z.id), first);
            f.pv_mw = slice(data.pv.column(z.id), first);
            f.load_mw = slice(data.load.column(z.id), first);
            f.storage = z.storage;
            fleet.zones.push_back(std::move(f));
        }
        auto& prob = p.problem;
        prob.horizon = config.horizon;
        prob.fleet = apply_scaling(fleet, config);
        prob.ptdf = grid::build_ptdf(b.grid);
        prob.line_limits = p.ratings.limits;  // MVA taken as MW at unity power factor
        prob.weights = b.weights;
        for (const auto& [k, v] : config.weight_overrides) set_weight(prob.weights, k, v);
        prob.validate();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), false);
    }
    return p;
}

RunResult run(const ScenarioConfig& config, const dispatch::RunOptions& hooks) {
    return run(config, prepare(config), hooks);
}

RunResult run(const ScenarioConfig& config, Prepared prepared, const dispatch::RunOptions& hooks) {
    RunResult r;
    r.config = config;
    r.prepared = std::move(prepared);
    const auto& p = r.prepared;
    dispatch::RunOptions opt;
    opt.start = 0;
    opt.steps = p.span_steps;
    const std::size_t report = std::max<std::size_t>(1, p.span_steps / 10);
    opt.on_step = [&](std::size_t k, const dispatch::SystemState& before, const dispatch::StepSolution& s) {
        if (hooks.on_step) hooks.on_step(k, before, s);
        if ((k + 1) % report == 0) {
            spdlog::info("{} run: step {}/{} ({})", grid::to_string(config.mode), k + 1, p.span_steps,
                         format_timestamp(p.timestamps[k]));
        }
    };
    try {
        r.dispatch = dispatch::receding_horizon_run(p.problem, opt);
    } catch (const dispatch::SolverFailure& e) {
        throw StageError("dispatch", e.what(), true);
    } catch (const std::exception& e) {
        throw StageError("dispatch", e.what(), false);
    }
    for (const auto& l : p.bench.grid.lines) r.dispatch.lines.push_back(l.name());
    r.curtailment = dispatch::curtailment_report(r.dispatch);
    return r;
}

std::string manifest_json(const RunResult& r) {
    const auto& p = r.prepared;
    const auto& b = p.bench;
    const auto& c = r.config;
    json m;
    m["tool"] = {{"name", "dlrsim"},
                 {"version", DLRSIM_VERSION},
                 {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)}};
    m["config"] = {{"benchmark", c.benchmark.filename().string()},
                   {"start", format_timestamp(c.start)},
                   {"end", format_timestamp(c.end)},
                   {"rating_mode", grid::to_string(c.mode)},
                   {"res_scale", c.res_scale},
                   {"disp_scale", c.disp_scale},
                   {"horizon", c.horizon},
                   {"weight_overrides", c.weight_overrides}};
    m["inputs"] = p.input_digests;
    const auto& cd = b.conductor;
    m["conductor"] = {{"name", cd.name},
                      {"diameter_m", cd.diameter_m},
                      {"r_dc_20", cd.r_dc_20},
                      {"alpha_r", cd.alpha_r},
                      {"absorptivity", cd.absorptivity},
                      {"emissivity", cd.emissivity},
                      {"t_max", cd.t_max},
                      {"surface_roughness", cd.surface_roughness}};
    m["reference_ambient"] = ambient_json(b.reference_ambient);
    m["reconstruction"] = {{"wind_angle_deg", b.reconstruction.wind_angle_deg},
                           {"utc_offset_hours", b.reconstruction.utc_offset_hours},
                           {"v_rated", b.v_rated},
                           {"v_cut", b.v_cut},
                           {"clamped_steps", p.clamped_steps}};
    m["weights"] = weights_json(p.problem.weights);
    json lines = json::array();
    for (std::size_t l = 0; l < b.grid.lines.size(); ++l) {
        const auto& line = b.grid.lines[l];
        lines.push_back({{"name", line.name()},
                         {"nlr_mva", line.nlr_mva},
                         {"length_km", b.length_km[l]},
                         {"circuits_220kv", line.circuits_220kv},
                         {"circuits_380kv", line.circuits_380kv},
                         {"susceptance_pu", line.susceptance},
                         {"calibration", p.calibration[l]}});
    }
    m["lines"] = lines;
    json zones = json::array();
    for (std::size_t z = 0; z < b.zones.size(); ++z) {
        const auto& zs = b.zones[z];
        zones.push_back({{"id", zs.id},
                         {"name", zs.name},
                         {"dispatchable_mw", p.problem.fleet.zones[z].dispatchable_mw},
                         {"storage_mwh", zs.storage.energy_mwh},
                         {"storage_mw", zs.storage.discharge_mw},
                         {"wind_c_w", p.wind_cal[z].c_w},
                         {"wind_p_max_mw", p.wind_cal[z].p_max},
                         {"solar_mean_w_m2", p.solar_cal[z].s_mean},
                         {"pv_mean_mw", p.solar_cal[z].p_pv_mean}});
    }
    m["zones"] = zones;
    const qp::Settings s;
    m["solver"] = {{"method", "interior point"},
                   {"eps_feasibility", s.eps_feasibility},
                   {"eps_gap", s.eps_gap},
                   {"max_iter", s.max_iter}};
    double objective = 0.0;
    for (double v : r.dispatch.objective) objective += v;
    m["summary"] = {{"steps", r.dispatch.steps},
                    {"sum_window_objective", objective},
                    {"max_balance_residual_mw", r.dispatch.max_balance_residual}};
    return m.dump(2) + "\n";
}

void write_outputs(const RunResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    const auto& d = r.dispatch;
    const auto& p = r.prepared;
    const std::vector<Timestamp> ts(p.timestamps.begin(), p.timestamps.begin() + static_cast<std::ptrdiff_t>(d.steps));

    std::string cur = "zone,load_shed_pct,wind_curtailed_pct,pv_curtailed_pct\n";
    for (const auto& row : r.curtailment) {
        cur += row.zone + "," + format_number(row.load_shed_pct) + "," + format_number(row.wind_curtailed_pct) +
               "," + format_number(row.pv_curtailed_pct) + "\n";
    }
    write_text(dir / "curtailment.csv", cur);

    for (std::size_t l = 0; l < d.lines.size(); ++l) {
        TimeSeriesTable rating{d.step_seconds, ts, {"rating_mva", "negative_headroom"}, {{}, {}}};
        TimeSeriesTable flow{d.step_seconds, ts, {"flow_mw", "limit_mva", "loading_pct"}, {{}, {}, {}}};
        for (std::size_t k = 0; k < d.steps; ++k) {
            rating.values[0].push_back(p.ratings.limits[l][k]);
            rating.values[1].push_back(p.ratings.flagged[l][k] ? 1.0 : 0.0);
            flow.values[0].push_back(d.flows[l][k]);
            flow.values[1].push_back(d.limits[l][k]);
            flow.values[2].push_back(d.limits[l][k] > 0.0 ? 100.0 * std::abs(d.flows[l][k]) / d.limits[l][k] : 0.0);
        }
        write_csv(dir / ("ratings_" + d.lines[l] + ".csv"), rating);
        write_csv(dir / ("flows_" + d.lines[l] + ".csv"), flow);
    }

    for (std::size_t z = 0; z < d.zones.size(); ++z) {
        TimeSeriesTable t{d.step_seconds, ts,
                          {"dispatchable_mw", "wind_available_mw", "wind_used_mw", "pv_available_mw", "pv_used_mw",
                           "load_mw", "shed_mw", "charge_mw", "discharge_mw", "soc"},
                          {d.dispatchable[z], d.wind_available[z], d.wind_used[z], d.pv_available[z], d.pv_used[z],
                           d.load[z], d.shed[z], d.charge[z], d.discharge[z], d.soc[z]}};
        write_csv(dir / ("zone_" + d.zones[z] + ".csv"), t);
    }

    // Hourly means, in hour blocks from the span start.
    const std::size_t per_hour = std::max(1, 3600 / d.step_seconds);
    TimeSeriesTable res{3600, {}, d.zones, std::vector<std::vector<double>>(d.zones.size())};
    TimeSeriesTable shed = res;
    for (std::size_t k0 = 0; k0 < d.steps; k0 += per_hour) {
        const std::size_t k1 = std::min(d.steps, k0 + per_hour);
        res.timestamps.push_back(ts[k0]);
        shed.timestamps.push_back(ts[k0]);
        for (std::size_t z = 0; z < d.zones.size(); ++z) {
            double c = 0.0, s = 0.0;
            for (std::size_t k = k0; k < k1; ++k) {
                c += d.wind_available[z][k] - d.wind_used[z][k] + d.pv_available[z][k] - d.pv_used[z][k];
                s += d.shed[z][k];
            }
            res.values[z].push_back(c / static_cast<double>(k1 - k0));
            shed.values[z].push_back(s / static_cast<double>(k1 - k0));
        }
    }
    write_csv(dir / "hourly_res_curtailment.csv", res);
    write_csv(dir / "hourly_load_shedding.csv", shed);

    write_text(dir / "manifest.json", manifest_json(r));
}

std::vector<thermal::SweepPoint> sweep(const Benchmark& bench, thermal::AmbientParameter parameter, double lo,
                                       double hi, int points) {
    return thermal::sweep_rating(bench.conductor, bench.sweep_ambient, parameter, lo, hi, points);
}

void write_sweep_csv(const fs::path& path, thermal::AmbientParameter parameter,
                     const std::vector<thermal::SweepPoint>& points) {
    std::string out = thermal::to_string(parameter) + ",i_dc_a,i_ac_a,change_pct\n";
    const double first = points.empty() ? 0.0 : points.front().i_ac;
    for (const auto& pt : points) {
        out += format_number(pt.value) + "," + format_number(pt.i_dc) + "," + format_number(pt.i_ac) + "," +
               format_number(first > 0.0 ? 100.0 * (pt.i_ac / first - 1.0) : 0.0) + "\n";
    }
    write_text(path, out);
}

}  // namespace dlrsim::scenario
