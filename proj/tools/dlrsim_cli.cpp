// dlrsim: run, sweep, validate and calibrate subcommands.
// Exit codes: 0 success, 1 input error, 2 solver failure.

#include "dlrsim/scenario.h"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace dlrsim;
namespace sc = dlrsim::scenario;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> mode;
    std::optional<double> res_scale;
    std::optional<double> disp_scale;
    std::optional<int> horizon;
    std::optional<std::string> out;
    std::optional<std::string> start;
    std::optional<std::string> end;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--rating-mode", o.mode, "nlr or dlr");
    cmd->add_option("--res-scale", o.res_scale, "wind and PV scale factor");
    cmd->add_option("--disp-scale", o.disp_scale, "dispatchable capacity scale factor");
    cmd->add_option("--horizon", o.horizon, "prediction horizon in steps");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--start", o.start, "span start (UTC)");
    cmd->add_option("--end", o.end, "span end, exclusive (UTC)");
}

sc::ScenarioConfig resolve_config(const Overrides& o) {
    sc::ScenarioConfig c = sc::load_scenario(o.config);
    try {
        if (o.mode) c.mode = grid::parse_rating_mode(*o.mode);
        if (o.start) c.start = parse_timestamp(*o.start);
        if (o.end) c.end = parse_timestamp(*o.end);
    } catch (const std::invalid_argument& e) {
        throw sc::InputError(e.what());
    }
    if (o.res_scale) c.res_scale = *o.res_scale;
    if (o.disp_scale) c.disp_scale = *o.disp_scale;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.out) c.output_dir = *o.out;
    c.validate();
    return c;
}

void print_curtailment(const std::vector<dispatch::CurtailmentRow>& rows) {
    std::printf("%-6s %14s %14s %14s\n", "zone", "load_shed_%", "wind_curt_%", "pv_curt_%");
    for (const auto& r : rows) {
        std::printf("%-6s %14.4f %14.4f %14.4f\n", r.zone.c_str(), r.load_shed_pct, r.wind_curtailed_pct,
                    r.pv_curtailed_pct);
    }
}

int cmd_run(const Overrides& o) {
    const auto config = resolve_config(o);
    const auto result = sc::run(config);
    sc::write_outputs(result, config.output_dir);
    print_curtailment(result.curtailment);
    spdlog::info("outputs written to {}", config.output_dir.string());
    return 0;
}

int cmd_validate(const Overrides& o) {
    const auto config = resolve_config(o);
    const auto p = sc::prepare(config);
    std::printf("benchmark %s: %zu zones, %zu lines\n", p.bench.name.c_str(), p.bench.zones.size(),
                p.bench.grid.lines.size());
    std::printf("span %s .. %s: %zu steps, %zu steps of data from the span start\n",
                format_timestamp(config.start).c_str(), format_timestamp(config.end).c_str(), p.span_steps,
                p.timestamps.size());
    std::printf("rating mode %s, %d reconstruction steps clamped\n", grid::to_string(config.mode).c_str(),
                p.clamped_steps);
    return 0;
}

int cmd_calibrate(const Overrides& o) {
    const auto config = resolve_config(o);
    const auto p = sc::prepare(config);
    std::printf("%-6s %10s %12s\n", "line", "nlr_mva", "factor");
    for (std::size_t l = 0; l < p.bench.grid.lines.size(); ++l) {
        const auto& line = p.bench.grid.lines[l];
        std::printf("%-6s %10.1f %12.6f\n", line.name().c_str(), line.nlr_mva, p.calibration[l]);
    }
    std::printf("%-6s %12s %12s %12s %12s\n", "zone", "p_max_mw", "c_w", "s_mean", "pv_mean_mw");
    for (std::size_t z = 0; z < p.bench.zones.size(); ++z) {
        std::printf("%-6s %12.1f %12.6g %12.2f %12.2f\n", p.bench.zones[z].id.c_str(), p.wind_cal[z].p_max,
                    p.wind_cal[z].c_w, p.solar_cal[z].s_mean, p.solar_cal[z].p_pv_mean);
    }
    return 0;
}

int cmd_sweep(const Overrides& o, const std::string& parameter, double lo, double hi, int points) {
    const auto config = resolve_config(o);
    const auto bench = sc::load_benchmark(config.benchmark);
    thermal::AmbientParameter p;
    try {
        p = thermal::parse_ambient_parameter(parameter);
    } catch (const thermal::UnknownParameter& e) {
        throw sc::InputError(e.what());
    }
    std::vector<thermal::SweepPoint> pts;
    try {
        pts = sc::sweep(bench, p, lo, hi, points);
    } catch (const std::invalid_argument& e) {
        throw sc::InputError(e.what());
    }
    std::filesystem::create_directories(config.output_dir);
    const auto path = config.output_dir / ("sweep_" + thermal::to_string(p) + ".csv");
    sc::write_sweep_csv(path, p, pts);
    const auto fit = thermal::sensitivity_fit(bench.conductor, bench.sweep_ambient, p, lo, hi);
    std::printf("%s %g..%g: %.2f A -> %.2f A (%+.2f%%), fit %.4f %%/unit\n", thermal::to_string(p).c_str(), lo,
                hi, pts.front().i_ac, pts.back().i_ac, 100.0 * (pts.back().i_ac / pts.front().i_ac - 1.0),
                fit.percent_per_unit);
    spdlog::info("wrote {}", path.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Economic dispatch with dynamic line rating"};
    app.require_subcommand(1);
    std::string level = "info";
    app.add_option("--log-level", level, "trace, debug, info, warn, error");

    Overrides run_o, val_o, cal_o, sweep_o;
    add_common(app.add_subcommand("run", "run the receding-horizon dispatch and write outputs"), run_o);
    add_common(app.add_subcommand("validate", "check inputs and build the dispatch problem"), val_o);
    add_common(app.add_subcommand("calibrate", "print rating and weather calibrations"), cal_o);
    auto* sweep_cmd = app.add_subcommand("sweep", "rating versus one ambient parameter");
    add_common(sweep_cmd, sweep_o);
    std::string parameter;
    double lo = 0.0, hi = 0.0;
    int points = 26;
    sweep_cmd->add_option("--parameter", parameter, "wind_speed, wind_angle, air_temp or solar")->required();
    sweep_cmd->add_option("--from", lo, "first value")->required();
    sweep_cmd->add_option("--to", hi, "last value")->required();
    sweep_cmd->add_option("--points", points, "number of points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    spdlog::set_level(spdlog::level::from_str(level));

    try {
        if (app.got_subcommand("run")) return cmd_run(run_o);
        if (app.got_subcommand("validate")) return cmd_validate(val_o);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(cal_o);
        return cmd_sweep(sweep_o, parameter, lo, hi, points);
    } catch (const sc::StageError& e) {
        spdlog::error("{}", e.what());
        return e.solver_failure() ? 2 : 1;
    } catch (const sc::InputError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
