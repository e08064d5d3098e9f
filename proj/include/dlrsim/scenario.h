#pragma once

// Scenario layer: CSV ingestion, the benchmark description, the
// weather -> thermal -> grid -> dispatch pipeline and its file outputs.

#include "dlrsim/dispatch.h"
#include "dlrsim/errors.h"
#include "dlrsim/grid.h"
#include "dlrsim/thermal.h"
#include "dlrsim/timeutil.h"
#include "dlrsim/weather.h"

#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlrsim::scenario {

namespace fs = std::filesystem;

/// Bad input files or configuration (CLI exit code 1).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

class GapError : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& file, int line, const std::string& what)
        : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A failure inside the pipeline, tagged with the stage it came from.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what, bool solver_failure)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), solver_(solver_failure) {}
    const std::string& stage() const { return stage_; }
    bool solver_failure() const { return solver_; }

private:
    std::string stage_;
    bool solver_;
};

struct TimeSeriesTable {
    int step_seconds = 900;
    std::vector<Timestamp> timestamps;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;  // [column][row]

    std::size_t num_rows() const { return timestamps.size(); }
    /// Throws SchemaError for an unknown column.
    const std::vector<double>& column(const std::string& name) const;
    /// Row holding timestamp t; throws HorizonMismatch when t is not covered.
    std::size_t row_of(Timestamp t) const;
};

/// Header "timestamp,<col>,..." followed by one row per step. Columns beyond
/// `expected` are ignored. Throws SchemaError, GapError, ParseError, or
/// InputError when the file cannot be read.
TimeSeriesTable load_csv(const fs::path& path, const std::vector<std::string>& expected,
                         int step_seconds = 900);

/// Values are written in shortest round-trip form.
void write_csv(const fs::path& path, const TimeSeriesTable& table);

std::string format_number(double v);

struct ZoneSpec {
    std::string id;
    std::string name;
    double dispatchable_mw = 0.0;
    double ramp_mw_per_step = std::numeric_limits<double>::infinity();
    double solar_mean_w_m2 = 0.0;
    dispatch::StorageUnit storage;
};

struct DataFiles {
    fs::path wind, pv, load, tmin, tmax;  // resolved against the benchmark file
};

struct Benchmark {
    std::string name;
    grid::GridModel grid;           // susceptances filled from lengths and reactances
    std::vector<double> length_km;  // per line
    double x_ohm_per_km_220 = 0.0;
    double x_ohm_per_km_380 = 0.0;
    thermal::ConductorSpec conductor;
    thermal::AmbientConditions reference_ambient;  // maps onto the NLR
    thermal::AmbientConditions sweep_ambient;      // base point of rating sweeps
    weather::ReconstructionOptions reconstruction;
    double v_rated = 15.0;
    double v_cut = 1.0;
    std::vector<ZoneSpec> zones;  // in node order
    dispatch::Weights weights;
    DataFiles data;
    std::vector<std::string> southern_import_zones;

    std::vector<std::string> zone_ids() const;
};

/// Throws InputError.
Benchmark load_benchmark(const fs::path& path);

struct ScenarioConfig {
    fs::path benchmark;
    Timestamp start = 0;
    Timestamp end = 0;  // exclusive
    grid::RatingMode mode = grid::RatingMode::NLR;
    double res_scale = 1.0;
    double disp_scale = 1.0;
    int horizon = 256;
    std::map<std::string, double> weight_overrides;
    fs::path output_dir = "out";

    /// Throws InputError.
    void validate() const;
};

/// JSON scenario file; relative paths resolve against its directory.
ScenarioConfig load_scenario(const fs::path& path);

/// Wind and PV series times res_scale, dispatchable capacities times
/// disp_scale; loads and storage unchanged.
dispatch::PowerNodeFleet apply_scaling(const dispatch::PowerNodeFleet& fleet, const ScenarioConfig& config);

struct InputData {
    TimeSeriesTable wind, pv, load, tmin, tmax;
};

InputData load_inputs(const Benchmark& bench);

/// Everything up to the dispatch problem. Series run from the span start to
/// the end of the data, so the last windows of the span see the horizon.
struct Prepared {
    Benchmark bench;
    std::vector<Timestamp> timestamps;
    std::size_t span_steps = 0;
    std::vector<weather::WindCalibration> wind_cal;
    std::vector<weather::SolarCalibration> solar_cal;
    int clamped_steps = 0;
    std::vector<double> calibration;  // per line
    grid::RatingSeries ratings;
    dispatch::DispatchProblem problem;
    std::map<std::string, std::string> input_digests;  // file -> FNV-1a hex
};

/// Throws StageError.
Prepared prepare(const ScenarioConfig& config);

struct RunResult {
    ScenarioConfig config;
    Prepared prepared;
    dispatch::DispatchResult dispatch;
    std::vector<dispatch::CurtailmentRow> curtailment;
};

/// Throws StageError.
RunResult run(const ScenarioConfig& config, const dispatch::RunOptions& hooks = {});
RunResult run(const ScenarioConfig& config, Prepared prepared, const dispatch::RunOptions& hooks = {});

/// curtailment.csv, ratings_<line>.csv, flows_<line>.csv, zone_<id>.csv,
/// hourly_res_curtailment.csv, hourly_load_shedding.csv and manifest.json.
void write_outputs(const RunResult& result, const fs::path& dir);

std::string manifest_json(const RunResult& result);

/// Rating versus one ambient parameter around the benchmark's sweep ambient;
/// columns value, i_dc_a, i_ac_a, change_pct (relative to the first point).
std::vector<thermal::SweepPoint> sweep(const Benchmark& bench, thermal::AmbientParameter parameter,
                                       double lo, double hi, int points);
void write_sweep_csv(const fs::path& path, thermal::AmbientParameter parameter,
                     const std::vector<thermal::SweepPoint>& points);

}  // namespace dlrsim::scenario
