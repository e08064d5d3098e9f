#pragma once

// Receding-horizon economic dispatch over Power Nodes: per zone a dispatchable
// generator, wind and PV with curtailment, a load with shedding and an
// optional storage unit, coupled by DC line flows.

#include "dlrsim/errors.h"
#include "dlrsim/grid.h"
#include "dlrsim/qp.h"

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlrsim::dispatch {

using qp::InfeasibleBounds;

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(std::size_t step, const std::string& what)
        : std::runtime_error("dispatch step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

struct StorageUnit {
    double energy_mwh = 0.0;
    double charge_mw = 0.0;
    double discharge_mw = 0.0;
    double round_trip_efficiency = 0.75;  // split evenly between charge and discharge
    double initial_soc = 0.5;

    bool present() const { return energy_mwh > 0.0; }
    double eta_charge() const;
    double eta_discharge() const;
    void validate() const;
};

struct ZoneFleet {
    std::string zone;
    double dispatchable_mw = 0.0;
    double ramp_mw_per_step = std::numeric_limits<double>::infinity();
    std::vector<double> wind_mw;
    std::vector<double> pv_mw;
    std::vector<double> load_mw;
    StorageUnit storage;
};

struct PowerNodeFleet {
    std::vector<ZoneFleet> zones;
    int step_seconds = 900;

    std::size_t num_steps() const { return zones.empty() ? 0 : zones.front().load_mw.size(); }
    /// Throws std::invalid_argument, or HorizonMismatch when series lengths differ.
    void validate() const;
};

/// Energy prices are per MWh; quadratic weights per MW^2 and step.
struct Weights {
    double shed = 1000.0;
    double curtailment = 100.0;
    double generation = 10.0;
    double storage_cycling = 25.0;
    double soc_tracking = 100.0;  // on the state-of-charge fraction
    double soc_reference = 0.5;
    double ramp = 1e-4;               // on the change of dispatchable output
    double control_quadratic = 0.0;   // on every control

    void validate() const;
};

struct DispatchProblem {
    int horizon = 256;
    PowerNodeFleet fleet;
    grid::PtdfMatrix ptdf;
    std::vector<std::vector<double>> line_limits;  // [line][step], MVA, symmetric
    Weights weights;
    double power_base_mw = 1000.0;  // internal variable scaling

    void validate() const;
    std::size_t num_steps() const { return fleet.num_steps(); }
};

/// State carried between receding-horizon steps.
struct SystemState {
    std::vector<double> soc;                          // per zone, fraction
    std::optional<std::vector<double>> previous_dispatch;  // MW, drives the first ramp row

    static SystemState initial(const PowerNodeFleet& fleet);
};

enum class Control { Dispatchable, Wind, Pv, Shed, Charge, Discharge };
inline constexpr int kControlsPerZone = 6;

/// Index bookkeeping of the step-major decision vector and constraint rows.
struct QpLayout {
    int steps = 0;
    int zones = 0;
    int lines = 0;
    std::vector<int> storage_zones;  // zone index of each state

    int states() const { return static_cast<int>(storage_zones.size()); }
    int vars_per_step() const { return kControlsPerZone * zones + states(); }
    int rows_per_step() const { return 1 + lines + states() + zones + vars_per_step(); }
    int num_variables() const { return steps * vars_per_step(); }
    int num_constraints() const { return steps * rows_per_step(); }
    /// Two-sided line rows counted once per side.
    int num_line_constraints() const { return 2 * lines * steps; }

    int control(int t, int zone, Control c) const {
        return t * vars_per_step() + static_cast<int>(c) * zones + zone;
    }
    int state(int t, int s) const { return t * vars_per_step() + kControlsPerZone * zones + s; }
    int balance_row(int t) const { return t * rows_per_step(); }
    int line_row(int t, int l) const { return t * rows_per_step() + 1 + l; }
    int storage_row(int t, int s) const { return t * rows_per_step() + 1 + lines + s; }
    int ramp_row(int t, int zone) const { return t * rows_per_step() + 1 + lines + states() + zone; }
    int bound_row(int t, int var) const {
        return t * rows_per_step() + 1 + lines + states() + zones + var;
    }
};

struct QpInstance {
    qp::Problem problem;
    QpLayout layout;
};

/// Window [k, k + N) shrinks at the end of the data. Throws InfeasibleBounds
/// when any lower bound exceeds its upper bound, HorizonMismatch when k is
/// past the data.
QpInstance build_qp(const DispatchProblem& problem, std::size_t k, const SystemState& state);

struct ZoneStep {
    double dispatchable = 0.0;
    double wind_used = 0.0;
    double pv_used = 0.0;
    double shed = 0.0;
    double charge = 0.0;
    double discharge = 0.0;
    double soc_after = 0.0;
};

struct StepSolution {
    std::vector<ZoneStep> zones;  // first control of the window, applied
    std::vector<double> flows;    // MW per line
    double objective = 0.0;       // optimal value of the window problem
    double balance_residual = 0.0;
    int iterations = 0;
    int window = 0;
};

/// Holds the cached solver between consecutive windows.
class Dispatcher {
public:
    explicit Dispatcher(const DispatchProblem& problem, const qp::Settings& settings = {});
    ~Dispatcher();
    Dispatcher(Dispatcher&&) noexcept;
    Dispatcher& operator=(Dispatcher&&) noexcept;

    /// Solve the window starting at k from `state`. Throws SolverFailure.
    StepSolution solve_step(std::size_t k, const SystemState& state);
    /// State after applying the first control of `step`.
    static SystemState advance(const SystemState& state, const StepSolution& step);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct DispatchResult {
    std::vector<std::string> zones;
    std::vector<std::string> lines;
    std::size_t start = 0;
    std::size_t steps = 0;
    int step_seconds = 900;

    // [zone][step], MW; soc is the fraction at the end of the step.
    std::vector<std::vector<double>> dispatchable, wind_available, wind_used, pv_available, pv_used,
        load, shed, charge, discharge, soc;
    std::vector<std::vector<double>> flows;   // [line][step], MW
    std::vector<std::vector<double>> limits;  // [line][step], MVA
    std::vector<double> objective;            // per step
    std::vector<int> iterations;
    double max_balance_residual = 0.0;
};

struct RunOptions {
    std::size_t start = 0;
    std::size_t steps = 0;  // 0 runs to the end of the data
    std::function<void(std::size_t k, const SystemState& before, const StepSolution& step)> on_step;
};

DispatchResult receding_horizon_run(const DispatchProblem& problem, const RunOptions& options = {},
                                    const qp::Settings& settings = {});

struct CurtailmentRow {
    std::string zone;  // "TOTAL" for the system row
    double load_shed_pct = 0.0;
    double wind_curtailed_pct = 0.0;
    double pv_curtailed_pct = 0.0;
};

std::vector<CurtailmentRow> curtailment_report(const DispatchResult& result);

}  // namespace dlrsim::dispatch
