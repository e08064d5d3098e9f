#include "dlrsim/dispatch.h"

#include <algorithm>
#include <cmath>

namespace dlrsim::dispatch {

namespace {

using Triplet = Eigen::Triplet<double>;

// Capacities and series are upper bounds of controls whose lower bound is 0.
void check_upper_bound(double x, const std::string& what) {
    if (!std::isfinite(x)) throw std::invalid_argument(what + " must be finite");
    if (x < 0.0) throw InfeasibleBounds(what + " is negative (" + std::to_string(x) + " < 0)");
}

void check_series(const std::vector<double>& v, const std::string& what) {
    for (double x : v) check_upper_bound(x, what);
}

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

double StorageUnit::eta_charge() const { return std::sqrt(round_trip_efficiency); }
double StorageUnit::eta_discharge() const { return std::sqrt(round_trip_efficiency); }

void StorageUnit::validate() const {
    check_upper_bound(energy_mwh, "storage energy");
    check_upper_bound(charge_mw, "storage charge power");
    check_upper_bound(discharge_mw, "storage discharge power");
    if (!(round_trip_efficiency > 0.0 && round_trip_efficiency <= 1.0)) {
        throw std::invalid_argument("storage: round-trip efficiency must be in (0, 1]");
    }
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
        throw std::invalid_argument("storage: initial state of charge must be in [0, 1]");
    }
}

void PowerNodeFleet::validate() const {
    if (zones.empty()) throw std::invalid_argument("fleet: no zones");
    if (step_seconds <= 0) throw std::invalid_argument("fleet: step_seconds must be > 0");
    const std::size_t n = num_steps();
    if (n == 0) throw std::invalid_argument("fleet: empty series");
    for (const auto& z : zones) {
        if (z.load_mw.size() != n || z.wind_mw.size() != n || z.pv_mw.size() != n) {
            throw HorizonMismatch("fleet: series of zone " + z.zone + " do not cover " +
                                  std::to_string(n) + " steps");
        }
        check_series(z.load_mw, "load of zone " + z.zone);
        check_series(z.wind_mw, "wind of zone " + z.zone);
        check_series(z.pv_mw, "PV of zone " + z.zone);
        check_upper_bound(z.dispatchable_mw, "dispatchable capacity of zone " + z.zone);
        if (!(z.ramp_mw_per_step > 0.0)) throw std::invalid_argument("fleet: ramp limit must be > 0");
        z.storage.validate();
    }
}

void Weights::validate() const {
    for (double w : {shed, curtailment, generation, storage_cycling, soc_tracking, ramp, control_quadratic}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and >= 0");
    }
    if (!(soc_reference >= 0.0 && soc_reference <= 1.0)) {
        throw std::invalid_argument("weights: soc_reference must be in [0, 1]");
    }
}

void DispatchProblem::validate() const {
    if (horizon < 1) throw std::invalid_argument("dispatch: horizon must be >= 1");
    if (!(power_base_mw > 0.0)) throw std::invalid_argument("dispatch: power base must be > 0");
    fleet.validate();
    weights.validate();
    const auto zones = static_cast<Eigen::Index>(fleet.zones.size());
    if (ptdf.values.cols() != zones) {
        throw std::invalid_argument("dispatch: PTDF has " + std::to_string(ptdf.values.cols()) +
                                    " node columns, fleet has " + std::to_string(zones) + " zones");
    }
    if (static_cast<Eigen::Index>(line_limits.size()) != ptdf.values.rows()) {
        throw std::invalid_argument("dispatch: one limit series per line required");
    }
    for (const auto& s : line_limits) {
        if (s.size() != fleet.num_steps()) {
            throw HorizonMismatch("dispatch: line-limit series does not cover the fleet series");
        }
        check_series(s, "line limit");
    }
}

SystemState SystemState::initial(const PowerNodeFleet& fleet) {
    SystemState s;
    for (const auto& z : fleet.zones) s.soc.push_back(z.storage.present() ? z.storage.initial_soc : 0.0);
    return s;
}

QpInstance build_qp(const DispatchProblem& problem, std::size_t k, const SystemState& state) {
    const auto& fleet = problem.fleet;
    const std::size_t total = problem.num_steps();
    if (k >= total) {
        throw HorizonMismatch("build_qp: step " + std::to_string(k) + " beyond data of " +
                              std::to_string(total) + " steps");
    }
    const int zones = static_cast<int>(fleet.zones.size());
    if (state.soc.size() != fleet.zones.size()) throw std::invalid_argument("build_qp: state size mismatch");
    if (state.previous_dispatch && state.previous_dispatch->size() != fleet.zones.size()) {
        throw std::invalid_argument("build_qp: previous dispatch size mismatch");
    }
    for (std::size_t z = 0; z < fleet.zones.size(); ++z) {
        if (!(state.soc[z] >= 0.0 && state.soc[z] <= 1.0)) {
            throw InfeasibleBounds("build_qp: state of charge of zone " + fleet.zones[z].zone +
                                   " outside [0, 1]");
        }
    }

    QpLayout lay;
    lay.steps = static_cast<int>(std::min<std::size_t>(problem.horizon, total - k));
    lay.zones = zones;
    lay.lines = static_cast<int>(problem.ptdf.values.rows());
    for (int z = 0; z < zones; ++z) {
        if (fleet.zones[z].storage.present()) lay.storage_zones.push_back(z);
    }

    const double b = problem.power_base_mw;
    const double h = fleet.step_seconds / 3600.0;
    const auto& w = problem.weights;
    const int n = lay.num_variables();
    const int m = lay.num_constraints();

    qp::Problem qp;
    qp.q = Eigen::VectorXd::Zero(n);
    qp.l = Eigen::VectorXd::Zero(m);
    qp.u = Eigen::VectorXd::Zero(m);
    std::vector<Triplet> pt, at;
    at.reserve(static_cast<std::size_t>(lay.steps) *
               (zones * kControlsPerZone * (2 + lay.lines) + 6 * lay.states() + 2 * zones));
    double constant = 0.0;

    const double ctrl_quad = 2.0 * w.control_quadratic * b * b;
    const double ramp_quad = 2.0 * w.ramp * b * b;
    const double energy_cost = h * b;
    const double inf = qp::kInf;

    for (int t = 0; t < lay.steps; ++t) {
        const std::size_t step = k + t;
        double total_load = 0.0;
        Eigen::VectorXd load(zones);
        for (int z = 0; z < zones; ++z) {
            load(z) = fleet.zones[z].load_mw[step] / b;
            total_load += load(z);
        }

        // Net injection of zone z is g + w + pv + dis - ch + shed - load.
        static constexpr Control kInjecting[] = {Control::Dispatchable, Control::Wind, Control::Pv,
                                                 Control::Shed, Control::Discharge};
        const int bal = lay.balance_row(t);
        for (int z = 0; z < zones; ++z) {
            for (Control c : kInjecting) at.emplace_back(bal, lay.control(t, z, c), 1.0);
            at.emplace_back(bal, lay.control(t, z, Control::Charge), -1.0);
        }
        qp.l(bal) = qp.u(bal) = total_load;

        const Eigen::VectorXd load_flows = problem.ptdf.values * load;
        for (int l = 0; l < lay.lines; ++l) {
            const int row = lay.line_row(t, l);
            for (int z = 0; z < zones; ++z) {
                const double f = problem.ptdf.values(l, z);
                if (f == 0.0) continue;
                for (Control c : kInjecting) at.emplace_back(row, lay.control(t, z, c), f);
                at.emplace_back(row, lay.control(t, z, Control::Charge), -f);
            }
            const double lim = problem.line_limits[l][step] / b;
            qp.l(row) = -lim + load_flows(l);
            qp.u(row) = lim + load_flows(l);
        }

        for (int s = 0; s < lay.states(); ++s) {
            const auto& st = fleet.zones[lay.storage_zones[s]].storage;
            const int z = lay.storage_zones[s];
            const int row = lay.storage_row(t, s);
            const double e = st.energy_mwh / b;
            at.emplace_back(row, lay.state(t, s), e);
            at.emplace_back(row, lay.control(t, z, Control::Charge), -st.eta_charge() * h);
            at.emplace_back(row, lay.control(t, z, Control::Discharge), h / st.eta_discharge());
            if (t == 0) {
                qp.l(row) = qp.u(row) = e * state.soc[z];
            } else {
                at.emplace_back(row, lay.state(t - 1, s), -e);
            }
            const int x = lay.state(t, s);
            pt.emplace_back(x, x, 2.0 * w.soc_tracking);
            qp.q(x) += -2.0 * w.soc_tracking * w.soc_reference;
            constant += w.soc_tracking * w.soc_reference * w.soc_reference;
        }

        for (int z = 0; z < zones; ++z) {
            const auto& zf = fleet.zones[z];
            const int row = lay.ramp_row(t, z);
            const int g = lay.control(t, z, Control::Dispatchable);
            const double r = zf.ramp_mw_per_step / b;
            at.emplace_back(row, g, 1.0);
            if (t > 0) {
                const int gp = lay.control(t - 1, z, Control::Dispatchable);
                at.emplace_back(row, gp, -1.0);
                qp.l(row) = -r;
                qp.u(row) = r;
                pt.emplace_back(g, g, ramp_quad);
                pt.emplace_back(gp, gp, ramp_quad);
                pt.emplace_back(g, gp, -ramp_quad);
                pt.emplace_back(gp, g, -ramp_quad);
            } else if (state.previous_dispatch) {
                const double prev = (*state.previous_dispatch)[z] / b;
                qp.l(row) = prev - r;
                qp.u(row) = prev + r;
                pt.emplace_back(g, g, ramp_quad);
                qp.q(g) += -ramp_quad * prev;
                constant += 0.5 * ramp_quad * prev * prev;
            } else {
                qp.l(row) = -inf;
                qp.u(row) = inf;
            }
        }

        for (int z = 0; z < zones; ++z) {
            const auto& zf = fleet.zones[z];
            const double wind = zf.wind_mw[step] / b;
            const double pv = zf.pv_mw[step] / b;
            const bool has_storage = zf.storage.present();
            const struct {
                Control c;
                double hi;
                double price;
            } ctrl[] = {
                {Control::Dispatchable, zf.dispatchable_mw / b, w.generation},
                {Control::Wind, wind, -w.curtailment},
                {Control::Pv, pv, -w.curtailment},
                {Control::Shed, load(z), w.shed},
                {Control::Charge, has_storage ? zf.storage.charge_mw / b : 0.0, w.storage_cycling},
                {Control::Discharge, has_storage ? zf.storage.discharge_mw / b : 0.0, w.storage_cycling},
            };
            for (const auto& c : ctrl) {
                const int x = lay.control(t, z, c.c);
                qp.q(x) += c.price * energy_cost;
                if (ctrl_quad > 0.0) pt.emplace_back(x, x, ctrl_quad);
                const int row = lay.bound_row(t, x - t * lay.vars_per_step());
                at.emplace_back(row, x, 1.0);
                qp.l(row) = 0.0;
                qp.u(row) = c.hi;
            }
            constant += w.curtailment * energy_cost * (wind + pv);
        }
        for (int s = 0; s < lay.states(); ++s) {
            const int x = lay.state(t, s);
            const int row = lay.bound_row(t, x - t * lay.vars_per_step());
            at.emplace_back(row, x, 1.0);
            qp.l(row) = 0.0;
            qp.u(row) = 1.0;
        }
    }

    qp.P.resize(n, n);
    qp.P.setFromTriplets(pt.begin(), pt.end());
    qp.A.resize(m, n);
    qp.A.setFromTriplets(at.begin(), at.end());
    qp.constant = constant;
    qp.validate();
    return {std::move(qp), lay};
}

struct Dispatcher::Impl {
    const DispatchProblem* problem = nullptr;
    qp::Settings settings;
    std::unique_ptr<qp::Solver> solver;
    int cached_steps = -1;
    bool cached_prev = false;
};

Dispatcher::Dispatcher(const DispatchProblem& problem, const qp::Settings& settings)
    : impl_(std::make_unique<Impl>()) {
    problem.validate();
    impl_->problem = &problem;
    impl_->settings = settings;
}

Dispatcher::~Dispatcher() = default;
Dispatcher::Dispatcher(Dispatcher&&) noexcept = default;
Dispatcher& Dispatcher::operator=(Dispatcher&&) noexcept = default;

StepSolution Dispatcher::solve_step(std::size_t k, const SystemState& state) {
    auto& s = *impl_;
    const auto& problem = *s.problem;
    QpInstance inst = build_qp(problem, k, state);
    const auto& lay = inst.layout;
    const bool has_prev = state.previous_dispatch.has_value();

    if (s.solver && lay.steps == s.cached_steps && has_prev == s.cached_prev) {
        s.solver->update(inst.problem.q, inst.problem.l, inst.problem.u, inst.problem.constant);
    } else {
        s.solver = std::make_unique<qp::Solver>(inst.problem, s.settings);
        s.cached_steps = lay.steps;
        s.cached_prev = has_prev;
    }

    const qp::Result res = s.solver->solve();
    if (res.status != qp::Status::Solved) {
        throw SolverFailure(k, "QP solver stopped after " + std::to_string(res.iterations) +
                                   " iterations (" + qp::to_string(res.status) + ")");
    }

    const auto& fleet = problem.fleet;
    const double b = problem.power_base_mw;
    const double h = fleet.step_seconds / 3600.0;
    StepSolution out;
    out.objective = res.objective;
    out.iterations = res.iterations;
    out.window = lay.steps;
    out.zones.resize(lay.zones);
    Eigen::VectorXd inj(lay.zones);
    double balance = 0.0;
    for (int z = 0; z < lay.zones; ++z) {
        const auto& zf = fleet.zones[z];
        auto v = [&](Control c) { return res.x(lay.control(0, z, c)) * b; };
        ZoneStep zs;
        zs.dispatchable = clip(v(Control::Dispatchable), 0.0, zf.dispatchable_mw);
        zs.wind_used = clip(v(Control::Wind), 0.0, zf.wind_mw[k]);
        zs.pv_used = clip(v(Control::Pv), 0.0, zf.pv_mw[k]);
        zs.shed = clip(v(Control::Shed), 0.0, zf.load_mw[k]);
        if (zf.storage.present()) {
            const auto& st = zf.storage;
            zs.charge = clip(v(Control::Charge), 0.0, st.charge_mw);
            zs.discharge = clip(v(Control::Discharge), 0.0, st.discharge_mw);
            const double soc = state.soc[z];
            double next = soc + (st.eta_charge() * zs.charge - zs.discharge / st.eta_discharge()) * h /
                                    st.energy_mwh;
            // Trim the solver's tolerance-level overshoot so the dynamics hold exactly.
            if (next > 1.0) {
                zs.charge = std::max(0.0, ((1.0 - soc) * st.energy_mwh / h + zs.discharge / st.eta_discharge()) /
                                              st.eta_charge());
            } else if (next < 0.0) {
                zs.discharge = std::max(0.0, (soc * st.energy_mwh / h + st.eta_charge() * zs.charge) *
                                                 st.eta_discharge());
            }
            next = soc + (st.eta_charge() * zs.charge - zs.discharge / st.eta_discharge()) * h / st.energy_mwh;
            zs.soc_after = clip(next, 0.0, 1.0);
        } else {
            zs.soc_after = state.soc[z];
        }
        inj(z) = zs.dispatchable + zs.wind_used + zs.pv_used + zs.discharge - zs.charge + zs.shed -
                 zf.load_mw[k];
        balance += inj(z);
        out.zones[z] = zs;
    }
    out.balance_residual = balance;
    const Eigen::VectorXd flows = problem.ptdf.values * inj;
    out.flows.assign(flows.data(), flows.data() + flows.size());
    return out;
}

SystemState Dispatcher::advance(const SystemState& state, const StepSolution& step) {
    SystemState next;
    next.soc = state.soc;
    std::vector<double> g(step.zones.size());
    for (std::size_t z = 0; z < step.zones.size(); ++z) {
        g[z] = step.zones[z].dispatchable;
        next.soc[z] = step.zones[z].soc_after;
    }
    next.previous_dispatch = std::move(g);
    return next;
}

DispatchResult receding_horizon_run(const DispatchProblem& problem, const RunOptions& options,
                                    const qp::Settings& settings) {
    problem.validate();
    const std::size_t total = problem.num_steps();
    if (options.start >= total) throw HorizonMismatch("run: start step beyond data");
    const std::size_t steps = options.steps == 0 ? total - options.start : options.steps;
    if (options.start + steps > total) throw HorizonMismatch("run: span exceeds data");

    const auto& fleet = problem.fleet;
    const std::size_t zones = fleet.zones.size();
    const std::size_t lines = problem.line_limits.size();
    DispatchResult r;
    for (const auto& z : fleet.zones) r.zones.push_back(z.zone);
    r.start = options.start;
    r.steps = steps;
    r.step_seconds = fleet.step_seconds;
    for (auto* v : {&r.dispatchable, &r.wind_available, &r.wind_used, &r.pv_available, &r.pv_used, &r.load,
                    &r.shed, &r.charge, &r.discharge, &r.soc}) {
        v->assign(zones, std::vector<double>(steps, 0.0));
    }
    r.flows.assign(lines, std::vector<double>(steps, 0.0));
    r.limits.assign(lines, std::vector<double>(steps, 0.0));
    r.objective.assign(steps, 0.0);
    r.iterations.assign(steps, 0);

    Dispatcher d(problem, settings);
    SystemState state = SystemState::initial(fleet);
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t k = options.start + i;
        const StepSolution sol = d.solve_step(k, state);
        if (options.on_step) options.on_step(k, state, sol);
        for (std::size_t z = 0; z < zones; ++z) {
            const auto& zs = sol.zones[z];
            const auto& zf = fleet.zones[z];
            r.dispatchable[z][i] = zs.dispatchable;
            r.wind_available[z][i] = zf.wind_mw[k];
            r.wind_used[z][i] = zs.wind_used;
            r.pv_available[z][i] = zf.pv_mw[k];
            r.pv_used[z][i] = zs.pv_used;
            r.load[z][i] = zf.load_mw[k];
            r.shed[z][i] = zs.shed;
            r.charge[z][i] = zs.charge;
            r.discharge[z][i] = zs.discharge;
            r.soc[z][i] = zs.soc_after;
        }
        for (std::size_t l = 0; l < lines; ++l) {
            r.flows[l][i] = sol.flows[l];
            r.limits[l][i] = problem.line_limits[l][k];
        }
        r.objective[i] = sol.objective;
        r.iterations[i] = sol.iterations;
        r.max_balance_residual = std::max(r.max_balance_residual, std::abs(sol.balance_residual));
        state = Dispatcher::advance(state, sol);
    }
    return r;
}

std::vector<CurtailmentRow> curtailment_report(const DispatchResult& result) {
    auto pct = [](double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; };
    std::vector<CurtailmentRow> rows;
    double tl = 0, ts = 0, tw = 0, twc = 0, tp = 0, tpc = 0;
    for (std::size_t z = 0; z < result.zones.size(); ++z) {
        double l = 0, s = 0, w = 0, wc = 0, p = 0, pc = 0;
        for (std::size_t k = 0; k < result.steps; ++k) {
            l += result.load[z][k];
            s += result.shed[z][k];
            w += result.wind_available[z][k];
            wc += result.wind_available[z][k] - result.wind_used[z][k];
            p += result.pv_available[z][k];
            pc += result.pv_available[z][k] - result.pv_used[z][k];
        }
        rows.push_back({result.zones[z], pct(s, l), pct(wc, w), pct(pc, p)});
        tl += l;
        ts += s;
        tw += w;
        twc += wc;
        tp += p;
        tpc += pc;
    }
    rows.push_back({"TOTAL", pct(ts, tl), pct(twc, tw), pct(tpc, tp)});
    return rows;
}

}  // namespace dlrsim::dispatch
