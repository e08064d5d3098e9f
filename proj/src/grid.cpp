#include "dlrsim/grid.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace dlrsim::grid {

namespace {
constexpr double kCalibrationLo = 0.5;
constexpr double kCalibrationHi = 2.0;
}  // namespace

void GridModel::validate() const {
    if (nodes.empty()) throw std::invalid_argument("GridModel: no nodes");
    if (!(base_mva > 0.0)) throw std::invalid_argument("GridModel: base_mva must be > 0");
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) {
            throw std::invalid_argument("GridModel: duplicate node id '" + n.id + "'");
        }
    }
    for (const auto& l : lines) {
        if (!ids.count(l.from) || !ids.count(l.to)) {
            throw std::invalid_argument("GridModel: line " + l.name() + " references unknown node");
        }
        if (l.from == l.to) throw std::invalid_argument("GridModel: self-loop " + l.name());
        if (!(l.susceptance > 0.0)) {
            throw std::invalid_argument("GridModel: line " + l.name() + " susceptance must be > 0");
        }
        if (!(l.nlr_mva > 0.0)) {
            throw std::invalid_argument("GridModel: line " + l.name() + " nlr_mva must be > 0");
        }
        if (l.circuits_220kv < 0 || l.circuits_380kv < 0 ||
            l.circuits_220kv + l.circuits_380kv == 0) {
            throw std::invalid_argument("GridModel: line " + l.name() + " needs at least one circuit");
        }
    }

    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& l : lines) {
        const int a = node_index(l.from), b = node_index(l.to);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(nodes.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                q.push(v);
            }
        }
    }
    if (count != nodes.size()) {
        throw DisconnectedGraph("GridModel: network is not connected (" + std::to_string(count) +
                                " of " + std::to_string(nodes.size()) + " nodes reachable)");
    }
}

int GridModel::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown node '" + id + "'");
}

int GridModel::line_index(const std::string& name) const {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].name() == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown line '" + name + "'");
}

double corridor_susceptance(double length_km, int circuits_220kv, int circuits_380kv,
                            double x_ohm_per_km_220, double x_ohm_per_km_380, double base_mva) {
    if (!(length_km > 0.0)) throw std::invalid_argument("corridor_susceptance: length must be > 0");
    auto per_circuit = [&](double kv, double x_per_km) {
        const double z_base = kv * kv / base_mva;
        return z_base / (x_per_km * length_km);
    };
    return circuits_220kv * per_circuit(220.0, x_ohm_per_km_220) +
           circuits_380kv * per_circuit(380.0, x_ohm_per_km_380);
}

PtdfMatrix build_ptdf(const GridModel& model, int slack) {
    model.validate();
    const int n = static_cast<int>(model.num_nodes());
    const int m = static_cast<int>(model.num_lines());
    if (slack < 0 || slack >= n) throw std::invalid_argument("build_ptdf: slack index out of range");

    Eigen::MatrixXd bbus = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(m, n);
    for (int l = 0; l < m; ++l) {
        const auto& line = model.lines[l];
        const int f = model.node_index(line.from), t = model.node_index(line.to);
        const double b = line.susceptance;
        bbus(f, f) += b;
        bbus(t, t) += b;
        bbus(f, t) -= b;
        bbus(t, f) -= b;
        bf(l, f) = b;
        bf(l, t) = -b;
    }

    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
        if (i != slack) keep.push_back(i);
    }
    const int r = n - 1;
    Eigen::MatrixXd bred(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) bred(i, j) = bbus(keep[i], keep[j]);
    }

    PtdfMatrix out;
    out.slack = slack;
    out.values = Eigen::MatrixXd::Zero(m, n);
    if (r == 0) return out;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(bred);
    if (lu.rank() < r) throw SingularNetwork("build_ptdf: reduced susceptance matrix is singular");
    const Eigen::MatrixXd xred = lu.inverse();
    for (int l = 0; l < m; ++l) {
        for (int j = 0; j < r; ++j) {
            double v = 0.0;
            for (int i = 0; i < r; ++i) v += bf(l, keep[i]) * xred(i, j);
            out.values(l, keep[j]) = v;
        }
    }
    return out;
}

double ampacity_to_mva(double i_ac, double voltage_kv, int circuits) {
    if (i_ac < 0.0 || voltage_kv < 0.0 || circuits < 0) {
        throw std::invalid_argument("ampacity_to_mva: inputs must be non-negative");
    }
    return std::sqrt(3.0) * voltage_kv * 1e3 * i_ac * circuits / 1e6;
}

CorridorRating corridor_rating(const Line& line, const thermal::AmbientConditions& amb,
                               const thermal::ConductorSpec& spec) {
    const auto dc = thermal::dc_rating(spec, amb);
    const double i_ac = thermal::ac_rating(dc.amps);
    CorridorRating out;
    out.negative_headroom = dc.negative_headroom();
    out.mva = ampacity_to_mva(i_ac, 220.0, line.circuits_220kv) +
              ampacity_to_mva(i_ac, 380.0, line.circuits_380kv);
    return out;
}

CorridorRating corridor_dlr(const Line& line, const thermal::AmbientConditions& amb_from,
                            const thermal::AmbientConditions& amb_to,
                            const thermal::ConductorSpec& spec, double calibration) {
    const auto a = corridor_rating(line, amb_from, spec);
    const auto b = corridor_rating(line, amb_to, spec);
    CorridorRating out = a.mva <= b.mva ? a : b;
    out.mva *= calibration;
    return out;
}

std::vector<double> calibrate_to_nlr(const GridModel& model, const thermal::ConductorSpec& spec,
                                     const thermal::AmbientConditions& reference) {
    std::vector<double> factors;
    factors.reserve(model.num_lines());
    for (const auto& line : model.lines) {
        const double raw = corridor_rating(line, reference, spec).mva;
        if (!(raw > 0.0)) {
            throw std::invalid_argument("calibrate_to_nlr: zero rating for " + line.name() +
                                        " at the reference ambient");
        }
        const double f = line.nlr_mva / raw;
        if (f < kCalibrationLo || f > kCalibrationHi) {
            spdlog::error("calibration factor {:.3f} for line {} outside [{}, {}]; check circuit "
                          "counts against the NLR value",
                          f, line.name(), kCalibrationLo, kCalibrationHi);
        }
        factors.push_back(f);
    }
    return factors;
}

RatingMode parse_rating_mode(const std::string& text) {
    if (text == "nlr" || text == "NLR") return RatingMode::NLR;
    if (text == "dlr" || text == "DLR") return RatingMode::DLR;
    throw std::invalid_argument("unknown rating mode '" + text + "' (expected nlr or dlr)");
}

std::string to_string(RatingMode mode) { return mode == RatingMode::NLR ? "nlr" : "dlr"; }

RatingSeries rating_series(const GridModel& model,
                           std::span<const std::vector<thermal::AmbientConditions>> ambient,
                           RatingMode mode, const thermal::ConductorSpec& spec,
                           std::span<const double> calibration) {
    if (ambient.size() != model.num_nodes()) {
        throw HorizonMismatch("rating_series: expected ambient series for " +
                              std::to_string(model.num_nodes()) + " zones, got " +
                              std::to_string(ambient.size()));
    }
    const std::size_t steps = ambient.front().size();
    for (const auto& z : ambient) {
        if (z.size() != steps) throw HorizonMismatch("rating_series: ambient series lengths differ");
    }
    if (mode == RatingMode::DLR && calibration.size() != model.num_lines()) {
        throw std::invalid_argument("rating_series: one calibration factor per line required");
    }

    RatingSeries out;
    out.mode = mode;
    out.limits.assign(model.num_lines(), std::vector<double>(steps, 0.0));
    out.flagged.assign(model.num_lines(), std::vector<bool>(steps, false));
    for (std::size_t l = 0; l < model.num_lines(); ++l) {
        const auto& line = model.lines[l];
        if (mode == RatingMode::NLR) {
            std::fill(out.limits[l].begin(), out.limits[l].end(), line.nlr_mva);
            continue;
        }
        const auto& from = ambient[model.node_index(line.from)];
        const auto& to = ambient[model.node_index(line.to)];
        for (std::size_t k = 0; k < steps; ++k) {
            const auto r = corridor_dlr(line, from[k], to[k], spec, calibration[l]);
            out.limits[l][k] = r.mva;
            out.flagged[l][k] = r.negative_headroom;
        }
    }
    return out;
}

}  // namespace dlrsim::grid
