#pragma once

// Zonal benchmark topology, DC power flow sensitivities and corridor ratings.

#include "dlrsim/errors.h"
#include "dlrsim/thermal.h"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlrsim::grid {

class DisconnectedGraph : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularNetwork : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Node {
    std::string id;
    std::string name;
};

struct Line {
    std::string from;
    std::string to;
    int circuits_220kv = 0;
    int circuits_380kv = 0;
    double susceptance = 0.0;  // per unit on the model base
    double nlr_mva = 0.0;

    std::string name() const { return from + "-" + to; }
};

struct GridModel {
    std::vector<Node> nodes;
    std::vector<Line> lines;
    double base_mva = 100.0;

    /// Throws std::invalid_argument, or DisconnectedGraph for an unconnected topology.
    void validate() const;
    int node_index(const std::string& id) const;
    int line_index(const std::string& name) const;
    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_lines() const { return lines.size(); }
};

/// Susceptance in per unit of a corridor of parallel circuits, each with the
/// given series reactance per km at its voltage class.
double corridor_susceptance(double length_km, int circuits_220kv, int circuits_380kv,
                            double x_ohm_per_km_220, double x_ohm_per_km_380, double base_mva);

struct PtdfMatrix {
    Eigen::MatrixXd values;  // lines x nodes, slack column is zero
    int slack = 0;

    Eigen::VectorXd flows(const Eigen::VectorXd& injections) const { return values * injections; }
};

PtdfMatrix build_ptdf(const GridModel& model, int slack = 0);

/// Three-phase apparent power of `circuits` parallel circuits, MVA.
double ampacity_to_mva(double i_ac, double voltage_kv, int circuits);

struct CorridorRating {
    double mva = 0.0;
    bool negative_headroom = false;
};

/// Uncalibrated rating of all circuits of a corridor under one ambient.
CorridorRating corridor_rating(const Line& line, const thermal::AmbientConditions& amb,
                               const thermal::ConductorSpec& spec);

/// Lower of the two endpoint ratings, times the corridor's calibration factor.
CorridorRating corridor_dlr(const Line& line, const thermal::AmbientConditions& amb_from,
                            const thermal::AmbientConditions& amb_to,
                            const thermal::ConductorSpec& spec, double calibration = 1.0);

/// Per-line factors that map the reference-ambient rating onto each line's NLR.
std::vector<double> calibrate_to_nlr(const GridModel& model, const thermal::ConductorSpec& spec,
                                     const thermal::AmbientConditions& reference);

enum class RatingMode { NLR, DLR };

RatingMode parse_rating_mode(const std::string& text);
std::string to_string(RatingMode mode);

struct RatingSeries {
    RatingMode mode = RatingMode::NLR;
    std::vector<std::vector<double>> limits;  // [line][step], MVA
    std::vector<std::vector<bool>> flagged;   // negative-headroom steps

    std::size_t num_lines() const { return limits.size(); }
    std::size_t num_steps() const { return limits.empty() ? 0 : limits.front().size(); }
};

/// `ambient[zone][step]` indexed like model.nodes. Calibration factors only
/// apply in DLR mode.
RatingSeries rating_series(const GridModel& model,
                           std::span<const std::vector<thermal::AmbientConditions>> ambient,
                           RatingMode mode, const thermal::ConductorSpec& spec,
                           std::span<const double> calibration);

}  // namespace dlrsim::grid
