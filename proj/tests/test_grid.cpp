#include <gtest/gtest.h>

#include "dlrsim/grid.h"

#include <cmath>
#include <random>

using namespace dlrsim;
using namespace dlrsim::grid;
using dlrsim::thermal::AmbientConditions;
using dlrsim::thermal::ConductorSpec;

namespace {

GridModel two_node() {
    GridModel m;
    m.nodes = {{"A", "a"}, {"B", "b"}};
    m.lines = {{"A", "B", 0, 1, 10.0, 500.0}};
    return m;
}

GridModel triangle() {
    GridModel m;
    m.nodes = {{"A", "a"}, {"B", "b"}, {"C", "c"}};
    m.lines = {{"A", "B", 0, 1, 5.0, 500.0}, {"A", "C", 0, 1, 5.0, 500.0},
               {"C", "B", 0, 1, 5.0, 500.0}};
    return m;
}

GridModel random_mesh(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> b(1.0, 40.0);
    GridModel m;
    for (int i = 0; i < n; ++i) m.nodes.push_back({std::string(1, char('A' + i)), ""});
    for (int i = 1; i < n; ++i) {
        m.lines.push_back({m.nodes[i - 1].id, m.nodes[i].id, 1, 1, b(rng), 800.0});
    }
    for (int i = 0; i + 2 < n; i += 2) {
        m.lines.push_back({m.nodes[i].id, m.nodes[i + 2].id, 0, 2, b(rng), 900.0});
    }
    return m;
}

// Independent route: solve the reduced nodal system B theta = P directly and
// take branch flows from angle differences.
Eigen::VectorXd nodal_dc_flows(const GridModel& m, const Eigen::VectorXd& p, int slack) {
    const int n = static_cast<int>(m.num_nodes());
    Eigen::MatrixXd bbus = Eigen::MatrixXd::Zero(n, n);
    for (const auto& l : m.lines) {
        const int f = m.node_index(l.from), t = m.node_index(l.to);
        bbus(f, f) += l.susceptance;
        bbus(t, t) += l.susceptance;
        bbus(f, t) -= l.susceptance;
        bbus(t, f) -= l.susceptance;
    }
    bbus.row(slack).setZero();
    bbus.col(slack).setZero();
    bbus(slack, slack) = 1.0;
    Eigen::VectorXd rhs = p;
    rhs(slack) = 0.0;
    const Eigen::VectorXd theta = bbus.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd flows(m.num_lines());
    for (std::size_t i = 0; i < m.num_lines(); ++i) {
        const auto& l = m.lines[i];
        flows(i) = l.susceptance * (theta(m.node_index(l.from)) - theta(m.node_index(l.to)));
    }
    return flows;
}

Eigen::VectorXd balanced(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = u(rng);
    p.array() -= p.mean();
    return p;
}

AmbientConditions ambient(double v, double t, double s) {
    AmbientConditions a;
    a.wind_speed = v;
    a.air_temp = t;
    a.solar_radiation = s;
    a.wind_angle_deg = 45.0;
    return a;
}

}  // namespace

TEST(Ptdf, TwoNodes) {
    auto ptdf = build_ptdf(two_node());
    Eigen::VectorXd p(2);
    p << 100.0, -100.0;
    EXPECT_NEAR(ptdf.flows(p)(0), 100.0, 1e-9);
}

TEST(Ptdf, TriangleSplitsByImpedance) {
    auto ptdf = build_ptdf(triangle());
    Eigen::VectorXd p(3);
    p << 90.0, -90.0, 0.0;
    auto f = ptdf.flows(p);
    EXPECT_NEAR(f(0), 60.0, 1e-9);  // A-B
    EXPECT_NEAR(f(1), 30.0, 1e-9);  // A-C
    EXPECT_NEAR(f(2), 30.0, 1e-9);  // C-B
    auto oracle = nodal_dc_flows(triangle(), p, 0);
    EXPECT_NEAR((f - oracle).norm(), 0.0, 1e-9);
}

TEST(Ptdf, BalancedFlowsIndependentOfSlack) {
    std::mt19937_64 rng(3);
    auto m = random_mesh(rng, 6);
    auto p = balanced(rng, 6);
    const Eigen::VectorXd ref = build_ptdf(m, 0).flows(p);
    for (int slack = 1; slack < 6; ++slack) {
        EXPECT_NEAR((build_ptdf(m, slack).flows(p) - ref).norm(), 0.0, 1e-9);
    }
}

TEST(Ptdf, SlackColumnZeroAndEntriesBounded) {
    std::mt19937_64 rng(5);
    auto m = random_mesh(rng, 6);
    auto ptdf = build_ptdf(m, 4);
    EXPECT_EQ(ptdf.values.col(4).norm(), 0.0);
    EXPECT_LE(ptdf.values.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
}

TEST(Ptdf, MatchesNodalSolveOnRandomInjections) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_mesh(rng, 3 + trial % 5);
        const int n = static_cast<int>(m.num_nodes());
        const int slack = trial % n;
        auto ptdf = build_ptdf(m, slack);
        for (int k = 0; k < 5; ++k) {
            auto p = balanced(rng, n);
            auto f = ptdf.flows(p);
            auto oracle = nodal_dc_flows(m, p, slack);
            for (int i = 0; i < f.size(); ++i) {
                EXPECT_NEAR(f(i), oracle(i), 1e-9 * std::max(1.0, std::abs(oracle(i))));
            }
            // Reversing all injections negates every flow exactly.
            Eigen::VectorXd neg = -p;
            EXPECT_EQ(ptdf.flows(neg), -f);
        }
    }
}

TEST(Ptdf, Errors) {
    GridModel m = triangle();
    m.lines.pop_back();
    m.lines.pop_back();
    EXPECT_THROW(build_ptdf(m), DisconnectedGraph);
    m = triangle();
    m.lines[0].susceptance = 0.0;
    EXPECT_THROW(build_ptdf(m), std::invalid_argument);
    m = triangle();
    m.nodes[2].id = "A";
    EXPECT_THROW(build_ptdf(m), std::invalid_argument);
}

TEST(Ampacity, ToMva) {
    EXPECT_NEAR(ampacity_to_mva(2000.0, 380.0, 1), std::sqrt(3.0) * 380e3 * 2000.0 / 1e6, 1e-9);
    EXPECT_NEAR(ampacity_to_mva(2000.0, 380.0, 1), 1316.4, 0.1);
    EXPECT_EQ(ampacity_to_mva(0.0, 380.0, 3), 0.0);
    EXPECT_DOUBLE_EQ(ampacity_to_mva(900.0, 220.0, 4), 2.0 * ampacity_to_mva(900.0, 220.0, 2));
}

TEST(CorridorSusceptance, ParallelCircuitsAdd) {
    const double one = corridor_susceptance(200.0, 0, 1, 0.4, 0.25, 100.0);
    EXPECT_NEAR(one, 380.0 * 380.0 / 100.0 / (0.25 * 200.0), 1e-12);
    EXPECT_NEAR(corridor_susceptance(200.0, 0, 3, 0.4, 0.25, 100.0), 3.0 * one, 1e-9);
}

TEST(CorridorDlr, MinRule) {
    ConductorSpec spec;
    Line line{"A", "B", 1, 2, 10.0, 1500.0};
    auto windy = ambient(8.0, 5.0, 0.0);
    auto calm = ambient(0.5, 5.0, 0.0);
    EXPECT_DOUBLE_EQ(corridor_dlr(line, windy, windy, spec).mva, corridor_rating(line, windy, spec).mva);
    EXPECT_DOUBLE_EQ(corridor_dlr(line, windy, calm, spec).mva, corridor_rating(line, calm, spec).mva);
    EXPECT_DOUBLE_EQ(corridor_dlr(line, calm, windy, spec).mva, corridor_rating(line, calm, spec).mva);
    const double r = corridor_rating(line, calm, spec).mva;
    EXPECT_NEAR(corridor_dlr(line, calm, windy, spec, 1.1).mva, 1.1 * r, 1e-9);
}

TEST(CorridorDlr, MixedVoltageSumsClasses) {
    ConductorSpec spec;
    auto amb = ambient(3.0, 10.0, 200.0);
    const double i_ac = thermal::ac_rating(spec, amb);
    Line line{"A", "B", 2, 3, 10.0, 1500.0};
    EXPECT_NEAR(corridor_rating(line, amb, spec).mva,
                ampacity_to_mva(i_ac, 220.0, 2) + ampacity_to_mva(i_ac, 380.0, 3), 1e-9);
}

TEST(Calibration, ReferenceAmbientReproducesNlr) {
    ConductorSpec spec;
    GridModel m = triangle();
    m.lines[0].nlr_mva = 592.0;
    m.lines[1].nlr_mva = 1529.0;
    m.lines[1].circuits_220kv = 1;
    m.lines[1].circuits_380kv = 2;
    auto ref = ambient(1.0, 35.0, 1000.0);
    auto factors = calibrate_to_nlr(m, spec, ref);
    for (std::size_t l = 0; l < m.num_lines(); ++l) {
        EXPECT_NEAR(corridor_dlr(m.lines[l], ref, ref, spec, factors[l]).mva, m.lines[l].nlr_mva,
                    1e-9 * m.lines[l].nlr_mva);
    }
    EXPECT_EQ(calibrate_to_nlr(m, spec, ref), factors);
}

TEST(RatingSeriesTest, NlrConstantAndDlrVaries) {
    ConductorSpec spec;
    GridModel m = two_node();
    auto ref = ambient(1.0, 35.0, 1000.0);
    auto factors = calibrate_to_nlr(m, spec, ref);
    std::vector<std::vector<AmbientConditions>> amb(2);
    for (int k = 0; k < 48; ++k) {
        amb[0].push_back(ambient(1.0 + 0.25 * k, 2.0, 0.0));
        amb[1].push_back(ambient(1.0 + 0.2 * k, 4.0, 50.0));
    }
    auto nlr = rating_series(m, amb, RatingMode::NLR, spec, factors);
    for (double v : nlr.limits[0]) EXPECT_EQ(v, 500.0);
    auto dlr = rating_series(m, amb, RatingMode::DLR, spec, factors);
    ASSERT_EQ(dlr.num_steps(), 48u);
    // Cold winter air beats the hot, sunny reference even at the cut-in wind speed.
    for (double v : dlr.limits[0]) EXPECT_GT(v, 500.0);
    EXPECT_GT(dlr.limits[0].back(), dlr.limits[0].front());
}

TEST(RatingSeriesTest, DlrCanFallBelowNlr) {
    ConductorSpec spec;
    GridModel m = two_node();
    auto ref = ambient(1.0, 35.0, 1000.0);
    auto factors = calibrate_to_nlr(m, spec, ref);
    std::vector<std::vector<AmbientConditions>> amb(2);
    amb[0].push_back(ambient(0.0, 40.0, 1000.0));
    amb[1].push_back(ambient(0.0, 40.0, 1000.0));
    auto dlr = rating_series(m, amb, RatingMode::DLR, spec, factors);
    EXPECT_LT(dlr.limits[0][0], 500.0);
}

TEST(RatingSeriesTest, HorizonMismatch) {
    ConductorSpec spec;
    GridModel m = two_node();
    std::vector<std::vector<AmbientConditions>> amb(2);
    amb[0].resize(4);
    amb[1].resize(3);
    std::vector<double> factors{1.0};
    EXPECT_THROW(rating_series(m, amb, RatingMode::DLR, spec, factors), HorizonMismatch);
    amb.pop_back();
    EXPECT_THROW(rating_series(m, amb, RatingMode::DLR, spec, factors), HorizonMismatch);
}
