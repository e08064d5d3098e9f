#pragma once

// Convex QP solver: minimize 0.5 x'Px + q'x subject to l <= Ax <= u.
// Primal-dual interior point (Mehrotra predictor-corrector) on the sparse
// quasi-definite KKT system with the inequality slacks condensed out.
// Single-variable rows become variable bounds, fixed variables are eliminated
// and the remaining system is Ruiz equilibrated. The symbolic factorization is reused while q, l and u change
// without altering the row classification.

#include <Eigen/Sparse>

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace dlrsim::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InfeasibleBounds : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Problem {
    Eigen::SparseMatrix<double> P;  // symmetric, both triangles stored
    Eigen::VectorXd q;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd l;
    Eigen::VectorXd u;
    double constant = 0.0;  // added to the reported objective

    Eigen::Index num_variables() const { return q.size(); }
    Eigen::Index num_constraints() const { return l.size(); }
    /// Throws std::invalid_argument on shape errors, InfeasibleBounds when l > u.
    void validate() const;
};

struct Settings {
    double eps_feasibility = 1e-8;  // relative primal and dual residual
    double eps_gap = 1e-9;          // relative complementarity gap
    int max_iter = 100;
    int scaling_iters = 10;
    double step_fraction = 0.995;
    double regularization = 1e-10;
    int refine_iter = 3;
};

enum class Status { Solved, MaxIterations, NumericalError };

std::string to_string(Status s);

struct Result {
    Status status = Status::MaxIterations;
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // row multipliers: Px + q + A'y = 0, y >= 0 on active upper bounds
    double objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;  // inf-norm of bound violation of Ax
    double dual_residual = 0.0;    // inf-norm of Px + q + A'y
    double gap = 0.0;              // complementarity at exit
};

class Solver {
public:
    Solver(const Problem& problem, const Settings& settings = {});
    ~Solver();
    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;

    /// Replace the linear cost and bounds; P and A stay fixed.
    void update(const Eigen::VectorXd& q, const Eigen::VectorXd& l, const Eigen::VectorXd& u,
                double constant = 0.0);
    Result solve();

    /// Number of symbolic KKT analyses so far (one per distinct row classification).
    int analyses() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
Result solve(const Problem& problem, const Settings& settings = {});

}  // namespace dlrsim::qp
