#include "dlrsim/qp.h"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace dlrsim::qp {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

constexpr double kScaleMin = 1e-4;
constexpr double kScaleMax = 1e4;
constexpr double kFixTol = 1e-11;
constexpr double kSolveTol = 1e-8;  // relative KKT residual accepted from a direction solve

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double scale_factor(double norm) {
    if (norm < kScaleMin) return 1.0;
    return 1.0 / std::sqrt(std::min(norm, kScaleMax));
}

Vec col_inf_norms(const SpMat& m) {
    Vec out = Vec::Zero(m.cols());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) out(k) = std::max(out(k), std::abs(it.value()));
    }
    return out;
}

Vec row_inf_norms(const SpMat& m) {
    Vec out = Vec::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            out(it.row()) = std::max(out(it.row()), std::abs(it.value()));
        }
    }
    return out;
}

// Largest step in (0, 1] keeping x + a*dx >= 0 on the masked entries.
double max_step(const Vec& x, const Vec& dx, const std::vector<char>& mask) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (mask[i] && dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
    }
    return a;
}

enum RowType : std::int8_t { kSingleton, kEmpty, kDropped, kEquality, kInequality };

}  // namespace

void Problem::validate() const {
    const auto n = q.size();
    const auto m = l.size();
    if (P.rows() != n || P.cols() != n) throw std::invalid_argument("qp: P must be n x n");
    if (A.cols() != n || A.rows() != m) throw std::invalid_argument("qp: A must be m x n");
    if (u.size() != m) throw std::invalid_argument("qp: l and u sizes differ");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (std::isnan(l(i)) || std::isnan(u(i))) throw std::invalid_argument("qp: NaN bound");
        if (l(i) > u(i)) {
            throw InfeasibleBounds("qp: lower bound exceeds upper bound on row " + std::to_string(i) +
                                   " (" + std::to_string(l(i)) + " > " + std::to_string(u(i)) + ")");
        }
    }
    if (!q.allFinite()) throw std::invalid_argument("qp: non-finite linear cost");
}

std::string to_string(Status s) {
    switch (s) {
        case Status::Solved: return "solved";
        case Status::MaxIterations: return "max_iterations";
        case Status::NumericalError: return "numerical_error";
    }
    return "unknown";
}

struct Solver::Impl {
    Settings set;
    Eigen::Index n = 0, m = 0;
    SpMat P, A, At;
    Vec q, l, u;
    double constant = 0.0;

    // Singleton rows: the variable and coefficient; -1 otherwise.
    std::vector<int> single_var;
    std::vector<double> single_coef;

    // Presolve of the current vectors.
    Vec lb, ub, xfix;
    std::vector<int> lb_row, ub_row;
    std::vector<char> fixed;
    std::vector<RowType> rtype;
    Vec row_shift;

    // Standard form, rebuilt when the classification changes:
    // w = [x_free; s], C w = d, lbw <= w <= ubw, min 0.5 w'Hw + cw'w.
    std::vector<std::int8_t> signature;
    std::vector<int> free_vars, free_index, eq_rows, in_rows;
    Eigen::Index nw = 0, mw = 0;
    Vec gamma;  // -C at each inequality slack
    SpMat H, C, Ct;
    Vec D, E;
    double cscale = 1.0;
    SpMat K;
    std::vector<Eigen::Index> diag_pos;
    Vec hdiag;
    Eigen::SimplicialLDLT<SpMat, Eigen::Upper, Eigen::NaturalOrdering<int>> ldlt;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;  // K = perm * K0 * perm'
    int analysis_count = 0;

    void setup_structure() {
        std::vector<int> count(m, 0);
        single_var.assign(m, -1);
        single_coef.assign(m, 0.0);
        for (int k = 0; k < A.outerSize(); ++k) {
            for (SpMat::InnerIterator it(A, k); it; ++it) {
                if (it.value() == 0.0) continue;
                ++count[it.row()];
                single_var[it.row()] = k;
                single_coef[it.row()] = it.value();
            }
        }
        for (Eigen::Index r = 0; r < m; ++r) {
            if (count[r] != 1) single_var[r] = -1;
        }
    }

    void presolve() {
        lb = Vec::Constant(n, -kInf);
        ub = Vec::Constant(n, kInf);
        lb_row.assign(n, -1);
        ub_row.assign(n, -1);
        rtype.assign(m, kDropped);
        for (Eigen::Index r = 0; r < m; ++r) {
            const int j = single_var[r];
            if (j < 0) continue;
            rtype[r] = kSingleton;
            const double a = single_coef[r];
            const double lo = a > 0 ? l(r) / a : u(r) / a;
            const double hi = a > 0 ? u(r) / a : l(r) / a;
            if (lo > lb(j)) {
                lb(j) = lo;
                lb_row[j] = static_cast<int>(r);
            }
            if (hi < ub(j)) {
                ub(j) = hi;
                ub_row[j] = static_cast<int>(r);
            }
        }
        fixed.assign(n, 0);
        xfix = Vec::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(lb(j)) || !std::isfinite(ub(j))) continue;
            const double tol = kFixTol * std::max({1.0, std::abs(lb(j)), std::abs(ub(j))});
            if (lb(j) > ub(j) + tol) {
                throw InfeasibleBounds("qp: bounds on variable " + std::to_string(j) + " are empty");
            }
            if (ub(j) - lb(j) <= tol) {
                fixed[j] = 1;
                xfix(j) = 0.5 * (lb(j) + ub(j));
            }
        }
        row_shift = Vec::Zero(m);
        std::vector<int> remaining(m, 0);
        for (int k = 0; k < A.outerSize(); ++k) {
            for (SpMat::InnerIterator it(A, k); it; ++it) {
                if (it.value() == 0.0) continue;
                if (fixed[k]) row_shift(it.row()) += it.value() * xfix(k);
                else ++remaining[it.row()];
            }
        }
        for (Eigen::Index r = 0; r < m; ++r) {
            if (rtype[r] == kSingleton) continue;
            const double lo = l(r) - row_shift(r), hi = u(r) - row_shift(r);
            if (remaining[r] == 0) {
                const double tol = 1e-9 * std::max(1.0, std::abs(row_shift(r)));
                if (lo > tol || hi < -tol) {
                    throw InfeasibleBounds("qp: row " + std::to_string(r) + " cannot be satisfied");
                }
                rtype[r] = kEmpty;
            } else if (std::isinf(lo) && std::isinf(hi)) {
                rtype[r] = kDropped;
            } else if (std::isfinite(lo) && std::isfinite(hi) &&
                       hi - lo <= kFixTol * std::max({1.0, std::abs(lo), std::abs(hi)})) {
                rtype[r] = kEquality;
            } else {
                rtype[r] = kInequality;
            }
        }
    }

    bool signature_changed() {
        std::vector<std::int8_t> sig;
        sig.reserve(n + m);
        for (Eigen::Index j = 0; j < n; ++j) sig.push_back(fixed[j]);
        for (Eigen::Index r = 0; r < m; ++r) sig.push_back(rtype[r]);
        if (sig == signature) return false;
        signature = std::move(sig);
        return true;
    }

    void build_standard_form() {
        free_vars.clear();
        free_index.assign(n, -1);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!fixed[j]) {
                free_index[j] = static_cast<int>(free_vars.size());
                free_vars.push_back(static_cast<int>(j));
            }
        }
        eq_rows.clear();
        in_rows.clear();
        for (Eigen::Index r = 0; r < m; ++r) {
            if (rtype[r] == kEquality) eq_rows.push_back(static_cast<int>(r));
            if (rtype[r] == kInequality) in_rows.push_back(static_cast<int>(r));
        }
        const Eigen::Index nf = static_cast<Eigen::Index>(free_vars.size());
        const Eigen::Index ne = static_cast<Eigen::Index>(eq_rows.size());
        const Eigen::Index ni = static_cast<Eigen::Index>(in_rows.size());
        nw = nf + ni;
        mw = ne + ni;

        std::vector<Triplet> ht;
        for (int k = 0; k < P.outerSize(); ++k) {
            if (fixed[k]) continue;
            for (SpMat::InnerIterator it(P, k); it; ++it) {
                if (fixed[it.row()]) continue;
                ht.emplace_back(free_index[it.row()], free_index[k], it.value());
            }
        }
        H.resize(nw, nw);
        H.setFromTriplets(ht.begin(), ht.end());

        std::vector<int> row_pos(m, -1);
        for (Eigen::Index i = 0; i < ne; ++i) row_pos[eq_rows[i]] = static_cast<int>(i);
        for (Eigen::Index i = 0; i < ni; ++i) row_pos[in_rows[i]] = static_cast<int>(ne + i);
        std::vector<Triplet> ct;
        for (int k = 0; k < A.outerSize(); ++k) {
            if (fixed[k]) continue;
            for (SpMat::InnerIterator it(A, k); it; ++it) {
                const int p = row_pos[it.row()];
                if (p >= 0 && it.value() != 0.0) ct.emplace_back(p, free_index[k], it.value());
            }
        }
        for (Eigen::Index i = 0; i < ni; ++i) ct.emplace_back(ne + i, nf + i, -1.0);
        C.resize(mw, nw);
        C.setFromTriplets(ct.begin(), ct.end());

        // Ruiz equilibration of [H C'; C 0].
        D = Vec::Ones(nw);
        E = Vec::Ones(mw);
        for (int it = 0; it < set.scaling_iters; ++it) {
            const Vec dn = col_inf_norms(H).cwiseMax(col_inf_norms(C));
            const Vec en = row_inf_norms(C);
            Vec dd(nw), de(mw);
            for (Eigen::Index i = 0; i < nw; ++i) dd(i) = scale_factor(dn(i));
            for (Eigen::Index i = 0; i < mw; ++i) de(i) = scale_factor(en(i));
            H = dd.asDiagonal() * H * dd.asDiagonal();
            C = de.asDiagonal() * C * dd.asDiagonal();
            D = D.cwiseProduct(dd);
            E = E.cwiseProduct(de);
        }
        const Vec cw = standard_cost();
        double cost = nw > 0 ? col_inf_norms(H).mean() : 1.0;
        cost = std::max(cost, inf_norm(D.cwiseProduct(cw)));
        cost = cost < kScaleMin ? 1.0 : std::min(cost, kScaleMax);
        cscale = 1.0 / cost;
        H *= cscale;
        H.makeCompressed();
        C.makeCompressed();
        Ct = C.transpose();

        // Reduced KKT on [x_free; rows]: the inequality slacks are eliminated
        // into the row diagonal.
        gamma = Vec::Zero(ni);
        for (Eigen::Index i = 0; i < ni; ++i) gamma(i) = -C.coeff(ne + i, nf + i);
        std::vector<Triplet> kt;
        for (int k = 0; k < nf; ++k) {
            for (SpMat::InnerIterator it(H, k); it; ++it) {
                if (it.row() <= it.col()) kt.emplace_back(it.row(), it.col(), it.value());
            }
        }
        for (Eigen::Index i = 0; i < nf; ++i) kt.emplace_back(i, i, 0.0);
        for (int k = 0; k < nf; ++k) {
            for (SpMat::InnerIterator it(C, k); it; ++it) kt.emplace_back(k, nf + it.row(), it.value());
        }
        for (Eigen::Index i = 0; i < mw; ++i) kt.emplace_back(nf + i, nf + i, 0.0);
        SpMat k0(nf + mw, nf + mw);
        k0.setFromTriplets(kt.begin(), kt.end());
        // Fill-reducing ordering applied once so that factorize works in place.
        Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
        Eigen::AMDOrdering<int>()(k0.selfadjointView<Eigen::Upper>(), pinv);
        perm = pinv.inverse();
        K.resize(nf + mw, nf + mw);
        K.selfadjointView<Eigen::Upper>() = k0.selfadjointView<Eigen::Upper>().twistedBy(perm);
        K.makeCompressed();
        diag_pos.resize(nf + mw);
        hdiag = Vec::Zero(nf);
        for (Eigen::Index j = 0; j < nf + mw; ++j) {
            const int c = perm.indices()(j);
            Eigen::Index p = K.outerIndexPtr()[c];
            while (K.innerIndexPtr()[p] != c) ++p;
            diag_pos[j] = p;
        }
        for (Eigen::Index j = 0; j < nf; ++j) hdiag(j) = K.valuePtr()[diag_pos[j]];
        ldlt.analyzePattern(K);
        ++analysis_count;
    }

    // Unscaled linear cost of the standard form.
    Vec standard_cost() const {
        Vec cw = Vec::Zero(nw);
        const Vec pfix = P * xfix;
        for (std::size_t i = 0; i < free_vars.size(); ++i) cw(i) = q(free_vars[i]) + pfix(free_vars[i]);
        return cw;
    }

    Result run() {
        presolve();
        if (signature_changed()) build_standard_form();

        const Eigen::Index nf = static_cast<Eigen::Index>(free_vars.size());
        const Eigen::Index ne = static_cast<Eigen::Index>(eq_rows.size());
        const Eigen::Index ni = static_cast<Eigen::Index>(in_rows.size());
        const Vec cw_raw = standard_cost();
        Vec d_raw = Vec::Zero(mw), lbw(nw), ubw(nw);
        for (Eigen::Index i = 0; i < ne; ++i) d_raw(i) = l(eq_rows[i]) - row_shift(eq_rows[i]);
        for (Eigen::Index j = 0; j < nf; ++j) {
            lbw(j) = lb(free_vars[j]);
            ubw(j) = ub(free_vars[j]);
        }
        for (std::size_t i = 0; i < in_rows.size(); ++i) {
            lbw(nf + i) = l(in_rows[i]) - row_shift(in_rows[i]);
            ubw(nf + i) = u(in_rows[i]) - row_shift(in_rows[i]);
        }
        const Vec cw = cscale * D.cwiseProduct(cw_raw);
        const Vec d = E.cwiseProduct(d_raw);
        const Vec lo = lbw.cwiseQuotient(D), hi = ubw.cwiseQuotient(D);
        std::vector<char> has_lo(nw), has_hi(nw);
        Eigen::Index nb = 0;
        for (Eigen::Index j = 0; j < nw; ++j) {
            has_lo[j] = std::isfinite(lo(j));
            has_hi[j] = std::isfinite(hi(j));
            nb += has_lo[j] + has_hi[j];
        }

        Vec w(nw), lam = Vec::Zero(mw), zl = Vec::Zero(nw), zu = Vec::Zero(nw);
        for (Eigen::Index j = 0; j < nw; ++j) {
            if (has_lo[j] && has_hi[j]) w(j) = 0.5 * (lo(j) + hi(j));
            else if (has_lo[j]) w(j) = lo(j) + 1.0;
            else if (has_hi[j]) w(j) = hi(j) - 1.0;
            else w(j) = 0.0;
        }
        // Bound multipliers absorb the initial reduced cost where possible.
        const Vec g0 = H * w + cw;
        for (Eigen::Index j = 0; j < nw; ++j) {
            if (has_lo[j]) zl(j) = 1.0 + (has_hi[j] || g0(j) > 0.0 ? std::max(g0(j), 0.0) : 0.0);
            if (has_hi[j]) zu(j) = 1.0 + (has_lo[j] || g0(j) < 0.0 ? std::max(-g0(j), 0.0) : 0.0);
        }

        auto slack_lo = [&](const Vec& x) {
            Vec t = Vec::Zero(nw);
            for (Eigen::Index j = 0; j < nw; ++j) if (has_lo[j]) t(j) = x(j) - lo(j);
            return t;
        };
        auto slack_hi = [&](const Vec& x) {
            Vec v = Vec::Zero(nw);
            for (Eigen::Index j = 0; j < nw; ++j) if (has_hi[j]) v(j) = hi(j) - x(j);
            return v;
        };

        const Vec Dinv = D.cwiseInverse(), Einv = E.cwiseInverse();
        const double d_norm = inf_norm(d_raw);
        const double c_norm = inf_norm(cw_raw);
        Result res;
        res.status = Status::MaxIterations;
        double delta = set.regularization;
        Vec rhs(nw + mw), sol(nw + mw);
        int iter = 0;
        for (iter = 0; iter <= set.max_iter; ++iter) {
            const Vec t = slack_lo(w), v = slack_hi(w);
            const Vec hw = H * w;
            const Vec rd = hw + cw - Ct * lam - zl + zu;
            const Vec rp = C * w - d;
            const double comp = t.dot(zl) + v.dot(zu);
            const double mu = nb > 0 ? comp / nb : 0.0;

            const double pres = inf_norm(Einv.cwiseProduct(rp));
            const double dres = inf_norm(Dinv.cwiseProduct(rd)) / cscale;
            const double obj = (0.5 * w.dot(hw) + cw.dot(w)) / cscale;
            const double gap = comp / cscale;
            if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(gap)) {
                res.status = Status::NumericalError;
                break;
            }
            res.gap = gap;
            if (pres <= set.eps_feasibility * (1.0 + d_norm + inf_norm(Einv.cwiseProduct(C * w))) &&
                dres <= set.eps_feasibility * (1.0 + c_norm) &&
                gap <= set.eps_gap * (1.0 + std::abs(obj))) {
                res.status = Status::Solved;
                break;
            }
            if (iter == set.max_iter) break;

            Vec sigma(nw);
            for (Eigen::Index j = 0; j < nw; ++j) {
                sigma(j) = (has_lo[j] ? zl(j) / t(j) : 0.0) + (has_hi[j] ? zu(j) / v(j) : 0.0);
            }
            // Solve [H+S C'; C 0] [dw; dy] = r through the reduced system, with
            // refinement against the unregularized matrix; dlam = -dy.
            auto reduced_solve = [&](const Vec& r) {
                Vec rr(nf + mw);
                rr.head(nf) = r.head(nf);
                rr.segment(nf, ne) = r.segment(nw, ne);
                for (Eigen::Index i = 0; i < ni; ++i) {
                    rr(nf + ne + i) = r(nw + ne + i) + gamma(i) * r(nf + i) / (sigma(nf + i) + delta);
                }
                Vec z = perm * rr;
                z = ldlt.solve(z);
                z = perm.transpose() * z;
                Vec s(nw + mw);
                s.head(nf) = z.head(nf);
                s.tail(mw) = z.tail(mw);
                // Recover the slack from whichever equation is better
                // conditioned: the barrier row when the slack is near a
                // bound, the constraint row otherwise.
                s.segment(nf, ni).setZero();
                const Vec ax = C * s.head(nw);
                for (Eigen::Index i = 0; i < ni; ++i) {
                    const double ss = sigma(nf + i) + delta, g = gamma(i);
                    const double dy = z(nf + ne + i);
                    s(nf + i) = ss >= g * g ? (r(nf + i) + g * dy) / ss
                                            : (ax(ne + i) - delta * dy - r(nw + ne + i)) / g;
                }
                return s;
            };
            bool accurate = true;
            auto residual = [&](const Vec& r, const Vec& s) {
                Vec e(nw + mw);
                e.head(nw) = r.head(nw) - (H * s.head(nw) + sigma.cwiseProduct(s.head(nw)) + Ct * s.tail(mw));
                e.tail(mw) = r.tail(mw) - C * s.head(nw);
                return e;
            };
            auto kkt_solve = [&](const Vec& r, int refine) {
                Vec s = reduced_solve(r);
                const double rn = inf_norm(r);
                Vec e = residual(r, s);
                double en = inf_norm(e);
                for (int k = 0; k < refine && en > 1e-14 * (1.0 + rn); ++k) {
                    Vec sn = s + reduced_solve(e);
                    Vec enew = residual(r, sn);
                    const double nn = inf_norm(enew);
                    if (!(nn < en)) break;
                    s = std::move(sn);
                    e = std::move(enew);
                    en = nn;
                }
                if (!(en <= kSolveTol * (1.0 + rn))) accurate = false;
                return s;
            };
            auto direction = [&](const Vec& rl, const Vec& ru, Vec& dw, Vec& dlam, Vec& dzl, Vec& dzu, int refine) {
                for (Eigen::Index j = 0; j < nw; ++j) {
                    double r = -rd(j);
                    if (has_lo[j]) r += rl(j) / t(j);
                    if (has_hi[j]) r -= ru(j) / v(j);
                    rhs(j) = r;
                }
                rhs.tail(mw) = -rp;
                sol = kkt_solve(rhs, refine);
                dw = sol.head(nw);
                dlam = -sol.tail(mw);
                dzl = Vec::Zero(nw);
                dzu = Vec::Zero(nw);
                for (Eigen::Index j = 0; j < nw; ++j) {
                    if (has_lo[j]) dzl(j) = (rl(j) - zl(j) * dw(j)) / t(j);
                    if (has_hi[j]) dzu(j) = (ru(j) + zu(j) * dw(j)) / v(j);
                }
            };
            auto step_to_boundary = [&](const Vec& dw, const Vec& dzl, const Vec& dzu) {
                const double ap = std::min(max_step(t, dw, has_lo), max_step(v, (-dw).eval(), has_hi));
                const double ad = std::min(max_step(zl, dzl, has_lo), max_step(zu, dzu, has_hi));
                return std::min(ap, ad);
            };

            auto factorize = [&]() {
                for (int attempt = 0; attempt < 6; ++attempt) {
                    for (Eigen::Index j = 0; j < nf; ++j) K.valuePtr()[diag_pos[j]] = hdiag(j) + sigma(j) + delta;
                    for (Eigen::Index i = 0; i < ne; ++i) K.valuePtr()[diag_pos[nf + i]] = -delta;
                    for (Eigen::Index i = 0; i < ni; ++i) {
                        const double g = gamma(i);
                        K.valuePtr()[diag_pos[nf + ne + i]] = -(g * g / (sigma(nf + i) + delta) + delta);
                    }
                    ldlt.factorize(K);
                    if (ldlt.info() == Eigen::Success) return true;
                    delta *= 100.0;
                }
                return false;
            };

            // Predictor-corrector; an inaccurate solve is retried with
            // stronger regularization.
            Vec dw, dlam, dzl, dzu;
            bool ok = false;
            for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
                if (attempt > 0) delta *= 100.0;
                if (!factorize()) break;
                accurate = true;
                Vec rl(nw), ru(nw);
                for (Eigen::Index j = 0; j < nw; ++j) {
                    rl(j) = has_lo[j] ? -t(j) * zl(j) : 0.0;
                    ru(j) = has_hi[j] ? -v(j) * zu(j) : 0.0;
                }
                direction(rl, ru, dw, dlam, dzl, dzu, 1);
                const double a_aff = step_to_boundary(dw, dzl, dzu);
                double mu_aff = 0.0;
                for (Eigen::Index j = 0; j < nw; ++j) {
                    if (has_lo[j]) mu_aff += (t(j) + a_aff * dw(j)) * (zl(j) + a_aff * dzl(j));
                    if (has_hi[j]) mu_aff += (v(j) - a_aff * dw(j)) * (zu(j) + a_aff * dzu(j));
                }
                mu_aff = nb > 0 ? mu_aff / nb : 0.0;
                const double sig = mu > 0.0 ? std::pow(mu_aff / mu, 3) : 0.0;
                for (Eigen::Index j = 0; j < nw; ++j) {
                    if (has_lo[j]) rl(j) = sig * mu - t(j) * zl(j) - dw(j) * dzl(j);
                    if (has_hi[j]) ru(j) = sig * mu - v(j) * zu(j) + dw(j) * dzu(j);
                }
                direction(rl, ru, dw, dlam, dzl, dzu, set.refine_iter);
                ok = accurate;
            }
            if (!ok) {
                res.status = Status::NumericalError;
                break;
            }
            const double a = std::min(1.0, set.step_fraction * step_to_boundary(dw, dzl, dzu));
            w += a * dw;
            lam += a * dlam;
            zl += a * dzl;
            zu += a * dzu;
        }
        res.iterations = std::min(iter, set.max_iter);

        // Back to the original variables and rows.
        const Vec wu = D.cwiseProduct(w);
        const Vec lamu = E.cwiseProduct(lam) / cscale;
        const Vec zlu = zl.cwiseQuotient(D) / cscale, zuu = zu.cwiseQuotient(D) / cscale;
        Vec x = xfix;
        for (Eigen::Index j = 0; j < nf; ++j) x(free_vars[j]) = wu(j);
        Vec y = Vec::Zero(m);
        for (Eigen::Index i = 0; i < ne; ++i) y(eq_rows[i]) = -lamu(i);
        for (std::size_t i = 0; i < in_rows.size(); ++i) y(in_rows[i]) = -lamu(ne + i);
        for (Eigen::Index j = 0; j < nf; ++j) {
            const int var = free_vars[j];
            if (lb_row[var] >= 0) y(lb_row[var]) += -zlu(j) / single_coef[lb_row[var]];
            if (ub_row[var] >= 0) y(ub_row[var]) += zuu(j) / single_coef[ub_row[var]];
        }
        const Vec g = P * x + q + At * y;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!fixed[j]) continue;
            const int r = lb_row[j] >= 0 ? lb_row[j] : ub_row[j];
            if (r >= 0) y(r) += -g(j) / single_coef[r];
        }
        const Vec ax = A * x;
        double pviol = 0.0;
        for (Eigen::Index r = 0; r < m; ++r) {
            pviol = std::max({pviol, l(r) - ax(r), ax(r) - u(r)});
        }
        res.x = x;
        res.y = y;
        res.primal_residual = pviol;
        res.dual_residual = inf_norm(P * x + q + At * y);
        res.objective = 0.5 * x.dot(P * x) + q.dot(x) + constant;
        return res;
    }
};

Solver::Solver(const Problem& problem, const Settings& settings) : impl_(std::make_unique<Impl>()) {
    problem.validate();
    auto& s = *impl_;
    s.set = settings;
    s.n = problem.num_variables();
    s.m = problem.num_constraints();
    s.P = problem.P;
    s.P.makeCompressed();
    s.A = problem.A;
    s.A.makeCompressed();
    s.At = s.A.transpose();
    s.q = problem.q;
    s.l = problem.l;
    s.u = problem.u;
    s.constant = problem.constant;
    s.setup_structure();
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

int Solver::analyses() const { return impl_->analysis_count; }

void Solver::update(const Eigen::VectorXd& q, const Eigen::VectorXd& l, const Eigen::VectorXd& u,
                    double constant) {
    auto& s = *impl_;
    Problem check;
    check.P = SpMat(s.n, s.n);
    check.A = SpMat(s.m, s.n);
    check.q = q;
    check.l = l;
    check.u = u;
    check.validate();
    s.q = q;
    s.l = l;
    s.u = u;
    s.constant = constant;
}

Result Solver::solve() { return impl_->run(); }

Result solve(const Problem& problem, const Settings& settings) { return Solver(problem, settings).solve(); }

}  // namespace dlrsim::qp
