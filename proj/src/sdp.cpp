#include "qhtsep/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace qhtsep::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

double frobenius_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.cwiseProduct(b).sum();
}

// Largest alpha with M + alpha*dM still PSD, for M strictly PD.
double step_to_boundary(const Eigen::MatrixXd& m, const Eigen::MatrixXd& dm) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd& l = llt.matrixL();
    Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(dm);
    w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(w),
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

struct PhaseResult {
    SdpSolution sol;
    bool early_stop = false;
};

// Predictor-corrector path following from a strictly feasible x0.  When
// early_stop is set, the iteration returns as soon as it approves an iterate
// (used by phase 1 to bail out once a strictly feasible point of the original
// problem appears).
PhaseResult path_follow(const SdpProblem& p, const Eigen::VectorXd& x0,
                        const SdpSettings& st,
                        const std::function<bool(const Eigen::VectorXd&)>& early_stop) {
    const int m = p.num_vars();
    const int nb = static_cast<int>(p.blocks.size());
    int ntot = 0;
    for (const auto& b : p.blocks) ntot += static_cast<int>(b.constant.rows());

    const double cnorm = p.objective.cwiseAbs().maxCoeff();

    Eigen::VectorXd x = x0;
    std::vector<Eigen::MatrixXd> z(nb);
    for (int b = 0; b < nb; ++b)
        z[b] = Eigen::MatrixXd::Identity(p.blocks[b].constant.rows(),
                                         p.blocks[b].constant.cols());

    PhaseResult res;
    res.sol.x = x;
    Eigen::VectorXd last_dx = Eigen::VectorXd::Zero(m);
    int diverge_strikes = 0;

    std::vector<Eigen::MatrixXd> s(nb), sinv(nb);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt(nb);

    auto finalize = [&](SdpStatus status, double pv, double dv, int iter) {
        res.sol.status = status;
        res.sol.x = x;
        res.sol.primal_value = pv;
        res.sol.dual_value = dv;
        res.sol.gap = pv - dv;
        res.sol.iterations = iter;
        res.sol.dual_blocks = z;
    };

    for (int iter = 0; iter <= st.max_iter; ++iter) {
        bool pd = true;
        for (int b = 0; b < nb; ++b) {
            s[b] = p.blocks[b].constant;
            for (int i = 0; i < m; ++i) s[b] += x[i] * p.blocks[b].coeff[i];
            llt[b].compute(s[b]);
            if (llt[b].info() != Eigen::Success) pd = false;
        }
        if (!pd) {
            // Interior lost to rounding; report the best point reached.
            finalize(SdpStatus::MaxIterations, p.objective.dot(x), res.sol.dual_value,
                     iter);
            return res;
        }
        for (int b = 0; b < nb; ++b) {
            const auto n = s[b].rows();
            sinv[b] = symmetrized(llt[b].solve(Eigen::MatrixXd::Identity(n, n)));
        }

        const double pv = p.objective.dot(x);
        double dv = 0.0, comp = 0.0;
        for (int b = 0; b < nb; ++b) {
            dv -= frobenius_inner(p.blocks[b].constant, z[b]);
            comp += frobenius_inner(s[b], z[b]);
        }
        res.sol.trace.emplace_back(pv, dv);

        if (early_stop && early_stop(x)) {
            finalize(SdpStatus::MaxIterations, pv, dv, iter);
            res.early_stop = true;
            return res;
        }

        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            double dot = 0.0;
            for (int b = 0; b < nb; ++b)
                dot += frobenius_inner(p.blocks[b].coeff[i], z[b]);
            r[i] = p.objective[i] - dot;
        }
        const double rscaled =
            r.cwiseAbs().maxCoeff() * (1.0 + x.cwiseAbs().maxCoeff());

        if (comp <= 0.5 * st.tol && rscaled <= 0.5 * st.tol) {
            finalize(SdpStatus::Optimal, pv, dv, iter);
            return res;
        }

        if (pv < -1e8 * (1.0 + cnorm) || x.cwiseAbs().maxCoeff() > 1e10) {
            // Objective diverged: try to certify an improving ray.
            const double dnorm = last_dx.cwiseAbs().maxCoeff();
            if (dnorm > 0.0) {
                const Eigen::VectorXd d = last_dx / dnorm;
                bool ray = p.objective.dot(d) < -1e-9;
                for (int b = 0; b < nb && ray; ++b) {
                    Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(
                        p.blocks[b].constant.rows(), p.blocks[b].constant.cols());
                    for (int i = 0; i < m; ++i) dir += d[i] * p.blocks[b].coeff[i];
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                        dir, Eigen::EigenvaluesOnly);
                    if (es.eigenvalues().minCoeff() < -1e-9) ray = false;
                }
                if (ray) {
                    finalize(SdpStatus::Unbounded, pv, dv, iter);
                    return res;
                }
            }
            if (++diverge_strikes >= 5) {
                finalize(SdpStatus::MaxIterations, pv, dv, iter);
                return res;
            }
        }

        if (iter == st.max_iter) break;

        const double mu = comp / ntot;

        // Schur matrix B_ij = sum_b tr(F_i S^-1 F_j Z).
        std::vector<std::vector<Eigen::MatrixXd>> g(nb), h(nb);
        Eigen::VectorXd tr_sinv_f(m);
        tr_sinv_f.setZero();
        for (int b = 0; b < nb; ++b) {
            g[b].resize(m);
            h[b].resize(m);
            for (int i = 0; i < m; ++i) {
                g[b][i] = sinv[b] * p.blocks[b].coeff[i];
                h[b][i] = p.blocks[b].coeff[i] * z[b];
                tr_sinv_f[i] += frobenius_inner(sinv[b], p.blocks[b].coeff[i]);
            }
        }
        Eigen::MatrixXd schur(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                // tr(F_i S^-1 F_j Z) = tr((S^-1 F_i)^T (F_j Z)).
                double v = 0.0;
                for (int b = 0; b < nb; ++b)
                    v += g[b][i].cwiseProduct(h[b][j]).sum();
                schur(i, j) = v;
            }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(schur);
        if (lu.rank() < m) {
            // Coincident variable directions (e.g. the phase-1 slack against a
            // lone identity coefficient) make the Schur matrix singular; a tiny
            // ridge keeps the solve meaningful without disturbing regular steps.
            schur.diagonal().array() += 1e-12 * (1.0 + schur.cwiseAbs().maxCoeff());
            lu.compute(schur);
        }

        // Predictor (affine scaling) direction.
        const Eigen::VectorXd dx_aff = lu.solve(-p.objective);
        std::vector<Eigen::MatrixXd> ds_aff(nb), dz_aff(nb);
        for (int b = 0; b < nb; ++b) {
            ds_aff[b] = Eigen::MatrixXd::Zero(s[b].rows(), s[b].cols());
            for (int i = 0; i < m; ++i) ds_aff[b] += dx_aff[i] * p.blocks[b].coeff[i];
            dz_aff[b] = symmetrized(-z[b] - sinv[b] * ds_aff[b] * z[b]);
        }
        double a_aff = 1.0;
        for (int b = 0; b < nb; ++b) {
            a_aff = std::min(a_aff, step_to_boundary(s[b], ds_aff[b]));
            a_aff = std::min(a_aff, step_to_boundary(z[b], dz_aff[b]));
        }
        const double ap_aff = a_aff, ad_aff = a_aff;
        double mu_aff = 0.0;
        for (int b = 0; b < nb; ++b)
            mu_aff += frobenius_inner(s[b] + ap_aff * ds_aff[b],
                                      z[b] + ad_aff * dz_aff[b]);
        mu_aff = std::max(mu_aff / ntot, 0.0);
        const double ratio = mu_aff / std::max(mu, 1e-300);
        const double sigma = std::clamp(ratio * ratio * ratio, 0.0, 1.0);

        // Corrector.
        std::vector<Eigen::MatrixXd> cross(nb);  // S^-1 dS_aff dZ_aff
        Eigen::VectorXd rhs(m);
        for (int b = 0; b < nb; ++b) cross[b] = sinv[b] * ds_aff[b] * dz_aff[b];
        for (int i = 0; i < m; ++i) {
            double corr = 0.0;
            for (int b = 0; b < nb; ++b)
                corr += p.blocks[b].coeff[i].cwiseProduct(cross[b].transpose()).sum();
            rhs[i] = sigma * mu * tr_sinv_f[i] - p.objective[i] - corr;
        }
        const Eigen::VectorXd dx = lu.solve(rhs);
        std::vector<Eigen::MatrixXd> ds(nb), dz(nb);
        for (int b = 0; b < nb; ++b) {
            ds[b] = Eigen::MatrixXd::Zero(s[b].rows(), s[b].cols());
            for (int i = 0; i < m; ++i) ds[b] += dx[i] * p.blocks[b].coeff[i];
            dz[b] = symmetrized(sigma * mu * sinv[b] - z[b] - cross[b] -
                                sinv[b] * ds[b] * z[b]);
        }
        // A single shared step length keeps the primal from racing to the
        // boundary while the dual iterate is still infeasible (separate steps
        // let S go singular early, after which dual directions blow up).
        double alpha = 1.0;
        for (int b = 0; b < nb; ++b) {
            alpha = std::min(alpha, st.step_fraction * step_to_boundary(s[b], ds[b]));
            alpha = std::min(alpha, st.step_fraction * step_to_boundary(z[b], dz[b]));
        }

        // Keep single steps at a sane scale even for degenerate directions.
        const double dxn = dx.cwiseAbs().maxCoeff();
        if (dxn > 0.0)
            alpha = std::min(alpha, 1e4 * (1.0 + x.cwiseAbs().maxCoeff()) / dxn);
        double zn = 0.0, dzn = 0.0;
        for (int b = 0; b < nb; ++b) {
            zn = std::max(zn, z[b].cwiseAbs().maxCoeff());
            dzn = std::max(dzn, dz[b].cwiseAbs().maxCoeff());
        }
        if (dzn > 0.0) alpha = std::min(alpha, 1e4 * (1.0 + zn) / dzn);
        double ap = alpha, ad = alpha;

        // Guard against rounding pushing an iterate out of the cone.
        for (int attempt = 0; attempt < 60; ++attempt) {
            bool ok = true;
            for (int b = 0; b < nb && ok; ++b) {
                Eigen::MatrixXd sn = s[b] + ap * ds[b];
                if (Eigen::LLT<Eigen::MatrixXd>(sn).info() != Eigen::Success)
                    ok = false;
                Eigen::MatrixXd zn = z[b] + ad * dz[b];
                if (Eigen::LLT<Eigen::MatrixXd>(zn).info() != Eigen::Success)
                    ok = false;
            }
            if (ok) break;
            ap *= 0.5;
            ad *= 0.5;
        }

        x += ap * dx;
        for (int b = 0; b < nb; ++b) z[b] = symmetrized(z[b] + ad * dz[b]);
        last_dx = dx;
    }

    double pv = p.objective.dot(x);
    double dv = 0.0;
    for (int b = 0; b < nb; ++b) dv -= frobenius_inner(p.blocks[b].constant, z[b]);
    finalize(SdpStatus::MaxIterations, pv, dv, st.max_iter);
    return res;
}

}  // namespace

void SdpProblem::validate() const {
    const int m = num_vars();
    if (m <= 0) throw std::invalid_argument("SdpProblem: no variables");
    if (blocks.empty()) throw std::invalid_argument("SdpProblem: no constraint blocks");
    for (const auto& b : blocks) {
        const auto n = b.constant.rows();
        if (n == 0 || b.constant.cols() != n)
            throw std::invalid_argument("SdpProblem: constant term must be square");
        if (n > 8)
            throw std::invalid_argument("SdpProblem: block size exceeds 8");
        if (static_cast<int>(b.coeff.size()) != m)
            throw std::invalid_argument("SdpProblem: one coefficient per variable required");
        auto check_sym = [](const Eigen::MatrixXd& f) {
            return (f - f.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
        };
        if (!check_sym(b.constant))
            throw std::invalid_argument("SdpProblem: constant term not symmetric");
        for (const auto& f : b.coeff) {
            if (f.rows() != n || f.cols() != n)
                throw std::invalid_argument("SdpProblem: coefficient shape mismatch");
            if (!check_sym(f))
                throw std::invalid_argument("SdpProblem: coefficient not symmetric");
        }
    }
}

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::MaxIterations: return "max-iterations";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

std::vector<Eigen::MatrixXd> assemble_blocks(const SdpProblem& problem,
                                             const Eigen::VectorXd& x) {
    if (x.size() != problem.num_vars())
        throw std::invalid_argument("assemble_blocks: wrong variable count");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(problem.blocks.size());
    for (const auto& b : problem.blocks) {
        Eigen::MatrixXd s = b.constant;
        for (int i = 0; i < problem.num_vars(); ++i) s += x[i] * b.coeff[i];
        out.push_back(std::move(s));
    }
    return out;
}

double min_block_eigenvalue(const SdpProblem& problem, const Eigen::VectorXd& x) {
    double lmin = kInf;
    for (const auto& s : assemble_blocks(problem, x)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, es.eigenvalues().minCoeff());
    }
    return lmin;
}

SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings) {
    problem.validate();
    const int m = problem.num_vars();

    double scale = 1.0;
    for (const auto& b : problem.blocks)
        scale = std::max(scale, b.constant.cwiseAbs().maxCoeff());
    const double margin = 1e-8 * scale;

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m);
    if (min_block_eigenvalue(problem, x0) <= margin) {
        // Phase 1: minimize s subject to S(x) + s I >= 0.
        SdpProblem aug;
        aug.objective = Eigen::VectorXd::Zero(m + 1);
        aug.objective[m] = 1.0;
        double smin = 0.0;
        for (const auto& b : problem.blocks) {
            LmiBlock ab;
            ab.constant = b.constant;
            ab.coeff = b.coeff;
            ab.coeff.push_back(
                Eigen::MatrixXd::Identity(b.constant.rows(), b.constant.cols()));
            aug.blocks.push_back(std::move(ab));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.constant,
                                                              Eigen::EigenvaluesOnly);
            smin = std::max(smin, -es.eigenvalues().minCoeff());
        }
        // Box constraints regularize the phase: they give the Schur matrix a
        // positive diagonal even when the slack direction is collinear with a
        // variable's coefficients, bound the phase-1 objective, and restrict
        // the interior search to |x_i| <= 1e6 (ample for the scales here).
        auto unit_box = [m](int var, double sign, double radius) {
            LmiBlock blk;
            blk.constant = Eigen::MatrixXd::Constant(1, 1, radius);
            for (int i = 0; i <= m; ++i)
                blk.coeff.push_back(
                    Eigen::MatrixXd::Constant(1, 1, i == var ? sign : 0.0));
            return blk;
        };
        for (int i = 0; i < m; ++i) {
            aug.blocks.push_back(unit_box(i, -1.0, 1e6));
            aug.blocks.push_back(unit_box(i, +1.0, 1e6));
        }
        aug.blocks.push_back(unit_box(m, +1.0, 1.0));  // s >= -1

        Eigen::VectorXd xa = Eigen::VectorXd::Zero(m + 1);
        xa[m] = smin + 1.0;

        SdpSettings ph1 = settings;
        auto strict = [&](const Eigen::VectorXd& xcur) {
            return min_block_eigenvalue(problem, xcur.head(m)) > margin;
        };
        PhaseResult r1 = path_follow(aug, xa, ph1, strict);
        if (r1.early_stop) {
            x0 = r1.sol.x.head(m);
        } else {
            SdpSolution out;
            out.x = r1.sol.x.head(m);
            out.iterations = r1.sol.iterations;
            out.primal_value = problem.objective.dot(out.x);
            out.dual_value = out.primal_value;
            out.gap = 0.0;
            const double s_star = r1.sol.x[m];
            out.status = (r1.sol.status == SdpStatus::Optimal && s_star > 10.0 * settings.tol)
                             ? SdpStatus::Infeasible
                             : SdpStatus::MaxIterations;
            return out;
        }
    }

    PhaseResult r2 = path_follow(problem, x0, settings, nullptr);
    return r2.sol;
}

bool check_kkt(const SdpProblem& problem, const SdpSolution& sol, double tol) {
    problem.validate();
    const int m = problem.num_vars();
    if (sol.x.size() != m || sol.dual_blocks.size() != problem.blocks.size())
        throw std::invalid_argument("check_kkt: solution shape mismatch");

    const std::vector<Eigen::MatrixXd> s = assemble_blocks(problem, sol.x);
    int ntot = 0;
    double comp = 0.0;
    for (std::size_t b = 0; b < s.size(); ++b) {
        const auto& zb = sol.dual_blocks[b];
        if (zb.rows() != s[b].rows() || zb.cols() != s[b].cols())
            throw std::invalid_argument("check_kkt: dual block shape mismatch");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(s[b], Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_z(zb, Eigen::EigenvaluesOnly);
        if (es_s.eigenvalues().minCoeff() < -tol) return false;
        if (es_z.eigenvalues().minCoeff() < -tol) return false;
        comp += std::abs(frobenius_inner(s[b], zb));
        ntot += static_cast<int>(s[b].rows());
    }
    for (int i = 0; i < m; ++i) {
        double dot = 0.0;
        for (std::size_t b = 0; b < s.size(); ++b)
            dot += frobenius_inner(problem.blocks[b].coeff[i], sol.dual_blocks[b]);
        if (std::abs(dot - problem.objective[i]) > tol) return false;
    }
    return comp <= tol * ntot;
}

}  // namespace qhtsep::sdp
