#include "qhtsep/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "qhtsep/kernels.hpp"

namespace qhtsep::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// 200 fixed iterations shrink the bracket by ~1e-25 relative; the dual is
// convex but only piecewise smooth (eigenvalue crossings), so a
// derivative-free search is the right tool.
constexpr int kGoldenIters = 200;
constexpr double kInvPhi = 0.6180339887498948482;
constexpr double kInvPhi2 = 0.3819660112501051518;

using Eigen::Matrix3cd;
using Eigen::Matrix4cd;
using Eigen::Vector4cd;
using Eigen::Vector4d;
using cplx = std::complex<double>;

// Orthonormal basis of the complement of psi: the in-sector partner and the
// two cross-sector basis states.
Eigen::Matrix<cplx, 4, 3> complement_basis(const qcore::PureState2Q& psi) {
    Eigen::Matrix<double, 4, 3> v = Eigen::Matrix<double, 4, 3>::Zero();
    v.col(0) = psi.orthogonal_amplitudes();
    v(1, 1) = 1.0;
    v(2, 2) = 1.0;
    return v.cast<cplx>();
}

double top_eigenvalue(const Matrix4cd& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix4cd>(m, Eigen::EigenvaluesOnly)
        .eigenvalues()(3);
}

struct DualOutcome {
    double value = 0.0;
    double y2 = 0.0;
    long evaluations = 0;
    double compression = 0.0;  // lambda_max of Omega restricted off psi
};

DualOutcome run_dual(const Matrix4cd& omega, const qcore::PureState2Q& psi,
                     double epsilon) {
    const Vector4d pv = qcore::state_vector(psi);
    const Matrix4cd proj = (pv * pv.transpose()).cast<cplx>();
    const auto vc = complement_basis(psi);
    const Matrix3cd comp = vc.adjoint() * omega * vc;
    DualOutcome out;
    out.compression = Eigen::SelfAdjointEigenSolver<Matrix3cd>(
                          comp, Eigen::EigenvaluesOnly)
                          .eigenvalues()(2);
    out.evaluations = 1;
    if (epsilon == 1.0) {
        // The shifted top eigenvalue decreases monotonically to the
        // compression value; with no linear term that limit is the infimum.
        out.value = out.compression;
        out.y2 = kInf;
        return out;
    }
    auto g = [&](double y2) {
        ++out.evaluations;
        return top_eigenvalue(omega - y2 * proj) + (1.0 - epsilon) * y2;
    };
    const double g0 = g(0.0);
    double lo = 0.0;
    double hi = std::max(0.0, (g0 - out.compression) / (1.0 - epsilon));
    double c = lo + kInvPhi2 * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = g(c);
    double fd = g(d);
    for (int it = 0; it < kGoldenIters; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = lo + kInvPhi2 * (hi - lo);
            fc = g(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = g(d);
        }
    }
    const double ym = 0.5 * (lo + hi);
    const double fm = g(ym);
    if (fm <= g0) {
        out.value = fm;
        out.y2 = ym;
    } else {
        out.value = g0;
        out.y2 = 0.0;
    }
    return out;
}

// Complementarity-style witness: project psi onto the top eigenspace of the
// shifted operator; mixing the normalized projection u with an in-space
// direction orthogonal to it tunes the fidelity to any level up to |u|^2, so
// the constraint can be saturated exactly whenever the eigenspace allows it.
// Every candidate is verified before being returned.
std::optional<qcore::DensityMatrix> build_witness(const Matrix4cd& omega,
                                                 const qcore::PureState2Q& psi,
                                                 double epsilon,
                                                 const DualOutcome& dual) {
    const Vector4d pv = qcore::state_vector(psi);
    const Vector4cd pvc = pv.cast<cplx>();
    const double cap = 1.0 - epsilon;

    Matrix4cd sigma;
    if (epsilon == 1.0) {
        const auto vc = complement_basis(psi);
        const Matrix3cd comp = vc.adjoint() * omega * vc;
        Eigen::SelfAdjointEigenSolver<Matrix3cd> ces(comp);
        const Vector4cd w = vc * ces.eigenvectors().col(2);
        sigma = w * w.adjoint();
    } else {
        const Matrix4cd proj = (pv * pv.transpose()).cast<cplx>();
        Eigen::SelfAdjointEigenSolver<Matrix4cd> es(omega - dual.y2 * proj);
        const auto& lam = es.eigenvalues();
        const auto& vec = es.eigenvectors();
        const double top = lam(3);
        const double tol = 1e-9 * std::max(1.0, std::abs(top));
        Vector4cd p = Vector4cd::Zero();
        std::vector<int> space;
        for (int i = 0; i < 4; ++i)
            if (lam(i) >= top - tol) {
                space.push_back(i);
                p += vec.col(i) * vec.col(i).dot(pvc);
            }
        const double fu = p.squaredNorm();
        if (fu <= cap + 1e-12) {
            // The fidelity constraint stays slack on the whole eigenspace.
            const Vector4cd u = fu < 1e-14 ? Vector4cd(vec.col(3)) : (p / p.norm()).eval();
            sigma = u * u.adjoint();
        } else {
            const Vector4cd u = p / p.norm();
            Vector4cd w = Vector4cd::Zero();
            bool have_w = false;
            for (int i : space) {
                const Vector4cd r = vec.col(i) - u * u.dot(vec.col(i));
                if (r.norm() > 1e-8) {
                    w = r / r.norm();
                    have_w = true;
                    break;
                }
            }
            if (!have_w) {
                sigma = u * u.adjoint();  // lone tight direction, rarely valid
            } else {
                const double alpha = cap / fu;
                sigma = alpha * (u * u.adjoint()) + (1.0 - alpha) * (w * w.adjoint());
            }
        }
    }

    const double fid = (pvc.adjoint() * sigma * pvc)(0).real();
    const double attained = (omega * sigma).trace().real();
    if (fid > cap + 1e-9 || attained < dual.value - 1e-6) return std::nullopt;
    try {
        return qcore::DensityMatrix(sigma, 1e-8);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("oracle: epsilon must lie in (0, 1]");
}

}  // namespace

OracleReport inner_max(const qcore::Effect& omega, const qcore::PureState2Q& psi,
                       double epsilon) {
    require_epsilon(epsilon);
    const Matrix4cd m = omega.matrix();
    const DualOutcome dual = run_dual(m, psi, epsilon);
    OracleReport rep;
    rep.value = std::max(0.0, dual.value);
    rep.method = OracleMethod::Dual1D;
    rep.evaluations = dual.evaluations;
    rep.witness_sigma = build_witness(m, psi, epsilon, dual);
    return rep;
}

OracleReport grid_p10(const model::Scenario& sc, int grid_n) {
    if (grid_n < 50)
        throw std::invalid_argument("grid_p10: grid_n must be at least 50");
    const kernels::ScenarioParams kp(sc.theta, sc.delta, sc.epsilon);
    const double d = sc.delta;
    auto z_lo_at = [d](double x) {
        if (d > 0.0) return x * x / (2.0 * d) - 0.5 * d;
        return x == 0.0 ? 0.0 : kInf;
    };
    auto z_hi_at = [d](double x) {
        if (d < 1.0) return 0.5 * (1.0 - d) - x * x / (2.0 * (1.0 - d));
        return x == 0.0 ? 0.0 : -kInf;
    };
    const double xr = std::sqrt(d * (1.0 - d));

    struct Best {
        double value = kInf, z = 0.0, x = 0.0;
    };
    auto consider = [](Best& best, double v, double z, double x) {
        if (v > best.value) return;
        if (v == best.value) {
            if (z > best.z) return;
            if (z == best.z) {
                const double ax = std::abs(x);
                const double ab = std::abs(best.x);
                if (ax > ab || (ax == ab && x >= best.x)) return;
            }
        }
        best = {v, z, x};
    };

    long evals = 0;
    const int m = grid_n + 1;
    std::vector<double> ts(m), zs(m), xs(m), ws(m), vals(m);
    auto scan_column = [&](Best& best, double xv, double zl, double zh, int mm) {
        if (!(zl <= zh)) return;
        for (int i = 0; i < mm; ++i)
            zs[i] = i == mm - 1 ? zh : zl + (zh - zl) * i / (mm - 1);
        if (mm >= 4 && zh - zl > 4e-12) {  // parabola-edge guard samples
            zs[1] = zl + 1e-12;
            zs[mm - 2] = zh - 1e-12;
        }
        for (int i = 0; i < mm; ++i) {
            ts[i] = 1.0 - d - zs[i];
            xs[i] = xv;
            ws[i] = std::abs(xv * kp.cos2t + zs[i] * kp.sin2t);
        }
        kernels::dual1d_batch(kp, ts.data(), zs.data(), xs.data(), ws.data(),
                              vals.data(), mm);
        evals += mm;
        for (int i = 0; i < mm; ++i)
            if (vals[i] < kInf) consider(best, vals[i], zs[i], xv);
    };

    Best best;
    if (xr > 0.0) {
        for (int j = 0; j < m; ++j) {
            const double xv = xr * (2.0 * j / grid_n - 1.0);
            scan_column(best, xv, z_lo_at(xv), z_hi_at(xv), m);
        }
    }
    // An odd grid_n misses x = 0, yet that line holds the commuting optimum;
    // scan it explicitly (for even grid_n this only repeats one column).
    scan_column(best, 0.0, z_lo_at(0.0), z_hi_at(0.0), m);

    double hz = 4.0 * 0.5 / grid_n;
    double hx = 2.0 * hz;
    for (int round = 0; round < 12; ++round) {
        const double zc = best.z;
        const double xc = best.x;
        for (int j = 0; j <= 40; ++j) {
            const double xv = xc + static_cast<double>(j - 20) * hx / 20.0;
            scan_column(best, xv, std::max(z_lo_at(xv), zc - hz),
                        std::min(z_hi_at(xv), zc + hz), 41);
        }
        hz *= 0.2;
        hx *= 0.2;
    }

    OracleReport rep;
    rep.value = std::max(0.0, best.value);
    rep.method = OracleMethod::GridPolish;
    rep.evaluations = evals;
    const qcore::PureState2Q psi(sc.theta);
    const qcore::SymmetrizedStrategy s{
        1.0 - d - best.z, best.z, best.x,
        std::abs(best.x * kp.cos2t + best.z * kp.sin2t)};
    try {
        const qcore::Effect eff = qcore::embed(s, psi, 1e-8);
        rep.witness_sigma = inner_max(eff, psi, sc.epsilon).witness_sigma;
    } catch (const std::exception&) {
        // Boundary roundoff can push the winning cell outside the embedding
        // tolerance; the value stands, only the witness is dropped.
    }
    return rep;
}

CertificationReport certify_strategy(const qcore::HermitianOperator& omega,
                                     const model::Scenario& sc) {
    CertificationReport rep;
    char buf[160];
    if (omega.dim() != 4) {
        std::snprintf(buf, sizeof buf, "dimension: expected 4, got %d",
                      omega.dim());
        rep.violations.emplace_back(buf);
        return rep;
    }
    const double tol = 1e-8;
    const qcore::PureState2Q psi(sc.theta);
    const Vector4d pv = qcore::state_vector(psi);
    const Matrix4cd m = omega.matrix();
    const double fid = (pv.transpose() * m.real() * pv)(0);

    const double lmin = omega.min_eigenvalue();
    if (lmin < -tol) {
        std::snprintf(buf, sizeof buf,
                      "not positive semidefinite: min eigenvalue %.3e", lmin);
        rep.violations.emplace_back(buf);
    }
    const double lmax = omega.max_eigenvalue();
    if (lmax > 1.0 + tol) {
        std::snprintf(buf, sizeof buf,
                      "exceeds the identity: max eigenvalue %.3e", lmax);
        rep.violations.emplace_back(buf);
    }
    const double pt_min = qcore::partial_transpose(omega).min_eigenvalue();
    if (pt_min < -tol) {
        std::snprintf(
            buf, sizeof buf,
            "partial transpose not positive semidefinite: min eigenvalue %.3e",
            pt_min);
        rep.violations.emplace_back(buf);
    }
    if (fid < 1.0 - sc.delta - tol) {
        std::snprintf(buf, sizeof buf,
                      "state fidelity %.9f below the floor 1 - delta = %.9f",
                      fid, 1.0 - sc.delta);
        rep.violations.emplace_back(buf);
    }
    rep.feasible = rep.violations.empty();
    rep.p01_worst = std::clamp(1.0 - fid, 0.0, 1.0);
    rep.p10_worst = std::max(0.0, run_dual(m, psi, sc.epsilon).value);
    return rep;
}

}  // namespace qhtsep::oracle
