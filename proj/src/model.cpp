#include "qhtsep/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qhtsep::model {

namespace {

using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector4d;

// Symmetric basis of 4x4 matrices matching the upper-triangle variable order
// w00, w01, w02, w03, w11, w12, w13, w22, w23, w33.
std::vector<Matrix4d> sym_basis4() {
    std::vector<Matrix4d> b;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            Matrix4d m = Matrix4d::Zero();
            m(i, j) = m(j, i) = 1.0;
            b.push_back(m);
        }
    return b;
}

std::vector<Eigen::Matrix3d> sym_basis3() {
    std::vector<Eigen::Matrix3d> b;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
            m(i, j) = m(j, i) = 1.0;
            b.push_back(m);
        }
    return b;
}

Matrix4d pt4(const Matrix4d& m) {
    Matrix4d out;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2)
                    out(2 * i1 + j2, 2 * j1 + i2) = m(2 * i1 + i2, 2 * j1 + j2);
    return out;
}

MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Orthonormal basis of the complement of |psi>: columns psi_perp, |01>, |10>.
Eigen::Matrix<double, 4, 3> complement_basis(const qcore::PureState2Q& psi) {
    Eigen::Matrix<double, 4, 3> v = Eigen::Matrix<double, 4, 3>::Zero();
    v.col(0) = psi.orthogonal_amplitudes();
    v(1, 1) = 1.0;
    v(2, 2) = 1.0;
    return v;
}

// delta = 0 forces Omega psi = psi; parametrize Omega = psi psi^T + V Q V^T
// with V spanning the orthogonal complement so the remaining problem keeps a
// strict interior.
sdp::SdpProblem build_full_pinned(const Scenario& sc) {
    const qcore::PureState2Q psi(sc.theta);
    const Vector4d p = psi.amplitudes();
    const Eigen::Matrix<double, 4, 3> v = complement_basis(psi);
    const bool e1 = (sc.epsilon == 1.0);

    const auto basis = sym_basis3();
    const int m = e1 ? 7 : 8;  // 6 entries of Q, y1, and y2 unless epsilon = 1
    sdp::SdpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(m);
    prob.objective[6] = 1.0;
    if (!e1) prob.objective[7] = 1.0 - sc.epsilon;

    auto zero_coeffs = [m](Eigen::Index n) {
        return std::vector<MatrixXd>(m, MatrixXd::Zero(n, n));
    };

    sdp::LmiBlock q_psd{Eigen::Matrix3d::Zero(), zero_coeffs(3)};
    sdp::LmiBlock q_below_id{Eigen::Matrix3d::Identity(), zero_coeffs(3)};
    sdp::LmiBlock ppt{pt4(p * p.transpose()), zero_coeffs(4)};
    sdp::LmiBlock dual_perp{Eigen::Matrix3d::Zero(), zero_coeffs(3)};
    for (int k = 0; k < 6; ++k) {
        q_psd.coeff[k] = basis[k];
        q_below_id.coeff[k] = -basis[k];
        ppt.coeff[k] = pt4(v * basis[k] * v.transpose());
        dual_perp.coeff[k] = -basis[k];
    }
    dual_perp.coeff[6] = Eigen::Matrix3d::Identity();  // y1 I - Q >= 0

    prob.blocks = {q_psd, q_below_id, ppt, dual_perp};
    if (!e1) {
        sdp::LmiBlock dual_psi{scalar(-1.0), zero_coeffs(1)};  // y1 + y2 >= 1
        dual_psi.coeff[6] = scalar(1.0);
        dual_psi.coeff[7] = scalar(1.0);
        sdp::LmiBlock y2_pos{scalar(0.0), zero_coeffs(1)};
        y2_pos.coeff[7] = scalar(1.0);
        prob.blocks.push_back(dual_psi);
        prob.blocks.push_back(y2_pos);
    }
    return prob;
}

}  // namespace

Scenario::Scenario(double theta_, double delta_, double epsilon_)
    : theta(theta_), delta(delta_), epsilon(epsilon_) {
    (void)qcore::PureState2Q(theta);  // validates the angle range
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("Scenario: delta must lie in [0, 1]");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("Scenario: epsilon must lie in (0, 1]");
}

sdp::SdpProblem build_full_sdp(const Scenario& sc) {
    if (sc.delta == 0.0) return build_full_pinned(sc);

    const qcore::PureState2Q psi(sc.theta);
    const Vector4d p = psi.amplitudes();
    const auto basis = sym_basis4();
    // At epsilon = 1 the inner dual reduces to y1 >= lambda_max of Omega
    // compressed onto the complement of psi; the joint problem with y2 kept
    // would attain its value only as y2 -> infinity, so build the compressed
    // form instead.
    const bool e1 = (sc.epsilon == 1.0);

    const int m = e1 ? 11 : 12;  // 10 entries of Omega, y1, optionally y2
    sdp::SdpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(m);
    prob.objective[10] = 1.0;
    if (!e1) prob.objective[11] = 1.0 - sc.epsilon;

    auto zero_coeffs = [m](Eigen::Index n) {
        return std::vector<MatrixXd>(m, MatrixXd::Zero(n, n));
    };

    sdp::LmiBlock omega_psd{Matrix4d::Zero(), zero_coeffs(4)};
    sdp::LmiBlock omega_below_id{Matrix4d::Identity(), zero_coeffs(4)};
    sdp::LmiBlock ppt{Matrix4d::Zero(), zero_coeffs(4)};
    sdp::LmiBlock fidelity{scalar(-(1.0 - sc.delta)), zero_coeffs(1)};
    for (int k = 0; k < 10; ++k) {
        omega_psd.coeff[k] = basis[k];
        omega_below_id.coeff[k] = -basis[k];
        ppt.coeff[k] = pt4(basis[k]);
        fidelity.coeff[k] = scalar(p.dot(basis[k] * p));
    }

    sdp::LmiBlock dual;
    if (e1) {
        const Eigen::Matrix<double, 4, 3> v = complement_basis(psi);
        dual = {Eigen::Matrix3d::Zero(), zero_coeffs(3)};
        for (int k = 0; k < 10; ++k)
            dual.coeff[k] = -(v.transpose() * basis[k] * v);
        dual.coeff[10] = Eigen::Matrix3d::Identity();
    } else {
        dual = {Matrix4d::Zero(), zero_coeffs(4)};
        for (int k = 0; k < 10; ++k) dual.coeff[k] = -basis[k];
        dual.coeff[10] = Matrix4d::Identity();
        dual.coeff[11] = p * p.transpose();
    }

    prob.blocks = {omega_psd, omega_below_id, ppt, fidelity, dual};
    if (!e1) {
        sdp::LmiBlock y2_pos{scalar(0.0), zero_coeffs(1)};
        y2_pos.coeff[11] = scalar(1.0);
        prob.blocks.push_back(y2_pos);
    }
    return prob;
}

sdp::SdpProblem build_reduced_sdp(const Scenario& sc) {
    const double d = sc.delta;
    const double s2 = std::sin(2.0 * sc.theta);
    const double c2 = std::cos(2.0 * sc.theta);
    const bool pinned = (d == 0.0 || d == 1.0);  // sector block forces x = 0
    const bool e1 = (sc.epsilon == 1.0);         // compressed dual, no y2

    // Variables: z, x (unless pinned), omega, y1, y2 (unless epsilon = 1).
    const int iz = 0;
    const int ix = pinned ? -1 : 1;
    const int iw = pinned ? 1 : 2;
    const int iy1 = iw + 1;
    const int iy2 = e1 ? -1 : iy1 + 1;
    const int m = iy1 + (e1 ? 1 : 2);

    sdp::SdpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(m);
    prob.objective[iy1] = 1.0;
    if (!e1) prob.objective[iy2] = 1.0 - sc.epsilon;

    auto zero_coeffs = [m](Eigen::Index n) {
        return std::vector<MatrixXd>(m, MatrixXd::Zero(n, n));
    };
    auto one_var = [&](double constant, int var, double coeff_v) {
        sdp::LmiBlock b{scalar(constant), zero_coeffs(1)};
        b.coeff[var] = scalar(coeff_v);
        return b;
    };

    // Sector block [[1-d, x], [x, 1-d-2z]] and its complement in the
    // identity; when pinned these collapse to scalar facts.
    sdp::LmiBlock sector, co_sector;
    if (pinned) {
        sector = one_var(1.0 - d, iz, -2.0);
        co_sector = one_var(d, iz, 2.0);
    } else {
        sector = {MatrixXd::Identity(2, 2) * (1.0 - d), zero_coeffs(2)};
        sector.coeff[iz] << 0, 0, 0, -2;
        sector.coeff[ix] << 0, 1, 1, 0;
        co_sector = {MatrixXd::Identity(2, 2) * d, zero_coeffs(2)};
        co_sector.coeff[iz] << 0, 0, 0, 2;
        co_sector.coeff[ix] << 0, -1, -1, 0;
    }

    // PPT for the embedded effect reduces to omega >= |x cos2t + z sin2t|.
    sdp::LmiBlock ppt_plus = one_var(0.0, iw, 1.0);
    ppt_plus.coeff[iz] = scalar(-s2);
    sdp::LmiBlock ppt_minus = one_var(0.0, iw, 1.0);
    ppt_minus.coeff[iz] = scalar(s2);
    if (!pinned) {
        ppt_plus.coeff[ix] = scalar(-c2);
        ppt_minus.coeff[ix] = scalar(c2);
    }

    sdp::LmiBlock y1_dom = one_var(0.0, iy1, 1.0);  // y1 >= omega
    y1_dom.coeff[iw] = scalar(-1.0);

    prob.blocks = {sector,
                   co_sector,
                   one_var(0.0, iw, 1.0),
                   one_var(1.0, iw, -1.0),
                   ppt_plus,
                   ppt_minus,
                   y1_dom};

    if (e1) {
        // Compressed dual: y1 >= 1 - d - 2z (the psi_perp diagonal entry).
        sdp::LmiBlock dual_perp = one_var(-(1.0 - d), iy1, 1.0);
        dual_perp.coeff[iz] = scalar(2.0);
        prob.blocks.push_back(dual_perp);
        return prob;
    }

    if (pinned) {
        sdp::LmiBlock dual_psi = one_var(-(1.0 - d), iy1, 1.0);  // y1+y2 >= 1-d
        dual_psi.coeff[iy2] = scalar(1.0);
        sdp::LmiBlock dual_perp = one_var(-(1.0 - d), iy1, 1.0);  // y1 >= 1-d-2z
        dual_perp.coeff[iz] = scalar(2.0);
        prob.blocks.push_back(dual_psi);
        prob.blocks.push_back(dual_perp);
    } else {
        sdp::LmiBlock dual{MatrixXd::Zero(2, 2), zero_coeffs(2)};
        dual.constant << -(1.0 - d), 0, 0, -(1.0 - d);
        dual.coeff[iz] << 0, 0, 0, 2;
        dual.coeff[ix] << 0, -1, -1, 0;
        dual.coeff[iy1] = MatrixXd::Identity(2, 2);
        dual.coeff[iy2] << 1, 0, 0, 0;
        prob.blocks.push_back(dual);
    }
    prob.blocks.push_back(one_var(0.0, iy2, 1.0));
    return prob;
}

ExtractedStrategy extract_strategy(const sdp::SdpSolution& sol, Form which,
                                   const Scenario& sc) {
    if (sol.status != sdp::SdpStatus::Optimal)
        throw std::invalid_argument("extract_strategy: solution is not optimal");
    const qcore::PureState2Q psi(sc.theta);
    const Eigen::VectorXd& x = sol.x;
    const bool e1 = (sc.epsilon == 1.0);

    if (which == Form::Full) {
        const bool pinned = (sc.delta == 0.0);
        const int nw = pinned ? 6 : 10;
        const int expect = nw + (e1 ? 1 : 2);
        if (x.size() != expect)
            throw std::invalid_argument("extract_strategy: variable count mismatch");
        Matrix4d omega;
        if (pinned) {
            Eigen::Matrix3d q;
            const auto basis = sym_basis3();
            q.setZero();
            for (int k = 0; k < 6; ++k) q += x[k] * basis[k];
            const Vector4d p = psi.amplitudes();
            const Eigen::Matrix<double, 4, 3> v = complement_basis(psi);
            omega = p * p.transpose() + v * q * v.transpose();
        } else {
            const auto basis = sym_basis4();
            omega.setZero();
            for (int k = 0; k < 10; ++k) omega += x[k] * basis[k];
        }
        return {qcore::Effect(omega.cast<std::complex<double>>(), 1e-8),
                {x[nw], e1 ? 0.0 : x[nw + 1]}};
    }

    const bool pinned = (sc.delta == 0.0 || sc.delta == 1.0);
    const int expect = (pinned ? 3 : 4) + (e1 ? 0 : 1);
    if (x.size() != expect)
        throw std::invalid_argument("extract_strategy: variable count mismatch");
    const double z = x[0];
    const double xx = pinned ? 0.0 : x[1];
    const double w = pinned ? x[1] : x[2];
    const double y1 = pinned ? x[2] : x[3];
    const double y2 = e1 ? 0.0 : x[expect - 1];
    qcore::SymmetrizedStrategy st{1.0 - sc.delta - z, z, xx, w};
    return {qcore::embed(st, psi, 1e-8), {y1, y2}};
}

}  // namespace qhtsep::model
