#include "qhtsep/qcore.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qhtsep::qcore {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    return es.eigenvalues();
}

}  // namespace

PureState2Q::PureState2Q(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= kQuarterPi + 1e-12))
        throw std::invalid_argument("PureState2Q: theta must lie in [0, pi/4]");
}

Eigen::Vector4d PureState2Q::amplitudes() const {
    return {std::cos(theta_), 0.0, 0.0, std::sin(theta_)};
}

Eigen::Vector4d PureState2Q::orthogonal_amplitudes() const {
    return {-std::sin(theta_), 0.0, 0.0, std::cos(theta_)};
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd m, double hermiticity_tol)
    : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
        throw std::invalid_argument("HermitianOperator: matrix must be square");
    const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (!(dev <= hermiticity_tol))
        throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

Eigen::VectorXd HermitianOperator::eigenvalues() const {
    return hermitian_eigenvalues(mat_);
}

double HermitianOperator::min_eigenvalue() const { return eigenvalues().minCoeff(); }

double HermitianOperator::max_eigenvalue() const { return eigenvalues().maxCoeff(); }

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m, double tol) : HermitianOperator(std::move(m)) {
    const double tr = matrix().trace().real();
    if (!(std::abs(tr - 1.0) <= tol))
        throw std::invalid_argument("DensityMatrix: trace must equal 1");
    if (!(min_eigenvalue() >= -tol))
        throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
}

Effect::Effect(Eigen::MatrixXcd m, double tol) : HermitianOperator(std::move(m)) {
    const Eigen::VectorXd ev = eigenvalues();
    if (!(ev.minCoeff() >= -tol && ev.maxCoeff() <= 1.0 + tol))
        throw std::invalid_argument("Effect: eigenvalues must lie in [0, 1]");
}

bool SymmetrizedStrategy::is_valid(double tol) const {
    const double disc = std::hypot(z, x);
    const double lo = t - disc;
    const double hi = t + disc;
    return lo >= -tol && hi <= 1.0 + tol && omega >= -tol && omega <= 1.0 + tol;
}

Eigen::Vector4d state_vector(const PureState2Q& psi) { return psi.amplitudes(); }

std::pair<double, double> error_probabilities(const Effect& omega,
                                              const DensityMatrix& rho0,
                                              const DensityMatrix& rho1) {
    if (rho0.dim() != omega.dim() || rho1.dim() != omega.dim())
        throw std::invalid_argument("error_probabilities: dimension mismatch");
    const double p01 = 1.0 - (omega.matrix() * rho0.matrix()).trace().real();
    const double p10 = (omega.matrix() * rho1.matrix()).trace().real();
    constexpr double slack = 1e-9;
    if (p01 < -slack || p01 > 1.0 + slack || p10 < -slack || p10 > 1.0 + slack)
        throw std::runtime_error("error_probabilities: probability outside [0, 1]");
    auto clamp01 = [](double p) { return std::min(1.0, std::max(0.0, p)); };
    return {clamp01(p01), clamp01(p10)};
}

HermitianOperator partial_transpose(const HermitianOperator& h) {
    if (h.dim() != 4)
        throw std::invalid_argument("partial_transpose: expected a two-qubit (4x4) operator");
    const Eigen::MatrixXcd& m = h.matrix();
    Eigen::MatrixXcd out(4, 4);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2)
                    out(2 * i1 + j2, 2 * j1 + i2) = m(2 * i1 + i2, 2 * j1 + j2);
    return HermitianOperator(out);
}

bool is_ppt(const HermitianOperator& h, double tol) {
    return partial_transpose(h).min_eigenvalue() >= -tol;
}

SymmetrizedStrategy symmetrize(const Effect& omega, const PureState2Q& psi) {
    if (omega.dim() != 4)
        throw std::invalid_argument("symmetrize: expected a two-qubit (4x4) effect");
    const Eigen::MatrixXcd& m = omega.matrix();

    // Phase twirl keeps only the in-sector elements; swap averaging then ties
    // the |01> and |10> diagonal entries together and leaves the
    // {|00>,|11>} block alone.  The entrywise real part of what survives:
    const double a00 = m(0, 0).real();
    const double a11 = m(3, 3).real();
    const double a01 = m(0, 3).real();
    const double w = 0.5 * (m(1, 1).real() + m(2, 2).real());

    const double c = std::cos(psi.theta());
    const double s = std::sin(psi.theta());
    const double tpz = c * c * a00 + s * s * a11 + 2.0 * c * s * a01;
    const double tmz = s * s * a00 + c * c * a11 - 2.0 * c * s * a01;
    const double x = c * s * (a11 - a00) + (c * c - s * s) * a01;

    return {0.5 * (tpz + tmz), 0.5 * (tpz - tmz), x, w};
}

Effect embed(const SymmetrizedStrategy& s, const PureState2Q& psi, double tol) {
    if (!s.is_valid(tol))
        throw std::domain_error("embed: sector block outside [0, 1]");
    const Eigen::Vector4d p = psi.amplitudes();
    const Eigen::Vector4d q = psi.orthogonal_amplitudes();
    Eigen::Matrix4d m = (s.t + s.z) * p * p.transpose() + (s.t - s.z) * q * q.transpose() +
                        s.x * (p * q.transpose() + q * p.transpose());
    m(1, 1) += s.omega;
    m(2, 2) += s.omega;
    return Effect(m.cast<std::complex<double>>(), tol);
}

}  // namespace qhtsep::qcore
