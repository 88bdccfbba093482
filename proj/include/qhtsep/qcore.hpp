#pragma once

// Two-qubit states, effects, and the symmetry reduction used throughout.
//
// Basis ordering is |00>, |01>, |10>, |11> everywhere.  The target state is
// |psi> = cos(theta)|00> + sin(theta)|11| with theta in [0, pi/4]; its
// orthogonal partner inside the {|00>,|11>} sector is
// |psi_perp> = -sin(theta)|00> + cos(theta)|11>.

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace qhtsep::qcore {

class PureState2Q {
public:
    // theta in [0, pi/4]; throws std::invalid_argument outside that range.
    explicit PureState2Q(double theta);

    double theta() const { return theta_; }

    // Amplitudes (cos t, 0, 0, sin t); real by construction.
    Eigen::Vector4d amplitudes() const;

    // Amplitudes of the in-sector orthogonal state (-sin t, 0, 0, cos t).
    Eigen::Vector4d orthogonal_amplitudes() const;

private:
    double theta_;
};

// Dense Hermitian operator with construction-time validation.
class HermitianOperator {
public:
    // Throws std::invalid_argument unless m is square and Hermitian to
    // within hermiticity_tol (max entrywise deviation from m.adjoint()).
    explicit HermitianOperator(Eigen::MatrixXcd m, double hermiticity_tol = 1e-12);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }

    // Ascending eigenvalues (real; the operator is Hermitian).
    Eigen::VectorXd eigenvalues() const;

    double min_eigenvalue() const;
    double max_eigenvalue() const;

private:
    Eigen::MatrixXcd mat_;
};

// PSD, unit trace.
class DensityMatrix : public HermitianOperator {
public:
    explicit DensityMatrix(Eigen::MatrixXcd m, double tol = 1e-10);
};

// 0 <= Omega <= 1 (eigenvalues within [-tol, 1+tol]).
class Effect : public HermitianOperator {
public:
    explicit Effect(Eigen::MatrixXcd m, double tol = 1e-10);
};

// Twirl-invariant effect in the (psi, psi_perp, |01>, |10>) frame:
//
//     Omega = (t+z) |psi><psi| + (t-z) |pp><pp| + x (|psi><pp| + |pp><psi|)
//             + omega (|01><01| + |10><10|)
//
// Validity: the 2x2 sector block [[t+z, x], [x, t-z]] must sit between 0 and
// the identity, and omega must lie in [0, 1].
struct SymmetrizedStrategy {
    double t = 0.0;
    double z = 0.0;
    double x = 0.0;
    double omega = 0.0;

    bool is_valid(double tol = 1e-10) const;
};

Eigen::Vector4d state_vector(const PureState2Q& psi);

// (p01, p10) = (Tr((1-Omega) rho0), Tr(Omega rho1)), clamped to [0,1] after a
// tolerance check.  Throws std::invalid_argument on dimension mismatch.
std::pair<double, double> error_probabilities(const Effect& omega,
                                              const DensityMatrix& rho0,
                                              const DensityMatrix& rho1);

// Partial transpose on the second qubit (4x4 operators only).
HermitianOperator partial_transpose(const HermitianOperator& h);

bool is_ppt(const HermitianOperator& h, double tol = 1e-10);

// Project an effect onto the twirl-invariant family: phase twirl
// (diag(1, e^{-i phi}, e^{i phi}, 1) conjugation averaged over phi, which
// zeroes every matrix element between the {|00>,|11>}, {|01>}, {|10>}
// sectors), then the swap average, then the entrywise real part.
SymmetrizedStrategy symmetrize(const Effect& omega, const PureState2Q& psi);

// Inverse of symmetrize on its image; throws std::domain_error when the
// sector block falls outside [0,1] by more than tol.
Effect embed(const SymmetrizedStrategy& s, const PureState2Q& psi, double tol = 1e-10);

}  // namespace qhtsep::qcore
