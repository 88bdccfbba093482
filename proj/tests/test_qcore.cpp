#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qhtsep/qcore.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace qhtsep;
using std::numbers::pi;

namespace {

using cd = std::complex<double>;

Eigen::Matrix4cd random_hermitian(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = cd(n(rng), n(rng));
    return 0.5 * (g + g.adjoint().eval());
}

// Random effect with spectrum spread across [0, 1].
qcore::Effect random_effect(std::mt19937& rng) {
    Eigen::Matrix4cd h = random_hermitian(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    Eigen::Matrix4cd scaled =
        (h - lo * Eigen::Matrix4cd::Identity()) / std::max(hi - lo, 1e-12);
    return qcore::Effect(scaled);
}

// Brute-force group average: N-point phase twirl, then the swap average,
// then the entrywise real part.  Kept deliberately independent of the
// closed-form sector projection it checks.
Eigen::Matrix4cd twirl_oracle(const Eigen::Matrix4cd& m, int n_angles = 64) {
    Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < n_angles; ++k) {
        const double phi = 2.0 * pi * k / n_angles;
        Eigen::Vector4cd u;
        u << cd(1, 0), std::polar(1.0, -phi), std::polar(1.0, phi), cd(1, 0);
        acc += u.asDiagonal() * m * u.conjugate().asDiagonal();
    }
    acc /= n_angles;
    Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    acc = 0.5 * (acc + swap * acc * swap);
    return 0.5 * (acc + acc.conjugate());
}

}  // namespace

TEST_CASE("state vector amplitudes") {
    const qcore::PureState2Q psi(pi / 8);
    const Eigen::Vector4d v = qcore::state_vector(psi);
    CHECK(v(0) == doctest::Approx(0.9238795325112867).epsilon(1e-14));
    CHECK(v(1) == 0.0);
    CHECK(v(2) == 0.0);
    CHECK(v(3) == doctest::Approx(0.3826834323650898).epsilon(1e-14));

    const Eigen::Vector4d w = qcore::state_vector(qcore::PureState2Q(0.0));
    CHECK(w(0) == 1.0);
    CHECK(w(3) == 0.0);

    const Eigen::Vector4d q = psi.orthogonal_amplitudes();
    CHECK(v.dot(q) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(qcore::PureState2Q(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(qcore::PureState2Q(pi / 4 + 0.1), std::invalid_argument);
}

TEST_CASE("hermitian operator validation") {
    Eigen::Matrix2cd bad;
    bad << cd(1, 0), cd(0.5, 0.1), cd(0.5, 0.2), cd(2, 0);
    CHECK_THROWS_AS(qcore::HermitianOperator{bad}, std::invalid_argument);

    Eigen::Matrix2cd good;
    good << cd(1, 0), cd(0.5, 0.1), cd(0.5, -0.1), cd(2, 0);
    const qcore::HermitianOperator h(good);
    CHECK(h.dim() == 2);
    CHECK(h.eigenvalues().sum() == doctest::Approx(3.0).epsilon(1e-12));

    CHECK_THROWS_AS(qcore::DensityMatrix(2.0 * Eigen::Matrix2cd::Identity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(qcore::Effect(2.0 * Eigen::Matrix2cd::Identity()),
                    std::invalid_argument);
    CHECK_NOTHROW(qcore::Effect(Eigen::Matrix4cd::Identity()));
}

TEST_CASE("partial transpose of the target projector") {
    const qcore::PureState2Q psi(pi / 8);
    const Eigen::Vector4d v = psi.amplitudes();
    const qcore::HermitianOperator proj((v * v.transpose()).cast<cd>());

    const qcore::HermitianOperator pt = qcore::partial_transpose(proj);
    // Spectrum {cos^2, sin^2, +-sin cos}; the negative eigenvalue witnesses
    // entanglement for every theta > 0.
    CHECK(pt.min_eigenvalue() ==
          doctest::Approx(-std::sin(pi / 8) * std::cos(pi / 8)).epsilon(1e-14));
    CHECK_FALSE(qcore::is_ppt(proj));

    // Involution.
    const Eigen::Matrix4cd back = qcore::partial_transpose(pt).matrix();
    CHECK((back - proj.matrix()).cwiseAbs().maxCoeff() < 1e-15);

    // Product state stays PPT.
    const Eigen::Vector4d e0(1, 0, 0, 0);
    CHECK(qcore::is_ppt(qcore::HermitianOperator((e0 * e0.transpose()).cast<cd>())));
}

TEST_CASE("partial transpose matches oracle on random operators") {
    std::mt19937 rng(7011);
    for (int it = 0; it < 50; ++it) {
        const Eigen::Matrix4cd h = random_hermitian(rng);
        const Eigen::Matrix4cd pt =
            qcore::partial_transpose(qcore::HermitianOperator(h)).matrix();
        // Reference: transpose each 2x2 sub-block indexed by the first qubit.
        for (int i1 = 0; i1 < 2; ++i1)
            for (int j1 = 0; j1 < 2; ++j1) {
                const Eigen::Matrix2cd blk =
                    h.block<2, 2>(2 * i1, 2 * j1).transpose();
                CHECK((pt.block<2, 2>(2 * i1, 2 * j1) - blk).cwiseAbs().maxCoeff() <
                      1e-15);
            }
    }
}

TEST_CASE("symmetrize closed form equals the discrete twirl") {
    std::mt19937 rng(40917);
    const qcore::PureState2Q psi(pi / 8);
    for (int it = 0; it < 100; ++it) {
        const qcore::Effect omega = random_effect(rng);
        const qcore::SymmetrizedStrategy st = qcore::symmetrize(omega, psi);
        const Eigen::Matrix4cd ref = twirl_oracle(omega.matrix());
        const Eigen::Matrix4cd emb = qcore::embed(st, psi).matrix();
        CHECK((emb - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("symmetrize on sector projectors") {
    const qcore::PureState2Q psi(pi / 8);
    const Eigen::Vector4d v = psi.amplitudes();

    const qcore::Effect target((v * v.transpose()).cast<cd>());
    const qcore::SymmetrizedStrategy a = qcore::symmetrize(target, psi);
    CHECK(a.t == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.z == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.omega == doctest::Approx(0.0).epsilon(1e-14));

    Eigen::Matrix4cd p01 = Eigen::Matrix4cd::Zero();
    p01(1, 1) = 1.0;
    const qcore::SymmetrizedStrategy b = qcore::symmetrize(qcore::Effect(p01), psi);
    CHECK(b.t == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.z == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.omega == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("embed round trip and validation") {
    const qcore::PureState2Q psi(pi / 6 / 1.5);  // pi/9, generic angle
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        // Random valid strategy: eigenvalues of the sector block in [0,1].
        const double l1 = u(rng), l2 = u(rng), ang = pi * u(rng);
        const double t = 0.5 * (l1 + l2);
        const double r = 0.5 * (l1 - l2);
        qcore::SymmetrizedStrategy s{t, r * std::cos(ang), r * std::sin(ang), u(rng)};
        REQUIRE(s.is_valid());
        const qcore::SymmetrizedStrategy back =
            qcore::symmetrize(qcore::embed(s, psi), psi);
        CHECK(back.t == doctest::Approx(s.t).epsilon(1e-12));
        CHECK(back.z == doctest::Approx(s.z).epsilon(1e-12));
        CHECK(back.x == doctest::Approx(s.x).epsilon(1e-12));
        CHECK(back.omega == doctest::Approx(s.omega).epsilon(1e-12));
    }

    CHECK_THROWS_AS(qcore::embed({1.0, 0.5, 0.0, 0.0}, psi), std::domain_error);
    CHECK_THROWS_AS(qcore::embed({0.5, 0.0, 0.0, -0.2}, psi), std::domain_error);
}

TEST_CASE("embedded commuting optimum is PPT on the boundary") {
    // Strategy that attains the commuting optimum at theta=pi/8, delta=0.1:
    // z = (1-delta)/(2+sin 2t), omega = z sin 2t, x = 0, t+z = 1-delta.
    const double theta = pi / 8;
    const double s2 = std::sin(2 * theta);
    const double z = 0.9 / (2 + s2);
    const qcore::SymmetrizedStrategy s{0.9 - z, z, 0.0, z * s2};
    const qcore::PureState2Q psi(theta);
    const qcore::Effect omega = qcore::embed(s, psi);
    CHECK(qcore::is_ppt(omega));
    // The partial transpose sits exactly on the PPT boundary here.
    CHECK(std::abs(qcore::partial_transpose(omega).min_eigenvalue()) < 1e-12);
}

TEST_CASE("error probabilities") {
    const qcore::PureState2Q psi(pi / 8);
    const Eigen::Vector4d v = psi.amplitudes();
    const qcore::DensityMatrix rho((v * v.transpose()).cast<cd>());

    const qcore::Effect id(Eigen::Matrix4cd::Identity());
    auto [p01, p10] = qcore::error_probabilities(id, rho, rho);
    CHECK(p01 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(p10 == doctest::Approx(1.0).epsilon(1e-14));

    const qcore::DensityMatrix mixed(0.25 * Eigen::Matrix4cd::Identity());
    const qcore::Effect proj((v * v.transpose()).cast<cd>());
    auto [q01, q10] = qcore::error_probabilities(proj, rho, mixed);
    CHECK(q01 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(q10 == doctest::Approx(0.25).epsilon(1e-12));

    const qcore::DensityMatrix small(Eigen::Matrix2cd::Identity() * 0.5);
    CHECK_THROWS_AS(qcore::error_probabilities(id, rho, small), std::invalid_argument);
}
