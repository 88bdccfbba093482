#include "qhtsep/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qhtsep/kernels.hpp"

namespace qhtsep::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasibility of (z, x) once t = 1 - delta - z: the 2x2 strategy block and
// its complement in the identity must both be positive semidefinite.
bool reduced_feasible(double z, double x, double delta) {
    const double a = 1.0 - delta;
    const double b = a - 2.0 * z;
    const double co = delta + 2.0 * z;
    const double x2 = x * x;
    return b >= 0.0 && co >= 0.0 && a * b - x2 >= 0.0 && delta * co - x2 >= 0.0;
}

// f(y1) with the removable singularity at y1 = t - z guarded; the numerator
// x^2 vanishes exactly when the guard engages.
double guarded_f(double y1, double t, double z, double x2, double eps) {
    const double gap = std::max(y1 - (t - z), 1e-300);
    return y1 + (1.0 - eps) * std::max(0.0, (t + z) - y1 + x2 / gap);
}

InnerSolution commuting_core(double t, double z, double eps, double s2) {
    const double omega = std::abs(z * s2);
    const double y1 = std::max(t - z, omega);
    const double value = y1 + (1.0 - eps) * std::max(0.0, (t + z) - y1);
    return {y1, value, Branch::Commuting, std::nullopt, t + std::abs(z)};
}

// The value is returned per branch rather than as f(y1*): at the stationary
// point f collapses to a linear expression in |x| and at the top eigenvalue
// the bracket vanishes identically, and those exact forms avoid the ~1e-9
// cancellation the generic formula suffers when x is tiny and z negative.
InnerSolution noncommuting_core(double t, double z, double x, double eps,
                                double c2, double s2) {
    const double x2 = x * x;
    const double omega = std::abs(x * c2 + z * s2);
    const double lam = t + std::sqrt(x2 + z * z);
    const double slope = eps == 1.0 ? 0.0 : std::sqrt((1.0 - eps) / eps);
    const double y1_hat = (t - z) + slope * std::abs(x);
    if (y1_hat <= omega)
        return {omega, guarded_f(omega, t, z, x2, eps), Branch::AtOmega,
                y1_hat, lam};
    if (y1_hat <= lam) {
        const double value = eps * (t - z) + (1.0 - eps) * (t + z) +
                             2.0 * std::sqrt(eps * (1.0 - eps)) * std::abs(x);
        return {y1_hat, value, Branch::AtStationary, y1_hat, lam};
    }
    return {lam, lam, Branch::AtLambdaMax, y1_hat, lam};
}

}  // namespace

InnerSolution inner_value_commuting(double t, double z,
                                    const model::Scenario& sc) {
    if (!(t - z >= 0.0 && t - z <= 1.0 && t + z >= 0.0 && t + z <= 1.0))
        throw std::domain_error(
            "inner_value_commuting: (t, z) outside the operator interval");
    return commuting_core(t, z, sc.epsilon, std::sin(2.0 * sc.theta));
}

InnerSolution inner_value_noncommuting(double t, double z, double x,
                                       const model::Scenario& sc) {
    if (x == 0.0)
        throw std::invalid_argument(
            "inner_value_noncommuting: x = 0 belongs to the commuting path");
    const double x2 = x * x;
    if (!(t - z >= 0.0 && t + z <= 1.0 && (t + z) * (t - z) >= x2 &&
          (1.0 - t - z) * (1.0 - t + z) >= x2))
        throw std::domain_error(
            "inner_value_noncommuting: block not between 0 and the identity");
    return noncommuting_core(t, z, x, sc.epsilon, std::cos(2.0 * sc.theta),
                             std::sin(2.0 * sc.theta));
}

CommutingOptimum p10_commuting(const model::Scenario& sc) {
    const double s2 = std::sin(2.0 * sc.theta);
    const double z_star = (1.0 - sc.delta) / (2.0 + s2);
    const double value =
        (1.0 - sc.delta) *
        (1.0 - sc.epsilon / (1.0 + std::sin(sc.theta) * std::cos(sc.theta)));
    return {z_star, z_star * s2, value};
}

Eps1Result p10_eps1(double theta, double delta) {
    (void)model::Scenario(theta, delta, 1.0);  // range validation
    const double s2 = std::sin(2.0 * theta);
    const double c2 = std::cos(2.0 * theta);
    const double denom = 2.0 + s2;
    const double pc = (1.0 - delta) * s2 / denom;
    const double x0 = (1.0 - delta) * (c2 - std::sqrt(1.0 + 2.0 * s2)) / denom;
    const double x1 =
        -(delta * c2 +
          std::sqrt(delta * delta * (1.0 + 2.0 * s2) + 2.0 * delta * denom)) /
        denom;
    const double x_star = std::max(x0, x1);
    const double x_kink = -(1.0 - delta) * std::tan(2.0 * theta) / 2.0;
    const double value = std::max(0.0, pc + x_star * 2.0 * c2 / denom);
    return {value, {x0, x1, x_star, x_kink}};
}

double objective_reduced(double z, double x, const model::Scenario& sc) {
    // Validate once, here.  The inner_value_* entry points test positivity of
    // the block through differently ordered arithmetic, and at the edge of
    // the feasible chord the two tests can disagree by an ulp.
    if (!reduced_feasible(z, x, sc.delta))
        throw std::domain_error("objective_reduced: (z, x) infeasible");
    const double t = 1.0 - sc.delta - z;
    if (x == 0.0)
        return commuting_core(t, z, sc.epsilon, std::sin(2.0 * sc.theta)).value;
    return noncommuting_core(t, z, x, sc.epsilon, std::cos(2.0 * sc.theta),
                             std::sin(2.0 * sc.theta))
        .value;
}

Region region_classify(double z, double x, const model::Scenario& sc) {
    if (!reduced_feasible(z, x, sc.delta))
        throw std::domain_error("region_classify: (z, x) infeasible");
    const double t = 1.0 - sc.delta - z;
    const double c2 = std::cos(2.0 * sc.theta);
    const double s2 = std::sin(2.0 * sc.theta);
    const double omega = std::abs(x * c2 + z * s2);
    const double lam = t + std::sqrt(x * x + z * z);
    const double slope = sc.epsilon == 1.0
                             ? 0.0
                             : std::sqrt((1.0 - sc.epsilon) / sc.epsilon);
    const double y1_hat = (t - z) + slope * std::abs(x);
    if (y1_hat <= omega) return Region::I;
    if (y1_hat <= lam) return Region::II;
    return Region::III;
}

ReducedMinimizer solve_reduced(const model::Scenario& sc) {
    // Far below machine-representable trade-offs the stationary slope
    // sqrt((1-eps)/eps) dominates everything and the commuting optimum is
    // the minimizer; avoid feeding the huge slope to the grid.
    if (sc.epsilon < 1e-6) {
        const auto c = p10_commuting(sc);
        return {c.value, c.z_star, 0.0};
    }
    const kernels::ScenarioParams kp(sc.theta, sc.delta, sc.epsilon);
    const double d = sc.delta;

    // Feasible z-interval of a fixed-x column.  Minimizers routinely sit on
    // the bounding parabolas (the feasible sliver near them thins out
    // quadratically, so a rectangular grid would never land inside), hence
    // every column includes its exact interval endpoints.
    auto z_lo_at = [d](double x) {
        if (d > 0.0) return x * x / (2.0 * d) - 0.5 * d;
        return x == 0.0 ? 0.0 : kInf;  // delta = 0 admits only x = 0
    };
    auto z_hi_at = [d](double x) {
        if (d < 1.0) return 0.5 * (1.0 - d) - x * x / (2.0 * (1.0 - d));
        return x == 0.0 ? 0.0 : -kInf;  // delta = 1 admits only x = 0
    };
    const double xr = std::sqrt(d * (1.0 - d));  // global coupling range

    auto consider = [](ReducedMinimizer& best, double v, double z, double x) {
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

    constexpr int kHalf = 200;  // grid rows/columns are 2*kHalf + 1 points
    const int npts = 2 * kHalf + 1;
    std::vector<double> zs(npts), xcol(npts), vals(npts);

    auto scan_column = [&](ReducedMinimizer& best, double xv, double zl,
                           double zh, int m) {
        if (!(zl <= zh)) return;  // column misses the feasible set
        for (int i = 0; i < m; ++i)
            zs[i] = i == m - 1 ? zh : zl + (zh - zl) * i / (m - 1);
        // The exact endpoints sit on the bounding parabolas, where the
        // feasibility test recomputed from z can miss by an ulp and drop the
        // sample; guard points just inside survive it, at a value
        // perturbation far below the refinement accuracy.
        if (m >= 4 && zh - zl > 4e-12) {
            zs[1] = zl + 1e-12;
            zs[m - 2] = zh - 1e-12;
        }
        std::fill(xcol.begin(), xcol.begin() + m, xv);
        kernels::reduced_objective_batch(kp, zs.data(), xcol.data(),
                                         vals.data(), m);
        for (int i = 0; i < m; ++i)
            if (vals[i] < kInf) consider(best, vals[i], zs[i], xv);
    };

    // Shrinking-window re-gridding around a seed, each column still clamped
    // to its feasible z-interval.  Pure sampling is immune to the kinked
    // valleys of the piecewise objective that defeat direction-based
    // polishing.
    auto refine_from = [&](ReducedMinimizer seed) {
        double hz = 4.0 * 0.5 / (npts - 1);  // the z-span is 1/2 for any delta
        double hx = 2.0 * hz;
        for (int round = 0; round < 14; ++round) {
            const double zc = seed.z;
            const double xc = seed.x;
            for (int j = 0; j <= 40; ++j) {
                const double xv = xc + static_cast<double>(j - 20) * hx / 20.0;
                scan_column(seed, xv, std::max(z_lo_at(xv), zc - hz),
                            std::min(z_hi_at(xv), zc + hz), 41);
            }
            hz *= 0.2;
            hx *= 0.2;
        }
        return seed;
    };

    // Coarse stage: j = kHalf puts a column at x = 0 exactly, so the
    // commuting line is always sampled end to end.  Keep the winner of each
    // column; their local minima over j seed the refinement.
    std::vector<ReducedMinimizer> col(npts, {kInf, 0.0, 0.0});
    for (int j = 0; j < npts; ++j) {
        const double xv = xr * static_cast<double>(j - kHalf) / kHalf;
        col[j].x = xv;
        scan_column(col[j], xv, z_lo_at(xv), z_hi_at(xv), npts);
    }

    // Near-degenerate instances can hold several separated valleys whose
    // depths differ by less than the coarse resolution, so refining only the
    // single best column may converge into the wrong one.  Refine every
    // sufficiently distinct column-profile local minimum instead.
    std::vector<int> cand;
    for (int j = 0; j < npts; ++j) {
        if (col[j].value == kInf) continue;
        const double left = j > 0 ? col[j - 1].value : kInf;
        const double right = j + 1 < npts ? col[j + 1].value : kInf;
        if (col[j].value <= left && col[j].value <= right) cand.push_back(j);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (col[a].value != col[b].value) return col[a].value < col[b].value;
        return a < b;
    });
    std::vector<int> seeds;
    const double min_sep = 2.0 * xr / kHalf;
    for (int j : cand) {
        if (seeds.size() >= 8) break;
        bool distinct = true;
        for (int k : seeds)
            if (std::abs(col[j].x - col[k].x) <= min_sep) distinct = false;
        if (distinct) seeds.push_back(j);
    }

    ReducedMinimizer best{kInf, 0.0, 0.0};
    for (int j : seeds) {
        const ReducedMinimizer refined = refine_from(col[j]);
        consider(best, refined.value, refined.z, refined.x);
    }
    return best;
}

Eps1Membership eps1_feasible_membership(double z, double x, double theta,
                                        double delta) {
    (void)model::Scenario(theta, delta, 1.0);
    const double s2 = std::sin(2.0 * theta);
    const double c2 = std::cos(2.0 * theta);
    const bool in_p0 =
        delta == 1.0 ? (x == 0.0 && z <= 0.0)
                     : z <= -x * x / (2.0 * (1.0 - delta)) + 0.5 * (1.0 - delta);
    const bool in_p1 = delta == 0.0
                           ? (x == 0.0 && z >= 0.0)
                           : z >= x * x / (2.0 * delta) - 0.5 * delta;
    const double x_kink = -(1.0 - delta) * std::tan(2.0 * theta) / 2.0;
    const double line = x <= x_kink ? (1.0 - delta + x * c2) / (2.0 - s2)
                                    : (1.0 - delta - x * c2) / (2.0 + s2);
    return {in_p0, in_p1, z >= line};
}

}  // namespace qhtsep::analytic
