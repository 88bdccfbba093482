#pragma once
// Closed-form machinery for the symmetrized strategy family.
//
// A symmetrized two-outcome strategy is determined by (t, z, x, omega): the
// accept operator acts as [[t+z, x], [x, t-z]] on the span of the target
// state and its in-sector complement and as omega on the two cross-sector
// basis states.  Saturating the acceptance constraint pins t = 1 - delta - z,
// and the positivity of the partial transpose floors omega at
// |x cos2t + z sin2t|.  What remains is a two-variable minimization over
// (z, x) of the worst-case acceptance probability, for which the inner
// adversary optimization admits closed-form solutions.
//
// The inner solution picks y1 (the top eigenvalue allowance outside the
// target direction) among three candidates: the floor omega, the stationary
// point y1_hat = (t-z) + sqrt((1-eps)/eps)|x| of
//     f(y1) = y1 + (1-eps) [ (t+z) - y1 + x^2 / (y1 - (t-z)) ],
// and the top eigenvalue t + sqrt(x^2+z^2) where f collapses to y1.  The
// region taking y1 = omega is where the outer minimum lives whenever it is
// nonempty; the classification of a point by which candidate wins is exposed
// because several tests and the feasibility geometry depend on it.
//
// For eps = 1 the whole trade-off has a closed form built from the commuting
// optimum plus a correction linear in the optimal coupling x*, and the
// feasible set is described by two parabolas and a broken line; those
// evaluators live here too.

#include <optional>

#include "qhtsep/model.hpp"

namespace qhtsep::analytic {

// Which candidate produced the inner solution.
enum class Branch { AtOmega, AtStationary, AtLambdaMax, Commuting };

// Which part of the (z, x) plane a point falls in: I takes y1 at the floor
// omega, II at the stationary point, III at the top eigenvalue.
enum class Region { I, II, III };

struct InnerSolution {
    double y1_star;
    double value;
    Branch branch;
    std::optional<double> y1_hat;  // absent on the commuting path
    double lambda_max;
};

// Geometry of the eps = 1 closed form: the two candidate couplings x0 and x1
// (both nonpositive), the winner x_star = max(x0, x1), and the corner
// x_kink = -(1-delta) tan(2 theta)/2 of the broken-line feasibility bound.
struct Eps1Geometry {
    double x0;
    double x1;
    double x_star;
    double x_kink;
};

struct Eps1Result {
    double value;
    Eps1Geometry geom;
};

// The best strategy with x = 0: z_star = (1-delta)/(2+sin2t), omega_star =
// z_star sin2t, value = (1-delta) [1 - eps/(1 + sin t cos t)].
struct CommutingOptimum {
    double z_star;
    double omega_star;
    double value;
};

struct ReducedMinimizer {
    double value;
    double z;
    double x;
};

// Membership of (z, x) in the three sets bounding the eps = 1 feasible
// region: under the downward parabola with apex (x=0, z=(1-delta)/2), above
// the upward parabola with apex (x=0, z=-delta/2), and above the broken line
// with kink at x_kink.
struct Eps1Membership {
    bool in_p0;
    bool in_p1;
    bool in_k;
};

// Inner worst-case value for a strategy with x = 0 and omega on its floor
// |z sin2t|.  Throws std::domain_error when (t, z) violates 0 <= t-z <= 1 or
// 0 <= t+z <= 1.
InnerSolution inner_value_commuting(double t, double z,
                                    const model::Scenario& sc);

// Inner worst-case value for x != 0, omega on its floor.  Throws
// std::invalid_argument when x = 0 and std::domain_error when the 2x2 block
// is not between 0 and the identity.
InnerSolution inner_value_noncommuting(double t, double z, double x,
                                       const model::Scenario& sc);

CommutingOptimum p10_commuting(const model::Scenario& sc);

// Worst-case error at eps = 1 as a closed form in (theta, delta), clamped
// below at zero, together with the geometry that produced it.
Eps1Result p10_eps1(double theta, double delta);

// The piecewise objective of the two-variable minimization, defined on the
// whole feasible set (t = 1 - delta - z, omega floored).  Throws
// std::domain_error outside the feasible set.
double objective_reduced(double z, double x, const model::Scenario& sc);

// Classification of a feasible point; boundaries resolve to the lower-
// numbered region.  Throws std::domain_error outside the feasible set.
Region region_classify(double z, double x, const model::Scenario& sc);

// Global minimizer of objective_reduced: a coarse feasible-set grid followed
// by deterministic window refinement around the incumbent.  Ties are broken
// by smaller value, then smaller z, then smaller |x|, then smaller x.
ReducedMinimizer solve_reduced(const model::Scenario& sc);

// Membership in the eps = 1 feasibility sets.  The parabola degenerate at
// delta = 0 (respectively delta = 1) collapses to the half-line x = 0,
// z >= 0 (respectively z <= 0).
Eps1Membership eps1_feasible_membership(double z, double x, double theta,
                                        double delta);

}  // namespace qhtsep::analytic
