#include "qhtsep/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qhtsep/analytic.hpp"
#include "qhtsep/model.hpp"
#include "qhtsep/oracle.hpp"
#include "qhtsep/qcore.hpp"
#include "qhtsep/sdp.hpp"
#include "qhtsep/tradeoff.hpp"

namespace qhtsep::acceptance {

namespace {

using std::numbers::pi;
using tradeoff::Method;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", v);
    return b;
}

double p10_of(const model::Scenario& sc, Method m, int grid_n = 200) {
    tradeoff::EvalOptions opt;
    opt.grid_n = grid_n;
    return tradeoff::evaluate_point(sc, m, opt).p10;
}

// Values of the full SDP at epsilon = 1 on the shared theta x delta grid
// (theta = k pi/16, delta = j/10), reused across criteria.
struct Context {
    std::map<std::pair<int, int>, double> eps1_full;
    double sdp_eps1(int k16, int j10) {
        const auto key = std::make_pair(k16, j10);
        if (const auto it = eps1_full.find(key); it != eps1_full.end())
            return it->second;
        const double v =
            p10_of(model::Scenario{pi * k16 / 16.0, j10 / 10.0, 1.0},
                   Method::SdpFull);
        eps1_full[key] = v;
        return v;
    }
};

using Outcome = std::pair<bool, std::string>;

Outcome criterion_entangled(Context&) {
    double worst_tight = 0.0;
    double worst_oracle = 0.0;
    for (int j = 0; j <= 9; ++j) {
        const double delta = j / 10.0;
        const model::Scenario sc{pi / 4.0, delta, 1.0};
        const double want = (1.0 - delta) / 3.0;
        for (Method m :
             {Method::SdpFull, Method::SdpReduced, Method::AnalyticEps1})
            worst_tight = std::max(worst_tight, std::abs(p10_of(sc, m) - want));
        worst_oracle = std::max(
            worst_oracle, std::abs(p10_of(sc, Method::Oracle, 400) - want));
    }
    return {worst_tight <= 1e-6 && worst_oracle <= 1e-3,
            "max solver error " + sci(worst_tight) + ", oracle error " +
                sci(worst_oracle)};
}

Outcome criterion_eps1_closed_form(Context& ctx) {
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (int j = 0; j <= 9; ++j) {
            const double closed =
                analytic::p10_eps1(pi * k / 16.0, j / 10.0).value;
            worst = std::max(worst, std::abs(closed - ctx.sdp_eps1(k, j)));
        }
    return {worst <= 1e-6, "max deviation " + sci(worst)};
}

Outcome criterion_delta0_commuting(Context&) {
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (double eps : {0.25, 0.5, 0.75, 1.0}) {
            const double theta = pi * k / 16.0;
            const model::Scenario sc{theta, 0.0, eps};
            const double want =
                1.0 - eps / (1.0 + std::sin(theta) * std::cos(theta));
            worst = std::max(worst,
                             std::abs(p10_of(sc, Method::SdpFull) - want));
        }
    return {worst <= 1e-6, "max deviation " + sci(worst)};
}

Outcome criterion_product_state(Context&) {
    double worst_zero = 0.0;
    for (int j = 0; j <= 10; ++j) {
        const double delta = j == 10 ? 1.0 : j / 10.0;
        const model::Scenario sc{0.0, delta, 1.0};
        worst_zero = std::max(worst_zero, std::abs(p10_of(sc, Method::SdpFull)));
    }
    double least = kInf;
    for (int k : {1, 2, 4})
        least = std::min(
            least, p10_of(model::Scenario{pi * k / 16.0, 0.5, 1.0},
                          Method::SdpFull));
    return {worst_zero <= 1e-8 && least > 1e-3,
            "max at theta = 0: " + sci(worst_zero) +
                ", min entangled value " + sci(least)};
}

Outcome criterion_gap_positive(Context& ctx) {
    const double pc =
        analytic::p10_commuting(model::Scenario{pi / 8.0, 0.1, 1.0}).value;
    const double gap0 = pc - ctx.sdp_eps1(2, 1);
    const bool hand = std::abs(gap0 - 0.1470) <= 1e-3;
    // delta = 0 forces the commuting strategy exactly (the coupling is pinned
    // to zero there), so the strict inequality is asked of interior deltas.
    double min_gap = kInf;
    for (int k = 1; k <= 3; ++k)
        for (int j = 1; j <= 9; ++j) {
            const model::Scenario sc{pi * k / 16.0, j / 10.0, 1.0};
            const double g =
                analytic::p10_commuting(sc).value - ctx.sdp_eps1(k, j);
            min_gap = std::min(min_gap, g);
        }
    return {hand && min_gap > 0.0,
            "gap at (pi/8, 0.1, 1) = " + sci(gap0) + ", min interior gap " +
                sci(min_gap)};
}

Outcome criterion_gap_panel(Context&) {
    tradeoff::SweepSpec spec;
    spec.theta_grid = {pi / 8.0};
    for (int j = 0; j <= 20; ++j)
        spec.delta_grid.push_back(j == 20 ? 1.0 : j * 0.05);
    for (int k = 0; k <= 25; ++k)
        spec.epsilon_grid.push_back(k == 25 ? 1.0 : 0.5 + 0.02 * k);
    spec.methods = {Method::SdpReduced};
    const auto rows = tradeoff::sweep_points(spec);
    double min_gap = kInf;
    double max_low = -kInf;
    double best_gap = -kInf;
    double best_eps = 0.0;
    for (const auto& r : rows) {
        min_gap = std::min(min_gap, r.gap);
        if (r.epsilon <= 0.8) max_low = std::max(max_low, r.gap);
        if (r.gap > best_gap) {
            best_gap = r.gap;
            best_eps = r.epsilon;
        }
    }
    return {min_gap >= -1e-6 && max_low < 1e-2 && best_eps >= 0.95,
            "min gap " + sci(min_gap) + ", max gap below eps 0.8: " +
                sci(max_low) + ", peak " + sci(best_gap) + " at eps " +
                sci(best_eps)};
}

// Continuity of the reduced objective across the inner-solution region
// boundaries, probed along one constant-z row of the random scenario.
void probe_row_continuity(const model::Scenario& sc, double& worst,
                          int& boundaries) {
    const double d = sc.delta;
    const double z =
        std::clamp(0.25 * (1.0 - 2.0 * d), -0.45 * d, 0.45 * (1.0 - d));
    const double xcap =
        0.999 * std::min(std::sqrt(std::max(0.0, (1.0 - d) * (1.0 - d - 2.0 * z))),
                         std::sqrt(std::max(0.0, d * (d + 2.0 * z))));
    try {
        if (xcap > 1e-10)
            worst = std::max(worst,
                             std::abs(analytic::objective_reduced(z, 1e-13, sc) -
                                      analytic::objective_reduced(z, 0.0, sc)));
    } catch (const std::domain_error&) {
    }
    if (xcap < 1e-6) return;
    try {
        const int steps = 64;
        double xa = xcap / steps;
        analytic::Region ra = analytic::region_classify(z, xa, sc);
        for (int i = 2; i <= steps; ++i) {
            const double xb = xcap * i / steps;
            const analytic::Region rb = analytic::region_classify(z, xb, sc);
            if (rb == ra) {
                xa = xb;
                continue;
            }
            double lo = xa, hi = xb;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (analytic::region_classify(z, mid, sc) == ra ? lo : hi) = mid;
            }
            const double b = 0.5 * (lo + hi);
            worst = std::max(worst,
                             std::abs(analytic::objective_reduced(z, b + 1e-12, sc) -
                                      analytic::objective_reduced(z, b - 1e-12, sc)));
            ++boundaries;
            xa = xb;
            ra = rb;
        }
    } catch (const std::domain_error&) {
    }
}

Outcome criterion_properties(Context&) {
    std::mt19937 rng(8493021u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_mono = -kInf;
    double worst_lo = -kInf;
    double worst_hi = -kInf;
    double worst_pair = 0.0;
    double worst_dual = 0.0;
    double worst_cont = 0.0;
    int boundaries = 0;
    for (int k = 0; k < 200; ++k) {
        const double theta = 0.01 + (pi / 4.0 - 0.02) * u(rng);
        const double delta = 0.02 + 0.96 * u(rng);
        const double eps = 0.05 + 0.95 * u(rng);
        const model::Scenario sc{theta, delta, eps};
        const double base = p10_of(sc, Method::SdpReduced);

        const double vd = p10_of(
            model::Scenario{theta, std::min(1.0, delta + 0.05), eps},
            Method::SdpReduced);
        const double ve = p10_of(
            model::Scenario{theta, delta, std::min(1.0, eps + 0.05)},
            Method::SdpReduced);
        worst_mono = std::max({worst_mono, vd - base, ve - base});

        const double pc = analytic::p10_commuting(sc).value;
        worst_lo = std::max(worst_lo, (1.0 - delta) * (1.0 - eps) - base);
        worst_hi = std::max(worst_hi, base - pc);

        const auto sol = sdp::solve(model::build_full_sdp(sc));
        if (sol.status != sdp::SdpStatus::Optimal)
            return {false, "full SDP stopped with status " +
                               std::string(sdp::to_string(sol.status))};
        worst_pair = std::max(worst_pair, std::abs(sol.primal_value - base));

        const auto es = model::extract_strategy(sol, model::Form::Full, sc);
        const qcore::PureState2Q psi(theta);
        const double inner = oracle::inner_max(es.omega, psi, eps).value;
        const double dual_obj = es.dual.y1 + (1.0 - eps) * es.dual.y2;
        worst_dual = std::max(worst_dual, std::abs(inner - dual_obj));

        probe_row_continuity(sc, worst_cont, boundaries);
    }
    const bool ok = worst_mono <= 1e-8 && worst_lo <= 1e-8 &&
                    worst_hi <= 1e-8 && worst_pair <= 1e-6 &&
                    worst_dual <= 1e-6 && worst_cont <= 1e-10;
    return {ok, "monotonicity " + sci(worst_mono) + ", bounds " +
                    sci(std::max(worst_lo, worst_hi)) + ", full-reduced " +
                    sci(worst_pair) + ", duality " + sci(worst_dual) +
                    ", continuity " + sci(worst_cont) + " over " +
                    std::to_string(boundaries) + " boundaries"};
}

Outcome criterion_oracle_equivalence(Context&) {
    std::mt19937 rng(77182u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_gap = 0.0;
    double worst_under = -kInf;
    for (int k = 0; k < 20; ++k) {
        const model::Scenario sc{0.01 + (pi / 4.0 - 0.02) * u(rng),
                                 0.02 + 0.96 * u(rng), 0.05 + 0.95 * u(rng)};
        const double red = p10_of(sc, Method::SdpReduced);
        const double grid = oracle::grid_p10(sc, 400).value;
        worst_gap = std::max(worst_gap, std::abs(grid - red));
        worst_under = std::max(worst_under, red - grid);
    }
    return {worst_gap <= 1e-3 && worst_under <= 1e-9,
            "max |grid - reduced| " + sci(worst_gap) +
                ", max undershoot " + sci(worst_under)};
}

}  // namespace

bool run_acceptance(std::ostream& out) {
    Context ctx;
    struct Item {
        const char* title;
        Outcome (*run)(Context&);
    };
    const Item items[] = {
        {"maximally entangled state at epsilon = 1 yields (1 - delta)/3",
         criterion_entangled},
        {"epsilon = 1 closed form matches the full SDP",
         criterion_eps1_closed_form},
        {"delta = 0 recovers the commuting optimum", criterion_delta0_commuting},
        {"perfect rejection exactly for the product state",
         criterion_product_state},
        {"commuting strategies strictly suboptimal off the extremes",
         criterion_gap_positive},
        {"gap panel nonnegative, flat at low epsilon, peaking near one",
         criterion_gap_panel},
        {"property suite on 200 random scenarios", criterion_properties},
        {"independent grid search agrees with the reduced solver",
         criterion_oracle_equivalence},
    };
    int failed = 0;
    int idx = 0;
    for (const auto& item : items) {
        ++idx;
        Outcome oc;
        try {
            oc = item.run(ctx);
        } catch (const std::exception& e) {
            oc = {false, std::string("exception: ") + e.what()};
        }
        if (!oc.first) ++failed;
        out << (oc.first ? "[PASS] " : "[FAIL] ") << idx << ": " << item.title;
        if (!oc.second.empty()) out << " (" << oc.second << ")";
        out << "\n" << std::flush;
    }
    out << (idx - failed) << "/" << idx << " criteria passed\n";
    return failed == 0;
}

}  // namespace qhtsep::acceptance
