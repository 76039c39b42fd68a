// Standalone acceptance gate: twelve end-to-end checks with pinned tolerances
// and time limits, one PASS/FAIL line each. Exits nonzero when any check
// fails so ctest reports the gate as a single unit.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hdim/ball.hpp"
#include "hdim/dimension.hpp"
#include "hdim/groups.hpp"
#include "hdim/harmonic.hpp"
#include "hdim/inequalities.hpp"
#include "hdim/pipeline.hpp"
#include "hdim/report.hpp"
#include "hdim/rough.hpp"
#include "hdim/volume.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failure reasons; an empty message means the check passed.
class Gate {
public:
    void need(bool cond, const std::string& what) {
        if (cond) return;
        if (!msg_.empty()) msg_ += "; ";
        msg_ += what;
    }
    const std::string& message() const { return msg_; }

private:
    std::string msg_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

int main() {
    using namespace hdim;
    std::printf("acceptance gate: 12 checks, pinned tolerances\n");

    GrowthSeries plane;                              // beta on Z^2 through n = 60
    std::map<int, DimensionEstimate> plane_by_degree; // filled by check 7
    std::string note;
    int passed = 0;
    const int total = 12;

    const auto run = [&](int id, const char* name, double limit,
                         const std::function<std::string()>& body) {
        note.clear();
        const auto t0 = Clock::now();
        std::string bad;
        try {
            bad = body();
        } catch (const std::exception& e) {
            bad = std::string("exception: ") + e.what();
        }
        const double secs = seconds_since(t0);
        if (bad.empty() && limit > 0.0 && secs >= limit)
            bad = "took " + fmt(secs) + " s, limit " + fmt(limit) + " s";
        const bool ok = bad.empty();
        std::printf("[%2d/%d] %s %8.2fs  %s%s%s%s%s\n", id, total, ok ? "PASS" : "FAIL", secs,
                    name, ok && !note.empty() ? " (" : "", ok ? note.c_str() : "",
                    ok && !note.empty() ? ")" : "", "");
        if (!ok) std::printf("        reason: %s\n", bad.c_str());
        std::fflush(stdout);
        if (ok) ++passed;
    };

    run(1, "plane growth equals 2n^2+2n+1 through n = 60", 5.0, [&]() -> std::string {
        Gate g;
        plane = growth_function(parse_group("z2"), 60);
        g.need(plane.at(1) == 5 && plane.at(2) == 13, "hand-enumerated beta(1) = 5, beta(2) = 13");
        for (int n = 0; n <= 60; ++n) {
            const std::uint64_t want = 2ull * static_cast<unsigned>(n) * static_cast<unsigned>(n) +
                                       2ull * static_cast<unsigned>(n) + 1ull;
            if (plane.at(n) != want) {
                g.need(false, "beta(" + std::to_string(n) + ") = " + std::to_string(plane.at(n)) +
                                  ", closed form gives " + std::to_string(want));
                break;
            }
        }
        note = "beta(60) = " + std::to_string(plane.at(60));
        return g.message();
    });

    run(2, "normalized plane growth is within 0.05 of 2 at n = 50 and decreasing from n = 2", 0.0,
        [&]() -> std::string {
            Gate g;
            const double r50 = static_cast<double>(plane.at(50)) / 2500.0;
            g.need(std::fabs(r50 - 2.0) <= 0.05,
                   "beta(50)/50^2 = " + fmt(r50) + " strays more than 0.05 from 2");
            g.need(ratios_monotone_decreasing(plane, 2, 2),
                   "beta(n)/n^2 must decrease from n = 2 on");
            note = "beta(50)/50^2 = " + fmt(r50);
            return g.message();
        });

    run(3, "plane doubling ratio stays at or below 4 for n <= 30 (exact)", 0.0,
        [&]() -> std::string {
            Gate g;
            for (int n = 1; n <= 30; ++n)
                if (!doubling_bounded(plane, n, 4, 1)) {
                    g.need(false, "beta(" + std::to_string(2 * n) + ") exceeds 4 beta(" +
                                      std::to_string(n) + ")");
                    break;
                }
            return g.message();
        });

    run(4, "line volume comparison threshold is 1 at theta = 0.1 on the exhaustive grid", 0.0,
        [&]() -> std::string {
            Gate g;
            const GrowthSeries line = growth_function(parse_group("z1"), 100);
            const RvcResult rvc = rvc_threshold(line, 1, "0.1");
            g.need(rvc.grid_max == 50,
                   "grid max " + std::to_string(rvc.grid_max) + ", expected 50");
            g.need(rvc.threshold.has_value(), "no threshold found");
            if (rvc.threshold.has_value())
                g.need(*rvc.threshold == 1,
                       "threshold " + std::to_string(*rvc.threshold) + ", expected 1");
            g.need(rvc.sample_failures.empty(), "unexpected failing pairs on the grid");
            return g.message();
        });

    run(5, "log-log degree estimates round to 2, 3, 4 on the three benchmark groups", 0.0,
        [&]() -> std::string {
            Gate g;
            const double d2 = estimate_degree(plane, 10, 50);
            const GrowthSeries cube = growth_function(parse_group("z3"), 20);
            const double d3 = estimate_degree(cube, 5, 20);
            const auto h0 = Clock::now();
            const GrowthSeries heis = growth_function(parse_group("heisenberg"), 20);
            const double heis_secs = seconds_since(h0);
            const double d4 = estimate_degree(heis, 10, 20);
            g.need(std::llround(d2) == 2, "plane estimate " + fmt(d2) + " does not round to 2");
            g.need(std::llround(d3) == 3, "cubic lattice estimate " + fmt(d3) + " does not round to 3");
            g.need(std::llround(d4) == 4, "nilpotent estimate " + fmt(d4) + " does not round to 4");
            g.need(heis_secs < 60.0,
                   "radius-20 enumeration took " + fmt(heis_secs) + " s, limit 60 s");
            note = "estimates " + fmt(d2) + ", " + fmt(d3) + ", " + fmt(d4);
            return g.message();
        });

    run(6, "Dirichlet solve on the radius-20 plane ball reproduces x^2 - y^2", 10.0,
        [&]() -> std::string {
            Gate g;
            const GroupSpec spec = parse_group("z2");
            const auto ball = enumerate_ball(spec, identity(spec), 21);
            const ScalarField exact =
                make_polynomial_field(ball, {{1.0, {2, 0}}, {-1.0, {0, 2}}});
            const VertexSubset sphere = boundary(*ball, 20);
            std::vector<double> bvals;
            bvals.reserve(sphere.indices.size());
            for (const std::uint32_t idx : sphere.indices) bvals.push_back(exact.values[idx]);
            SolverOptions opts;
            opts.tol = 1e-12;
            const DirichletSolution sol = solve_dirichlet(ball, 20, bvals, opts);
            g.need(sol.converged, "solver reported no convergence");
            g.need(sol.residual <= 1e-10,
                   "interior residual " + fmt(sol.residual) + " above 1e-10");
            double dev = 0.0;
            for (std::size_t i = 0; i < exact.values.size(); ++i)
                dev = std::max(dev, std::fabs(sol.field.values[i] - exact.values[i]));
            g.need(dev <= 1e-10, "deviation " + fmt(dev) + " from the quadratic above 1e-10");
            double bmin = bvals.front(), bmax = bvals.front();
            for (const double v : bvals) {
                bmin = std::min(bmin, v);
                bmax = std::max(bmax, v);
            }
            bool inside = true;
            for (const double v : sol.field.values) inside = inside && v >= bmin && v <= bmax;
            g.need(inside, "a solved value escapes the boundary range (zero tolerance)");
            note = "residual " + fmt(sol.residual) + ", deviation " + fmt(dev);
            return g.message();
        });

    run(7, "measured harmonic-space ranks equal the exact kernel dimensions", 0.0,
        [&]() -> std::string {
            Gate g;
            struct Case {
                int dim;
                int degree;
            };
            const std::vector<Case> cases = {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 0}, {2, 1},
                                             {2, 2}, {2, 3}, {3, 0}, {3, 1}, {3, 2}};
            const std::map<std::pair<int, int>, int> frozen = {
                {{2, 1}, 3}, {{2, 2}, 5}, {{2, 3}, 7}, {{3, 2}, 9}};
            std::string table;
            for (const Case& c : cases) {
                const auto t0 = Clock::now();
                const std::string label =
                    "D = " + std::to_string(c.dim) + ", d = " + std::to_string(c.degree);
                const GroupSpec spec = parse_group("z" + std::to_string(c.dim));
                const std::vector<int> schedule =
                    c.dim == 3 ? std::vector<int>{5, 8} : std::vector<int>{8, 12};
                const int sym = symbolic_kernel_dim(c.dim, c.degree);
                const DimensionEstimate est = estimate_dimension(spec, c.degree, schedule);
                const double secs = seconds_since(t0);
                g.need(est.saturated, label + ": rank did not saturate across the schedule");
                g.need(est.saturated_rank == sym,
                       label + ": measured " + std::to_string(est.saturated_rank) + ", exact " +
                           std::to_string(sym));
                g.need(est.oracle.has_value() && *est.oracle == sym, label + ": oracle mismatch");
                g.need(est.ranks_by_tol.count("1e-9") == 1 && est.ranks_by_tol.count("1e-6") == 1,
                       label + ": stability grid incomplete");
                for (const auto& [tol_label, ranks] : est.ranks_by_tol)
                    g.need(ranks == est.ranks, label + ": rank unstable at rel_tol " + tol_label);
                const auto it = frozen.find({c.dim, c.degree});
                if (it != frozen.end())
                    g.need(sym == it->second, label + ": frozen kernel dimension " +
                                                  std::to_string(it->second) + " disagrees");
                g.need(secs < 120.0, label + ": took " + fmt(secs) + " s, limit 120 s");
                if (c.dim == 2) plane_by_degree.emplace(c.degree, est);
                if (!table.empty()) table += " ";
                table += std::to_string(est.saturated_rank);
            }
            note = "ranks " + table;
            return g.message();
        });

    run(8, "plane ranks follow 2d+1 and stay within the 3 d^(D-1) envelope", 0.0,
        [&]() -> std::string {
            Gate g;
            for (int d = 1; d <= 3; ++d) {
                const auto it = plane_by_degree.find(d);
                if (it == plane_by_degree.end()) {
                    g.need(false, "no stored estimate for d = " + std::to_string(d));
                    continue;
                }
                const int rank = it->second.saturated_rank;
                const int envelope = 3 * d; // 3 d^(D-1) with D = 2
                g.need(rank == 2 * d + 1, "d = " + std::to_string(d) + ": rank " +
                                              std::to_string(rank) + " != " +
                                              std::to_string(2 * d + 1));
                g.need(rank <= envelope, "d = " + std::to_string(d) + ": rank " +
                                             std::to_string(rank) + " exceeds " +
                                             std::to_string(envelope));
            }
            return g.message();
        });

    run(9, "energy probe ratio sits in its two-sided window and is basis independent", 0.0,
        [&]() -> std::string {
            Gate g;
            const GroupSpec spec = parse_group("z2");
            const auto ball = enumerate_ball(spec, identity(spec), 40);
            const std::vector<ScalarField> affine = {
                make_constant_field(ball, 1.0),
                make_monomial_field(ball, {1, 0}),
                make_monomial_field(ball, {0, 1}),
            };
            const EnergyProbe probe = energy_probe(affine, 20, 2.0);
            const double lo = 3.0 * std::pow(2.0, -(2.0 * 1.0 + 2.0 + 0.1));
            g.need(probe.ratio >= lo, "ratio " + fmt(probe.ratio) + " below " + fmt(lo));
            g.need(probe.ratio <= 3.0, "ratio " + fmt(probe.ratio) + " above the family size 3");
            const std::vector<ScalarField> mixed = {
                make_polynomial_field(ball, {{1.0, {0, 0}}, {2.0, {1, 0}}}),
                make_polynomial_field(ball, {{3.0, {0, 0}}, {-1.0, {1, 0}}, {1.0, {0, 1}}}),
                make_polynomial_field(ball, {{1.0, {1, 0}}, {1.0, {0, 1}}}),
            };
            const EnergyProbe again = energy_probe(mixed, 20, 2.0);
            const double rel = std::fabs(again.ratio - probe.ratio) /
                               std::max(std::fabs(probe.ratio), 1e-300);
            g.need(rel <= 1e-8, "basis change moved the ratio by " + fmt(rel) + " relative");
            note = "ratio " + fmt(probe.ratio) + " in [" + fmt(lo) + ", 3]";
            return g.message();
        });

    run(10, "inequality battery varies by at most 3x and both hand constants are exact", 0.0,
        [&]() -> std::string {
            Gate g;
            const GroupSpec spec = parse_group("z2");
            const BatteryReport battery = run_battery(spec, BatteryConfig{});
            g.need(battery.rows.size() == 3, "expected one row per scale 2, 4, 8");
            double lo = 0.0, hi = 0.0;
            for (const BatteryRow& row : battery.rows) {
                g.need(row.max_poincare > 0.0,
                       "scale " + std::to_string(row.scale) + ": no positive constant");
                lo = lo == 0.0 ? row.max_poincare : std::min(lo, row.max_poincare);
                hi = std::max(hi, row.max_poincare);
            }
            const double spread = lo > 0.0 ? hi / lo : 0.0;
            g.need(lo > 0.0 && spread <= 3.0,
                   "constants vary by " + fmt(spread) + "x, allowed 3x");
            // u = first coordinate at p = (1,0), R = 1: value 1, |B(1)| = 5, sum u^2 = 7
            const auto shifted = enumerate_ball(spec, make_element(spec, {1, 0}), 2);
            const ScalarField u = make_monomial_field(shifted, {1, 0});
            const double mv = mean_value_constant(u, 1);
            g.need(mv == 5.0 / 7.0, "center mass constant " + fmt(mv) + " != 5/7 exactly");
            // u = first coordinate + 10 on the origin ball: max 11, min 9 over B(1)
            const auto origin = enumerate_ball(spec, identity(spec), 2);
            const ScalarField w =
                make_polynomial_field(origin, {{1.0, {1, 0}}, {10.0, {0, 0}}});
            const double ratio = harnack_ratio(w, 1);
            g.need(ratio == 11.0 / 9.0, "positive max/min ratio " + fmt(ratio) + " != 11/9 exactly");
            note = "spread " + fmt(spread) + "x";
            return g.message();
        });

    run(11, "subdivided-plane rough suite: injectivization, extension operator, volume sandwich",
        300.0, [&]() -> std::string {
            Gate g;
            const RoughSuiteConfig cfg; // stock: window 149, product ball 74, 20 fields
            const RoughSuiteResult res = run_rough_suite(cfg);
            g.need(res.forward_check.ok, "forward distortion/density check failed");
            g.need(res.inverse_check.ok, "rough inverse check failed");
            g.need(res.composition_check.ok, "composition self-map check failed");
            g.need(res.q == 64, "fiber modulus " + std::to_string(res.q) + ", expected 4^3 = 64");
            g.need(res.injective && res.projection_consistent,
                   "injectivization is not verified injective/consistent");
            g.need(res.e_properties.n_fields == 20, "expected 20 seeded fields");
            g.need(res.e_properties.linear_exact && res.e_properties.max_linearity_defect == 0.0,
                   "extension operator is not exactly linear");
            g.need(res.e_properties.injective, "extension operator lost injectivity");
            g.need(res.e_properties.direct_exact && res.e_properties.sup_norm_bounded,
                   "extension operator direct/sup-norm audit failed");
            g.need(res.mvl_stability >= 1.0 && res.mvl_stability <= 10.0,
                   "mean-value spread " + fmt(res.mvl_stability) + " outside [1, 10]");
            g.need(res.sandwich.c1 == 0.25 && res.sandwich.ok,
                   "volume sandwich with c1 = 1/4 failed");
            g.need(res.ok, "suite aggregate flag is false");
            note = "q = 64, mvl spread " + fmt(res.mvl_stability) + ", sandwich c2 = " +
                   fmt(res.sandwich.c2);
            return g.message();
        });

    run(12, "two identical full pipeline runs produce one determinism hash", 0.0,
        [&]() -> std::string {
            Gate g;
            RunConfig cfg; // stock configuration, every stage enabled
            cfg.op = "all";
            const std::string ch = config_hash(cfg);
            const Report first = pipeline_all(cfg);
            const Report second = pipeline_all(cfg);
            g.need(config_hash(first.config) == ch && config_hash(second.config) == ch,
                   "config hash drifted between runs");
            g.need(first.ok && second.ok, "pipeline reported a failing stage");
            const std::string h1 = first.determinism_hash();
            const std::string h2 = second.determinism_hash();
            g.need(h1 == h2, "determinism hashes differ: " + h1 + " vs " + h2);
            note = "hash " + h1.substr(0, 12);
            return g.message();
        });

    std::printf("%d/%d checks passed\n", passed, total);
    return passed == total ? 0 : 1;
}
