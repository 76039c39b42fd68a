#include "hdim/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hdim/ball.hpp"
#include "hdim/dimension.hpp"
#include "hdim/harmonic.hpp"
#include "hdim/inequalities.hpp"
#include "hdim/kernels.hpp"
#include "hdim/rough.hpp"
#include "hdim/version.hpp"
#include "hdim/volume.hpp"

namespace hdim {
namespace {

using nlohmann::json;

json spec_json(const GroupSpec& spec) { return json::parse(spec_to_json(spec)); }

json make_series(std::vector<std::string> header, json rows) {
    return json{{"header", std::move(header)}, {"rows", std::move(rows)}};
}

double poly_value(const std::vector<std::pair<double, std::vector<int>>>& terms,
                  const GroupElement& g) {
    double v = 0.0;
    for (const auto& [coeff, expo] : terms) v += coeff * monomial_value(g, expo);
    return v;
}

std::string op_default_boundary(const std::string& op) {
    if (op == "dirichlet") return "x^2-y^2";
    if (op == "meanvalue") return "x1";
    if (op == "harnack") return "x1+10";
    return "";
}

int lattice_dim_or_throw(const GroupSpec& spec, const std::string& why) {
    if (spec.kind != GroupKind::Lattice)
        throw ConfigError(why + " needs a lattice group (z1..z3)");
    return spec.lattice_dim;
}

void op_growth(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const GrowthSeries series = growth_function(spec, cfg.nmax, cfg.cache_dir);
    json rows = json::array();
    for (int n = 0; n <= series.nmax(); ++n) rows.push_back({n, series.at(n)});
    json drows = json::array();
    double max_doubling = 0.0;
    for (const DoublingEntry& e : doubling_constants(series)) {
        drows.push_back({e.n, e.num, e.den, e.value});
        max_doubling = std::max(max_doubling, e.value);
    }
    rep.payload["group"] = spec_json(spec);
    rep.payload["generator_convention"] = generator_convention(spec);
    rep.payload["nmax"] = cfg.nmax;
    rep.payload["max_doubling"] = max_doubling;
    rep.payload["series"]["growth"] = make_series({"n", "beta"}, rows);
    rep.payload["series"]["doubling"] = make_series({"n", "beta_2n", "beta_n", "ratio"}, drows);
    rep.payload["primary_series"] = "growth";
}

void op_pansu(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const int degree = nominal_growth_degree(spec);
    const GrowthSeries series = growth_function(spec, cfg.nmax, cfg.cache_dir);
    const std::vector<double> ratios = growth_ratios(series, degree);
    json rows = json::array();
    for (int n = 1; n <= series.nmax(); ++n)
        rows.push_back({n, series.at(n), ratios[static_cast<std::size_t>(n) - 1]});
    const RatioTail tail = ratio_tail(series, degree);
    const TwoSidedBounds bounds = growth_bounds(series, degree);
    rep.payload["group"] = spec_json(spec);
    rep.payload["generator_convention"] = generator_convention(spec);
    rep.payload["degree"] = degree;
    rep.payload["ratio_at_nmax"] = ratios.back();
    rep.payload["monotone_from_2"] = ratios_monotone_decreasing(series, degree, 2);
    rep.payload["tail"] = {{"window_lo", tail.window_lo},   {"window_hi", tail.window_hi},
                           {"min_ratio", tail.min_ratio},   {"max_ratio", tail.max_ratio},
                           {"variation", tail.variation},   {"mean_ratio", tail.mean_ratio}};
    rep.payload["bounds"] = {{"c1", bounds.c1}, {"c2", bounds.c2}};
    if (cfg.nmax >= 8)
        rep.payload["estimated_degree"] = estimate_degree(series, cfg.nmax / 2, cfg.nmax);
    rep.payload["series"]["ratios"] = make_series({"n", "beta", "beta_over_n_degree"}, rows);
    rep.payload["primary_series"] = "ratios";
}

void op_rvc(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const int degree = nominal_growth_degree(spec);
    const GrowthSeries series = growth_function(spec, cfg.nmax, cfg.cache_dir);
    const RvcResult rvc = rvc_threshold(series, degree, cfg.theta);
    json failures = json::array();
    for (const auto& [r, R] : rvc.sample_failures) failures.push_back({r, R});
    rep.payload["group"] = spec_json(spec);
    rep.payload["generator_convention"] = generator_convention(spec);
    rep.payload["theta"] = rvc.theta;
    rep.payload["degree"] = degree;
    rep.payload["grid_max"] = rvc.grid_max;
    rep.payload["threshold"] = rvc.threshold ? json(*rvc.threshold) : json();
    rep.payload["sample_failures"] = failures;
    rep.payload["series"]["rvc"] = make_series(
        {"theta", "degree", "grid_max", "threshold"},
        json::array({{rvc.theta, degree, rvc.grid_max,
                      rvc.threshold ? json(*rvc.threshold) : json()}}));
    rep.payload["primary_series"] = "rvc";
    rep.ok = rvc.threshold.has_value();
}

void op_dirichlet(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const int r = cfg.radius;
    const std::string text = cfg.boundary.empty() ? op_default_boundary("dirichlet") : cfg.boundary;
    const auto terms = parse_polynomial(text, coord_count(spec));
    const auto ball = ball_cached(spec, identity(spec), r + 1, cfg.cache_dir);
    const VertexSubset sphere = boundary(*ball, r);
    std::vector<double> bvals;
    bvals.reserve(sphere.indices.size());
    double bmin = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < sphere.indices.size(); ++i) {
        const double v = poly_value(terms, ball->vertex(sphere.indices[i]));
        bvals.push_back(v);
        bmin = i == 0 ? v : std::min(bmin, v);
        bmax = i == 0 ? v : std::max(bmax, v);
    }
    const DirichletSolution sol = solve_dirichlet(ball, r, bvals);

    double deviation = 0.0;
    std::uint64_t principle_violations = 0;
    for (std::uint32_t i = 0; i < ball->count_within(r); ++i) {
        const double u = sol.field.values[i];
        deviation = std::max(deviation, std::fabs(u - poly_value(terms, ball->vertex(i))));
        if (u < bmin || u > bmax) ++principle_violations;
    }
    json rows = json::array();
    std::vector<std::int64_t> coords(static_cast<std::size_t>(coord_count(spec)), 0);
    for (int t = -r; t <= r; ++t) {
        coords[0] = t;
        const GroupElement e = make_element(spec, coords);
        if (const auto idx = ball->index_of(e))
            rows.push_back({t, sol.field.values[*idx], poly_value(terms, e)});
    }
    rep.payload["group"] = spec_json(spec);
    rep.payload["boundary"] = text;
    rep.payload["radius"] = r;
    rep.payload["tol"] = sol.tol;
    rep.payload["residual"] = sol.residual;
    rep.payload["cg_iterations"] = sol.cg_iterations;
    rep.payload["refinement_rounds"] = sol.refinement_rounds;
    rep.payload["used_fallback"] = sol.used_fallback;
    rep.payload["converged"] = sol.converged;
    rep.payload["max_deviation_from_polynomial"] = deviation;
    rep.payload["max_principle_violations"] = principle_violations;
    rep.payload["boundary_range"] = {{"min", bmin}, {"max", bmax}};
    rep.payload["series"]["axis_profile"] =
        make_series({"t", "u(t,0,..)", "polynomial(t,0,..)"}, rows);
    rep.payload["primary_series"] = "axis_profile";
    rep.ok = sol.converged && principle_violations == 0;
}

void battery_payload(const RunConfig& cfg, const GroupSpec& spec, Report& rep) {
    BatteryConfig bc;
    bc.seed = cfg.seed;
    bc.harm_tol = cfg.harm_tol;
    bc.cache_dir = cfg.cache_dir;
    const BatteryReport battery = run_battery(spec, bc);
    json rows = json::array();
    json frows = json::array();
    double pmin = 0.0, pmax = 0.0;
    for (std::size_t i = 0; i < battery.rows.size(); ++i) {
        const BatteryRow& row = battery.rows[i];
        rows.push_back({row.scale, row.max_poincare, row.max_mean_value});
        pmin = i == 0 ? row.max_poincare : std::min(pmin, row.max_poincare);
        pmax = i == 0 ? row.max_poincare : std::max(pmax, row.max_poincare);
        for (std::size_t f = 0; f < row.field_labels.size(); ++f)
            frows.push_back({row.scale, row.field_labels[f], row.poincare_by_field[f],
                             row.mean_value_by_field[f]});
    }
    const double stability = pmin > 0.0 ? pmax / pmin : 0.0;
    rep.payload["group"] = spec_json(spec);
    rep.payload["generator_convention"] = generator_convention(spec);
    rep.payload["scales"] = bc.scales;
    rep.payload["seed"] = bc.seed;
    rep.payload["harm_tol"] = bc.harm_tol;
    rep.payload["poincare_stability"] = stability;
    rep.payload["series"]["battery"] =
        make_series({"scale", "max_poincare", "max_mean_value"}, rows);
    rep.payload["series"]["battery_fields"] =
        make_series({"scale", "field", "poincare", "mean_value"}, frows);
    rep.payload["primary_series"] = "battery";
    rep.ok = stability > 0.0 && stability <= 3.0;
}

void op_poincare(const RunConfig& cfg, Report& rep) {
    battery_payload(cfg, parse_group(cfg.group), rep);
}

void op_meanvalue(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const int R = cfg.radius;
    const std::string text = cfg.boundary.empty() ? op_default_boundary("meanvalue") : cfg.boundary;
    const auto terms = parse_polynomial(text, coord_count(spec));
    // probe at p = (1, 0, ...): the ball is centered there
    std::vector<std::int64_t> coords(static_cast<std::size_t>(coord_count(spec)), 0);
    coords[0] = 1;
    const auto ball = ball_cached(spec, make_element(spec, coords), R + 1, cfg.cache_dir);
    const ScalarField u = make_polynomial_field(ball, terms);
    const double c = mean_value_constant(u, R, cfg.harm_tol);
    rep.payload["group"] = spec_json(spec);
    rep.payload["function"] = text;
    rep.payload["center"] = element_to_string(ball->center());
    rep.payload["R"] = R;
    rep.payload["harm_tol"] = cfg.harm_tol;
    rep.payload["constant"] = c;
    rep.payload["series"]["meanvalue"] =
        make_series({"R", "constant"}, json::array({{R, c}}));
    rep.payload["primary_series"] = "meanvalue";
}

void op_harnack(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const int n = cfg.radius;
    const std::string text = cfg.boundary.empty() ? op_default_boundary("harnack") : cfg.boundary;
    const auto terms = parse_polynomial(text, coord_count(spec));
    const auto ball = ball_cached(spec, identity(spec), n, cfg.cache_dir);
    const ScalarField u = make_polynomial_field(ball, terms);
    const double ratio = harnack_ratio(u, n);
    rep.payload["group"] = spec_json(spec);
    rep.payload["function"] = text;
    rep.payload["n"] = n;
    rep.payload["ratio"] = ratio;
    rep.payload["series"]["harnack"] = make_series({"n", "ratio"}, json::array({{n, ratio}}));
    rep.payload["primary_series"] = "harnack";
    rep.ok = ratio >= 1.0;
}

void op_dim(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    const std::string usage = validate_dimension_request(spec, cfg.degree, cfg.schedule);
    if (!usage.empty()) throw ConfigError(usage);
    const DimensionEstimate est = estimate_dimension(spec, cfg.degree, cfg.schedule, cfg.rel_tol,
                                                     10, {}, cfg.cache_dir);
    json rows = json::array();
    for (std::size_t i = 0; i < est.schedule.size(); ++i)
        rows.push_back({est.schedule[i], est.ranks[i]});
    rep.payload["group"] = spec_json(spec);
    rep.payload["generator_convention"] = generator_convention(spec);
    rep.payload["degree"] = est.degree;
    rep.payload["schedule"] = est.schedule;
    rep.payload["rel_tol"] = est.rel_tol;
    rep.payload["buffer_factor"] = est.buffer_factor;
    rep.payload["ranks_by_tol"] = est.ranks_by_tol;
    rep.payload["saturated"] = est.saturated;
    rep.payload["saturated_rank"] = est.saturated_rank;
    rep.payload["oracle"] = est.oracle ? json(*est.oracle) : json();
    rep.payload["oracle_label"] =
        est.oracle ? std::to_string(*est.oracle) : std::string("no oracle");
    rep.payload["max_solve_residual"] = est.max_solve_residual;
    rep.payload["series"]["ranks"] = make_series({"R", "rank"}, rows);
    rep.payload["primary_series"] = "ranks";
    rep.ok = est.saturated && (!est.oracle || est.saturated_rank == *est.oracle);
}

void op_oracle(const RunConfig& cfg, Report& rep) {
    const int v = symbolic_kernel_dim(cfg.oracle_dim, cfg.degree);
    rep.payload["D"] = cfg.oracle_dim;
    rep.payload["d"] = cfg.degree;
    rep.payload["kernel_dim"] = v;
    rep.payload["series"]["kernel_dim"] =
        make_series({"kernel_dim"}, json::array({{v}}));
    rep.payload["primary_series"] = "kernel_dim";
}

json check_report_json(const RoughCheckReport& rc) {
    json viol = json::array();
    for (const RoughViolation& v : rc.sample_violations)
        viol.push_back({v.kind, v.x, v.y, v.lhs, v.rhs});
    return json{{"ok", rc.ok},
                {"a", rc.a},
                {"b", rc.b},
                {"margin", rc.margin},
                {"pairs_checked", rc.pairs_checked},
                {"violation_count", rc.violation_count},
                {"max_density_gap", rc.max_density_gap},
                {"source_subwindow", rc.source_subwindow},
                {"target_subwindow", rc.target_subwindow},
                {"sample_violations", viol}};
}

RoughIsometry rough_input(const RunConfig& cfg, int window_radius, int target_radius) {
    if (!cfg.graph_csv.empty()) {
        const GroupSpec spec = parse_group(cfg.group);
        std::ifstream es(cfg.graph_csv);
        if (!es) throw ConfigError("cannot open graph csv: " + cfg.graph_csv);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        std::uint32_t n = 0;
        std::string line;
        while (std::getline(es, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto cols = parse_int_list(line);
            if (cols.size() != 2 || cols[0] < 0 || cols[1] < 0)
                throw ConfigError("graph csv rows must be 'u,v' with u, v >= 0");
            edges.emplace_back(static_cast<std::uint32_t>(cols[0]),
                               static_cast<std::uint32_t>(cols[1]));
            n = std::max({n, static_cast<std::uint32_t>(cols[0]) + 1,
                          static_cast<std::uint32_t>(cols[1]) + 1});
        }
        if (cfg.map_csv.empty())
            throw ConfigError("--map-csv is required with --graph-csv");
        std::ifstream ms(cfg.map_csv);
        if (!ms) throw ConfigError("cannot open map csv: " + cfg.map_csv);
        std::vector<GroupElement> map(n, identity(spec));
        std::vector<bool> seen(n, false);
        while (std::getline(ms, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto cols = parse_int_list(line);
            if (static_cast<int>(cols.size()) != 1 + coord_count(spec))
                throw ConfigError("map csv rows must be 'vertex,coord1,...'");
            if (cols[0] < 0 || static_cast<std::uint32_t>(cols[0]) >= n)
                throw ConfigError("map csv vertex out of range");
            std::vector<std::int64_t> coords(cols.begin() + 1, cols.end());
            map[static_cast<std::size_t>(cols[0])] = make_element(spec, coords);
            seen[static_cast<std::size_t>(cols[0])] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw ConfigError("map csv must cover every graph vertex");
        RoughIsometry ri;
        ri.source = std::make_shared<FiniteGraph>(n, edges, "csv-graph");
        ri.source_center = 0;
        ri.target = spec;
        ri.target_ball = ball_cached(spec, identity(spec), target_radius, cfg.cache_dir);
        ri.map = std::move(map);
        ri.a = cfg.rough_a;
        ri.b = cfg.rough_b;
        return ri;
    }
    const GroupSpec spec = parse_group(cfg.group);
    const int dim = lattice_dim_or_throw(spec, "the built-in subdivision generator");
    const SubdividedLattice s = make_subdivided_lattice(dim, window_radius);
    return subdivision_map(s, target_radius, cfg.cache_dir);
}

void op_rough_check(const RunConfig& cfg, Report& rep) {
    const int window = cfg.radius;
    const int target = cfg.inner > 0 ? cfg.inner : window / 2;
    const RoughIsometry ri = rough_input(cfg, window, target);
    const RoughCheckReport rc = check_rough_isometry(ri);
    rep.payload["source"] = ri.source->name();
    rep.payload["window_radius"] = window;
    rep.payload["target_radius"] = target;
    rep.payload["check"] = check_report_json(rc);
    json rows = json::array();
    for (const RoughViolation& v : rc.sample_violations)
        rows.push_back({v.kind, v.x, v.y, v.lhs, v.rhs});
    rep.payload["series"]["violations"] = make_series({"kind", "x", "y", "lhs", "rhs"}, rows);
    rep.payload["series"]["summary"] = make_series(
        {"pairs_checked", "violations", "max_density_gap"},
        json::array({{rc.pairs_checked, rc.violation_count, rc.max_density_gap}}));
    rep.payload["primary_series"] = "summary";
    rep.ok = rc.ok;
}

void op_rough_extend(const RunConfig& cfg, Report& rep) {
    if (!cfg.graph_csv.empty())
        throw ConfigError("rough-extend supports only the built-in subdivision generator");
    const int window = cfg.radius;
    const int target = cfg.inner > 0 ? cfg.inner : window / 2;
    const GroupSpec spec = parse_group(cfg.group);
    const int dim = lattice_dim_or_throw(spec, "rough-extend");
    const SubdividedLattice s = make_subdivided_lattice(dim, window);
    const RoughIsometry ri = subdivision_map(s, target, cfg.cache_dir);
    const Injectivization inj = injectivize(ri, target, cfg.cache_dir);
    const Extender ext(ri, inj);
    const EProperties props = operator_E_properties(ext, inj, 20, cfg.seed);
    rep.payload["group"] = spec_json(spec);
    rep.payload["window_radius"] = window;
    rep.payload["product_ball_radius"] = target;
    rep.payload["q"] = inj.q;
    rep.payload["max_fiber"] = inj.max_fiber;
    rep.payload["injective"] = inj.injective;
    rep.payload["projection_consistent"] = inj.projection_consistent;
    rep.payload["density_radius"] = ext.density_radius();
    rep.payload["covered_base_radius"] = ext.covered_base_radius();
    rep.payload["defined_count"] = ext.defined_count();
    rep.payload["seed"] = cfg.seed;
    rep.payload["n_fields"] = props.n_fields;
    rep.payload["points_checked"] = props.points_checked;
    rep.payload["max_linearity_defect"] = props.max_linearity_defect;
    rep.payload["linear_exact"] = props.linear_exact;
    rep.payload["operator_injective"] = props.injective;
    rep.payload["direct_exact"] = props.direct_exact;
    rep.payload["sup_norm_bounded"] = props.sup_norm_bounded;
    rep.payload["series"]["extension"] = make_series(
        {"q", "density_radius", "covered_base_radius", "defined_count"},
        json::array({{inj.q, ext.density_radius(), ext.covered_base_radius(),
                      ext.defined_count()}}));
    rep.payload["primary_series"] = "extension";
    rep.ok = inj.injective && inj.projection_consistent && props.linear_exact &&
             props.injective && props.direct_exact && props.sup_norm_bounded;
}

void op_rough_mvl(const RunConfig& cfg, Report& rep) {
    if (!cfg.graph_csv.empty())
        throw ConfigError("rough-mvl supports only the built-in subdivision generator");
    const GroupSpec spec = parse_group(cfg.group);
    const int dim = lattice_dim_or_throw(spec, "rough-mvl");
    RoughSuiteConfig rc;
    rc.dim = dim;
    rc.seed = cfg.seed;
    rc.harm_tol = cfg.harm_tol;
    rc.cache_dir = cfg.cache_dir;
    const int w = cfg.rough_window;
    rc.window_radius = w;
    rc.product_ball_radius = w / 2;
    rc.medium_window_radius = std::min(99, (2 * w / 3) | 1);
    rc.check_window_radius = std::min(31, rc.medium_window_radius);
    // guaranteed covered base radius: floor(w/a - b) minus the a-priori
    // density bound q/2; probe radii stay inside it
    int q = 1;
    for (int i = 0; i < 3; ++i) q *= 2 * dim;
    const int guar = static_cast<int>(std::floor(w / 2.0 - 1.0)) - q / 2;
    const int largest = std::min(40, guar);
    if (largest < 4) throw ConfigError("rough window too small for mean value probes");
    rc.mvl_radii = {std::max(1, largest / 4), std::max(2, largest / 2), largest};
    const int probe_floor = std::max({12, 1, 10}); // 6ab, 2b/a, 10 for (a,b) = (2,1)
    const RoughSuiteResult suite = run_rough_suite(rc);

    rep.payload["group"] = spec_json(spec);
    rep.payload["window_radius"] = rc.window_radius;
    rep.payload["check_window_radius"] = rc.check_window_radius;
    rep.payload["medium_window_radius"] = rc.medium_window_radius;
    rep.payload["product_ball_radius"] = rc.product_ball_radius;
    rep.payload["seed"] = rc.seed;
    rep.payload["harm_tol"] = rc.harm_tol;
    rep.payload["forward_check"] = check_report_json(suite.forward_check);
    rep.payload["inverse_check"] = check_report_json(suite.inverse_check);
    rep.payload["composition_check"] = check_report_json(suite.composition_check);
    rep.payload["q"] = suite.q;
    rep.payload["max_fiber"] = suite.max_fiber;
    rep.payload["injective"] = suite.injective;
    rep.payload["projection_consistent"] = suite.projection_consistent;
    rep.payload["density_radius"] = suite.density_radius;
    rep.payload["e_properties"] = {{"n_fields", suite.e_properties.n_fields},
                                   {"points_checked", suite.e_properties.points_checked},
                                   {"max_linearity_defect", suite.e_properties.max_linearity_defect},
                                   {"linear_exact", suite.e_properties.linear_exact},
                                   {"injective", suite.e_properties.injective},
                                   {"direct_exact", suite.e_properties.direct_exact},
                                   {"sup_norm_bounded", suite.e_properties.sup_norm_bounded}};
    rep.payload["probe_floor"] = probe_floor;
    rep.payload["probe_below_floor"] = rc.mvl_radii.front() < probe_floor;
    rep.payload["max_harmonic_defect"] = suite.max_harmonic_defect;
    rep.payload["mvl_stability"] = suite.mvl_stability;
    json mrows = json::array();
    for (std::size_t i = 0; i < suite.mvl_radii.size(); ++i)
        mrows.push_back({suite.mvl_radii[i], suite.mvl_max_by_radius[i]});
    rep.payload["series"]["mvl"] = make_series({"R", "max_constant"}, mrows);
    json srows = json::array();
    for (std::size_t i = 0; i < suite.sandwich.grid.size(); ++i)
        srows.push_back({suite.sandwich.grid[i], suite.sandwich.ratios[i]});
    rep.payload["sandwich"] = {{"c1", suite.sandwich.c1},
                               {"c2", suite.sandwich.c2},
                               {"c2_floor", suite.sandwich.c2_floor},
                               {"ok", suite.sandwich.ok}};
    rep.payload["series"]["sandwich"] = make_series({"R", "ratio"}, srows);
    rep.payload["series"]["summary"] = make_series(
        {"q", "injective", "mvl_stability", "sandwich_c2"},
        json::array({{suite.q, suite.injective, suite.mvl_stability, suite.sandwich.c2}}));
    rep.payload["primary_series"] = "mvl";
    rep.ok = suite.ok;
}

void op_inequalities(const RunConfig& cfg, Report& rep) {
    const GroupSpec spec = parse_group(cfg.group);
    battery_payload(cfg, spec, rep);
    const bool battery_ok = rep.ok;

    // hand examples: mean value of x1 at p = (1,0,..), R = 1; Harnack of
    // x1 + 10 on the unit ball about the identity
    std::vector<std::int64_t> coords(static_cast<std::size_t>(coord_count(spec)), 0);
    coords[0] = 1;
    const auto mv_ball = ball_cached(spec, make_element(spec, coords), 2, cfg.cache_dir);
    const ScalarField mv_u =
        make_polynomial_field(mv_ball, parse_polynomial("x1", coord_count(spec)));
    const double mv = mean_value_constant(mv_u, 1, cfg.harm_tol);

    const auto h_ball = ball_cached(spec, identity(spec), 1, cfg.cache_dir);
    const ScalarField h_u =
        make_polynomial_field(h_ball, parse_polynomial("x1+10", coord_count(spec)));
    const double harnack = harnack_ratio(h_u, 1);

    rep.payload["mean_value_example"] = {{"function", "x1"},
                                         {"center", element_to_string(mv_ball->center())},
                                         {"R", 1},
                                         {"constant", mv}};
    rep.payload["harnack_example"] = {{"function", "x1+10"}, {"n", 1}, {"ratio", harnack}};
    rep.ok = battery_ok && harnack >= 1.0;
}

using OpFn = void (*)(const RunConfig&, Report&);

OpFn find_op(const std::string& op) {
    if (op == "growth") return &op_growth;
    if (op == "pansu") return &op_pansu;
    if (op == "rvc") return &op_rvc;
    if (op == "dirichlet") return &op_dirichlet;
    if (op == "poincare") return &op_poincare;
    if (op == "meanvalue") return &op_meanvalue;
    if (op == "harnack") return &op_harnack;
    if (op == "dim") return &op_dim;
    if (op == "oracle") return &op_oracle;
    if (op == "rough-check") return &op_rough_check;
    if (op == "rough-extend") return &op_rough_extend;
    if (op == "rough-mvl") return &op_rough_mvl;
    return nullptr;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::vector<std::pair<double, std::vector<int>>> parse_polynomial(const std::string& text,
                                                                  int vars) {
    if (vars < 1 || vars > 8) throw ConfigError("polynomial variable count out of range");
    std::vector<std::pair<double, std::vector<int>>> terms;
    std::size_t i = 0;
    const auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (i == text.size()) throw ConfigError("empty polynomial");
    while (i < text.size()) {
        double sign = 1.0;
        skip_ws();
        while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            if (text[i] == '-') sign = -sign;
            ++i;
            skip_ws();
        }
        double coeff = sign;
        std::vector<int> expo(static_cast<std::size_t>(vars), 0);
        bool saw_factor = false;
        while (i < text.size()) {
            skip_ws();
            if (i < text.size() &&
                (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
                char* end = nullptr;
                const double v = std::strtod(text.c_str() + i, &end);
                if (end == text.c_str() + i) throw ConfigError("bad number in polynomial");
                i = static_cast<std::size_t>(end - text.c_str());
                coeff *= v;
                saw_factor = true;
            } else if (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
                const char name = text[i];
                ++i;
                int var = -1;
                if (name == 'x' && i < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[i]))) {
                    std::size_t pos = 0;
                    var = std::stoi(text.substr(i), &pos) - 1;
                    i += pos;
                } else {
                    const std::string letters = "xyzw";
                    const std::size_t k = letters.find(name);
                    if (k == std::string::npos)
                        throw ConfigError(std::string("unknown variable '") + name +
                                          "' in polynomial");
                    var = static_cast<int>(k);
                }
                if (var < 0 || var >= vars)
                    throw ConfigError("variable index out of range for this group");
                int power = 1;
                if (i < text.size() && text[i] == '^') {
                    ++i;
                    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                        throw ConfigError("exponent must be a nonnegative integer");
                    std::size_t pos = 0;
                    power = std::stoi(text.substr(i), &pos);
                    i += pos;
                }
                expo[static_cast<std::size_t>(var)] += power;
                saw_factor = true;
            } else {
                break;
            }
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                continue;
            }
            if (i < text.size() &&
                (std::isalpha(static_cast<unsigned char>(text[i])) ||
                 std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
                continue; // implicit multiplication
            break;
        }
        if (!saw_factor) throw ConfigError("malformed polynomial term");
        terms.emplace_back(coeff, std::move(expo));
        skip_ws();
        if (i < text.size() && text[i] != '+' && text[i] != '-')
            throw ConfigError(std::string("unexpected character '") + text[i] + "' in polynomial");
    }
    return terms;
}

Report run_operation(const RunConfig& cfg) {
    cfg.validate();
    kernels::set_thread_count(cfg.jobs);
    if (cfg.op == "all") return pipeline_all(cfg);
    const OpFn fn = find_op(cfg.op);
    if (!fn) throw ConfigError("unknown operation: " + cfg.op);
    Report rep;
    rep.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();
    fn(cfg, rep);
    rep.timings["total_seconds"] = seconds_since(t0);
    return rep;
}

Report pipeline_all(const RunConfig& cfg) {
    cfg.validate();
    kernels::set_thread_count(cfg.jobs);
    Report rep;
    rep.config = cfg;
    rep.ok = true;
    json stages = json::object();
    json stage_ok = json::object();
    std::vector<std::string> order;
    const auto total0 = std::chrono::steady_clock::now();

    const auto run_stage = [&](const std::string& name, OpFn fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Report sub;
        sub.config = cfg;
        try {
            fn(cfg, sub);
            stages[name] = sub.payload;
            stage_ok[name] = sub.ok;
            if (!sub.ok) rep.ok = false;
        } catch (const std::exception& e) {
            stages[name] = json{{"error", e.what()}};
            stage_ok[name] = false;
            rep.ok = false;
        }
        order.push_back(name);
        rep.timings[name] = seconds_since(t0);
    };

    run_stage("growth", &op_growth);
    run_stage("rvc", &op_rvc);
    run_stage("dim", &op_dim);
    run_stage("inequalities", &op_inequalities);
    if (cfg.rough_stage) run_stage("rough", &op_rough_mvl);

    rep.payload["stages"] = stages;
    rep.payload["stage_ok"] = stage_ok;
    rep.payload["stage_order"] = order;
    rep.timings["total_seconds"] = seconds_since(total0);
    return rep;
}

} // namespace hdim
