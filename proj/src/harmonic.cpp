#include "hdim/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hdim/kernels.hpp"

namespace hdim {

void ScalarField::validate() const {
    if (!ball) throw HarmonicError("field has no ball");
    if (values.size() != ball->size()) throw HarmonicError("field size does not match ball");
    for (double v : values)
        if (!std::isfinite(v)) throw HarmonicError("field contains a non-finite value");
}

ScalarField make_constant_field(std::shared_ptr<const CayleyBall> ball, double c) {
    ScalarField f;
    f.values.assign(ball->size(), c);
    f.ball = std::move(ball);
    return f;
}

double monomial_value(const GroupElement& g, const std::vector<int>& exponents) {
    double v = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        const double x = static_cast<double>(g[static_cast<int>(i)]);
        for (int e = 0; e < exponents[i]; ++e) v *= x;
    }
    return v;
}

ScalarField make_monomial_field(std::shared_ptr<const CayleyBall> ball,
                                const std::vector<int>& exponents) {
    if (static_cast<int>(exponents.size()) != coord_count(ball->spec()))
        throw HarmonicError("monomial exponent arity does not match the group");
    ScalarField f;
    f.values.resize(ball->size());
    for (std::uint32_t i = 0; i < ball->size(); ++i)
        f.values[i] = monomial_value(ball->vertex(i), exponents);
    f.ball = std::move(ball);
    return f;
}

ScalarField make_polynomial_field(
    std::shared_ptr<const CayleyBall> ball,
    const std::vector<std::pair<double, std::vector<int>>>& terms) {
    ScalarField f;
    f.values.assign(ball->size(), 0.0);
    for (const auto& [coef, exps] : terms) {
        if (static_cast<int>(exps.size()) != coord_count(ball->spec()))
            throw HarmonicError("monomial exponent arity does not match the group");
        for (std::uint32_t i = 0; i < ball->size(); ++i)
            f.values[i] += coef * monomial_value(ball->vertex(i), exps);
    }
    f.ball = std::move(ball);
    return f;
}

std::vector<std::vector<int>> monomials_up_to(int vars, int max_degree) {
    if (vars < 1) throw HarmonicError("monomials need at least one variable");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(vars), 0);
    const std::function<void(int, int)> rec = [&](int pos, int total) {
        if (pos == vars) {
            if (total == 0) out.push_back(cur);
            return;
        }
        for (int e = total; e >= 0; --e) {
            cur[static_cast<std::size_t>(pos)] = e;
            rec(pos + 1, total - e);
        }
        cur[static_cast<std::size_t>(pos)] = 0;
    };
    for (int deg = 0; deg <= max_degree; ++deg) rec(0, deg);
    return out;
}

std::string monomial_label(const std::vector<int>& exponents) {
    std::string s;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] == 0) continue;
        if (!s.empty()) s += '*';
        s += 'x';
        s += std::to_string(i);
        if (exponents[i] > 1) {
            s += '^';
            s += std::to_string(exponents[i]);
        }
    }
    return s.empty() ? "1" : s;
}

double laplacian(const ScalarField& u, std::uint32_t index) {
    const CayleyBall& ball = *u.ball;
    if (ball.dist(index) + 1 > ball.radius())
        throw HarmonicError("laplacian needs all neighbors inside the ball");
    long double acc = 0.0L;
    const long double ux = u.values[index];
    for (const std::uint32_t* p = ball.neighbors_begin(index); p != ball.neighbors_end(index); ++p)
        acc += static_cast<long double>(u.values[*p]) - ux;
    return static_cast<double>(acc);
}

HarmonicCheck is_harmonic(const ScalarField& u, int interior_radius, double tol) {
    const CayleyBall& ball = *u.ball;
    if (interior_radius < 0 || interior_radius + 1 > ball.radius())
        throw HarmonicError("harmonicity check radius must satisfy r + 1 <= ball radius");
    HarmonicCheck c;
    c.ok = true;
    const std::uint32_t n = ball.count_within(interior_radius);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double a = std::fabs(laplacian(u, i));
        if (a > c.worst_abs) {
            c.worst_abs = a;
            c.worst_index = i;
        }
    }
    c.ok = c.worst_abs <= tol;
    return c;
}

namespace {

kernels::LaplaceSystem build_system(const CayleyBall& ball, int r,
                                    const std::vector<double>& boundary_values) {
    const std::uint32_t n_int = ball.count_within(r);
    const std::uint32_t n_closure = ball.count_within(r + 1);
    kernels::LaplaceSystem sys;
    sys.n = n_int;
    sys.offsets.assign(n_int + 1, 0);
    sys.diag.assign(n_int, 0.0);
    sys.rhs.assign(n_int, 0.0);
    sys.cols.reserve(static_cast<std::size_t>(n_int) * ball.generators().size());
    const std::uint32_t boundary_base = n_int;
    for (std::uint32_t i = 0; i < n_int; ++i) {
        long double rhs = 0.0L;
        std::uint32_t deg = 0;
        for (const std::uint32_t* p = ball.neighbors_begin(i); p != ball.neighbors_end(i); ++p) {
            ++deg;
            if (*p < n_int) {
                sys.cols.push_back(*p);
            } else if (*p < n_closure) {
                rhs += boundary_values[*p - boundary_base];
            } else {
                throw HarmonicError("interior vertex adjacent to a vertex outside the closure");
            }
        }
        sys.offsets[i + 1] = static_cast<std::uint32_t>(sys.cols.size());
        sys.diag[i] = static_cast<double>(deg);
        sys.rhs[i] = static_cast<double>(rhs);
    }
    return sys;
}

} // namespace

DirichletSolution solve_dirichlet(std::shared_ptr<const CayleyBall> ball, int r,
                                  const std::vector<double>& boundary_values,
                                  const SolverOptions& options) {
    const CayleyBall& B = *ball;
    if (r < 0 || r + 1 > B.radius())
        throw HarmonicError("solve_dirichlet needs r + 1 <= ball radius");
    const std::uint32_t n_int = B.count_within(r);
    const std::uint32_t n_closure = B.count_within(r + 1);
    const std::uint32_t n_boundary = n_closure - n_int;
    if (boundary_values.size() != n_boundary)
        throw HarmonicError("boundary value count does not match the sphere layer");
    for (double v : boundary_values)
        if (!std::isfinite(v)) throw HarmonicError("non-finite boundary value");

    DirichletSolution sol;
    sol.interior_radius = r;

    double bmin = boundary_values.empty() ? 0.0 : boundary_values[0];
    double bmax = bmin, babs = 0.0;
    long double bsum = 0.0L;
    for (double v : boundary_values) {
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
        babs = std::max(babs, std::fabs(v));
        bsum += v;
    }
    sol.tol = options.tol >= 0.0 ? options.tol : std::max(1e-12 * babs, 1e-14);

    kernels::LaplaceSystem sys = build_system(B, r, boundary_values);
    sys.boundary_min = bmin;
    sys.boundary_max = bmax;
    sys.boundary_abs_max = babs;

    const double mean = n_boundary ? static_cast<double>(bsum / n_boundary) : 0.0;
    std::vector<double> x(n_int, mean);

    const int max_cg = options.max_cg_iterations > 0 ? options.max_cg_iterations
                                                     : 500 + 24 * (r + 1);
    double best_residual = std::numeric_limits<double>::infinity();
    for (int round = 0; round < std::max(1, options.max_refinement_rounds); ++round) {
        // refinement: solve A delta = (rhs - A x) on top of the current iterate
        kernels::LaplaceSystem corr = sys;
        std::vector<double> delta(n_int, 0.0);
        {
            std::vector<double> ax(n_int);
            kernels::matvec(sys, x.data(), ax.data());
            for (std::uint32_t i = 0; i < n_int; ++i) {
                long double acc = static_cast<long double>(sys.rhs[i]) - ax[i];
                corr.rhs[i] = static_cast<double>(acc);
            }
        }
        const kernels::CgResult cg =
            kernels::conjugate_gradient(corr, delta, sol.tol / 2.0, max_cg);
        sol.cg_iterations += cg.iterations;
        for (std::uint32_t i = 0; i < n_int; ++i) x[i] += delta[i];
        sol.refinement_rounds = round + 1;
        const double res = kernels::residual_inf(sys, x.data());
        if (res <= sol.tol) {
            best_residual = res;
            break;
        }
        if (res >= best_residual * 0.5) {
            // stalled; polish with projected sweeps that respect the range
            kernels::gauss_seidel_clamped(sys, x, 200, bmin, bmax);
            sol.used_fallback = true;
            const double res2 = kernels::residual_inf(sys, x.data());
            best_residual = std::min(res2, best_residual);
            if (res2 <= sol.tol) break;
        } else {
            best_residual = res;
        }
    }

    if (options.clamp_to_boundary_range && n_boundary > 0)
        for (std::uint32_t i = 0; i < n_int; ++i) x[i] = std::clamp(x[i], bmin, bmax);

    sol.residual = kernels::residual_inf(sys, x.data());
    if (sol.residual > sol.tol && options.clamp_to_boundary_range) {
        kernels::gauss_seidel_clamped(sys, x, 100, bmin, bmax);
        sol.residual = kernels::residual_inf(sys, x.data());
    }
    sol.converged = sol.residual <= sol.tol;

    sol.field.ball = ball;
    sol.field.values.assign(B.size(), 0.0);
    for (std::uint32_t i = 0; i < n_int; ++i) sol.field.values[i] = x[i];
    for (std::uint32_t i = n_int; i < n_closure; ++i)
        sol.field.values[i] = boundary_values[i - n_int];
    return sol;
}

ScalarField restrict_to_ball(const ScalarField& u, std::shared_ptr<const CayleyBall> smaller) {
    const CayleyBall& big = *u.ball;
    const CayleyBall& small = *smaller;
    if (small.spec() != big.spec() || !(small.center() == big.center()))
        throw HarmonicError("restriction requires a concentric ball of the same group");
    if (small.radius() > big.radius()) throw HarmonicError("restriction target is larger");
    const std::uint32_t n = small.size();
    if (n > big.size() || big.count_within(small.radius()) != n)
        throw HarmonicError("ball layer counts disagree");
    // both enumerations order by (layer, lexicographic), so indices agree
    for (std::uint32_t probe : {0u, n / 2, n - 1})
        if (!(small.vertex(probe) == big.vertex(probe)))
            throw HarmonicError("ball enumeration order mismatch");
    ScalarField f;
    f.ball = std::move(smaller);
    f.values.assign(u.values.begin(), u.values.begin() + n);
    return f;
}

double harnack_ratio(const ScalarField& u, int n) {
    const CayleyBall& ball = *u.ball;
    if (n < 0 || n > ball.radius()) throw HarmonicError("harnack_ratio radius out of range");
    for (double v : u.values)
        if (!(v > 0.0)) throw PositivityError("harnack_ratio requires a strictly positive field");
    const std::uint32_t m = ball.count_within(n);
    double lo = u.values[0], hi = u.values[0];
    for (std::uint32_t i = 1; i < m; ++i) {
        lo = std::min(lo, u.values[i]);
        hi = std::max(hi, u.values[i]);
    }
    return hi / lo;
}

} // namespace hdim
