#include "hdim/dimension.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hdim/kernels.hpp"

namespace hdim {

GramMatrix GramMatrix::normalized() const {
    GramMatrix out = *this;
    std::vector<double> scale(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        const double d = at(i, i);
        scale[static_cast<std::size_t>(i)] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            out.a[static_cast<std::size_t>(i) * k + j] =
                at(i, j) * scale[static_cast<std::size_t>(i)] * scale[static_cast<std::size_t>(j)];
    return out;
}

GramMatrix gram(const std::vector<ScalarField>& fields, int R) {
    if (fields.empty()) throw DimensionError("gram needs at least one field");
    const auto& ball = fields.front().ball;
    for (const auto& f : fields) {
        f.validate();
        if (f.ball.get() != ball.get())
            throw DimensionError("gram fields must share one ball instance");
    }
    if (R < 0 || R > ball->radius()) throw DimensionError("gram radius out of range");
    GramMatrix g;
    g.k = static_cast<int>(fields.size());
    g.R = R;
    std::vector<const double*> ptrs;
    ptrs.reserve(fields.size());
    for (const auto& f : fields) ptrs.push_back(f.values.data());
    g.a = kernels::gram_prefix(ptrs, ball->count_within(R));
    return g;
}

int numerical_rank(const GramMatrix& g, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DimensionError("rel_tol must be in (0,1)");
    if (g.k == 0) return 0;
    Eigen::MatrixXd m(g.k, g.k);
    for (int i = 0; i < g.k; ++i)
        for (int j = 0; j < g.k; ++j) m(i, j) = g.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw DimensionError("eigenvalue solve failed");
    const auto& ev = es.eigenvalues();
    const double lambda_max = ev(g.k - 1);
    if (!(lambda_max > 0.0)) return 0;
    int rank = 0;
    for (int i = 0; i < g.k; ++i)
        if (ev(i) > rel_tol * lambda_max) ++rank;
    return rank;
}

PolynomialTable polynomial_table(int vars, int degree) {
    if (vars < 1 || degree < 0) throw DimensionError("polynomial table needs vars >= 1, degree >= 0");
    PolynomialTable t;
    t.vars = vars;
    t.degree = degree;
    t.monomials = monomials_up_to(vars, degree);
    const int m = static_cast<int>(t.monomials.size());
    std::map<std::vector<int>, int> index;
    for (int j = 0; j < m; ++j) index.emplace(t.monomials[static_cast<std::size_t>(j)], j);

    // binomial table up to `degree`
    std::vector<std::vector<BigInt>> binom(static_cast<std::size_t>(degree) + 1);
    for (int a = 0; a <= degree; ++a) {
        binom[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(a) + 1, 1);
        for (int b = 1; b < a; ++b)
            binom[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)];
    }

    t.action.assign(static_cast<std::size_t>(m) * m, BigInt(0));
    for (int j = 0; j < m; ++j) {
        const auto& alpha = t.monomials[static_cast<std::size_t>(j)];
        // sum over axes: (x_i+1)^a + (x_i-1)^a - 2 x_i^a; only terms with
        // k == a (mod 2), k < a survive, each with coefficient 2 C(a,k)
        for (int i = 0; i < vars; ++i) {
            const int a = alpha[static_cast<std::size_t>(i)];
            for (int kk = a % 2; kk < a; kk += 2) {
                std::vector<int> beta = alpha;
                beta[static_cast<std::size_t>(i)] = kk;
                const auto it = index.find(beta);
                if (it == index.end()) throw DimensionError("monomial index missing");
                t.action[static_cast<std::size_t>(it->second) * m + j] +=
                    2 * binom[static_cast<std::size_t>(a)][static_cast<std::size_t>(kk)];
            }
        }
    }
    return t;
}

namespace {

// Fraction-free (Bareiss) row echelon rank of an integer matrix.
int bareiss_rank(std::vector<BigInt> a, int rows, int cols) {
    int rank = 0;
    BigInt prev = 1;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pivot = -1;
        for (int r = row; r < rows; ++r)
            if (a[static_cast<std::size_t>(r) * cols + col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != row)
            for (int c = 0; c < cols; ++c)
                std::swap(a[static_cast<std::size_t>(pivot) * cols + c],
                          a[static_cast<std::size_t>(row) * cols + c]);
        const BigInt p = a[static_cast<std::size_t>(row) * cols + col];
        for (int r = row + 1; r < rows; ++r) {
            const BigInt lead = a[static_cast<std::size_t>(r) * cols + col];
            for (int c = col; c < cols; ++c) {
                BigInt v = a[static_cast<std::size_t>(r) * cols + c] * p -
                           lead * a[static_cast<std::size_t>(row) * cols + c];
                a[static_cast<std::size_t>(r) * cols + c] = v / prev; // exact division
            }
        }
        prev = p;
        ++row;
        ++rank;
    }
    return rank;
}

} // namespace

int symbolic_kernel_dim(int vars, int degree) {
    PolynomialTable t = polynomial_table(vars, degree);
    const int m = static_cast<int>(t.monomials.size());
    return m - bareiss_rank(t.action, m, m);
}

std::vector<std::vector<BigRat>> symbolic_kernel_basis(int vars, int degree) {
    PolynomialTable t = polynomial_table(vars, degree);
    const int m = static_cast<int>(t.monomials.size());
    std::vector<std::vector<BigRat>> a(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        a[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(m));
        for (int c = 0; c < m; ++c)
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                BigRat(t.action[static_cast<std::size_t>(r) * m + c]);
    }
    // rational RREF with recorded pivot columns
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < m && row < m; ++col) {
        int pivot = -1;
        for (int r = row; r < m; ++r)
            if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[static_cast<std::size_t>(pivot)], a[static_cast<std::size_t>(row)]);
        const BigRat p = a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
        for (int c = 0; c < m; ++c) a[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] /= p;
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            const BigRat f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (f == 0) continue;
            for (int c = 0; c < m; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<bool> is_pivot(static_cast<std::size_t>(m), false);
    for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<std::vector<BigRat>> basis;
    for (int free = 0; free < m; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<BigRat> v(static_cast<std::size_t>(m), BigRat(0));
        v[static_cast<std::size_t>(free)] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r)
            v[static_cast<std::size_t>(pivot_col[r])] =
                -a[r][static_cast<std::size_t>(free)];
        basis.push_back(std::move(v));
    }
    // internal cross-check against the fraction-free rank
    if (static_cast<int>(basis.size()) != symbolic_kernel_dim(vars, degree))
        throw DimensionError("kernel basis size disagrees with fraction-free rank");
    return basis;
}

CandidateSet candidate_fields(const GroupSpec& spec, int degree, int R_outer, int R_inner,
                              const SolverOptions& solver, const std::string& cache_dir,
                              std::uint64_t max_vertices) {
    if (degree < 0) throw DimensionError("degree must be >= 0");
    if (R_inner < 1 || R_outer < 3 * R_inner)
        throw DimensionError("candidate_fields needs R_outer >= 3 * R_inner >= 3");
    CandidateSet out;
    out.R_outer = R_outer;
    out.R_inner = R_inner;
    auto outer = ball_cached(spec, identity(spec), R_outer, cache_dir, max_vertices);
    out.inner_ball = ball_cached(spec, identity(spec), R_inner, cache_dir, max_vertices);
    const VertexSubset sphere = boundary(*outer, R_outer - 1);
    const auto monos = monomials_up_to(coord_count(spec), degree);
    for (const auto& exps : monos) {
        std::vector<double> data;
        data.reserve(sphere.indices.size());
        for (const std::uint32_t idx : sphere.indices)
            data.push_back(monomial_value(outer->vertex(idx), exps));
        DirichletSolution sol = solve_dirichlet(outer, R_outer - 1, data, solver);
        if (!sol.converged)
            throw DimensionError("candidate Dirichlet solve failed to converge for " +
                                 monomial_label(exps));
        out.fields.push_back(restrict_to_ball(sol.field, out.inner_ball));
        out.labels.push_back(monomial_label(exps));
        out.solve_residuals.push_back(sol.residual);
    }
    return out;
}

std::string validate_dimension_request(const GroupSpec& spec, int degree,
                                       const std::vector<int>& schedule) {
    if (degree < 0) return "degree must be >= 0";
    if (degree > 12) return "degree too large for the candidate construction (max 12)";
    if (schedule.size() < 2) return "schedule needs at least two radii";
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) return "schedule must be strictly increasing";
    if (schedule.front() < 2) return "schedule radii must be >= 2";
    const double n_candidates =
        static_cast<double>(monomials_up_to(coord_count(spec), degree).size());
    // smallest ball must dominate the candidate count, else ranks are vacuous
    const double smallest = 2.0 * schedule.front() + 1.0; // |B(r)| >= 2r+1 for infinite groups
    if (n_candidates > smallest)
        return "schedule insufficient for this degree: " + std::to_string(static_cast<int>(n_candidates)) +
               " candidates exceed the guaranteed ball size at the smallest radius";
    return "";
}

DimensionEstimate estimate_dimension(const GroupSpec& spec, int degree,
                                     const std::vector<int>& schedule, double rel_tol,
                                     int buffer_factor, const SolverOptions& solver,
                                     const std::string& cache_dir, std::uint64_t max_vertices) {
    const std::string err = validate_dimension_request(spec, degree, schedule);
    if (!err.empty()) throw DimensionError(err);
    if (buffer_factor < 3) throw DimensionError("buffer factor must be >= 3");
    DimensionEstimate est;
    est.degree = degree;
    est.schedule = schedule;
    est.rel_tol = rel_tol;
    est.buffer_factor = buffer_factor;

    const int R_inner = schedule.back();
    const int R_outer = buffer_factor * R_inner;
    CandidateSet cands =
        candidate_fields(spec, degree, R_outer, R_inner, solver, cache_dir, max_vertices);
    for (double r : cands.solve_residuals)
        est.max_solve_residual = std::max(est.max_solve_residual, r);

    const std::vector<std::pair<std::string, double>> tol_grid = {
        {"1e-9", 1e-9}, {"1e-8", 1e-8}, {"1e-7", 1e-7}, {"1e-6", 1e-6}};
    for (const auto& [label, t] : tol_grid) est.ranks_by_tol.emplace(label, std::vector<int>{});
    for (const int R : schedule) {
        const GramMatrix g = gram(cands.fields, R).normalized();
        est.ranks.push_back(numerical_rank(g, rel_tol));
        for (const auto& [label, t] : tol_grid)
            est.ranks_by_tol[label].push_back(numerical_rank(g, t));
    }
    const std::size_t ns = est.ranks.size();
    est.saturated = ns >= 2 && est.ranks[ns - 1] == est.ranks[ns - 2];
    if (est.saturated) est.saturated_rank = est.ranks[ns - 1];
    if (spec.kind == GroupKind::Lattice)
        est.oracle = symbolic_kernel_dim(spec.lattice_dim, degree);
    return est;
}

EnergyProbe energy_probe(const std::vector<ScalarField>& fields, int R, double beta_scale,
                         double rel_tol) {
    if (fields.empty()) throw DimensionError("energy_probe needs at least one field");
    if (!(beta_scale >= 1.0)) throw DimensionError("beta scale must be >= 1");
    EnergyProbe probe;
    probe.k = static_cast<int>(fields.size());
    probe.R = R;
    probe.R_big = static_cast<int>(std::llround(beta_scale * R));
    const auto& ball = fields.front().ball;
    if (probe.R_big > ball->radius())
        throw DimensionError("fields are not defined out to beta * R");
    const GramMatrix g_small = gram(fields, R);
    const GramMatrix g_big = gram(fields, probe.R_big);

    Eigen::MatrixXd A(probe.k, probe.k), B(probe.k, probe.k);
    for (int i = 0; i < probe.k; ++i)
        for (int j = 0; j < probe.k; ++j) {
            A(i, j) = g_small.at(i, j);
            B(i, j) = g_big.at(i, j);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw DimensionError("eigenvalue solve failed");
    probe.lambda_min_big = es.eigenvalues()(0);
    probe.lambda_max_big = es.eigenvalues()(probe.k - 1);
    if (!(probe.lambda_max_big > 0.0) || probe.lambda_min_big <= rel_tol * probe.lambda_max_big)
        throw DimensionError(
            "large-scale Gram is numerically singular: R is below the admissible scale "
            "for this family");
    // basis-independent: trace(G_R G_big^{-1}) via the Cholesky factor of G_big
    const Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success)
        throw DimensionError("large-scale Gram is not positive definite");
    probe.ratio = llt.solve(A).trace();
    return probe;
}

} // namespace hdim
