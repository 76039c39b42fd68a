#include "hdim/inequalities.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hdim {

double poincare_constant(const ScalarField& u, int n) {
    u.validate();
    const CayleyBall& ball = *u.ball;
    if (n < 1) throw InequalityError("poincare_constant needs n >= 1");
    if (ball.radius() < 3 * n)
        throw InequalityError("poincare_constant needs the field on a ball of radius 3n");
    const std::uint32_t n_small = ball.count_within(n);
    long double mean = 0.0L;
    for (std::uint32_t i = 0; i < n_small; ++i) mean += u.values[i];
    mean /= n_small;
    long double lhs = 0.0L;
    for (std::uint32_t i = 0; i < n_small; ++i) {
        const long double d = u.values[i] - mean;
        lhs += d * d;
    }
    if (lhs == 0.0L) return 0.0;

    const std::uint32_t n_big = ball.count_within(3 * n);
    long double energy = 0.0L;
    for (std::uint32_t i = 0; i < n_big; ++i) {
        for (const std::uint32_t* p = ball.neighbors_begin(i); p != ball.neighbors_end(i); ++p) {
            if (*p <= i || *p >= n_big) continue; // unordered edges inside B(3n)
            const long double d = u.values[i] - u.values[*p];
            energy += d * d;
        }
    }
    if (energy == 0.0L)
        throw InequalityError("nonconstant field with zero edge energy on a connected ball");
    return static_cast<double>(lhs / (static_cast<long double>(n) * n * energy));
}

double mean_value_constant(const ScalarField& u, int R, double harm_tol) {
    u.validate();
    const CayleyBall& ball = *u.ball;
    if (R < 0 || R > ball.radius()) throw InequalityError("mean_value_constant: R out of range");
    const int check_radius = std::min(R, ball.radius() - 1);
    if (check_radius >= 0) {
        const HarmonicCheck hc = is_harmonic(u, check_radius, harm_tol);
        if (!hc.ok) {
            std::ostringstream os;
            os << "field is not harmonic on the requested ball (|L u| = " << hc.worst_abs
               << " at vertex " << hc.worst_index << ")";
            throw InequalityError(os.str());
        }
    }
    const std::uint32_t m = ball.count_within(R);
    long double sum_sq = 0.0L;
    for (std::uint32_t i = 0; i < m; ++i)
        sum_sq += static_cast<long double>(u.values[i]) * u.values[i];
    if (sum_sq == 0.0L)
        throw InequalityError("mean_value_constant undefined for the zero field");
    const long double up = u.values[0];
    return static_cast<double>(up * up * static_cast<long double>(m) / sum_sq);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

double seeded_uniform(std::uint64_t& state) {
    // splitmix64 step, top 53 bits as a dyadic in [0,1)
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 11) * (1.0 / 9007199254740992.0);
    return 2.0 * u - 1.0;
}

BatteryReport run_battery(const GroupSpec& spec, const BatteryConfig& config) {
    if (config.scales.empty()) throw InequalityError("battery needs at least one scale");
    if (config.n_random < 0) throw InequalityError("battery random count must be >= 0");
    BatteryReport report;
    report.config = config;
    const auto monos = monomials_up_to(coord_count(spec), config.max_monomial_degree);
    if (monos.empty() && config.n_random == 0)
        throw InequalityError("battery configuration produces no fields");

    for (const int n : config.scales) {
        if (n < 1) throw InequalityError("battery scales must be >= 1");
        BatteryRow row;
        row.scale = n;
        auto ball = ball_cached(spec, identity(spec), 3 * n, config.cache_dir,
                                config.max_vertices);
        std::vector<ScalarField> fields;
        std::vector<bool> want_mv;
        for (const auto& exps : monos) {
            fields.push_back(make_monomial_field(ball, exps));
            row.field_labels.push_back(monomial_label(exps));
            want_mv.push_back(true);
        }
        for (int k = 0; k < config.n_random; ++k) {
            const VertexSubset sphere = boundary(*ball, 3 * n - 1);
            std::vector<double> data(sphere.indices.size());
            std::uint64_t state = mix_seed(config.seed, static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(k));
            for (double& v : data) v = seeded_uniform(state);
            DirichletSolution sol = solve_dirichlet(ball, 3 * n - 1, data);
            if (!sol.converged)
                throw InequalityError("battery Dirichlet solve failed to converge");
            fields.push_back(std::move(sol.field));
            row.field_labels.push_back("random#" + std::to_string(k));
            want_mv.push_back(true);
        }

        row.max_poincare = 0.0;
        row.max_mean_value = 0.0;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const double pc = poincare_constant(fields[f], n);
            row.poincare_by_field.push_back(pc);
            row.max_poincare = std::max(row.max_poincare, pc);
            double mv = std::numeric_limits<double>::quiet_NaN();
            if (want_mv[f]) {
                try {
                    mv = mean_value_constant(fields[f], n, config.harm_tol);
                    row.max_mean_value = std::max(row.max_mean_value, mv);
                } catch (const InequalityError&) {
                    // non-harmonic monomial: mean-value row stays NaN
                }
            }
            row.mean_value_by_field.push_back(mv);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace hdim
