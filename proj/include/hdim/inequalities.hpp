#pragma once

#include <string>
#include <vector>

#include "hdim/harmonic.hpp"

namespace hdim {

class InequalityError : public std::runtime_error {
public:
    explicit InequalityError(const std::string& what) : std::runtime_error(what) {}
};

// Smallest C with sum_{B(n)} (u - mean_{B(n)} u)^2 <= C n^2 E(u) for this u,
// where E(u) sums (u(x)-u(y))^2 over unordered edges of B(3n). Returns 0 for
// a constant field. The field's ball must have radius >= 3n.
double poincare_constant(const ScalarField& u, int n);

// C with u(p)^2 <= C |B(R)|^{-1} sum_{B(R)} u^2 at the ball center, i.e.
// u(p)^2 |B(R)| / sum u^2. Requires u harmonic on B(min(R, radius-1)) at
// harm_tol; errors when u vanishes identically on B(R).
double mean_value_constant(const ScalarField& u, int R, double harm_tol = 1e-8);

struct BatteryConfig {
    std::vector<int> scales = {2, 4, 8};
    int max_monomial_degree = 2;
    int n_random = 5;
    std::uint64_t seed = 0x4841524DULL;
    double harm_tol = 1e-8;
    std::string cache_dir;
    std::uint64_t max_vertices = kDefaultVertexCap;
};

struct BatteryRow {
    int scale = 0;
    double max_poincare = 0.0;
    double max_mean_value = 0.0;
    std::vector<std::string> field_labels;
    std::vector<double> poincare_by_field;
    std::vector<double> mean_value_by_field; // NaN where the field is not harmonic
};

struct BatteryReport {
    BatteryConfig config;
    std::vector<BatteryRow> rows;
};

// Runs both constants per scale over monomial fields up to the configured
// degree plus seeded random-boundary Dirichlet solves on B(3n).
BatteryReport run_battery(const GroupSpec& spec, const BatteryConfig& config);

// Deterministic dyadic uniform draw in [-1, 1), independent of the standard
// library's distribution implementation.
double seeded_uniform(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

} // namespace hdim
