#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdim/ball.hpp"
#include "hdim/groups.hpp"

namespace hdim {

class VolumeError : public std::runtime_error {
public:
    explicit VolumeError(const std::string& what) : std::runtime_error(what) {}
};

// Cumulative ball sizes beta[n] = |B_e(n)| for n = 0..nmax. Exact integers.
struct GrowthSeries {
    GroupSpec spec;
    std::vector<std::uint64_t> beta;

    int nmax() const { return static_cast<int>(beta.size()) - 1; }
    std::uint64_t at(int n) const;
    void validate() const; // beta[0] == 1 and strictly increasing
};

GrowthSeries growth_function(const GroupSpec& spec, int nmax, const std::string& cache_dir = "",
                             std::uint64_t max_vertices = kDefaultVertexCap);
GrowthSeries growth_from_ball(const CayleyBall& ball);

// beta(2n)/beta(n) as an exact pair plus its decimal value.
struct DoublingEntry {
    int n = 0;
    std::uint64_t num = 0; // beta(2n)
    std::uint64_t den = 0; // beta(n)
    double value = 0.0;
};
std::vector<DoublingEntry> doubling_constants(const GrowthSeries& series);

// Exact check beta(2n) <= (p/q) beta(n).
bool doubling_bounded(const GrowthSeries& series, int n, std::uint64_t p, std::uint64_t q);

// beta(n)/n^degree for n = 1..nmax.
std::vector<double> growth_ratios(const GrowthSeries& series, int degree);

// Spread of the ratio over the last quarter of the range; small variation
// signals the ratio has settled near its limit.
struct RatioTail {
    int window_lo = 0, window_hi = 0;
    double min_ratio = 0.0, max_ratio = 0.0, variation = 0.0, mean_ratio = 0.0;
};
RatioTail ratio_tail(const GrowthSeries& series, int degree);

// Exact monotonicity of beta(n)/n^degree from a given n on.
bool ratios_monotone_decreasing(const GrowthSeries& series, int degree, int from_n);

// C1 = min, C2 = max of beta(n)/n^degree over n in [1, nmax].
struct TwoSidedBounds {
    double c1 = 0.0, c2 = 0.0;
};
TwoSidedBounds growth_bounds(const GrowthSeries& series, int degree);

// Least-squares slope of log beta against log n over [window_lo, window_hi].
// Requires at least four points.
double estimate_degree(const GrowthSeries& series, int window_lo, int window_hi);

// Exact check of beta(R)/beta(r) <= (1 + theta) (R/r)^degree.
bool rvc_pair_ok(const GrowthSeries& series, int degree, const std::string& theta_decimal, int r,
                 int R);

// Smallest R0 with the comparison valid on every pair grid_max >= R >= r >= R0,
// grid_max = nmax/2. Exact rational arithmetic throughout. A threshold that
// leaves no nontrivial span (R0 >= grid_max) is reported as absent.
struct RvcResult {
    std::optional<int> threshold;
    int grid_max = 0;
    std::string theta;
    std::vector<std::pair<int, int>> sample_failures; // first few failing (r, R)
};
RvcResult rvc_threshold(const GrowthSeries& series, int degree, const std::string& theta_decimal);

} // namespace hdim
