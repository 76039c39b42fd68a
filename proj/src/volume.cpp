#include "hdim/volume.hpp"

#include <algorithm>
#include <cmath>

#include "hdim/exact.hpp"
#include "hdim/kernels.hpp"

namespace hdim {

BigRat parse_decimal_rational(const std::string& text) {
    std::string s = text;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    BigInt num = 0, den = 1;
    bool any_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '.') {
            if (seen_dot) throw VolumeError("invalid decimal literal: " + text);
            seen_dot = true;
            continue;
        }
        if (ch < '0' || ch > '9') throw VolumeError("invalid decimal literal: " + text);
        num = num * 10 + (ch - '0');
        if (seen_dot) den *= 10;
        any_digit = true;
    }
    if (!any_digit) throw VolumeError("invalid decimal literal: " + text);
    if (neg) num = -num;
    return BigRat(num, den);
}

BigInt ipow(BigInt base, unsigned exp) {
    BigInt r = 1;
    while (exp) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

std::uint64_t GrowthSeries::at(int n) const {
    if (n < 0 || n > nmax()) throw VolumeError("growth series index out of range");
    return beta[static_cast<std::size_t>(n)];
}

void GrowthSeries::validate() const {
    if (beta.empty() || beta[0] != 1) throw VolumeError("growth series must start with beta(0)=1");
    for (std::size_t n = 1; n < beta.size(); ++n)
        if (beta[n] <= beta[n - 1])
            throw VolumeError("growth series must be strictly increasing (infinite group)");
}

GrowthSeries growth_from_ball(const CayleyBall& ball) {
    GrowthSeries s;
    s.spec = ball.spec();
    s.beta.reserve(static_cast<std::size_t>(ball.radius()) + 1);
    for (int n = 0; n <= ball.radius(); ++n) s.beta.push_back(ball.count_within(n));
    s.validate();
    return s;
}

GrowthSeries growth_function(const GroupSpec& spec, int nmax, const std::string& cache_dir,
                             std::uint64_t max_vertices) {
    if (nmax < 1) throw VolumeError("nmax must be >= 1");
    auto ball = ball_cached(spec, identity(spec), nmax, cache_dir, max_vertices);
    return growth_from_ball(*ball);
}

std::vector<DoublingEntry> doubling_constants(const GrowthSeries& series) {
    std::vector<DoublingEntry> out;
    for (int n = 1; 2 * n <= series.nmax(); ++n) {
        DoublingEntry e;
        e.n = n;
        e.num = series.at(2 * n);
        e.den = series.at(n);
        e.value = static_cast<double>(e.num) / static_cast<double>(e.den);
        out.push_back(e);
    }
    return out;
}

bool doubling_bounded(const GrowthSeries& series, int n, std::uint64_t p, std::uint64_t q) {
    return BigInt(series.at(2 * n)) * q <= BigInt(series.at(n)) * p;
}

std::vector<double> growth_ratios(const GrowthSeries& series, int degree) {
    if (degree < 1) throw VolumeError("degree must be >= 1");
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(series.nmax()));
    for (int n = 1; n <= series.nmax(); ++n)
        r.push_back(static_cast<double>(series.at(n)) / std::pow(static_cast<double>(n), degree));
    return r;
}

RatioTail ratio_tail(const GrowthSeries& series, int degree) {
    const auto ratios = growth_ratios(series, degree);
    RatioTail t;
    const int nmax = series.nmax();
    t.window_lo = std::max(1, nmax - nmax / 4);
    t.window_hi = nmax;
    t.min_ratio = t.max_ratio = ratios[static_cast<std::size_t>(t.window_lo - 1)];
    long double sum = 0.0L;
    for (int n = t.window_lo; n <= t.window_hi; ++n) {
        const double v = ratios[static_cast<std::size_t>(n - 1)];
        t.min_ratio = std::min(t.min_ratio, v);
        t.max_ratio = std::max(t.max_ratio, v);
        sum += v;
    }
    t.variation = t.max_ratio - t.min_ratio;
    t.mean_ratio = static_cast<double>(sum / (t.window_hi - t.window_lo + 1));
    return t;
}

bool ratios_monotone_decreasing(const GrowthSeries& series, int degree, int from_n) {
    for (int n = std::max(1, from_n); n + 1 <= series.nmax(); ++n) {
        // beta(n)/n^D >= beta(n+1)/(n+1)^D as integers
        const BigInt lhs = BigInt(series.at(n)) * ipow(BigInt(n + 1), static_cast<unsigned>(degree));
        const BigInt rhs = BigInt(series.at(n + 1)) * ipow(BigInt(n), static_cast<unsigned>(degree));
        if (lhs < rhs) return false;
    }
    return true;
}

TwoSidedBounds growth_bounds(const GrowthSeries& series, int degree) {
    const auto ratios = growth_ratios(series, degree);
    TwoSidedBounds b;
    b.c1 = *std::min_element(ratios.begin(), ratios.end());
    b.c2 = *std::max_element(ratios.begin(), ratios.end());
    return b;
}

double estimate_degree(const GrowthSeries& series, int window_lo, int window_hi) {
    if (window_lo < 1 || window_hi > series.nmax() || window_hi - window_lo + 1 < 4)
        throw VolumeError("degree estimation window must contain at least four points");
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = window_hi - window_lo + 1;
    for (int n = window_lo; n <= window_hi; ++n) {
        const long double x = std::log(static_cast<long double>(n));
        const long double y = std::log(static_cast<long double>(series.at(n)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const long double denom = sxx - sx * sx / m;
    if (denom <= 0) throw VolumeError("degenerate degree estimation window");
    return static_cast<double>((sxy - sx * sy / m) / denom);
}

namespace {

bool rvc_pair_ok_exact(const GrowthSeries& series, int degree, const BigRat& theta, int r, int R) {
    // beta(R)/beta(r) <= (1+theta) (R/r)^degree
    const BigRat one_plus = theta + 1;
    const BigInt lhs = BigInt(series.at(R)) * boost::multiprecision::denominator(one_plus) *
                       ipow(BigInt(r), static_cast<unsigned>(degree));
    const BigInt rhs = BigInt(series.at(r)) * boost::multiprecision::numerator(one_plus) *
                       ipow(BigInt(R), static_cast<unsigned>(degree));
    return lhs <= rhs;
}

} // namespace

bool rvc_pair_ok(const GrowthSeries& series, int degree, const std::string& theta_decimal, int r,
                 int R) {
    const BigRat theta = parse_decimal_rational(theta_decimal);
    if (theta < 0) throw VolumeError("theta must be >= 0");
    if (r < 1 || R < r || R > series.nmax()) throw VolumeError("invalid (r, R) pair");
    return rvc_pair_ok_exact(series, degree, theta, r, R);
}

RvcResult rvc_threshold(const GrowthSeries& series, int degree, const std::string& theta_decimal) {
    const BigRat theta = parse_decimal_rational(theta_decimal);
    if (theta < 0) throw VolumeError("theta must be >= 0");
    RvcResult out;
    out.grid_max = series.nmax() / 2;
    out.theta = theta_decimal;
    if (out.grid_max < 2) throw VolumeError("nmax too small for a comparison grid");

    int max_failing_r = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : max_failing_r) \
    num_threads(kernels::thread_count())
    for (int r = 1; r <= out.grid_max; ++r) {
        for (int R = r; R <= out.grid_max; ++R) {
            if (!rvc_pair_ok_exact(series, degree, theta, r, R)) {
                max_failing_r = std::max(max_failing_r, r);
                break; // a single failing R taints this r
            }
        }
    }
    // deterministic handful of failing pairs for the report
    for (int r = 1; r <= out.grid_max && out.sample_failures.size() < 5; ++r)
        for (int R = r; R <= out.grid_max && out.sample_failures.size() < 5; ++R)
            if (!rvc_pair_ok_exact(series, degree, theta, r, R)) out.sample_failures.emplace_back(r, R);

    const int r0 = max_failing_r + 1;
    if (r0 < out.grid_max) out.threshold = r0;
    return out;
}

} // namespace hdim
