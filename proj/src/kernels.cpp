#include "hdim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdim::kernels {

namespace {

int g_threads = 1;
constexpr std::size_t kChunk = 4096;

inline long double row_residual(const LaplaceSystem& sys, const double* x, std::uint32_t i) {
    long double acc = static_cast<long double>(sys.rhs[i]) -
                      static_cast<long double>(sys.diag[i]) * static_cast<long double>(x[i]);
    for (std::uint32_t k = sys.offsets[i]; k < sys.offsets[i + 1]; ++k)
        acc += static_cast<long double>(x[sys.cols[k]]);
    return acc;
}

inline long double dot_chunk(const double* a, const double* b, std::size_t lo, std::size_t hi) {
    long double acc = 0.0L;
    for (std::size_t t = lo; t < hi; ++t)
        acc += static_cast<long double>(a[t]) * static_cast<long double>(b[t]);
    return acc;
}

inline long double gram_entry(const double* a, const double* b, std::size_t prefix) {
    long double acc = 0.0L;
    for (std::size_t t = 0; t < prefix; ++t)
        acc += static_cast<long double>(a[t]) * static_cast<long double>(b[t]);
    return acc;
}

} // namespace

void set_thread_count(int n) {
    if (n < 1) throw std::invalid_argument("thread count must be >= 1");
    g_threads = n;
}

int thread_count() { return g_threads; }

void matvec_serial(const LaplaceSystem& sys, const double* x, double* y) {
    for (std::uint32_t i = 0; i < sys.n; ++i) {
        long double acc = static_cast<long double>(sys.diag[i]) * static_cast<long double>(x[i]);
        for (std::uint32_t k = sys.offsets[i]; k < sys.offsets[i + 1]; ++k)
            acc -= static_cast<long double>(x[sys.cols[k]]);
        y[i] = static_cast<double>(acc);
    }
}

void matvec_parallel(const LaplaceSystem& sys, const double* x, double* y) {
#pragma omp parallel for schedule(static) num_threads(g_threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(sys.n); ++i) {
        const auto u = static_cast<std::uint32_t>(i);
        long double acc = static_cast<long double>(sys.diag[u]) * static_cast<long double>(x[u]);
        for (std::uint32_t k = sys.offsets[u]; k < sys.offsets[u + 1]; ++k)
            acc -= static_cast<long double>(x[sys.cols[k]]);
        y[u] = static_cast<double>(acc);
    }
}

void matvec(const LaplaceSystem& sys, const double* x, double* y) {
    if (g_threads > 1)
        matvec_parallel(sys, x, y);
    else
        matvec_serial(sys, x, y);
}

double dot_serial(const double* a, const double* b, std::size_t n) {
    long double total = 0.0L;
    for (std::size_t lo = 0; lo < n; lo += kChunk)
        total += static_cast<long double>(
            static_cast<double>(dot_chunk(a, b, lo, std::min(n, lo + kChunk))));
    return static_cast<double>(total);
}

double dot_parallel(const double* a, const double* b, std::size_t n) {
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static) num_threads(g_threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        partial[static_cast<std::size_t>(c)] =
            static_cast<double>(dot_chunk(a, b, lo, std::min(n, lo + kChunk)));
    }
    long double total = 0.0L;
    for (double p : partial) total += static_cast<long double>(p);
    return static_cast<double>(total);
}

double dot(const double* a, const double* b, std::size_t n) {
    return g_threads > 1 ? dot_parallel(a, b, n) : dot_serial(a, b, n);
}

double residual_inf_serial(const LaplaceSystem& sys, const double* x) {
    long double worst = 0.0L;
    for (std::uint32_t i = 0; i < sys.n; ++i)
        worst = std::max(worst, std::fabs(row_residual(sys, x, i)));
    return static_cast<double>(worst);
}

double residual_inf_parallel(const LaplaceSystem& sys, const double* x) {
    double worst = 0.0;
#pragma omp parallel for schedule(static) num_threads(g_threads) reduction(max : worst)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(sys.n); ++i)
        worst = std::max(worst, static_cast<double>(std::fabs(
                                    row_residual(sys, x, static_cast<std::uint32_t>(i)))));
    return worst;
}

double residual_inf(const LaplaceSystem& sys, const double* x) {
    return g_threads > 1 ? residual_inf_parallel(sys, x) : residual_inf_serial(sys, x);
}

CgResult conjugate_gradient(const LaplaceSystem& sys, std::vector<double>& x, double tol_inf,
                            int max_iterations) {
    const std::size_t n = sys.n;
    CgResult res;
    if (n == 0) {
        res.converged = true;
        return res;
    }
    std::vector<double> r(n), p(n), ap(n);
    matvec(sys, x.data(), ap.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = sys.rhs[i] - ap[i];
    p = r;
    double rr = dot(r.data(), r.data(), n);
    res.residual_inf = residual_inf(sys, x.data());
    if (res.residual_inf <= tol_inf) {
        res.converged = true;
        return res;
    }
    for (int it = 1; it <= max_iterations; ++it) {
        matvec(sys, p.data(), ap.data());
        const double pap = dot(p.data(), ap.data(), n);
        if (!(pap > 0.0)) break; // SPD breakdown or p = 0
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        const double rr_next = dot(r.data(), r.data(), n);
        res.iterations = it;
        if (it % 64 == 0 || rr_next <= tol_inf * tol_inf * static_cast<double>(n)) {
            res.residual_inf = residual_inf(sys, x.data());
            if (res.residual_inf <= tol_inf) {
                res.converged = true;
                return res;
            }
        }
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.residual_inf = residual_inf(sys, x.data());
    res.converged = res.residual_inf <= tol_inf;
    return res;
}

void gauss_seidel_clamped(const LaplaceSystem& sys, std::vector<double>& x, int sweeps, double lo,
                          double hi) {
    for (int s = 0; s < sweeps; ++s) {
        for (std::uint32_t i = 0; i < sys.n; ++i) {
            long double acc = sys.rhs[i];
            for (std::uint32_t k = sys.offsets[i]; k < sys.offsets[i + 1]; ++k)
                acc += static_cast<long double>(x[sys.cols[k]]);
            double v = static_cast<double>(acc / static_cast<long double>(sys.diag[i]));
            x[i] = std::clamp(v, lo, hi);
        }
    }
}

namespace {

std::vector<double> gram_common(const std::vector<const double*>& fields, std::size_t prefix,
                                bool parallel) {
    const std::size_t k = fields.size();
    std::vector<double> g(k * k, 0.0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(k * (k + 1) / 2);
    for (std::uint32_t i = 0; i < k; ++i)
        for (std::uint32_t j = i; j < k; ++j) pairs.emplace_back(i, j);
    const auto body = [&](std::size_t t) {
        const auto [i, j] = pairs[t];
        const double v = static_cast<double>(gram_entry(fields[i], fields[j], prefix));
        g[i * k + j] = v;
        g[j * k + i] = v;
    };
    if (parallel) {
#pragma omp parallel for schedule(static) num_threads(g_threads)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(pairs.size()); ++t)
            body(static_cast<std::size_t>(t));
    } else {
        for (std::size_t t = 0; t < pairs.size(); ++t) body(t);
    }
    return g;
}

} // namespace

std::vector<double> gram_prefix_serial(const std::vector<const double*>& fields,
                                       std::size_t prefix) {
    return gram_common(fields, prefix, false);
}

std::vector<double> gram_prefix_parallel(const std::vector<const double*>& fields,
                                         std::size_t prefix) {
    return gram_common(fields, prefix, true);
}

std::vector<double> gram_prefix(const std::vector<const double*>& fields, std::size_t prefix) {
    return gram_common(fields, prefix, g_threads > 1);
}

} // namespace hdim::kernels
