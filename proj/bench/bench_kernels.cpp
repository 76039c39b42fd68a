// Timing comparison of the serial reference kernels against the OpenMP
// parallel ones, plus a bitwise-equality audit of every pair.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hdim/ball.hpp"
#include "hdim/groups.hpp"
#include "hdim/harmonic.hpp"
#include "hdim/inequalities.hpp"
#include "hdim/kernels.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Interior Laplace system of B(r) in Z^2 with polynomial boundary data.
hdim::kernels::LaplaceSystem lattice_system(int r, std::vector<double>& x0) {
    const hdim::GroupSpec spec = hdim::GroupSpec::lattice(2);
    auto ball = hdim::enumerate_ball(spec, hdim::identity(spec), r + 1);
    const std::uint32_t n_int = ball->count_within(r);

    hdim::kernels::LaplaceSystem sys;
    sys.n = n_int;
    sys.offsets.assign(n_int + 1, 0);
    sys.diag.assign(n_int, 4.0);
    sys.rhs.assign(n_int, 0.0);
    sys.boundary_min = 0.0;
    sys.boundary_max = 0.0;
    auto bval = [](const hdim::GroupElement& g) {
        return static_cast<double>(g[0] * g[0] - g[1] * g[1]);
    };
    for (std::uint32_t v = 0; v < n_int; ++v) {
        for (const std::uint32_t* p = ball->neighbors_begin(v); p != ball->neighbors_end(v); ++p) {
            if (*p < n_int) {
                sys.offsets[v + 1]++;
            } else {
                const double bv = bval(ball->vertex(*p));
                sys.rhs[v] += bv;
                sys.boundary_min = std::min(sys.boundary_min, bv);
                sys.boundary_max = std::max(sys.boundary_max, bv);
            }
        }
    }
    for (std::uint32_t v = 0; v < n_int; ++v) sys.offsets[v + 1] += sys.offsets[v];
    sys.cols.resize(sys.offsets[n_int]);
    std::vector<std::uint32_t> fill(sys.offsets.begin(), sys.offsets.end() - 1);
    for (std::uint32_t v = 0; v < n_int; ++v)
        for (const std::uint32_t* p = ball->neighbors_begin(v); p != ball->neighbors_end(v); ++p)
            if (*p < n_int) sys.cols[fill[v]++] = *p;
    sys.boundary_abs_max = std::max(std::fabs(sys.boundary_min), std::fabs(sys.boundary_max));

    x0.assign(n_int, 0.0);
    std::uint64_t state = hdim::mix_seed(0xB5EDULL, 1, 1);
    for (auto& v : x0) v = hdim::seeded_uniform(state);
    return sys;
}

struct Row {
    const char* name;
    double serial_s;
    double parallel_s;
    bool identical;
};

void print_row(const Row& r) {
    std::printf("%-14s %10.4fs %10.4fs %8.2fx   %s\n", r.name, r.serial_s, r.parallel_s,
                r.parallel_s > 0 ? r.serial_s / r.parallel_s : 0.0,
                r.identical ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int radius = argc > 1 ? std::atoi(argv[1]) : 120;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 50;
    const int threads = argc > 3 ? std::atoi(argv[3]) : 4;

    std::vector<double> x;
    const hdim::kernels::LaplaceSystem sys = lattice_system(radius, x);
    std::printf("interior unknowns: %u, nonzeros: %zu, reps: %d, threads: %d\n\n", sys.n,
                sys.cols.size(), reps, threads);
    std::printf("%-14s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    std::vector<double> ys(sys.n), yp(sys.n);

    hdim::kernels::set_thread_count(1);
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) hdim::kernels::matvec_serial(sys, x.data(), ys.data());
    const double mv_s = seconds_since(t0);
    hdim::kernels::set_thread_count(threads);
    t0 = Clock::now();
    for (int i = 0; i < reps; ++i) hdim::kernels::matvec_parallel(sys, x.data(), yp.data());
    print_row({"matvec", mv_s, seconds_since(t0),
               std::memcmp(ys.data(), yp.data(), sys.n * sizeof(double)) == 0});

    t0 = Clock::now();
    double ds = 0;
    for (int i = 0; i < reps; ++i) ds += hdim::kernels::dot_serial(x.data(), ys.data(), sys.n);
    const double dot_s = seconds_since(t0);
    t0 = Clock::now();
    double dp = 0;
    for (int i = 0; i < reps; ++i) dp += hdim::kernels::dot_parallel(x.data(), yp.data(), sys.n);
    print_row({"dot", dot_s, seconds_since(t0), ds == dp});

    t0 = Clock::now();
    double rs = 0;
    for (int i = 0; i < reps; ++i) rs = hdim::kernels::residual_inf_serial(sys, x.data());
    const double res_s = seconds_since(t0);
    t0 = Clock::now();
    double rp = 0;
    for (int i = 0; i < reps; ++i) rp = hdim::kernels::residual_inf_parallel(sys, x.data());
    print_row({"residual_inf", res_s, seconds_since(t0), rs == rp});

    const int k = 8;
    std::vector<std::vector<double>> fields(k, std::vector<double>(sys.n));
    std::uint64_t state = hdim::mix_seed(0xB5EDULL, 2, 2);
    for (auto& f : fields)
        for (auto& v : f) v = hdim::seeded_uniform(state);
    std::vector<const double*> ptrs;
    for (auto& f : fields) ptrs.push_back(f.data());
    t0 = Clock::now();
    std::vector<double> gs, gp;
    for (int i = 0; i < reps; ++i) gs = hdim::kernels::gram_prefix_serial(ptrs, sys.n);
    const double gram_s = seconds_since(t0);
    t0 = Clock::now();
    for (int i = 0; i < reps; ++i) gp = hdim::kernels::gram_prefix_parallel(ptrs, sys.n);
    print_row({"gram_prefix", gram_s, seconds_since(t0), gs == gp});

    hdim::kernels::set_thread_count(1);
    std::vector<double> sol_s = x;
    t0 = Clock::now();
    const auto cg_s = hdim::kernels::conjugate_gradient(sys, sol_s, 1e-10, 20000);
    const double cgs = seconds_since(t0);
    hdim::kernels::set_thread_count(threads);
    std::vector<double> sol_p = x;
    t0 = Clock::now();
    const auto cg_p = hdim::kernels::conjugate_gradient(sys, sol_p, 1e-10, 20000);
    print_row({"cg_solve", cgs, seconds_since(t0), sol_s == sol_p});
    std::printf("\ncg iterations: serial %d (res %.3e), parallel %d (res %.3e)\n", cg_s.iterations,
                cg_s.residual_inf, cg_p.iterations, cg_p.residual_inf);
    return 0;
}
