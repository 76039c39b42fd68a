#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hdim/ball.hpp"
#include "hdim/inequalities.hpp"
#include "hdim/kernels.hpp"

using namespace hdim;
namespace K = hdim::kernels;

namespace {

// path b0 - v0 - v1 - b1 with boundary values 0 and 3: solution (1, 2)
K::LaplaceSystem path_system() {
    K::LaplaceSystem sys;
    sys.n = 2;
    sys.offsets = {0, 1, 2};
    sys.cols = {1, 0};
    sys.diag = {2.0, 2.0};
    sys.rhs = {0.0, 3.0};
    sys.boundary_min = 0.0;
    sys.boundary_max = 3.0;
    sys.boundary_abs_max = 3.0;
    return sys;
}

// interior Laplace system of B(r) in Z^2 with x^2 - y^2 boundary data
K::LaplaceSystem lattice_system(int r) {
    const GroupSpec spec = GroupSpec::lattice(2);
    auto ball = enumerate_ball(spec, identity(spec), r + 1);
    const std::uint32_t n_int = ball->count_within(r);
    K::LaplaceSystem sys;
    sys.n = n_int;
    sys.offsets.assign(n_int + 1, 0);
    sys.diag.assign(n_int, 4.0);
    sys.rhs.assign(n_int, 0.0);
    for (std::uint32_t v = 0; v < n_int; ++v) {
        for (const std::uint32_t* p = ball->neighbors_begin(v); p != ball->neighbors_end(v); ++p) {
            if (*p < n_int) {
                sys.offsets[v + 1]++;
            } else {
                const auto& g = ball->vertex(*p);
                const double bv = static_cast<double>(g[0] * g[0] - g[1] * g[1]);
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
    return sys;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t salt) {
    std::vector<double> v(n);
    std::uint64_t state = mix_seed(0xC0FFEEULL, salt, 1);
    for (auto& x : v) x = seeded_uniform(state);
    return v;
}

} // namespace

TEST_CASE("matvec and residual on the hand-solved path system") {
    const auto sys = path_system();
    const std::vector<double> exact = {1.0, 2.0};
    std::vector<double> y(2);
    K::matvec_serial(sys, exact.data(), y.data());
    CHECK(y[0] == 0.0); // 2*1 - 2
    CHECK(y[1] == 3.0); // 2*2 - 1
    CHECK(K::residual_inf_serial(sys, exact.data()) == 0.0);
    const std::vector<double> off = {1.0, 2.5};
    CHECK(K::residual_inf_serial(sys, off.data()) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conjugate gradients solves the path system") {
    const auto sys = path_system();
    std::vector<double> x = {0.0, 0.0};
    const auto res = K::conjugate_gradient(sys, x, 1e-14, 50);
    CHECK(res.converged);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.residual_inf <= 1e-14);
}

TEST_CASE("clamped gauss-seidel respects the boundary range") {
    const auto sys = path_system();
    std::vector<double> x = {10.0, -10.0};
    K::gauss_seidel_clamped(sys, x, 1, 0.0, 3.0);
    for (double v : x) {
        CHECK(v >= 0.0);
        CHECK(v <= 3.0);
    }
    K::gauss_seidel_clamped(sys, x, 400, 0.0, 3.0);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
    const auto sys = lattice_system(40); // 3321 unknowns, uneven chunk tail
    const auto x = random_vector(sys.n, 11);
    const auto w = random_vector(sys.n, 12);

    K::set_thread_count(1);
    std::vector<double> ys(sys.n);
    K::matvec(sys, x.data(), ys.data());
    const double ds = K::dot(x.data(), w.data(), sys.n);
    const double rs = K::residual_inf(sys, x.data());

    for (int threads : {2, 3, 8}) {
        K::set_thread_count(threads);
        CHECK(K::thread_count() == threads);
        std::vector<double> yp(sys.n);
        K::matvec(sys, x.data(), yp.data());
        CHECK(std::memcmp(ys.data(), yp.data(), sys.n * sizeof(double)) == 0);
        CHECK(K::dot(x.data(), w.data(), sys.n) == ds);
        CHECK(K::residual_inf(sys, x.data()) == rs);
    }
    K::set_thread_count(1);
}

TEST_CASE("parallel gram matches serial exactly") {
    const std::size_t n = 10000; // crosses two 4096 chunks plus a tail
    std::vector<std::vector<double>> fields;
    for (int i = 0; i < 5; ++i) fields.push_back(random_vector(n, 100 + i));
    std::vector<const double*> ptrs;
    for (auto& f : fields) ptrs.push_back(f.data());

    K::set_thread_count(1);
    const auto gs = K::gram_prefix(ptrs, n);
    const auto gs_half = K::gram_prefix(ptrs, n / 2);
    K::set_thread_count(4);
    CHECK(K::gram_prefix(ptrs, n) == gs);
    CHECK(K::gram_prefix(ptrs, n / 2) == gs_half);
    K::set_thread_count(1);

    // symmetry and diagonal positivity
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(gs[i * 5 + j] == gs[j * 5 + i]);
    for (int i = 0; i < 5; ++i) CHECK(gs[i * 5 + i] > 0.0);
}

TEST_CASE("cg iterate path is identical across thread counts") {
    const auto sys = lattice_system(25);
    std::vector<double> xs(sys.n, 0.0), xp(sys.n, 0.0);
    K::set_thread_count(1);
    const auto rs = K::conjugate_gradient(sys, xs, 1e-11, 2000);
    K::set_thread_count(4);
    const auto rp = K::conjugate_gradient(sys, xp, 1e-11, 2000);
    K::set_thread_count(1);
    CHECK(rs.converged);
    CHECK(rp.converged);
    CHECK(rs.iterations == rp.iterations);
    CHECK(xs == xp);
}
