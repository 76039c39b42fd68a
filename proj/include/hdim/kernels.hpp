#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hdim::kernels {

// Thread count for the parallel kernels; 1 selects the serial reference path.
// Every parallel kernel reproduces the serial result bit for bit: reductions
// use fixed 4096-element chunks combined in chunk order, and per-row sums keep
// a fixed traversal order, so the split across threads never changes rounding.
void set_thread_count(int n);
int thread_count();

// Interior system of a discrete Dirichlet problem: A = diag - adjacency over
// the interior unknowns, rhs collects prescribed boundary neighbor values.
struct LaplaceSystem {
    std::uint32_t n = 0;
    std::vector<std::uint32_t> offsets; // CSR, interior-interior edges
    std::vector<std::uint32_t> cols;
    std::vector<double> diag;           // ambient vertex degree
    std::vector<double> rhs;
    double boundary_min = 0.0;
    double boundary_max = 0.0;
    double boundary_abs_max = 0.0;
};

void matvec_serial(const LaplaceSystem& sys, const double* x, double* y);
void matvec_parallel(const LaplaceSystem& sys, const double* x, double* y);
void matvec(const LaplaceSystem& sys, const double* x, double* y);

double dot_serial(const double* a, const double* b, std::size_t n);
double dot_parallel(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// Exact interior residual rhs - A x, accumulated in extended precision.
// Differences of doubles and their short sums fit a 64-bit mantissa, so for
// moderate value magnitudes the result is the exactly rounded residual.
double residual_inf_serial(const LaplaceSystem& sys, const double* x);
double residual_inf_parallel(const LaplaceSystem& sys, const double* x);
double residual_inf(const LaplaceSystem& sys, const double* x);

struct CgResult {
    int iterations = 0;
    bool converged = false;
    double residual_inf = 0.0;
};

// Conjugate gradients on the SPD interior system, with periodic exact
// residual checks against tol_inf. x holds the initial guess on entry.
CgResult conjugate_gradient(const LaplaceSystem& sys, std::vector<double>& x, double tol_inf,
                            int max_iterations);

// Projected Gauss-Seidel sweeps: each update averages neighbor values and
// clamps into [lo, hi], so iterates never leave the boundary range.
void gauss_seidel_clamped(const LaplaceSystem& sys, std::vector<double>& x, int sweeps, double lo,
                          double hi);

// Dense k x k matrix of pairwise dots over the first prefix entries of each
// field, row-major. Parallel over the upper triangle.
std::vector<double> gram_prefix_serial(const std::vector<const double*>& fields,
                                       std::size_t prefix);
std::vector<double> gram_prefix_parallel(const std::vector<const double*>& fields,
                                         std::size_t prefix);
std::vector<double> gram_prefix(const std::vector<const double*>& fields, std::size_t prefix);

} // namespace hdim::kernels
