#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdim/exact.hpp"
#include "hdim/harmonic.hpp"

namespace hdim {

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Symmetric k x k matrix of ball inner products A_R(u_i, u_j) = sum over B(R)
// of u_i u_j; entries accumulated in extended precision.
struct GramMatrix {
    int k = 0;
    int R = 0;
    std::vector<double> a; // row-major

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * k + j]; }
    // Diagonal-normalized copy (correlation form); zero-norm rows stay zero.
    GramMatrix normalized() const;
};

GramMatrix gram(const std::vector<ScalarField>& fields, int R);

// Count of eigenvalues above rel_tol * lambda_max; 0 for a non-positive
// spectrum. rel_tol must be in (0, 1).
int numerical_rank(const GramMatrix& g, double rel_tol);

// Exact integer matrix of the lattice Laplacian acting on the monomial basis
// of polynomials with total degree <= degree in `vars` variables.
struct PolynomialTable {
    int vars = 0;
    int degree = 0;
    std::vector<std::vector<int>> monomials;
    std::vector<BigInt> action; // row-major, column j = coefficients of L(x^alpha_j)
};

PolynomialTable polynomial_table(int vars, int degree);

// Dimension of discrete harmonic polynomials of degree <= degree on Z^vars:
// null-space dimension of the action matrix, fraction-free elimination.
int symbolic_kernel_dim(int vars, int degree);

// Exact basis of that null space as monomial coefficient vectors.
std::vector<std::vector<BigRat>> symbolic_kernel_basis(int vars, int degree);

struct CandidateSet {
    std::shared_ptr<const CayleyBall> inner_ball;
    std::vector<ScalarField> fields;       // on inner_ball, monomial order
    std::vector<std::string> labels;
    std::vector<double> solve_residuals;
    int R_outer = 0;
    int R_inner = 0;
};

// Dirichlet extensions of monomial boundary data from the sphere of radius
// R_outer, restricted to B(R_inner). Requires R_outer >= 3 * R_inner.
CandidateSet candidate_fields(const GroupSpec& spec, int degree, int R_outer, int R_inner,
                              const SolverOptions& solver = {}, const std::string& cache_dir = "",
                              std::uint64_t max_vertices = kDefaultVertexCap);

struct DimensionEstimate {
    int degree = 0;
    std::vector<int> schedule;
    double rel_tol = 0.0;
    int buffer_factor = 0;
    std::vector<int> ranks;                     // per schedule radius
    std::map<std::string, std::vector<int>> ranks_by_tol; // stability grid
    bool saturated = false;
    int saturated_rank = -1;
    std::optional<int> oracle;                  // lattice groups only
    double max_solve_residual = 0.0;
};

// Numerical rank of the normalized candidate Gram across the radius schedule.
// Candidates are solved once on B(buffer_factor * schedule.back()) and the
// Gram restricted to each schedule radius by prefix sums. Saturation means the
// last two schedule radii agree.
DimensionEstimate estimate_dimension(const GroupSpec& spec, int degree,
                                     const std::vector<int>& schedule, double rel_tol = 1e-8,
                                     int buffer_factor = 10, const SolverOptions& solver = {},
                                     const std::string& cache_dir = "",
                                     std::uint64_t max_vertices = kDefaultVertexCap);

// Validation used by the CLI guard rails; returns a usage message or empty.
std::string validate_dimension_request(const GroupSpec& spec, int degree,
                                       const std::vector<int>& schedule);

struct EnergyProbe {
    int k = 0;
    int R = 0;
    int R_big = 0;
    double ratio = 0.0;       // trace of the R-Gram in the A_{beta R}-orthonormal frame
    double lambda_min_big = 0.0;
    double lambda_max_big = 0.0;
};

// Orthonormalizes the family against A_{beta R} and sums the A_R norms.
// Errors when the large-scale Gram is numerically indefinite (scale below the
// admissible threshold for this family).
EnergyProbe energy_probe(const std::vector<ScalarField>& fields, int R, double beta_scale,
                         double rel_tol = 1e-10);

} // namespace hdim
