#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hdim/ball.hpp"

namespace hdim {

class HarmonicError : public std::runtime_error {
public:
    explicit HarmonicError(const std::string& what) : std::runtime_error(what) {}
};

class PositivityError : public HarmonicError {
public:
    explicit PositivityError(const std::string& what) : HarmonicError(what) {}
};

// Real-valued function on the vertex set of a fixed ball.
struct ScalarField {
    std::shared_ptr<const CayleyBall> ball;
    std::vector<double> values;

    void validate() const; // size matches ball, every value finite
};

ScalarField make_constant_field(std::shared_ptr<const CayleyBall> ball, double c);
// Product of coordinate powers, e.g. exponents {2,0} evaluates x0^2.
ScalarField make_monomial_field(std::shared_ptr<const CayleyBall> ball,
                                const std::vector<int>& exponents);
// Sum of coefficient * monomial terms.
ScalarField make_polynomial_field(
    std::shared_ptr<const CayleyBall> ball,
    const std::vector<std::pair<double, std::vector<int>>>& terms);

double monomial_value(const GroupElement& g, const std::vector<int>& exponents);

// Exponent vectors of all monomials with total degree <= max_degree, ordered
// by (total degree, descending lexicographic weight on the first coordinate).
std::vector<std::vector<int>> monomials_up_to(int vars, int max_degree);
std::string monomial_label(const std::vector<int>& exponents);

// Graph Laplacian sum_{y ~ x} (u(y) - u(x)); requires every neighbor of the
// vertex to lie inside the ball, i.e. dist(x) + 1 <= radius.
double laplacian(const ScalarField& u, std::uint32_t index);

struct HarmonicCheck {
    bool ok = false;
    std::uint32_t worst_index = 0;
    double worst_abs = 0.0;
};
// Checks |L u| <= tol on every vertex of B(interior_radius).
HarmonicCheck is_harmonic(const ScalarField& u, int interior_radius, double tol);

struct SolverOptions {
    // Target on max |L u| over the interior. Negative selects the default
    // max(1e-12 * max|boundary|, 1e-14).
    double tol = -1.0;
    int max_cg_iterations = 0; // 0 = automatic from the interior radius
    int max_refinement_rounds = 30;
    bool clamp_to_boundary_range = true;
};

struct DirichletSolution {
    ScalarField field;      // solved on B(r), prescribed on the sphere r+1
    int interior_radius = 0;
    double tol = 0.0;
    double residual = 0.0;  // exact max |L u| over the interior at exit
    int cg_iterations = 0;
    int refinement_rounds = 0;
    bool used_fallback = false;
    bool converged = false;
};

// Solves L u = 0 on B(r) with u prescribed on the sphere of radius r+1.
// boundary_values align with boundary(*ball, r).indices. Conjugate gradients
// from the boundary-mean initial guess, iterative refinement against the
// extended-precision residual, projected Gauss-Seidel as the stall fallback;
// the result is clamped into the boundary range so the discrete maximum
// principle holds pointwise.
DirichletSolution solve_dirichlet(std::shared_ptr<const CayleyBall> ball, int r,
                                  const std::vector<double>& boundary_values,
                                  const SolverOptions& options = {});

// Prefix copy onto a smaller concentric ball of the same group.
ScalarField restrict_to_ball(const ScalarField& u, std::shared_ptr<const CayleyBall> smaller);

// max/min of u over B(n). The field must be strictly positive everywhere on
// its ball (the surrounding region of the Harnack comparison).
double harnack_ratio(const ScalarField& u, int n);

} // namespace hdim
