#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdim/ball.hpp"
#include "hdim/groups.hpp"

namespace hdim {

class RoughError : public std::runtime_error {
public:
    explicit RoughError(const std::string& what) : std::runtime_error(what) {}
};

// Finite connected graph with the BFS metric; immutable after construction.
// Rejects self-loops and parallel edges.
class FiniteGraph {
public:
    FiniteGraph(std::uint32_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                std::string name = "graph");

    std::uint32_t size() const { return n_; }
    std::uint64_t edge_count() const { return adj_.size() / 2; }
    int degree_bound() const { return delta_; }
    int degree(std::uint32_t v) const {
        return static_cast<int>(offsets_[v + 1] - offsets_[v]);
    }
    const std::uint32_t* neighbors_begin(std::uint32_t v) const { return adj_.data() + offsets_[v]; }
    const std::uint32_t* neighbors_end(std::uint32_t v) const { return adj_.data() + offsets_[v + 1]; }
    const std::string& name() const { return name_; }

    std::vector<int> bfs(std::uint32_t source) const;
    std::vector<int> bfs_multi(const std::vector<std::uint32_t>& sources) const;

private:
    std::uint32_t n_ = 0;
    int delta_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> adj_;
    std::string name_;
};

// Plain lattice window graph plus its coordinate map (identity embeddings,
// small counterexamples).
struct LatticeWindow {
    std::shared_ptr<const FiniteGraph> graph;
    std::uint32_t center = 0;
    std::vector<GroupElement> coords;
    GroupSpec group;
};
LatticeWindow make_lattice_window(int D, int radius);

// Edge-subdivided lattice window: lattice vertices within subdivided distance
// `window_radius` of the origin plus one midpoint per edge. phi sends lattice
// vertices to themselves and midpoints to the lexicographically smaller
// endpoint; the canonical parameters are (a, b) = (2, 1) and degree bound 2D.
struct SubdividedLattice {
    std::shared_ptr<const FiniteGraph> graph;
    std::uint32_t center = 0;
    std::vector<GroupElement> phi;
    std::vector<std::uint8_t> is_lattice;
    GroupSpec target;
    int dim = 0;
    int radius = 0;
};
SubdividedLattice make_subdivided_lattice(int D, int window_radius);

// A candidate rough isometry from a finite graph window into a Cayley ball.
// The target spec must have a closed-form word metric (lattice, or product of
// such with a cycle); the ball is only the indexing window for image-side
// scans.
struct RoughIsometry {
    std::shared_ptr<const FiniteGraph> source;
    std::uint32_t source_center = 0;
    GroupSpec target;
    std::shared_ptr<const CayleyBall> target_ball;
    std::vector<GroupElement> map; // per source vertex
    double a = 1.0;
    double b = 0.0;
};

// Word metric for lattice and product-of-lattice specs (exact, closed form).
int group_distance(const GroupSpec& spec, const GroupElement& g, const GroupElement& h);

RoughIsometry subdivision_map(const SubdividedLattice& s, int target_radius,
                              const std::string& cache_dir = "");

struct RoughViolation {
    std::string kind; // "lower", "upper", "density"
    std::uint32_t x = 0; // source pair, or the uncovered target vertex for density
    std::uint32_t y = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct RoughCheckReport {
    bool ok = false;
    double a = 0.0;
    double b = 0.0;
    int margin = 0; // excluded truncation band, ceil(a b + b)
    std::uint64_t pairs_checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<RoughViolation> sample_violations; // at most 20 kept
    int max_density_gap = -1; // sup over the target subwindow of d(y, image)
    std::uint32_t source_subwindow = 0;
    std::uint32_t target_subwindow = 0;
};

// Exhaustive two-sided distortion check over source subwindow pairs plus the
// b-density scan over the target subwindow; both subwindows shrink the windows
// by ceil(a b + b) where truncated metrics distort.
RoughCheckReport check_rough_isometry(const RoughIsometry& ri);

// psi(y) = the smallest-index source vertex with d(y, phi(x)) <= b, defined on
// the target window shrunk by the forward margin. Errors on an uncovered
// vertex inside that window. The embedded report checks psi as an (a, 3ab)
// rough isometry back into the source graph.
struct RoughInverse {
    std::vector<std::int64_t> psi; // per target-ball vertex; -1 outside the window
    int window_radius = 0;
    RoughCheckReport check;
};
RoughInverse rough_inverse(const RoughIsometry& ri);

// Checks tau = psi . phi as an (a^2, c) rough self-map of the source window;
// c defaults to 4ab (distortion plus rough-inverse displacement).
RoughCheckReport check_composition(const RoughIsometry& ri, const RoughInverse& inv, double a,
                                   double c);

// Injectivization into product(target, Z_q) with q = Delta^(floor(a b) + 1):
// residues are assigned within each fiber of phi in source-index order, so
// the base projection of phi' is exactly phi.
struct Injectivization {
    int q = 0;
    GroupSpec product_spec;
    std::shared_ptr<const CayleyBall> target_ball; // product ball
    std::vector<GroupElement> map;                 // phi' per source vertex
    std::vector<int> residue;
    int max_fiber = 0;
    bool injective = false;
    bool projection_consistent = false;
};
Injectivization injectivize(const RoughIsometry& ri, int product_ball_radius,
                            const std::string& cache_dir = "",
                            std::uint64_t max_vertices = kDefaultVertexCap);

// Extension of a source field to the target ball. Values are kept as
// (sum, count): y in the image carries u(preimage) with count 1, other
// covered vertices carry the sum of u over W_y = phi^{-1}(image within the
// measured density radius of y). count = 0 marks vertices outside the covered
// window. Keeping sums makes linear combinations follow the identical
// arithmetic path as extending the combined input.
struct ExtensionField {
    std::shared_ptr<const CayleyBall> ball;
    std::vector<double> sum;
    std::vector<std::int32_t> count;
    std::vector<std::uint8_t> direct;
    int b_w = 0;

    bool defined(std::uint32_t i) const { return count[i] > 0; }
    double value(std::uint32_t i) const {
        return count[i] > 0 ? sum[i] / static_cast<double>(count[i]) : 0.0;
    }
};

// alpha Eu + beta Ev on the shared (sum, count) representation.
ExtensionField combine(const ExtensionField& eu, const ExtensionField& ev, double alpha,
                       double beta);

// Precomputed extension geometry for an injectivized map, reusable across
// fields. The density radius is measured (sup over a representative target
// set of the distance to the image); the covered window keeps every averaging
// set fully inside the enumerated image table.
class Extender {
public:
    Extender(const RoughIsometry& ri, const Injectivization& inj);

    int density_radius() const { return b_w_; }
    int covered_base_radius() const { return w_cap_; }
    std::uint64_t defined_count() const { return defined_count_; }
    const std::shared_ptr<const CayleyBall>& ball() const { return ball_; }

    ExtensionField extend(const std::vector<double>& u) const;

private:
    std::shared_ptr<const CayleyBall> ball_;
    int dim = 0;             // base lattice dimension
    int q_ = 0;
    int b_w_ = 0;
    int w_cap_ = 0;          // max base L1 norm of averaged vertices
    int w_grid_ = 0;         // dense grid half-width
    std::uint32_t n_src_ = 0;
    std::uint64_t defined_count_ = 0;
    std::vector<int> residues_;                    // used residues, ascending
    std::vector<std::vector<std::int64_t>> src_at_; // per residue: dense grid -> source or -1
    std::vector<std::int64_t> direct_src_;          // per ball vertex -> source or -1
    std::vector<std::int32_t> wy_count_;            // per ball vertex, 0 = undefined

    std::size_t grid_cells() const;
    std::size_t grid_index(const GroupElement& g) const;
};

struct EProperties {
    int n_fields = 0;
    std::uint64_t points_checked = 0;
    double max_linearity_defect = 0.0; // must be exactly zero
    bool linear_exact = false;
    bool injective = false;     // nonzero input forces a nonzero extension
    bool direct_exact = false;  // Eu(phi'(x)) == u(x) bitwise
    bool sup_norm_bounded = false;
};

// Exact linearity / injectivity / direct-branch audit of E over seeded fields
// quantized to 1/2^20 (so every averaging-window sum is exact in doubles and
// equality checks are bitwise).
EProperties operator_E_properties(const Extender& ext, const Injectivization& inj, int n_fields,
                                  std::uint64_t seed);

// u(y)^2 |B_y(R)| / sum over B_y(R) of u^2, with the ball taken in the target
// group metric. Requires the ball to stay inside the covered window.
double mvl_constant(const ExtensionField& u, std::uint32_t y, int R);

// Dirichlet problem on a graph ball: interior = {d <= interior_radius},
// boundary data read from boundary_values at {d = interior_radius + 1}.
struct GraphDirichlet {
    std::vector<double> values;
    double residual = 0.0;
    int cg_iterations = 0;
    bool converged = false;
};
GraphDirichlet solve_graph_dirichlet(const FiniteGraph& g, const std::vector<int>& dist,
                                     int interior_radius,
                                     const std::vector<double>& boundary_values);

// max |sum over neighbors of (u(n) - u(v))| over {d <= interior_radius}.
double graph_harmonic_defect(const FiniteGraph& g, const std::vector<int>& dist,
                             int interior_radius, const std::vector<double>& u);

// Graph-side mean value ratio u(p)^2 |B_p(R)| / sum over B_p(R) of u^2.
double graph_mv_constant(const FiniteGraph& g, const std::vector<int>& dist_from_p,
                         const std::vector<double>& u, std::uint32_t p, int R);

// |B_p^X(R)| >= c2 |B^G(floor(c1 R))| with c1 = 1/(2a) over R in
// [ceil(6ab), source window radius].
struct VolumeSandwich {
    double c1 = 0.0;
    double c2 = 0.0; // min measured ratio
    double c2_floor = 0.0;
    std::vector<int> grid;
    std::vector<double> ratios;
    bool ok = false;
};
VolumeSandwich volume_sandwich(const RoughIsometry& ri, double c2_floor = 1.0);

// End-to-end suite on the subdivided lattice: exhaustive checks on small
// windows, injectivization, extension-operator audit, mean-value-in-the-large
// stability, and the volume sandwich.
struct RoughSuiteConfig {
    int dim = 2;
    int window_radius = 149;       // extension/mvl source window
    int check_window_radius = 31;  // forward exhaustive check
    int medium_window_radius = 99; // inverse + composition checks
    int product_ball_radius = 74;
    int n_fields = 20;
    std::vector<int> mvl_radii = {10, 20, 40};
    std::uint64_t seed = 0x4841524DULL;
    double harm_tol = 1e-8;
    std::string cache_dir;
    std::uint64_t max_vertices = kDefaultVertexCap;
};

struct RoughSuiteResult {
    RoughCheckReport forward_check;
    RoughCheckReport inverse_check;
    RoughCheckReport composition_check;
    int q = 0;
    int max_fiber = 0;
    bool injective = false;
    bool projection_consistent = false;
    int density_radius = 0;
    EProperties e_properties;
    std::vector<int> mvl_radii;
    std::vector<double> mvl_max_by_radius;
    double mvl_stability = 0.0; // max over radii / min over radii
    double max_harmonic_defect = 0.0;
    VolumeSandwich sandwich;
    bool ok = false;
};
RoughSuiteResult run_rough_suite(const RoughSuiteConfig& cfg);

} // namespace hdim
