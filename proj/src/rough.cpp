#include "hdim/rough.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "hdim/inequalities.hpp"
#include "hdim/kernels.hpp"

namespace hdim {
namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kViolationSampleCap = 20;

int ceil_int(double v) { return static_cast<int>(std::ceil(v - 1e-12)); }

int cyclic_distance(std::int64_t s, std::int64_t t, std::int64_t q) {
    std::int64_t d = (s - t) % q;
    if (d < 0) d += q;
    return static_cast<int>(std::min(d, q - d));
}

std::int64_t l1_norm(const GroupElement& g, int dim) {
    std::int64_t n = 0;
    for (int i = 0; i < dim; ++i) n += std::llabs(g[i]);
    return n;
}

void record_violation(RoughCheckReport& rep, RoughViolation v) {
    ++rep.violation_count;
    if (rep.sample_violations.size() < kViolationSampleCap)
        rep.sample_violations.push_back(std::move(v));
}

// BFS over a Cayley ball's internal adjacency from several seeds; -1 means
// unreached. Distances can only overestimate the group metric near the ball
// boundary, which the callers' margins absorb.
std::vector<int> ball_bfs_multi(const CayleyBall& ball, const std::vector<std::uint32_t>& seeds) {
    std::vector<int> dist(ball.size(), -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(ball.size());
    for (std::uint32_t s : seeds)
        if (dist[s] < 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (const std::uint32_t* p = ball.neighbors_begin(v); p != ball.neighbors_end(v); ++p)
            if (dist[*p] < 0) {
                dist[*p] = dist[v] + 1;
                queue.push_back(*p);
            }
    }
    return dist;
}

// All lattice points with |z|_1 <= r in (norm, lexicographic) order.
std::vector<std::vector<int>> diamond_points(int D, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(D), -r);
    // odometer over the box [-r, r]^D, filtered by the L1 bound
    while (true) {
        std::int64_t n = 0;
        for (int c : cur) n += std::abs(c);
        if (n <= r) out.push_back(cur);
        int i = D - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == r) {
            cur[static_cast<std::size_t>(i)] = -r;
            --i;
        }
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        std::int64_t na = 0, nb = 0;
        for (int c : a) na += std::abs(c);
        for (int c : b) nb += std::abs(c);
        if (na != nb) return na < nb;
        return a < b;
    });
    return out;
}

GroupElement lattice_element(const GroupSpec& spec, const std::vector<int>& z) {
    std::vector<std::int64_t> coords(z.begin(), z.end());
    return make_element(spec, coords);
}

} // namespace

FiniteGraph::FiniteGraph(std::uint32_t n,
                         const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                         std::string name)
    : n_(n), name_(std::move(name)) {
    if (n == 0) throw RoughError("graph needs at least one vertex");
    std::vector<std::vector<std::uint32_t>> tmp(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw RoughError("edge endpoint out of range");
        if (u == v) throw RoughError("self-loops are not allowed");
        tmp[u].push_back(v);
        tmp[v].push_back(u);
    }
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        auto& lst = tmp[v];
        std::sort(lst.begin(), lst.end());
        if (std::adjacent_find(lst.begin(), lst.end()) != lst.end())
            throw RoughError("parallel edges are not allowed");
        offsets_[v + 1] = offsets_[v] + static_cast<std::uint32_t>(lst.size());
        delta_ = std::max(delta_, static_cast<int>(lst.size()));
    }
    adj_.reserve(offsets_[n]);
    for (std::uint32_t v = 0; v < n; ++v)
        adj_.insert(adj_.end(), tmp[v].begin(), tmp[v].end());
    const std::vector<int> d = bfs(0);
    if (std::find(d.begin(), d.end(), -1) != d.end())
        throw RoughError("graph must be connected");
}

std::vector<int> FiniteGraph::bfs(std::uint32_t source) const {
    return bfs_multi({source});
}

std::vector<int> FiniteGraph::bfs_multi(const std::vector<std::uint32_t>& sources) const {
    std::vector<int> dist(n_, -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(n_);
    for (std::uint32_t s : sources) {
        if (s >= n_) throw RoughError("BFS source out of range");
        if (dist[s] < 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (const std::uint32_t* p = neighbors_begin(v); p != neighbors_end(v); ++p)
            if (dist[*p] < 0) {
                dist[*p] = dist[v] + 1;
                queue.push_back(*p);
            }
    }
    return dist;
}

LatticeWindow make_lattice_window(int D, int radius) {
    if (D < 1 || D > 6) throw RoughError("lattice window dimension must be in [1, 6]");
    if (radius < 1) throw RoughError("lattice window radius must be >= 1");
    LatticeWindow w;
    w.group = GroupSpec::lattice(D);
    const auto pts = diamond_points(D, radius);
    std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> index;
    w.coords.reserve(pts.size());
    for (const auto& z : pts) {
        GroupElement g = lattice_element(w.group, z);
        index.emplace(g, static_cast<std::uint32_t>(w.coords.size()));
        w.coords.push_back(g);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v = 0; v < w.coords.size(); ++v)
        for (int i = 0; i < D; ++i) {
            GroupElement nb = w.coords[v];
            nb[i] += 1;
            const auto it = index.find(nb);
            if (it != index.end()) edges.emplace_back(v, it->second);
        }
    w.graph = std::make_shared<FiniteGraph>(static_cast<std::uint32_t>(w.coords.size()), edges,
                                            "z" + std::to_string(D) + "-window");
    w.center = index.at(identity(w.group));
    return w;
}

SubdividedLattice make_subdivided_lattice(int D, int window_radius) {
    if (D < 1 || D > 3) throw RoughError("subdivided lattice dimension must be in {1, 2, 3}");
    if (window_radius < 2) throw RoughError("subdivided lattice window radius must be >= 2");
    SubdividedLattice s;
    s.dim = D;
    s.radius = window_radius;
    s.target = GroupSpec::lattice(D);

    const int K = window_radius / 2; // lattice vertices live at even distance 2|z|
    const auto lattice_pts = diamond_points(D, K);
    std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> lattice_index;
    for (const auto& z : lattice_pts) {
        GroupElement g = lattice_element(s.target, z);
        lattice_index.emplace(g, static_cast<std::uint32_t>(s.phi.size()));
        s.phi.push_back(g);
        s.is_lattice.push_back(1);
    }
    s.center = lattice_index.at(identity(s.target));

    // midpoint of {w, w + e_i} sits at distance min(2|w|, 2|w+e_i|) + 1 and is
    // keyed by the lexicographically smaller endpoint w
    struct Mid {
        std::int64_t dist;
        std::vector<int> w;
        int axis;
    };
    std::vector<Mid> mids;
    for (const auto& z : diamond_points(D, K + 1)) {
        std::int64_t nz = 0;
        for (int c : z) nz += std::abs(c);
        for (int i = 0; i < D; ++i) {
            std::vector<int> z2 = z;
            z2[static_cast<std::size_t>(i)] += 1;
            std::int64_t n2 = 0;
            for (int c : z2) n2 += std::abs(c);
            const std::int64_t dist = 2 * std::min(nz, n2) + 1;
            if (dist <= window_radius) mids.push_back({dist, z, i});
        }
    }
    std::sort(mids.begin(), mids.end(), [](const Mid& a, const Mid& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.w != b.w) return a.w < b.w;
        return a.axis < b.axis;
    });

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& m : mids) {
        const std::uint32_t mid_id = static_cast<std::uint32_t>(s.phi.size());
        GroupElement low = lattice_element(s.target, m.w);
        s.phi.push_back(low); // lexicographically smaller endpoint
        s.is_lattice.push_back(0);
        auto it = lattice_index.find(low);
        if (it != lattice_index.end()) edges.emplace_back(mid_id, it->second);
        GroupElement high = low;
        high[m.axis] += 1;
        it = lattice_index.find(high);
        if (it != lattice_index.end()) edges.emplace_back(mid_id, it->second);
    }
    s.graph = std::make_shared<FiniteGraph>(static_cast<std::uint32_t>(s.phi.size()), edges,
                                            "subdivided-z" + std::to_string(D));
    return s;
}

int group_distance(const GroupSpec& spec, const GroupElement& g, const GroupElement& h) {
    switch (spec.kind) {
    case GroupKind::Lattice: {
        std::int64_t d = 0;
        for (int i = 0; i < spec.lattice_dim; ++i) d += std::llabs(g[i] - h[i]);
        if (d > std::numeric_limits<int>::max()) throw RoughError("distance out of int range");
        return static_cast<int>(d);
    }
    case GroupKind::Product: {
        const int bn = coord_count(*spec.base);
        GroupElement gb, hb;
        gb.n = hb.n = static_cast<std::uint8_t>(bn);
        for (int i = 0; i < bn; ++i) {
            gb[i] = g[i];
            hb[i] = h[i];
        }
        return group_distance(*spec.base, gb, hb) +
               cyclic_distance(g[bn], h[bn], spec.cyclic_order);
    }
    case GroupKind::Heisenberg:
        throw RoughError("no closed-form word metric for this group");
    }
    throw RoughError("unknown group kind");
}

RoughIsometry subdivision_map(const SubdividedLattice& s, int target_radius,
                              const std::string& cache_dir) {
    RoughIsometry ri;
    ri.source = s.graph;
    ri.source_center = s.center;
    ri.target = s.target;
    ri.target_ball = ball_cached(s.target, identity(s.target), target_radius, cache_dir);
    ri.map = s.phi;
    ri.a = 2.0;
    ri.b = 1.0;
    return ri;
}

RoughCheckReport check_rough_isometry(const RoughIsometry& ri) {
    if (!ri.source || !ri.target_ball) throw RoughError("rough isometry is missing its graphs");
    if (ri.map.size() != ri.source->size())
        throw RoughError("mapping table size does not match the source graph");
    if (ri.a < 1.0 || ri.b < 0.0) throw RoughError("rough isometry needs a >= 1, b >= 0");

    RoughCheckReport rep;
    rep.a = ri.a;
    rep.b = ri.b;
    rep.margin = ceil_int(ri.a * ri.b + ri.b);

    const FiniteGraph& g = *ri.source;
    const std::vector<int> sd = g.bfs(ri.source_center);
    const int r_src = *std::max_element(sd.begin(), sd.end());
    std::vector<std::uint32_t> sub;
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (sd[v] <= r_src - rep.margin) sub.push_back(v);
    rep.source_subwindow = static_cast<std::uint32_t>(sub.size());

    // two-sided distortion over all subwindow pairs
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const std::vector<int> row = g.bfs(sub[i]);
        for (std::size_t j = i + 1; j < sub.size(); ++j) {
            const double dx = row[sub[j]];
            const double dg = group_distance(ri.target, ri.map[sub[i]], ri.map[sub[j]]);
            ++rep.pairs_checked;
            if (dg < dx / ri.a - ri.b - kEps)
                record_violation(rep, {"lower", sub[i], sub[j], dg, dx / ri.a - ri.b});
            if (dg > ri.a * dx + ri.b + kEps)
                record_violation(rep, {"upper", sub[i], sub[j], dg, ri.a * dx + ri.b});
        }
    }

    // b-density over the target subwindow via multi-source BFS from the image
    const CayleyBall& ball = *ri.target_ball;
    std::vector<std::uint32_t> image;
    image.reserve(ri.map.size());
    for (const GroupElement& e : ri.map)
        if (auto idx = ball.index_of(e)) image.push_back(*idx);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    const std::vector<int> gap = ball_bfs_multi(ball, image);
    const int t_cut = ball.radius() - rep.margin;
    for (std::uint32_t y = 0; y < ball.size(); ++y) {
        if (ball.dist(y) > t_cut) continue;
        ++rep.target_subwindow;
        const int gy = gap[y];
        if (gy < 0 || static_cast<double>(gy) > ri.b + kEps)
            record_violation(rep, {"density", y, y,
                                   gy < 0 ? std::numeric_limits<double>::infinity()
                                          : static_cast<double>(gy),
                                   ri.b});
        rep.max_density_gap = std::max(rep.max_density_gap, gy);
    }
    rep.ok = rep.violation_count == 0;
    return rep;
}

RoughInverse rough_inverse(const RoughIsometry& ri) {
    const FiniteGraph& g = *ri.source;
    const CayleyBall& ball = *ri.target_ball;
    const int margin = ceil_int(ri.a * ri.b + ri.b);
    RoughInverse inv;
    inv.window_radius = ball.radius() - margin;
    if (inv.window_radius < 0) throw RoughError("target ball too small for a rough inverse");
    inv.psi.assign(ball.size(), -1);

    // smallest source index wins: scan sources in order, claim unclaimed
    // vertices within distance b of the image point
    const int b_int = static_cast<int>(std::floor(ri.b + kEps));
    std::vector<int> mark(ball.size(), -1);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t x = 0; x < g.size(); ++x) {
        const auto idx = ball.index_of(ri.map[x]);
        if (!idx) continue;
        queue.clear();
        queue.push_back(*idx);
        mark[*idx] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::uint32_t v = queue[head];
            if (inv.psi[v] < 0) inv.psi[v] = static_cast<std::int64_t>(x);
            if (mark[v] >= b_int) continue;
            for (const std::uint32_t* p = ball.neighbors_begin(v); p != ball.neighbors_end(v); ++p)
                if (mark[*p] < 0) {
                    mark[*p] = mark[v] + 1;
                    queue.push_back(*p);
                }
        }
        for (std::uint32_t v : queue) mark[v] = -1;
    }
    for (std::uint32_t y = 0; y < ball.size(); ++y)
        if (ball.dist(y) <= inv.window_radius && inv.psi[y] < 0)
            throw RoughError("uncovered target vertex inside the claimed window");

    // check psi as an (a, 3ab) rough isometry back into the source graph
    RoughCheckReport& rep = inv.check;
    rep.a = ri.a;
    rep.b = 3.0 * ri.a * ri.b;
    rep.margin = ceil_int(rep.a * rep.b + rep.b);
    const int cut = inv.window_radius - rep.margin;
    std::vector<std::uint32_t> sub;
    for (std::uint32_t y = 0; y < ball.size(); ++y)
        if (ball.dist(y) <= cut) sub.push_back(y);
    rep.target_subwindow = static_cast<std::uint32_t>(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const std::vector<int> row = g.bfs(static_cast<std::uint32_t>(inv.psi[sub[i]]));
        for (std::size_t j = i + 1; j < sub.size(); ++j) {
            const double dg = group_distance(ball.spec(), ball.vertex(sub[i]), ball.vertex(sub[j]));
            const double dx = row[static_cast<std::size_t>(inv.psi[sub[j]])];
            ++rep.pairs_checked;
            if (dx < dg / rep.a - rep.b - kEps)
                record_violation(rep, {"lower", sub[i], sub[j], dx, dg / rep.a - rep.b});
            if (dx > rep.a * dg + rep.b + kEps)
                record_violation(rep, {"upper", sub[i], sub[j], dx, rep.a * dg + rep.b});
        }
    }
    // density of the psi image back in the source window
    std::vector<std::uint32_t> psi_image;
    for (std::uint32_t y = 0; y < ball.size(); ++y)
        if (ball.dist(y) <= inv.window_radius && inv.psi[y] >= 0)
            psi_image.push_back(static_cast<std::uint32_t>(inv.psi[y]));
    std::sort(psi_image.begin(), psi_image.end());
    psi_image.erase(std::unique(psi_image.begin(), psi_image.end()), psi_image.end());
    const std::vector<int> gap = g.bfs_multi(psi_image);
    const std::vector<int> sd = g.bfs(ri.source_center);
    const int r_src = *std::max_element(sd.begin(), sd.end());
    for (std::uint32_t x = 0; x < g.size(); ++x) {
        if (sd[x] > r_src - rep.margin) continue;
        ++rep.source_subwindow;
        if (static_cast<double>(gap[x]) > rep.b + kEps)
            record_violation(rep, {"density", x, x, static_cast<double>(gap[x]), rep.b});
        rep.max_density_gap = std::max(rep.max_density_gap, gap[x]);
    }
    rep.ok = rep.violation_count == 0;
    return inv;
}

RoughCheckReport check_composition(const RoughIsometry& ri, const RoughInverse& inv, double a,
                                   double c) {
    const FiniteGraph& g = *ri.source;
    const CayleyBall& ball = *ri.target_ball;
    std::vector<std::int64_t> tau(g.size(), -1);
    for (std::uint32_t x = 0; x < g.size(); ++x)
        if (auto idx = ball.index_of(ri.map[x])) tau[x] = inv.psi[*idx];

    RoughCheckReport rep;
    rep.a = a;
    rep.b = c;
    rep.margin = ceil_int(a * c + c);
    const std::vector<int> sd = g.bfs(ri.source_center);
    const int r_src = *std::max_element(sd.begin(), sd.end());
    std::vector<std::uint32_t> sub;
    for (std::uint32_t x = 0; x < g.size(); ++x)
        if (sd[x] <= r_src - rep.margin) {
            if (tau[x] < 0)
                throw RoughError("composed map is undefined inside the check subwindow");
            sub.push_back(x);
        }
    rep.source_subwindow = static_cast<std::uint32_t>(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const std::vector<int> row_x = g.bfs(sub[i]);
        const std::vector<int> row_t = g.bfs(static_cast<std::uint32_t>(tau[sub[i]]));
        for (std::size_t j = i + 1; j < sub.size(); ++j) {
            const double dx = row_x[sub[j]];
            const double dt = row_t[static_cast<std::size_t>(tau[sub[j]])];
            ++rep.pairs_checked;
            if (dt < dx / a - c - kEps)
                record_violation(rep, {"lower", sub[i], sub[j], dt, dx / a - c});
            if (dt > a * dx + c + kEps)
                record_violation(rep, {"upper", sub[i], sub[j], dt, a * dx + c});
        }
    }
    std::vector<std::uint32_t> tau_image;
    for (std::uint32_t x : sub) tau_image.push_back(static_cast<std::uint32_t>(tau[x]));
    std::sort(tau_image.begin(), tau_image.end());
    tau_image.erase(std::unique(tau_image.begin(), tau_image.end()), tau_image.end());
    const std::vector<int> gap = g.bfs_multi(tau_image);
    for (std::uint32_t x : sub) {
        if (static_cast<double>(gap[x]) > c + kEps)
            record_violation(rep, {"density", x, x, static_cast<double>(gap[x]), c});
        rep.max_density_gap = std::max(rep.max_density_gap, gap[x]);
    }
    rep.ok = rep.violation_count == 0;
    return rep;
}

Injectivization injectivize(const RoughIsometry& ri, int product_ball_radius,
                            const std::string& cache_dir, std::uint64_t max_vertices) {
    Injectivization inj;
    const int delta = ri.source->degree_bound();
    if (delta < 1) throw RoughError("degree bound must be positive");
    const int expo = static_cast<int>(std::floor(ri.a * ri.b + kEps)) + 1;
    std::int64_t q = 1;
    for (int i = 0; i < expo; ++i) {
        q *= delta;
        if (q > 1'000'000) throw RoughError("residue alphabet too large to enumerate");
    }
    inj.q = static_cast<int>(q);

    // residues in source-index order within each fiber of phi
    std::unordered_map<GroupElement, int, GroupElementHash> fiber_fill;
    inj.residue.resize(ri.map.size());
    for (std::size_t x = 0; x < ri.map.size(); ++x) {
        int& cnt = fiber_fill[ri.map[x]];
        inj.residue[x] = cnt;
        ++cnt;
        inj.max_fiber = std::max(inj.max_fiber, cnt);
    }
    if (inj.max_fiber > inj.q)
        throw RoughError("fiber of size " + std::to_string(inj.max_fiber) +
                         " exceeds the residue alphabet q = " + std::to_string(inj.q));

    inj.product_spec = GroupSpec::product(ri.target, q);
    const int bn = coord_count(ri.target);
    inj.map.reserve(ri.map.size());
    std::unordered_set<GroupElement, GroupElementHash> seen;
    inj.projection_consistent = true;
    for (std::size_t x = 0; x < ri.map.size(); ++x) {
        std::vector<std::int64_t> coords(static_cast<std::size_t>(bn) + 1);
        for (int i = 0; i < bn; ++i) coords[static_cast<std::size_t>(i)] = ri.map[x][i];
        coords[static_cast<std::size_t>(bn)] = inj.residue[x];
        const GroupElement e = make_element(inj.product_spec, coords);
        for (int i = 0; i < bn; ++i)
            if (e[i] != ri.map[x][i]) inj.projection_consistent = false;
        seen.insert(e);
        inj.map.push_back(e);
    }
    inj.injective = seen.size() == inj.map.size();
    inj.target_ball = ball_cached(inj.product_spec, identity(inj.product_spec),
                                  product_ball_radius, cache_dir, max_vertices);
    return inj;
}

ExtensionField combine(const ExtensionField& eu, const ExtensionField& ev, double alpha,
                       double beta) {
    if (eu.ball.get() != ev.ball.get() || eu.b_w != ev.b_w || eu.count != ev.count)
        throw RoughError("extension fields have mismatched geometry");
    ExtensionField out = eu;
    for (std::size_t i = 0; i < out.sum.size(); ++i)
        out.sum[i] = alpha * eu.sum[i] + beta * ev.sum[i];
    return out;
}

std::size_t Extender::grid_cells() const {
    std::size_t cells = 1;
    for (int i = 0; i < dim; ++i) cells *= static_cast<std::size_t>(2 * w_grid_ + 1);
    return cells;
}

std::size_t Extender::grid_index(const GroupElement& g) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i)
        idx = idx * static_cast<std::size_t>(2 * w_grid_ + 1) +
              static_cast<std::size_t>(g[i] + w_grid_);
    return idx;
}

namespace {

// inclusive 2D prefix over rotated coordinates (p, q) = (x + y, x - y); the
// L1 diamond |dx|+|dy| <= r is exactly the rotated box of half-width r
struct RotPrefix {
    int side = 0;
    std::vector<double> p; // (side+1)^2

    void build(int w, const std::vector<double>& cell_rot) {
        side = 2 * w + 1;
        p.assign(static_cast<std::size_t>(side + 1) * (side + 1), 0.0);
        for (int i = 0; i < side; ++i)
            for (int j = 0; j < side; ++j) {
                const std::size_t s1 = static_cast<std::size_t>(side + 1);
                p[(i + 1) * s1 + (j + 1)] = cell_rot[static_cast<std::size_t>(i) * side + j] +
                                            p[static_cast<std::size_t>(i) * s1 + (j + 1)] +
                                            p[(i + 1) * s1 + j] -
                                            p[static_cast<std::size_t>(i) * s1 + j];
            }
    }

    double box(int pi_lo, int pi_hi, int qi_lo, int qi_hi) const {
        pi_lo = std::max(pi_lo, 0);
        qi_lo = std::max(qi_lo, 0);
        pi_hi = std::min(pi_hi, side - 1);
        qi_hi = std::min(qi_hi, side - 1);
        if (pi_lo > pi_hi || qi_lo > qi_hi) return 0.0;
        const std::size_t s1 = static_cast<std::size_t>(side + 1);
        return p[(pi_hi + 1) * s1 + (qi_hi + 1)] - p[static_cast<std::size_t>(pi_lo) * s1 + (qi_hi + 1)] -
               p[(pi_hi + 1) * s1 + qi_lo] + p[static_cast<std::size_t>(pi_lo) * s1 + qi_lo];
    }
};

} // namespace

Extender::Extender(const RoughIsometry& ri, const Injectivization& inj) {
    if (inj.product_spec.kind != GroupKind::Product ||
        inj.product_spec.base->kind != GroupKind::Lattice)
        throw RoughError("extension requires a product-of-lattice target");
    dim = inj.product_spec.base->lattice_dim;
    if (dim > 3) throw RoughError("extension supports base dimension <= 3");
    q_ = inj.q;
    ball_ = inj.target_ball;
    n_src_ = static_cast<std::uint32_t>(inj.map.size());
    if (n_src_ != ri.source->size()) throw RoughError("map and source graph sizes differ");

    for (const GroupElement& e : inj.map)
        w_grid_ = std::max(w_grid_, static_cast<int>(l1_norm(e, dim)));
    if (w_grid_ < 1) throw RoughError("image is degenerate");
    const std::size_t cells = grid_cells();
    if (cells > 60'000'000) throw RoughError("image grid too large");

    std::vector<int> res_sorted = inj.residue;
    std::sort(res_sorted.begin(), res_sorted.end());
    res_sorted.erase(std::unique(res_sorted.begin(), res_sorted.end()), res_sorted.end());
    residues_ = res_sorted;

    src_at_.assign(residues_.size(), std::vector<std::int64_t>(cells, -1));
    for (std::uint32_t x = 0; x < n_src_; ++x) {
        const std::size_t s = static_cast<std::size_t>(
            std::lower_bound(residues_.begin(), residues_.end(), inj.residue[x]) -
            residues_.begin());
        std::int64_t& slot = src_at_[s][grid_index(inj.map[x])];
        if (slot >= 0) throw RoughError("injectivized map has a colliding image point");
        slot = x;
    }

    // guaranteed-present base radius from the forward distortion bound:
    // a source mapping to base norm w sits within a(w + b) of the center
    const std::vector<int> sd = ri.source->bfs(ri.source_center);
    const int r_cov = *std::max_element(sd.begin(), sd.end());
    int w_present = static_cast<int>(std::floor(static_cast<double>(r_cov) / ri.a - ri.b + kEps));
    w_present = std::min(w_present, w_grid_);

    // nearest-present-base distance per residue (L1 BFS on the coordinate box)
    const int span = 2 * w_grid_ + 1;
    std::vector<std::vector<int>> near(residues_.size());
    for (std::size_t s = 0; s < residues_.size(); ++s) {
        auto& dist = near[s];
        dist.assign(cells, -1);
        std::vector<std::size_t> queue;
        for (std::size_t c = 0; c < cells; ++c)
            if (src_at_[s][c] >= 0) {
                dist[c] = 0;
                queue.push_back(c);
            }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t c = queue[head];
            std::size_t rem = c;
            int coord[3] = {0, 0, 0};
            for (int i = dim - 1; i >= 0; --i) {
                coord[i] = static_cast<int>(rem % span) - w_grid_;
                rem /= span;
            }
            std::size_t stride = 1;
            for (int i = dim - 1; i >= 0; --i) {
                if (coord[i] < w_grid_ && dist[c + stride] < 0) {
                    dist[c + stride] = dist[c] + 1;
                    queue.push_back(c + stride);
                }
                if (coord[i] > -w_grid_ && dist[c - stride] < 0) {
                    dist[c - stride] = dist[c] + 1;
                    queue.push_back(c - stride);
                }
                stride *= span;
            }
        }
    }

    // measured density radius over the representative probe set
    const int qhalf = q_ / 2;
    if (ball_->radius() < qhalf)
        throw RoughError("product ball too small to measure the image density");
    const int bn = dim;
    bool probed = false;
    for (std::uint32_t i = 0; i < ball_->size(); ++i) {
        if (ball_->dist(i) > ball_->radius() - qhalf) continue;
        const GroupElement& v = ball_->vertex(i);
        if (l1_norm(v, dim) > w_grid_)
            throw RoughError("density probe vertex outside the image extent");
        probed = true;
        int best = std::numeric_limits<int>::max();
        const std::size_t cell = grid_index(v);
        for (std::size_t s = 0; s < residues_.size(); ++s) {
            if (near[s][cell] < 0) continue;
            best = std::min(best, near[s][cell] +
                                      cyclic_distance(v[bn], residues_[s], q_));
        }
        if (best == std::numeric_limits<int>::max())
            throw RoughError("probe vertex sees no image point at all");
        b_w_ = std::max(b_w_, best);
    }
    if (!probed) throw RoughError("density probe set is empty");
    if (b_w_ > qhalf) throw RoughError("measured density radius exceeds q/2");

    w_cap_ = w_present - b_w_;
    if (w_cap_ < 0) throw RoughError("source window too small to cover any averaging set");

    // direct preimages per ball vertex
    direct_src_.assign(ball_->size(), -1);
    for (std::uint32_t x = 0; x < n_src_; ++x)
        if (auto idx = ball_->index_of(inj.map[x])) direct_src_[*idx] = x;

    // averaging-set sizes; zero marks vertices outside the covered window
    wy_count_.assign(ball_->size(), 0);
    std::vector<RotPrefix> cnt2;
    std::vector<std::vector<double>> cnt1;
    if (dim == 2) {
        cnt2.resize(residues_.size());
        std::vector<double> rot(static_cast<std::size_t>(span) * span);
        for (std::size_t s = 0; s < residues_.size(); ++s) {
            std::fill(rot.begin(), rot.end(), 0.0);
            for (std::size_t c = 0; c < cells; ++c) {
                if (src_at_[s][c] < 0) continue;
                const int x = static_cast<int>(c / span) - w_grid_;
                const int y = static_cast<int>(c % span) - w_grid_;
                rot[static_cast<std::size_t>(x + y + w_grid_) * span + (x - y + w_grid_)] = 1.0;
            }
            cnt2[s].build(w_grid_, rot);
        }
    } else if (dim == 1) {
        cnt1.assign(residues_.size(), std::vector<double>(cells + 1, 0.0));
        for (std::size_t s = 0; s < residues_.size(); ++s)
            for (std::size_t c = 0; c < cells; ++c)
                cnt1[s][c + 1] = cnt1[s][c] + (src_at_[s][c] >= 0 ? 1.0 : 0.0);
    }
    for (std::uint32_t i = 0; i < ball_->size(); ++i) {
        if (direct_src_[i] >= 0) {
            wy_count_[i] = 1;
            ++defined_count_;
            continue;
        }
        const GroupElement& v = ball_->vertex(i);
        if (l1_norm(v, dim) > w_cap_) continue;
        double total = 0.0;
        for (std::size_t s = 0; s < residues_.size(); ++s) {
            const int r = b_w_ - cyclic_distance(v[bn], residues_[s], q_);
            if (r < 0) continue;
            if (dim == 2) {
                const int p = static_cast<int>(v[0] + v[1]) + w_grid_;
                const int qq = static_cast<int>(v[0] - v[1]) + w_grid_;
                total += cnt2[s].box(p - r, p + r, qq - r, qq + r);
            } else if (dim == 1) {
                const int lo = std::max<int>(0, static_cast<int>(v[0]) + w_grid_ - r);
                const int hi =
                    std::min<int>(static_cast<int>(cells) - 1, static_cast<int>(v[0]) + w_grid_ + r);
                if (lo <= hi) total += cnt1[s][hi + 1] - cnt1[s][lo];
            } else {
                for (int dx = -r; dx <= r; ++dx)
                    for (int dy = -(r - std::abs(dx)); dy <= r - std::abs(dx); ++dy) {
                        const int rz = r - std::abs(dx) - std::abs(dy);
                        for (int dz = -rz; dz <= rz; ++dz) {
                            GroupElement w = v;
                            w[0] += dx;
                            w[1] += dy;
                            w[2] += dz;
                            if (l1_norm(w, dim) > w_grid_) continue;
                            if (src_at_[s][grid_index(w)] >= 0) total += 1.0;
                        }
                    }
            }
        }
        if (total < 0.5)
            throw RoughError("empty averaging set inside the covered window");
        wy_count_[i] = static_cast<std::int32_t>(total + 0.5);
        ++defined_count_;
    }
}

ExtensionField Extender::extend(const std::vector<double>& u) const {
    if (u.size() != n_src_) throw RoughError("field size does not match the source graph");
    ExtensionField out;
    out.ball = ball_;
    out.b_w = b_w_;
    out.count = wy_count_;
    out.direct.assign(ball_->size(), 0);
    out.sum.assign(ball_->size(), 0.0);

    const int span = 2 * w_grid_ + 1;
    const std::size_t cells = grid_cells();
    std::vector<RotPrefix> val2;
    std::vector<std::vector<double>> val1;
    if (dim == 2) {
        val2.resize(residues_.size());
        std::vector<double> rot(static_cast<std::size_t>(span) * span);
        for (std::size_t s = 0; s < residues_.size(); ++s) {
            std::fill(rot.begin(), rot.end(), 0.0);
            for (std::size_t c = 0; c < cells; ++c) {
                const std::int64_t src = src_at_[s][c];
                if (src < 0) continue;
                const int x = static_cast<int>(c / span) - w_grid_;
                const int y = static_cast<int>(c % span) - w_grid_;
                rot[static_cast<std::size_t>(x + y + w_grid_) * span + (x - y + w_grid_)] =
                    u[static_cast<std::size_t>(src)];
            }
            val2[s].build(w_grid_, rot);
        }
    } else if (dim == 1) {
        val1.assign(residues_.size(), std::vector<double>(cells + 1, 0.0));
        for (std::size_t s = 0; s < residues_.size(); ++s)
            for (std::size_t c = 0; c < cells; ++c)
                val1[s][c + 1] =
                    val1[s][c] + (src_at_[s][c] >= 0 ? u[static_cast<std::size_t>(src_at_[s][c])]
                                                     : 0.0);
    }

    const int bn = dim;
    for (std::uint32_t i = 0; i < ball_->size(); ++i) {
        if (direct_src_[i] >= 0) {
            out.sum[i] = u[static_cast<std::size_t>(direct_src_[i])];
            out.direct[i] = 1;
            continue;
        }
        if (wy_count_[i] == 0) continue;
        const GroupElement& v = ball_->vertex(i);
        double acc = 0.0;
        for (std::size_t s = 0; s < residues_.size(); ++s) {
            const int r = b_w_ - cyclic_distance(v[bn], residues_[s], q_);
            if (r < 0) continue;
            if (dim == 2) {
                const int p = static_cast<int>(v[0] + v[1]) + w_grid_;
                const int qq = static_cast<int>(v[0] - v[1]) + w_grid_;
                acc += val2[s].box(p - r, p + r, qq - r, qq + r);
            } else if (dim == 1) {
                const int lo = std::max<int>(0, static_cast<int>(v[0]) + w_grid_ - r);
                const int hi =
                    std::min<int>(static_cast<int>(cells) - 1, static_cast<int>(v[0]) + w_grid_ + r);
                if (lo <= hi) acc += val1[s][hi + 1] - val1[s][lo];
            } else {
                for (int dx = -r; dx <= r; ++dx)
                    for (int dy = -(r - std::abs(dx)); dy <= r - std::abs(dx); ++dy) {
                        const int rz = r - std::abs(dx) - std::abs(dy);
                        for (int dz = -rz; dz <= rz; ++dz) {
                            GroupElement w = v;
                            w[0] += dx;
                            w[1] += dy;
                            w[2] += dz;
                            if (l1_norm(w, dim) > w_grid_) continue;
                            const std::int64_t src = src_at_[s][grid_index(w)];
                            if (src >= 0) acc += u[static_cast<std::size_t>(src)];
                        }
                    }
            }
        }
        out.sum[i] = acc;
    }
    return out;
}

EProperties operator_E_properties(const Extender& ext, const Injectivization& inj, int n_fields,
                                  std::uint64_t seed) {
    if (n_fields < 2) throw RoughError("the audit needs at least two fields");
    EProperties rep;
    rep.n_fields = n_fields;
    const std::uint32_t n_src = static_cast<std::uint32_t>(inj.map.size());
    const CayleyBall& ball = *ext.ball();
    std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> src_of;
    src_of.reserve(inj.map.size());
    for (std::uint32_t x = 0; x < n_src; ++x) src_of.emplace(inj.map[x], x);

    // seeded fields quantized to 1/2^20 so averaging-window sums are exact
    std::vector<std::vector<double>> us(static_cast<std::size_t>(n_fields));
    std::vector<ExtensionField> es;
    es.reserve(static_cast<std::size_t>(n_fields));
    for (int k = 0; k < n_fields; ++k) {
        auto& u = us[static_cast<std::size_t>(k)];
        u.resize(n_src);
        for (std::uint32_t x = 0; x < n_src; ++x) {
            std::uint64_t st = mix_seed(seed, 7000 + static_cast<std::uint64_t>(k), x);
            u[x] = static_cast<double>(std::llround(seeded_uniform(st) * 1048576.0)) / 1048576.0;
        }
        es.push_back(ext.extend(u));
    }

    rep.direct_exact = true;
    rep.sup_norm_bounded = true;
    rep.injective = true;
    for (int k = 0; k < n_fields; ++k) {
        const auto& u = us[static_cast<std::size_t>(k)];
        const auto& e = es[static_cast<std::size_t>(k)];
        double umax = 0.0, emax = 0.0, ucov = 0.0;
        for (double v : u) umax = std::max(umax, std::fabs(v));
        for (std::uint32_t i = 0; i < ball.size(); ++i) {
            if (!e.defined(i)) continue;
            emax = std::max(emax, std::fabs(e.value(i)));
            if (e.direct[i]) {
                const double uv = u[src_of.at(ball.vertex(i))];
                if (e.value(i) != uv) rep.direct_exact = false;
                ucov = std::max(ucov, std::fabs(uv));
                ++rep.points_checked;
            }
        }
        if (emax > umax) rep.sup_norm_bounded = false;
        if (ucov > 0.0 && emax == 0.0) rep.injective = false;
    }

    // one-hot probe through the direct branch
    {
        std::vector<double> hot(n_src, 0.0);
        std::uint32_t probe_ball = 0;
        bool found = false;
        for (std::uint32_t i = 0; i < ball.size() && !found; ++i)
            if (es.front().direct[i]) {
                probe_ball = i;
                found = true;
            }
        if (!found) throw RoughError("no direct vertex available for the probe");
        hot[src_of.at(ball.vertex(probe_ball))] = 1.0;
        const ExtensionField eh = ext.extend(hot);
        if (eh.value(probe_ball) != 1.0) rep.injective = false;
    }

    // exact linearity: E(2u + 3v) against 2Eu + 3Ev on the shared
    // (sum, count) representation, plus E(u - u) = 0
    rep.max_linearity_defect = 0.0;
    for (int j = 0; j + 1 < n_fields; j += 2) {
        const auto& u = us[static_cast<std::size_t>(j)];
        const auto& v = us[static_cast<std::size_t>(j + 1)];
        std::vector<double> w(n_src);
        for (std::uint32_t x = 0; x < n_src; ++x) w[x] = 2.0 * u[x] + 3.0 * v[x];
        const ExtensionField ew = ext.extend(w);
        const ExtensionField ec =
            combine(es[static_cast<std::size_t>(j)], es[static_cast<std::size_t>(j + 1)], 2.0, 3.0);
        for (std::uint32_t i = 0; i < ball.size(); ++i) {
            if (!ew.defined(i)) continue;
            rep.max_linearity_defect =
                std::max(rep.max_linearity_defect, std::fabs(ew.value(i) - ec.value(i)));
            ++rep.points_checked;
        }
    }
    {
        const ExtensionField zero_direct = combine(es.front(), es.front(), 1.0, -1.0);
        std::vector<double> z(n_src, 0.0);
        const ExtensionField zero_ext = ext.extend(z);
        for (std::uint32_t i = 0; i < ball.size(); ++i)
            if (zero_ext.defined(i))
                rep.max_linearity_defect = std::max(
                    rep.max_linearity_defect, std::fabs(zero_ext.value(i) - zero_direct.value(i)));
    }
    rep.linear_exact = rep.max_linearity_defect == 0.0;
    return rep;
}

double mvl_constant(const ExtensionField& u, std::uint32_t y, int R) {
    const CayleyBall& ball = *u.ball;
    if (y >= ball.size()) throw RoughError("probe vertex out of range");
    if (R < 0) throw RoughError("probe radius must be >= 0");
    const int dy = ball.dist(y);
    if (dy + R > ball.radius())
        throw RoughError("probe ball leaves the enumerated window");
    const GroupElement& vy = ball.vertex(y);
    long double s2 = 0.0L;
    std::uint64_t cnt = 0;
    for (std::uint32_t i = 0; i < ball.size(); ++i) {
        const int di = ball.dist(i);
        if (di > dy + R) break; // layer order: nothing closer follows
        if (std::abs(di - dy) > R) continue;
        if (group_distance(ball.spec(), ball.vertex(i), vy) > R) continue;
        if (!u.defined(i))
            throw RoughError("extension undefined inside the probe ball");
        const long double v = u.value(i);
        s2 += v * v;
        ++cnt;
    }
    if (s2 == 0.0L) throw RoughError("zero denominator in the mean value ratio");
    const long double uy = u.value(y);
    return static_cast<double>(uy * uy * static_cast<long double>(cnt) / s2);
}

GraphDirichlet solve_graph_dirichlet(const FiniteGraph& g, const std::vector<int>& dist,
                                     int interior_radius,
                                     const std::vector<double>& boundary_values) {
    if (dist.size() != g.size() || boundary_values.size() != g.size())
        throw RoughError("distance or boundary vector size mismatch");
    if (interior_radius < 0) throw RoughError("interior radius must be >= 0");

    std::vector<std::int64_t> compact(g.size(), -1);
    std::vector<std::uint32_t> interior;
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (dist[v] <= interior_radius) {
            compact[v] = static_cast<std::int64_t>(interior.size());
            interior.push_back(v);
        }
    if (interior.empty()) throw RoughError("empty interior");

    kernels::LaplaceSystem sys;
    sys.n = static_cast<std::uint32_t>(interior.size());
    sys.offsets.assign(sys.n + 1, 0);
    sys.diag.resize(sys.n);
    sys.rhs.assign(sys.n, 0.0);
    bool have_boundary = false;
    long double bsum = 0.0L;
    std::uint64_t bcnt = 0;
    sys.boundary_min = std::numeric_limits<double>::infinity();
    sys.boundary_max = -std::numeric_limits<double>::infinity();
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (dist[v] == interior_radius + 1) {
            have_boundary = true;
            const double b = boundary_values[v];
            sys.boundary_min = std::min(sys.boundary_min, b);
            sys.boundary_max = std::max(sys.boundary_max, b);
            sys.boundary_abs_max = std::max(sys.boundary_abs_max, std::fabs(b));
            bsum += b;
            ++bcnt;
        }
    if (!have_boundary) throw RoughError("interior radius leaves no boundary sphere");

    for (std::uint32_t k = 0; k < sys.n; ++k) {
        const std::uint32_t v = interior[k];
        sys.diag[k] = g.degree(v);
        long double rhs = 0.0L;
        for (const std::uint32_t* p = g.neighbors_begin(v); p != g.neighbors_end(v); ++p) {
            if (compact[*p] >= 0)
                sys.cols.push_back(static_cast<std::uint32_t>(compact[*p]));
            else
                rhs += boundary_values[*p];
        }
        sys.offsets[k + 1] = static_cast<std::uint32_t>(sys.cols.size());
        sys.rhs[k] = static_cast<double>(rhs);
    }

    GraphDirichlet out;
    const double tol = std::max(1e-12 * std::max(sys.boundary_abs_max, 1.0), 1e-14);
    std::vector<double> x(sys.n, static_cast<double>(bsum / static_cast<long double>(bcnt)));
    const int maxit = 600 + 40 * interior_radius;
    kernels::CgResult cg = kernels::conjugate_gradient(sys, x, tol / 2.0, maxit);
    out.cg_iterations = cg.iterations;
    double res = kernels::residual_inf(sys, x.data());
    for (int round = 0; round < 20 && res > tol; ++round) {
        kernels::LaplaceSystem corr = sys;
        std::vector<double> ax(sys.n);
        kernels::matvec(sys, x.data(), ax.data());
        for (std::uint32_t i = 0; i < sys.n; ++i) corr.rhs[i] = sys.rhs[i] - ax[i];
        std::vector<double> c(sys.n, 0.0);
        kernels::CgResult cr = kernels::conjugate_gradient(corr, c, tol / 4.0, maxit);
        out.cg_iterations += cr.iterations;
        for (std::uint32_t i = 0; i < sys.n; ++i) x[i] += c[i];
        const double next = kernels::residual_inf(sys, x.data());
        if (next >= res * 0.5) {
            kernels::gauss_seidel_clamped(sys, x, 200, sys.boundary_min, sys.boundary_max);
            res = kernels::residual_inf(sys, x.data());
            break;
        }
        res = next;
    }
    for (std::uint32_t i = 0; i < sys.n; ++i)
        x[i] = std::clamp(x[i], sys.boundary_min, sys.boundary_max);
    res = kernels::residual_inf(sys, x.data());
    if (res > tol) {
        kernels::gauss_seidel_clamped(sys, x, 100, sys.boundary_min, sys.boundary_max);
        res = kernels::residual_inf(sys, x.data());
    }
    out.residual = res;
    out.converged = res <= 10.0 * tol;
    out.values.assign(g.size(), 0.0);
    for (std::uint32_t k = 0; k < sys.n; ++k) out.values[interior[k]] = x[k];
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (dist[v] == interior_radius + 1) out.values[v] = boundary_values[v];
    return out;
}

double graph_harmonic_defect(const FiniteGraph& g, const std::vector<int>& dist,
                             int interior_radius, const std::vector<double>& u) {
    if (dist.size() != g.size() || u.size() != g.size())
        throw RoughError("distance or field size mismatch");
    double worst = 0.0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (dist[v] > interior_radius) continue;
        long double acc = 0.0L;
        for (const std::uint32_t* p = g.neighbors_begin(v); p != g.neighbors_end(v); ++p)
            acc += static_cast<long double>(u[*p]) - static_cast<long double>(u[v]);
        worst = std::max(worst, static_cast<double>(std::fabs(static_cast<double>(acc))));
    }
    return worst;
}

double graph_mv_constant(const FiniteGraph& g, const std::vector<int>& dist_from_p,
                         const std::vector<double>& u, std::uint32_t p, int R) {
    if (dist_from_p.size() != g.size() || u.size() != g.size())
        throw RoughError("distance or field size mismatch");
    long double s2 = 0.0L;
    std::uint64_t cnt = 0;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (dist_from_p[v] > R) continue;
        s2 += static_cast<long double>(u[v]) * u[v];
        ++cnt;
    }
    if (s2 == 0.0L) throw RoughError("zero denominator in the mean value ratio");
    const long double up = u[p];
    return static_cast<double>(up * up * static_cast<long double>(cnt) / s2);
}

VolumeSandwich volume_sandwich(const RoughIsometry& ri, double c2_floor) {
    VolumeSandwich vs;
    vs.c1 = 1.0 / (2.0 * ri.a);
    vs.c2_floor = c2_floor;
    const std::vector<int> sd = ri.source->bfs(ri.source_center);
    const int r_src = *std::max_element(sd.begin(), sd.end());
    std::vector<std::uint64_t> size_x(static_cast<std::size_t>(r_src) + 1, 0);
    for (int d : sd) ++size_x[static_cast<std::size_t>(d)];
    for (std::size_t i = 1; i < size_x.size(); ++i) size_x[i] += size_x[i - 1];

    const int lo = ceil_int(6.0 * ri.a * ri.b);
    int hi = r_src;
    while (hi >= lo &&
           static_cast<int>(std::floor(vs.c1 * hi + kEps)) > ri.target_ball->radius())
        --hi;
    if (lo > hi) throw RoughError("window too small for the volume sandwich grid");
    vs.c2 = std::numeric_limits<double>::infinity();
    for (int R = lo; R <= hi; ++R) {
        const std::uint64_t vx = size_x[static_cast<std::size_t>(R)];
        const std::uint64_t vg =
            ri.target_ball->count_within(static_cast<int>(std::floor(vs.c1 * R + kEps)));
        const double ratio = static_cast<double>(vx) / static_cast<double>(vg);
        vs.grid.push_back(R);
        vs.ratios.push_back(ratio);
        vs.c2 = std::min(vs.c2, ratio);
    }
    vs.ok = vs.c2 >= c2_floor - 1e-12;
    return vs;
}

RoughSuiteResult run_rough_suite(const RoughSuiteConfig& cfg) {
    if (cfg.dim < 1 || cfg.dim > 3) throw RoughError("suite dimension must be in {1, 2, 3}");
    if (cfg.n_fields < 2) throw RoughError("suite needs at least two fields");
    if (cfg.mvl_radii.empty()) throw RoughError("suite needs at least one probe radius");
    RoughSuiteResult out;
    out.mvl_radii = cfg.mvl_radii;

    // exhaustive forward check on a small window
    {
        const SubdividedLattice chk = make_subdivided_lattice(cfg.dim, cfg.check_window_radius);
        const RoughIsometry ri =
            subdivision_map(chk, cfg.check_window_radius / 2, cfg.cache_dir);
        out.forward_check = check_rough_isometry(ri);
    }
    // rough inverse and composition on a medium window
    {
        const SubdividedLattice med = make_subdivided_lattice(cfg.dim, cfg.medium_window_radius);
        const RoughIsometry ri =
            subdivision_map(med, cfg.medium_window_radius / 2, cfg.cache_dir);
        const RoughInverse inv = rough_inverse(ri);
        out.inverse_check = inv.check;
        out.composition_check = check_composition(ri, inv, ri.a * ri.a, 4.0 * ri.a * ri.b);
    }
    // main window: injectivization, extension operator, mean value in the large
    const SubdividedLattice main_w = make_subdivided_lattice(cfg.dim, cfg.window_radius);
    const RoughIsometry ri_main =
        subdivision_map(main_w, cfg.window_radius / 2, cfg.cache_dir);
    const Injectivization inj =
        injectivize(ri_main, cfg.product_ball_radius, cfg.cache_dir, cfg.max_vertices);
    out.q = inj.q;
    out.max_fiber = inj.max_fiber;
    out.injective = inj.injective;
    out.projection_consistent = inj.projection_consistent;

    const Extender ext(ri_main, inj);
    out.density_radius = ext.density_radius();
    out.e_properties = operator_E_properties(ext, inj, cfg.n_fields, cfg.seed);

    // seeded harmonic fields on the graph, extended to the product ball
    const FiniteGraph& g = *main_w.graph;
    const std::vector<int> sd = g.bfs(main_w.center);
    const int r_src = *std::max_element(sd.begin(), sd.end());
    std::vector<ExtensionField> fields;
    fields.reserve(static_cast<std::size_t>(cfg.n_fields));
    for (int k = 0; k < cfg.n_fields; ++k) {
        std::vector<double> bvals(g.size(), 0.0);
        for (std::uint32_t v = 0; v < g.size(); ++v)
            if (sd[v] == r_src) {
                std::uint64_t st = mix_seed(cfg.seed, 9000 + static_cast<std::uint64_t>(k), v);
                bvals[v] = seeded_uniform(st);
            }
        const GraphDirichlet gd = solve_graph_dirichlet(g, sd, r_src - 1, bvals);
        if (!gd.converged) throw RoughError("graph Dirichlet solve failed to converge");
        const double defect = graph_harmonic_defect(g, sd, r_src - 1, gd.values);
        out.max_harmonic_defect = std::max(out.max_harmonic_defect, defect);
        fields.push_back(ext.extend(gd.values));
    }

    out.mvl_max_by_radius.assign(cfg.mvl_radii.size(), 0.0);
    for (std::size_t r = 0; r < cfg.mvl_radii.size(); ++r) {
        double mx = 0.0;
        for (const ExtensionField& f : fields)
            mx = std::max(mx, mvl_constant(f, 0, cfg.mvl_radii[r]));
        out.mvl_max_by_radius[r] = mx;
    }
    const double mn =
        *std::min_element(out.mvl_max_by_radius.begin(), out.mvl_max_by_radius.end());
    const double mx =
        *std::max_element(out.mvl_max_by_radius.begin(), out.mvl_max_by_radius.end());
    if (mn <= 0.0) throw RoughError("degenerate mean value ratios");
    out.mvl_stability = mx / mn;

    out.sandwich = volume_sandwich(ri_main, 1.0);

    out.ok = out.forward_check.ok && out.inverse_check.ok && out.composition_check.ok &&
             out.injective && out.projection_consistent && out.e_properties.linear_exact &&
             out.e_properties.injective && out.e_properties.direct_exact &&
             out.e_properties.sup_norm_bounded && out.mvl_stability <= 10.0 &&
             out.max_harmonic_defect <= cfg.harm_tol && out.sandwich.ok;
    return out;
}

} // namespace hdim
