#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdim/groups.hpp"

namespace hdim {

class BallError : public std::runtime_error {
public:
    explicit BallError(const std::string& what) : std::runtime_error(what) {}
};

class MemoryCapError : public BallError {
public:
    explicit MemoryCapError(const std::string& what) : BallError(what) {}
};

class CacheError : public BallError {
public:
    explicit CacheError(const std::string& what) : BallError(what) {}
};

constexpr std::uint64_t kDefaultVertexCap = 20'000'000;

// Closed word-metric ball around a center, enumerated breadth first.
// Vertex order is (distance layer, lexicographic coordinates), so indices of
// B(r) for any r <= radius form a prefix. Adjacency keeps only edges with both
// endpoints inside the ball, neighbors listed in generator order per vertex.
class CayleyBall {
public:
    const GroupSpec& spec() const { return spec_; }
    const GroupElement& center() const { return center_; }
    int radius() const { return radius_; }
    const std::vector<GroupElement>& generators() const { return gens_; }

    std::uint32_t size() const { return static_cast<std::uint32_t>(vertices_.size()); }
    const GroupElement& vertex(std::uint32_t i) const { return vertices_[i]; }
    int dist(std::uint32_t i) const { return dist_[i]; }

    // |B(r)| for 0 <= r <= radius; vertices [0, count_within(r)) are exactly B(r).
    std::uint32_t count_within(int r) const;

    std::uint32_t degree(std::uint32_t i) const { return adj_offsets_[i + 1] - adj_offsets_[i]; }
    const std::uint32_t* neighbors_begin(std::uint32_t i) const { return adj_.data() + adj_offsets_[i]; }
    const std::uint32_t* neighbors_end(std::uint32_t i) const { return adj_.data() + adj_offsets_[i + 1]; }
    const std::vector<std::uint32_t>& adjacency_offsets() const { return adj_offsets_; }
    const std::vector<std::uint32_t>& adjacency() const { return adj_; }

    std::optional<std::uint32_t> index_of(const GroupElement& g) const;

private:
    friend std::shared_ptr<const CayleyBall> enumerate_ball(const GroupSpec&, const GroupElement&,
                                                            int, std::uint64_t);
    friend std::shared_ptr<const CayleyBall> cache_load(const GroupSpec&, const GroupElement&, int,
                                                        const std::string&);
    CayleyBall() = default;
    void build_index_and_layers();

    GroupSpec spec_;
    GroupElement center_;
    int radius_ = 0;
    std::vector<GroupElement> gens_;
    std::vector<GroupElement> vertices_;
    std::vector<std::int32_t> dist_;
    std::vector<std::uint32_t> adj_offsets_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::uint32_t> layer_count_; // cumulative: layer_count_[r] = |B(r-1)|
    std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> index_;
};

// Sorted vertex indices into a specific ball.
struct VertexSubset {
    std::vector<std::uint32_t> indices;
};

std::shared_ptr<const CayleyBall> enumerate_ball(const GroupSpec& spec, const GroupElement& center,
                                                 int radius,
                                                 std::uint64_t max_vertices = kDefaultVertexCap);

// Outer vertex boundary of B(r): vertices at distance exactly r+1.
// Requires r + 1 <= radius so the layer is complete.
VertexSubset boundary(const CayleyBall& ball, int r);

// Binary ball cache, one file per (group, convention, center, radius).
std::string cache_path(const GroupSpec& spec, const GroupElement& center, int radius,
                       const std::string& dir);
void cache_store(const CayleyBall& ball, const std::string& dir);
std::shared_ptr<const CayleyBall> cache_load(const GroupSpec& spec, const GroupElement& center,
                                             int radius, const std::string& dir);
// Load when present and intact, otherwise enumerate and store.
std::shared_ptr<const CayleyBall> ball_cached(const GroupSpec& spec, const GroupElement& center,
                                              int radius, const std::string& dir,
                                              std::uint64_t max_vertices = kDefaultVertexCap);

} // namespace hdim
