#include "hdim/ball.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "hdim/sha256.hpp"

namespace hdim {

using nlohmann::json;
namespace fs = std::filesystem;

void CayleyBall::build_index_and_layers() {
    index_.clear();
    index_.reserve(vertices_.size() * 2);
    for (std::uint32_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], i);
    layer_count_.assign(static_cast<std::size_t>(radius_) + 2, 0);
    for (std::int32_t d : dist_) ++layer_count_[static_cast<std::size_t>(d) + 1];
    for (std::size_t r = 1; r < layer_count_.size(); ++r) layer_count_[r] += layer_count_[r - 1];
}

std::uint32_t CayleyBall::count_within(int r) const {
    if (r < 0 || r > radius_) throw BallError("count_within: radius out of range");
    return layer_count_[static_cast<std::size_t>(r) + 1];
}

std::optional<std::uint32_t> CayleyBall::index_of(const GroupElement& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::shared_ptr<const CayleyBall> enumerate_ball(const GroupSpec& spec, const GroupElement& center,
                                                 int radius, std::uint64_t max_vertices) {
    if (radius < 0) throw BallError("radius must be >= 0");
    auto ball = std::shared_ptr<CayleyBall>(new CayleyBall());
    ball->spec_ = spec;
    ball->center_ = center;
    ball->radius_ = radius;
    ball->gens_ = standard_generators(spec);

    std::unordered_map<GroupElement, std::uint32_t, GroupElementHash> seen;
    ball->vertices_.push_back(center);
    ball->dist_.push_back(0);
    seen.emplace(center, 0u);

    std::uint32_t layer_begin = 0;
    for (int depth = 1; depth <= radius; ++depth) {
        const std::uint32_t layer_end = static_cast<std::uint32_t>(ball->vertices_.size());
        std::vector<GroupElement> staging;
        for (std::uint32_t i = layer_begin; i < layer_end; ++i) {
            const GroupElement v = ball->vertices_[i];
            for (const GroupElement& s : ball->gens_) {
                GroupElement w = multiply(spec, v, s);
                if (seen.find(w) == seen.end()) staging.push_back(w);
            }
        }
        std::sort(staging.begin(), staging.end());
        staging.erase(std::unique(staging.begin(), staging.end()), staging.end());
        if (ball->vertices_.size() + staging.size() > max_vertices)
            throw MemoryCapError("ball enumeration exceeds vertex cap of " +
                                 std::to_string(max_vertices));
        for (const GroupElement& w : staging) {
            seen.emplace(w, static_cast<std::uint32_t>(ball->vertices_.size()));
            ball->vertices_.push_back(w);
            ball->dist_.push_back(depth);
        }
        layer_begin = layer_end;
    }

    const std::uint32_t n = static_cast<std::uint32_t>(ball->vertices_.size());
    ball->adj_offsets_.assign(n + 1, 0);
    ball->adj_.reserve(static_cast<std::size_t>(n) * ball->gens_.size());
    for (std::uint32_t i = 0; i < n; ++i) {
        for (const GroupElement& s : ball->gens_) {
            GroupElement w = multiply(spec, ball->vertices_[i], s);
            auto it = seen.find(w);
            if (it != seen.end()) ball->adj_.push_back(it->second);
        }
        ball->adj_offsets_[i + 1] = static_cast<std::uint32_t>(ball->adj_.size());
    }
    ball->build_index_and_layers();

    // interior vertices must have full degree |S|
    const std::uint32_t deg = static_cast<std::uint32_t>(ball->gens_.size());
    for (std::uint32_t i = 0; i < n && ball->dist_[i] + 1 <= radius; ++i)
        if (ball->degree(i) != deg) throw BallError("interior vertex with incomplete degree");

    return ball;
}

VertexSubset boundary(const CayleyBall& ball, int r) {
    if (r < 0) throw BallError("boundary: r must be >= 0");
    if (r + 1 > ball.radius())
        throw BallError("boundary: layer r+1 not contained in the enumerated ball");
    VertexSubset out;
    const std::uint32_t lo = ball.count_within(r);
    const std::uint32_t hi = ball.count_within(r + 1);
    out.indices.reserve(hi - lo);
    for (std::uint32_t i = lo; i < hi; ++i) out.indices.push_back(i);
    return out;
}

namespace {

constexpr int kCacheVersion = 1;

std::string cache_key_hash(const GroupSpec& spec, const GroupElement& center) {
    const std::string key =
        spec_to_json(spec) + "|" + generator_convention(spec) + "|" + element_to_string(center);
    return sha256_hex(key).substr(0, 16);
}

template <typename T> void append_bytes(std::string& buf, const T* data, std::size_t count) {
    buf.append(reinterpret_cast<const char*>(data), count * sizeof(T));
}

template <typename T> void read_bytes(const std::string& buf, std::size_t& pos, T* data,
                                      std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    if (pos + bytes > buf.size()) throw CacheError("cache payload truncated");
    std::memcpy(data, buf.data() + pos, bytes);
    pos += bytes;
}

} // namespace

std::string cache_path(const GroupSpec& spec, const GroupElement& center, int radius,
                       const std::string& dir) {
    fs::path p(dir);
    p /= cache_key_hash(spec, center);
    p /= "r" + std::to_string(radius) + ".ball";
    return p.string();
}

void cache_store(const CayleyBall& ball, const std::string& dir) {
    const int arity = coord_count(ball.spec());
    std::string payload;
    const std::uint32_t n = ball.size();
    payload.reserve(static_cast<std::size_t>(n) * (arity * 8 + 4) + ball.adjacency().size() * 4);
    for (std::uint32_t i = 0; i < n; ++i)
        append_bytes(payload, ball.vertex(i).c.data(), static_cast<std::size_t>(arity));
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::int32_t d = ball.dist(i);
        append_bytes(payload, &d, 1);
    }
    append_bytes(payload, ball.adjacency_offsets().data(), ball.adjacency_offsets().size());
    append_bytes(payload, ball.adjacency().data(), ball.adjacency().size());

    json header;
    header["magic"] = "hdim-ball";
    header["version"] = kCacheVersion;
    header["spec"] = json::parse(spec_to_json(ball.spec()));
    header["convention"] = generator_convention(ball.spec());
    header["center"] = element_to_string(ball.center());
    header["radius"] = ball.radius();
    header["nvertices"] = n;
    header["nedges"] = ball.adjacency().size();
    header["payload_bytes"] = payload.size();
    header["payload_sha256"] = sha256_hex(payload);

    const fs::path path(cache_path(ball.spec(), ball.center(), ball.radius(), dir));
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw CacheError("cannot open cache file for writing: " + tmp.string());
        os << header.dump() << '\n';
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!os) throw CacheError("short write to cache file: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::shared_ptr<const CayleyBall> cache_load(const GroupSpec& spec, const GroupElement& center,
                                             int radius, const std::string& dir) {
    const fs::path path(cache_path(spec, center, radius, dir));
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CacheError("cache file not found: " + path.string());
    std::string header_line;
    if (!std::getline(is, header_line)) throw CacheError("cache header missing");
    json header;
    try {
        header = json::parse(header_line);
    } catch (const json::exception& e) {
        throw CacheError(std::string("cache header unreadable: ") + e.what());
    }
    if (header.value("magic", "") != "hdim-ball") throw CacheError("cache magic mismatch");
    if (header.value("version", -1) != kCacheVersion)
        throw CacheError("cache version mismatch");
    if (spec_from_json(header.at("spec").dump()) != spec ||
        header.value("convention", "") != generator_convention(spec) ||
        header.value("center", "") != element_to_string(center) ||
        header.value("radius", -1) != radius)
        throw CacheError("cache key mismatch (group/convention/center/radius)");

    const std::size_t payload_bytes = header.at("payload_bytes").get<std::size_t>();
    std::string payload(payload_bytes, '\0');
    is.read(payload.data(), static_cast<std::streamsize>(payload_bytes));
    if (static_cast<std::size_t>(is.gcount()) != payload_bytes)
        throw CacheError("cache payload truncated");
    if (sha256_hex(payload) != header.value("payload_sha256", ""))
        throw CacheError("cache payload checksum mismatch");

    auto ball = std::shared_ptr<CayleyBall>(new CayleyBall());
    ball->spec_ = spec;
    ball->center_ = center;
    ball->radius_ = radius;
    ball->gens_ = standard_generators(spec);
    const std::uint32_t n = header.at("nvertices").get<std::uint32_t>();
    const std::size_t nedges = header.at("nedges").get<std::size_t>();
    const int arity = coord_count(spec);
    ball->vertices_.resize(n);
    ball->dist_.resize(n);
    ball->adj_offsets_.resize(static_cast<std::size_t>(n) + 1);
    ball->adj_.resize(nedges);
    std::size_t pos = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        ball->vertices_[i].n = static_cast<std::uint8_t>(arity);
        read_bytes(payload, pos, ball->vertices_[i].c.data(), static_cast<std::size_t>(arity));
    }
    read_bytes(payload, pos, ball->dist_.data(), n);
    read_bytes(payload, pos, ball->adj_offsets_.data(), ball->adj_offsets_.size());
    read_bytes(payload, pos, ball->adj_.data(), nedges);
    if (pos != payload.size()) throw CacheError("cache payload has trailing bytes");
    ball->build_index_and_layers();
    return ball;
}

std::shared_ptr<const CayleyBall> ball_cached(const GroupSpec& spec, const GroupElement& center,
                                              int radius, const std::string& dir,
                                              std::uint64_t max_vertices) {
    if (!dir.empty()) {
        try {
            return cache_load(spec, center, radius, dir);
        } catch (const CacheError&) {
            // fall through to a fresh enumeration
        }
    }
    auto ball = enumerate_ball(spec, center, radius, max_vertices);
    if (!dir.empty()) cache_store(*ball, dir);
    return ball;
}

} // namespace hdim
