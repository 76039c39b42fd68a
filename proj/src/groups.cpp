#include "hdim/groups.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace hdim {

using nlohmann::json;

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw OverflowError("64-bit overflow in coordinate addition");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw OverflowError("64-bit overflow in coordinate multiplication");
    return r;
}

GroupSpec GroupSpec::lattice(int dim) {
    if (dim < 1 || dim > 6) throw SpecError("lattice dimension must be in [1,6]");
    GroupSpec s;
    s.kind = GroupKind::Lattice;
    s.lattice_dim = dim;
    return s;
}

GroupSpec GroupSpec::heisenberg() {
    GroupSpec s;
    s.kind = GroupKind::Heisenberg;
    return s;
}

GroupSpec GroupSpec::product(const GroupSpec& base, std::int64_t q) {
    if (q < 1) throw SpecError("cyclic order must be >= 1");
    GroupSpec s;
    s.kind = GroupKind::Product;
    s.base = std::make_shared<GroupSpec>(base);
    s.cyclic_order = q;
    if (coord_count(s) > GroupElement::kMaxCoords)
        throw SpecError("element arity exceeds supported maximum");
    return s;
}

bool operator==(const GroupSpec& a, const GroupSpec& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case GroupKind::Lattice: return a.lattice_dim == b.lattice_dim;
    case GroupKind::Heisenberg: return true;
    case GroupKind::Product:
        return a.cyclic_order == b.cyclic_order && *a.base == *b.base;
    }
    return false;
}

static json spec_to_json_obj(const GroupSpec& spec) {
    json j;
    switch (spec.kind) {
    case GroupKind::Lattice:
        j["kind"] = "lattice";
        j["D"] = spec.lattice_dim;
        break;
    case GroupKind::Heisenberg:
        j["kind"] = "heisenberg";
        break;
    case GroupKind::Product:
        j["kind"] = "product";
        j["base"] = json::parse(spec_to_json(*spec.base));
        j["q"] = spec.cyclic_order;
        break;
    }
    return j;
}

std::string spec_to_json(const GroupSpec& spec) { return spec_to_json_obj(spec).dump(); }

static GroupSpec spec_from_json_obj(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SpecError("group spec must be an object with a 'kind' key");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "lattice") return GroupSpec::lattice(j.at("D").get<int>());
    if (kind == "heisenberg") return GroupSpec::heisenberg();
    if (kind == "product")
        return GroupSpec::product(spec_from_json_obj(j.at("base")),
                                  j.at("q").get<std::int64_t>());
    throw SpecError("unknown group kind: " + kind);
}

GroupSpec spec_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SpecError(std::string("invalid group spec JSON: ") + e.what());
    }
    return spec_from_json_obj(j);
}

bool operator==(const GroupElement& a, const GroupElement& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
        if (a.c[static_cast<std::size_t>(i)] != b.c[static_cast<std::size_t>(i)]) return false;
    return true;
}

bool operator<(const GroupElement& a, const GroupElement& b) {
    if (a.n != b.n) return a.n < b.n;
    for (int i = 0; i < a.n; ++i) {
        const auto x = a.c[static_cast<std::size_t>(i)];
        const auto y = b.c[static_cast<std::size_t>(i)];
        if (x != y) return x < y;
    }
    return false;
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ g.n;
    for (int i = 0; i < g.n; ++i) {
        std::uint64_t k = static_cast<std::uint64_t>(g.c[static_cast<std::size_t>(i)]);
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        h = (h ^ k) * 0xc4ceb9fe1a85ec53ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
}

int coord_count(const GroupSpec& spec) {
    switch (spec.kind) {
    case GroupKind::Lattice: return spec.lattice_dim;
    case GroupKind::Heisenberg: return 3;
    case GroupKind::Product: return coord_count(*spec.base) + 1;
    }
    return 0;
}

GroupElement identity(const GroupSpec& spec) {
    GroupElement g;
    g.n = static_cast<std::uint8_t>(coord_count(spec));
    return g;
}

static std::int64_t mod_q(std::int64_t v, std::int64_t q) {
    std::int64_t r = v % q;
    return r < 0 ? r + q : r;
}

GroupElement multiply(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
    GroupElement r;
    r.n = a.n;
    switch (spec.kind) {
    case GroupKind::Lattice:
        for (int i = 0; i < a.n; ++i) r[i] = checked_add(a[i], b[i]);
        return r;
    case GroupKind::Heisenberg:
        // (a1,a2,a3)(b1,b2,b3) = (a1+b1, a2+b2, a3+b3+a1*b2)
        r[0] = checked_add(a[0], b[0]);
        r[1] = checked_add(a[1], b[1]);
        r[2] = checked_add(checked_add(a[2], b[2]), checked_mul(a[0], b[1]));
        return r;
    case GroupKind::Product: {
        GroupElement ab, bb;
        const int bn = a.n - 1;
        ab.n = bb.n = static_cast<std::uint8_t>(bn);
        for (int i = 0; i < bn; ++i) { ab[i] = a[i]; bb[i] = b[i]; }
        GroupElement rb = multiply(*spec.base, ab, bb);
        for (int i = 0; i < bn; ++i) r[i] = rb[i];
        r[bn] = mod_q(checked_add(a[bn], b[bn]), spec.cyclic_order);
        return r;
    }
    }
    throw SpecError("unreachable group kind");
}

GroupElement inverse(const GroupSpec& spec, const GroupElement& a) {
    GroupElement r;
    r.n = a.n;
    switch (spec.kind) {
    case GroupKind::Lattice:
        for (int i = 0; i < a.n; ++i) r[i] = checked_mul(a[i], -1);
        return r;
    case GroupKind::Heisenberg:
        // (a,b,c)^-1 = (-a,-b,ab-c)
        r[0] = checked_mul(a[0], -1);
        r[1] = checked_mul(a[1], -1);
        r[2] = checked_add(checked_mul(a[0], a[1]), checked_mul(a[2], -1));
        return r;
    case GroupKind::Product: {
        GroupElement ab;
        const int bn = a.n - 1;
        ab.n = static_cast<std::uint8_t>(bn);
        for (int i = 0; i < bn; ++i) ab[i] = a[i];
        GroupElement rb = inverse(*spec.base, ab);
        for (int i = 0; i < bn; ++i) r[i] = rb[i];
        r[bn] = mod_q(-a[bn], spec.cyclic_order);
        return r;
    }
    }
    throw SpecError("unreachable group kind");
}

std::vector<GroupElement> standard_generators(const GroupSpec& spec) {
    std::vector<GroupElement> gens;
    const GroupElement e = identity(spec);
    switch (spec.kind) {
    case GroupKind::Lattice:
        for (int i = 0; i < spec.lattice_dim; ++i) {
            GroupElement p = e, m = e;
            p[i] = 1;
            m[i] = -1;
            gens.push_back(p);
            gens.push_back(m);
        }
        break;
    case GroupKind::Heisenberg:
        for (int i = 0; i < 2; ++i) {
            GroupElement p = e, m = e;
            p[i] = 1;
            m[i] = -1;
            gens.push_back(p);
            gens.push_back(m);
        }
        break;
    case GroupKind::Product: {
        const int bn = coord_count(*spec.base);
        for (const GroupElement& s : standard_generators(*spec.base)) {
            GroupElement g = e;
            for (int i = 0; i < bn; ++i) g[i] = s[i];
            gens.push_back(g);
        }
        GroupElement up = e, down = e;
        up[bn] = mod_q(1, spec.cyclic_order);
        down[bn] = mod_q(-1, spec.cyclic_order);
        gens.push_back(up);
        gens.push_back(down);
        break;
    }
    }
    // Symmetric set, deduplicated, identity excluded.
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    gens.erase(std::remove(gens.begin(), gens.end(), e), gens.end());
    return gens;
}

std::string generator_convention(const GroupSpec& spec) {
    switch (spec.kind) {
    case GroupKind::Lattice: return "standard:lattice-unit-vectors";
    case GroupKind::Heisenberg: return "standard:heisenberg-xy";
    case GroupKind::Product:
        return generator_convention(*spec.base) + "+cyclic-step";
    }
    return "standard";
}

int nominal_growth_degree(const GroupSpec& spec) {
    switch (spec.kind) {
    case GroupKind::Lattice: return spec.lattice_dim;
    case GroupKind::Heisenberg: return 4;
    case GroupKind::Product: return nominal_growth_degree(*spec.base);
    }
    return 0;
}

std::string element_to_string(const GroupElement& g) {
    std::ostringstream os;
    for (int i = 0; i < g.n; ++i) {
        if (i) os << ',';
        os << g.c[static_cast<std::size_t>(i)];
    }
    return os.str();
}

GroupElement element_from_string(const GroupSpec& spec, const std::string& text) {
    std::vector<std::int64_t> coords;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            throw SpecError("invalid element coordinate: " + tok);
        }
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw SpecError("invalid element coordinate: " + tok);
        coords.push_back(v);
    }
    return make_element(spec, coords);
}

GroupElement make_element(const GroupSpec& spec, const std::vector<std::int64_t>& coords) {
    const int n = coord_count(spec);
    if (static_cast<int>(coords.size()) != n)
        throw SpecError("expected " + std::to_string(n) + " coordinates, got " +
                        std::to_string(coords.size()));
    GroupElement g;
    g.n = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) g[i] = coords[static_cast<std::size_t>(i)];
    if (spec.kind == GroupKind::Product) {
        if (g[n - 1] < 0 || g[n - 1] >= spec.cyclic_order)
            throw SpecError("residue coordinate out of range");
    }
    return g;
}

} // namespace hdim
