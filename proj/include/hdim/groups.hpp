#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdim {

// Coordinate arithmetic that leaves the 64-bit range is a hard error.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

enum class GroupKind { Lattice, Heisenberg, Product };

// Description of a finitely generated group: free abelian Z^D, the discrete
// Heisenberg group H3(Z), or a direct product base x Z_q.
struct GroupSpec {
    GroupKind kind = GroupKind::Lattice;
    int lattice_dim = 1;                      // Lattice only
    std::shared_ptr<const GroupSpec> base;    // Product only
    std::int64_t cyclic_order = 0;            // Product only, q >= 1

    static GroupSpec lattice(int dim);
    static GroupSpec heisenberg();
    static GroupSpec product(const GroupSpec& base, std::int64_t q);
};

bool operator==(const GroupSpec& a, const GroupSpec& b);
inline bool operator!=(const GroupSpec& a, const GroupSpec& b) { return !(a == b); }

// Canonical JSON, e.g. {"kind":"lattice","D":2} or {"kind":"product","base":{...},"q":16}.
std::string spec_to_json(const GroupSpec& spec);
GroupSpec spec_from_json(const std::string& json_text);

// Group elements are short integer coordinate tuples:
//   lattice: D coords; heisenberg: (a,b,c); product: base coords + residue.
struct GroupElement {
    static constexpr int kMaxCoords = 8;
    std::array<std::int64_t, kMaxCoords> c{};
    std::uint8_t n = 0;

    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

bool operator==(const GroupElement& a, const GroupElement& b);
inline bool operator!=(const GroupElement& a, const GroupElement& b) { return !(a == b); }
// Lexicographic coordinate order; elements must share arity.
bool operator<(const GroupElement& a, const GroupElement& b);

struct GroupElementHash {
    std::size_t operator()(const GroupElement& g) const noexcept;
};

int coord_count(const GroupSpec& spec);
GroupElement identity(const GroupSpec& spec);
GroupElement multiply(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupSpec& spec, const GroupElement& a);

// Fixed symmetric generating sets: lattice {±e_i}; heisenberg
// {(±1,0,0),(0,±1,0)}; product S_base x {0} plus (e,±1 mod q), deduplicated,
// identity excluded (so q=1 contributes nothing and q=2 one element).
std::vector<GroupElement> standard_generators(const GroupSpec& spec);

// Convention tag recorded in every report header.
std::string generator_convention(const GroupSpec& spec);

// Nominal homogeneous growth degree: D for Z^D, 4 for Heisenberg, and the
// base degree for products with a finite cyclic factor.
int nominal_growth_degree(const GroupSpec& spec);

// Comma-joined coordinates, e.g. "1,-2,0".
std::string element_to_string(const GroupElement& g);
GroupElement element_from_string(const GroupSpec& spec, const std::string& text);

GroupElement make_element(const GroupSpec& spec, const std::vector<std::int64_t>& coords);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

} // namespace hdim
