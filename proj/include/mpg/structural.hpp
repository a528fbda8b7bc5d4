#pragma once

#include "mpg/game_model.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <vector>

namespace mpg {

/// Largest state count the bitmask-based structural analysis can represent.
inline constexpr std::size_t kMaxStructuralStates = 63;

/// Subset of states, stored as a bitmask. Doubles as a Boolean vector in {0,1}^n.
class StateSet {
public:
    constexpr StateSet() = default;
    static constexpr StateSet from_bits(std::uint64_t bits) { return StateSet(bits); }
    static constexpr StateSet full(std::size_t n) {
        return StateSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }
    static StateSet of(std::initializer_list<std::size_t> members) {
        StateSet s;
        for (std::size_t i : members) s.insert(i);
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
    constexpr void insert(std::size_t i) { bits_ |= std::uint64_t{1} << i; }
    constexpr void erase(std::size_t i) { bits_ &= ~(std::uint64_t{1} << i); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool subset_of(StateSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(StateSet other) const { return (bits_ & other.bits_) != 0; }
    constexpr StateSet complement(std::size_t n) const { return StateSet(~bits_ & full(n).bits_); }
    std::vector<std::size_t> members() const;

    friend constexpr StateSet operator|(StateSet a, StateSet b) { return StateSet(a.bits_ | b.bits_); }
    friend constexpr StateSet operator&(StateSet a, StateSet b) { return StateSet(a.bits_ & b.bits_); }
    friend constexpr bool operator==(StateSet, StateSet) = default;

private:
    constexpr explicit StateSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

/// Indicator vector 1_K of a subset, i.e. a point of {0,1}^n.
using BooleanVector = StateSet;

/// Orders subsets by cardinality, then lexicographically by members.
bool subset_order(StateSet a, StateSet b);

/// Boolean abstractions of the payment-free operator, built from transition supports only.
class SupportAbstraction {
public:
    explicit SupportAbstraction(const GameSpec& game);

    std::size_t state_count() const { return n_; }
    /// [F+(x)]_i = min_a max_b max_{j in supp P_i^{ab}} x_j.
    BooleanVector upper(BooleanVector x) const;
    /// [F-(x)]_i = min_a max_b min_{j in supp P_i^{ab}} x_j.
    BooleanVector lower(BooleanVector x) const;

    bool in_minus_family(StateSet i_set) const;
    bool in_plus_family(StateSet j_set) const;

private:
    std::size_t n_;
    // supports_[i][a][b]
    std::vector<std::vector<std::vector<std::uint64_t>>> supports_;
};

BooleanVector boolean_upper(const GameSpec& game, BooleanVector x);
BooleanVector boolean_lower(const GameSpec& game, BooleanVector x);

enum class FamilyTag { Minus, Plus };

struct SubsetFamily {
    FamilyTag tag = FamilyTag::Minus;
    std::vector<StateSet> members; // sorted by subset_order

    bool contains(StateSet s) const;
};

struct StructuralOptions {
    /// Largest n accepted for the 2^n family enumeration.
    std::size_t state_cap = 20;
    double witness_tolerance = 1e-8;
    std::size_t witness_budget = 100000;
    /// Number of closed sets for which the verdict also computes a fixed-point witness.
    std::size_t max_witnesses = 16;
};

struct Families {
    SubsetFamily minus;
    SubsetFamily plus;
};

/// F- and F+ by full enumeration of the 2^n subsets.
Families compute_families(const GameSpec& game, const StructuralOptions& options = {});

/// Phi(I): greatest J in F+ disjoint from I.
StateSet galois_phi(const GameSpec& game, StateSet i_set);
/// Phi*(J): greatest I in F- disjoint from J.
StateSet galois_phi_star(const GameSpec& game, StateSet j_set);

StateSet galois_phi(const SupportAbstraction& abstraction, StateSet i_set);
StateSet galois_phi_star(const SupportAbstraction& abstraction, StateSet j_set);

/// Approximate nontrivial fixed point of the recession function.
struct FixedPointWitness {
    StateSet closed_set;
    StateVector point;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Whether argmin(point) equals closed_set; only containment is guaranteed.
    bool argmin_matches = false;
};

enum class StructuralVerdict { SolvableForAllPayments, NotStructurallySolvable };

struct GaloisReport {
    SubsetFamily minus;
    SubsetFamily plus;
    std::map<std::uint64_t, StateSet> phi;      // keyed by I.bits()
    std::map<std::uint64_t, StateSet> phi_star; // keyed by J.bits()
    std::vector<StateSet> closed_nontrivial;
    std::vector<FixedPointWitness> witnesses;
    StructuralVerdict verdict = StructuralVerdict::SolvableForAllPayments;

    bool solvable() const { return verdict == StructuralVerdict::SolvableForAllPayments; }
};

GaloisReport structural_verdict(const GameSpec& game, const StructuralOptions& options = {});

/// Monotone recession iteration from 1_{Phi(I)} for a closed nontrivial I.
FixedPointWitness nontrivial_fixed_point_witness(const GameSpec& game, StateSet closed_set,
                                                 const StructuralOptions& options = {});

StateVector indicator(StateSet s, std::size_t n);

} // namespace mpg
