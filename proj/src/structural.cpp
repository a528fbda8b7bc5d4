#include "mpg/structural.hpp"

#include "mpg/error.hpp"

#include <algorithm>
#include <cmath>

namespace mpg {

std::vector<std::size_t> StateSet::members() const {
    std::vector<std::size_t> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
}

bool subset_order(StateSet a, StateSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.members() < b.members();
}

SupportAbstraction::SupportAbstraction(const GameSpec& game) : n_(game.state_count()) {
    if (n_ > kMaxStructuralStates)
        throw Error(ErrorCode::StateCapExceeded, "structural analysis supports at most 63 states");
    supports_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (const MinAction& act : game.actions(i)) {
            std::vector<std::uint64_t> masks;
            for (const Branch& br : act.branches) {
                std::uint64_t m = 0;
                for (std::size_t j : br.support) m |= std::uint64_t{1} << j;
                masks.push_back(m);
            }
            supports_[i].push_back(std::move(masks));
        }
}

BooleanVector SupportAbstraction::upper(BooleanVector x) const {
    BooleanVector out;
    for (std::size_t i = 0; i < n_; ++i) {
        bool all_actions = true; // min over a
        for (const auto& masks : supports_[i]) {
            bool any_branch = false; // max over b
            for (std::uint64_t m : masks)
                if ((m & x.bits()) != 0) {
                    any_branch = true;
                    break;
                }
            if (!any_branch) {
                all_actions = false;
                break;
            }
        }
        if (all_actions) out.insert(i);
    }
    return out;
}

BooleanVector SupportAbstraction::lower(BooleanVector x) const {
    BooleanVector out;
    for (std::size_t i = 0; i < n_; ++i) {
        bool all_actions = true;
        for (const auto& masks : supports_[i]) {
            bool any_branch = false;
            for (std::uint64_t m : masks)
                if ((m & ~x.bits()) == 0) {
                    any_branch = true;
                    break;
                }
            if (!any_branch) {
                all_actions = false;
                break;
            }
        }
        if (all_actions) out.insert(i);
    }
    return out;
}

bool SupportAbstraction::in_minus_family(StateSet i_set) const {
    const StateSet comp = i_set.complement(n_);
    return upper(comp).subset_of(comp);
}

bool SupportAbstraction::in_plus_family(StateSet j_set) const {
    return j_set.subset_of(lower(j_set));
}

BooleanVector boolean_upper(const GameSpec& game, BooleanVector x) {
    return SupportAbstraction(game).upper(x);
}

BooleanVector boolean_lower(const GameSpec& game, BooleanVector x) {
    return SupportAbstraction(game).lower(x);
}

bool SubsetFamily::contains(StateSet s) const {
    return std::find(members.begin(), members.end(), s) != members.end();
}

namespace {

void check_cap(std::size_t n, const StructuralOptions& options) {
    if (n > options.state_cap || n > kMaxStructuralStates)
        throw Error(ErrorCode::StateCapExceeded,
                    "family enumeration over " + std::to_string(n) + " states exceeds cap " +
                        std::to_string(std::min(options.state_cap, kMaxStructuralStates)));
}

Families enumerate(const SupportAbstraction& abs) {
    const std::size_t n = abs.state_count();
    Families f{{FamilyTag::Minus, {}}, {FamilyTag::Plus, {}}};
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const StateSet s = StateSet::from_bits(bits);
        if (abs.in_minus_family(s)) f.minus.members.push_back(s);
        if (abs.in_plus_family(s)) f.plus.members.push_back(s);
    }
    std::sort(f.minus.members.begin(), f.minus.members.end(), subset_order);
    std::sort(f.plus.members.begin(), f.plus.members.end(), subset_order);
    return f;
}

} // namespace

Families compute_families(const GameSpec& game, const StructuralOptions& options) {
    check_cap(game.state_count(), options);
    return enumerate(SupportAbstraction(game));
}

StateSet galois_phi(const SupportAbstraction& abs, StateSet i_set) {
    if (!abs.in_minus_family(i_set)) throw Error(ErrorCode::NotInFamily, "Phi needs a member of F-");
    StateSet j = i_set.complement(abs.state_count());
    for (;;) {
        const StateSet next = j & abs.lower(j);
        if (next == j) return j;
        j = next;
    }
}

StateSet galois_phi_star(const SupportAbstraction& abs, StateSet j_set) {
    if (!abs.in_plus_family(j_set)) throw Error(ErrorCode::NotInFamily, "Phi* needs a member of F+");
    const std::size_t n = abs.state_count();
    StateSet i = j_set.complement(n);
    for (;;) {
        const StateSet next = i & abs.upper(i.complement(n)).complement(n);
        if (next == i) return i;
        i = next;
    }
}

StateSet galois_phi(const GameSpec& game, StateSet i_set) {
    return galois_phi(SupportAbstraction(game), i_set);
}

StateSet galois_phi_star(const GameSpec& game, StateSet j_set) {
    return galois_phi_star(SupportAbstraction(game), j_set);
}

StateVector indicator(StateSet s, std::size_t n) {
    StateVector x = StateVector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i : s.members()) x[static_cast<Eigen::Index>(i)] = 1.0;
    return x;
}

namespace {

FixedPointWitness witness_from(const GameSpec& game, const SupportAbstraction& abs, StateSet closed_set,
                               const StructuralOptions& options) {
    const std::size_t n = game.state_count();
    FixedPointWitness w;
    w.closed_set = closed_set;
    w.point = indicator(galois_phi(abs, closed_set), n);
    for (;;) {
        StateVector next = recession_apply(game, w.point);
        w.residual = (next - w.point).cwiseAbs().maxCoeff();
        if (w.residual <= options.witness_tolerance) {
            w.converged = true;
            break;
        }
        if (w.iterations >= options.witness_budget) break;
        w.point = std::move(next);
        ++w.iterations;
    }
    const double lo = w.point.minCoeff();
    StateSet argmin;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(w.point[static_cast<Eigen::Index>(i)] - lo) <= options.witness_tolerance) argmin.insert(i);
    w.argmin_matches = argmin == closed_set;
    return w;
}

} // namespace

FixedPointWitness nontrivial_fixed_point_witness(const GameSpec& game, StateSet closed_set,
                                                 const StructuralOptions& options) {
    const SupportAbstraction abs(game);
    const std::size_t n = game.state_count();
    if (closed_set.empty() || closed_set == StateSet::full(n))
        throw Error(ErrorCode::InvalidArgument, "witness needs a nontrivial subset");
    if (!closed_set.subset_of(StateSet::full(n)))
        throw Error(ErrorCode::InvalidArgument, "subset refers to states outside the game");
    if (galois_phi_star(abs, galois_phi(abs, closed_set)) != closed_set)
        throw Error(ErrorCode::NotInFamily, "subset is not closed for the Galois connection");
    return witness_from(game, abs, closed_set, options);
}

GaloisReport structural_verdict(const GameSpec& game, const StructuralOptions& options) {
    check_cap(game.state_count(), options);
    const SupportAbstraction abs(game);
    const std::size_t n = game.state_count();
    Families fam = enumerate(abs);
    GaloisReport rep;
    rep.minus = std::move(fam.minus);
    rep.plus = std::move(fam.plus);
    for (StateSet i : rep.minus.members) rep.phi[i.bits()] = galois_phi(abs, i);
    for (StateSet j : rep.plus.members) rep.phi_star[j.bits()] = galois_phi_star(abs, j);
    for (StateSet i : rep.minus.members) {
        if (i.empty() || i == StateSet::full(n)) continue;
        if (rep.phi_star.at(rep.phi.at(i.bits()).bits()) == i) rep.closed_nontrivial.push_back(i);
    }
    rep.verdict = rep.closed_nontrivial.empty() ? StructuralVerdict::SolvableForAllPayments
                                                : StructuralVerdict::NotStructurallySolvable;
    for (std::size_t k = 0; k < rep.closed_nontrivial.size() && k < options.max_witnesses; ++k)
        rep.witnesses.push_back(witness_from(game, abs, rep.closed_nontrivial[k], options));
    return rep;
}

} // namespace mpg
