#include "mpg/game_model.hpp"

#include "mpg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace mpg {

double PaymentVector::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

PaymentVector& PaymentVector::operator+=(const PaymentVector& other) {
    if (other.size() != size())
        throw Error(ErrorCode::InvalidArgument, "payment vectors of different sizes");
    for (std::size_t k = 0; k < size(); ++k) values_[k] += other.values_[k];
    return *this;
}

PaymentVector operator*(double s, PaymentVector v) {
    for (double& x : v.values_) x *= s;
    return v;
}

std::optional<std::size_t> GameSpec::state_index(std::string_view id) const {
    auto it = state_lookup_.find(std::string(id));
    if (it == state_lookup_.end()) return std::nullopt;
    return it->second;
}

void GameSpec::check_payments(const PaymentVector& r) const {
    if (r.size() != key_count())
        throw Error(ErrorCode::InvalidArgument,
                    "payment vector has " + std::to_string(r.size()) + " entries, game has " +
                        std::to_string(key_count()) + " slots");
}

void GameSpec::check_vector(const StateVector& x) const {
    if (static_cast<std::size_t>(x.size()) != state_count())
        throw Error(ErrorCode::InvalidArgument, "state vector has wrong length");
    if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "state vector is not finite");
}

void GameSpec::check_policy(const Policy& sigma) const {
    if (sigma.choice.size() != state_count())
        throw Error(ErrorCode::InvalidArgument, "policy is not total over states");
    for (std::size_t i = 0; i < state_count(); ++i)
        if (sigma.choice[i] >= actions_[i].size())
            throw Error(ErrorCode::InvalidArgument,
                        "policy picks a MIN action outside A_" + state_ids_[i]);
}

void GameSpec::check_counter_policy(const CounterPolicy& pi) const {
    check_policy(pi.base);
    if (pi.choice.size() != state_count())
        throw Error(ErrorCode::InvalidArgument, "counter-policy is not total over states");
    for (std::size_t i = 0; i < state_count(); ++i)
        if (pi.choice[i] >= actions_[i][pi.base.choice[i]].branches.size())
            throw Error(ErrorCode::InvalidArgument,
                        "counter-policy picks a MAX action outside B at state " + state_ids_[i]);
}

GameSpec validate(const RawGame& raw, const ValidateOptions& options) {
    GameSpec g;
    if (raw.states.empty()) throw Error(ErrorCode::EmptyActionSet, "game has no states");
    for (const auto& id : raw.states) {
        if (id.empty()) throw Error(ErrorCode::MissingKey, "empty state identifier");
        if (!g.state_lookup_.emplace(id, g.state_ids_.size()).second)
            throw Error(ErrorCode::DuplicateEntry, "duplicate state '" + id + "'");
        g.state_ids_.push_back(id);
    }
    const std::size_t n = g.state_ids_.size();
    g.actions_.assign(n, {});

    struct Pending {
        std::size_t state, action, branch;
        double payment;
        std::vector<double> row;
    };
    std::vector<Pending> pending;
    std::map<std::tuple<std::size_t, std::string, std::string>, bool> seen;

    for (const auto& e : raw.entries) {
        auto si = g.state_index(e.state);
        if (e.state.empty()) throw Error(ErrorCode::MissingKey, "entry without state");
        if (!si) throw Error(ErrorCode::UnknownState, "entry refers to unknown state '" + e.state + "'");
        if (e.min_action.empty())
            throw Error(ErrorCode::MissingKey, "entry at state '" + e.state + "' without min_action");
        if (e.max_action.empty())
            throw Error(ErrorCode::MissingKey, "entry at state '" + e.state + "' without max_action");
        if (!e.payment)
            throw Error(ErrorCode::MissingKey, "entry (" + e.state + ", " + e.min_action + ", " +
                                                   e.max_action + ") without payment");
        if (!std::isfinite(*e.payment))
            throw Error(ErrorCode::InvalidFormat, "non-finite payment");
        if (!seen.emplace(std::make_tuple(*si, e.min_action, e.max_action), true).second)
            throw Error(ErrorCode::DuplicateEntry, "duplicate entry (" + e.state + ", " + e.min_action +
                                                       ", " + e.max_action + ")");

        auto& acts = g.actions_[*si];
        auto ait = std::find_if(acts.begin(), acts.end(),
                                [&](const MinAction& m) { return m.id == e.min_action; });
        if (ait == acts.end()) {
            acts.push_back(MinAction{e.min_action, {}});
            ait = std::prev(acts.end());
        }
        const std::size_t a = static_cast<std::size_t>(ait - acts.begin());
        const std::size_t b = ait->branches.size();
        ait->branches.push_back(Branch{e.max_action, 0, {}, {}});

        std::vector<double> row(n, 0.0);
        std::vector<bool> filled(n, false);
        for (const auto& [target, p] : e.transition) {
            auto tj = g.state_index(target);
            if (!tj)
                throw Error(ErrorCode::UnknownState, "transition to unknown state '" + target + "'");
            if (filled[*tj])
                throw Error(ErrorCode::DuplicateEntry, "transition lists state '" + target + "' twice");
            filled[*tj] = true;
            row[*tj] = p;
        }
        pending.push_back(Pending{*si, a, b, *e.payment, std::move(row)});
    }

    for (std::size_t i = 0; i < n; ++i)
        if (g.actions_[i].empty())
            throw Error(ErrorCode::EmptyActionSet, "state '" + g.state_ids_[i] + "' has no actions");

    for (auto& p : pending) {
        double sum = 0.0;
        for (double v : p.row) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw Error(ErrorCode::ProbabilityRowInvalid,
                            "transition probability outside [0,1] at state '" +
                                g.state_ids_[p.state] + "'");
            sum += v;
        }
        if (std::abs(sum - 1.0) > options.row_tolerance) {
            if (!options.renormalize || sum <= 0.0)
                throw Error(ErrorCode::ProbabilityRowInvalid,
                            "transition row at state '" + g.state_ids_[p.state] + "' sums to " +
                                std::to_string(sum));
            for (double& v : p.row) v /= sum;
        }
        Branch& br = g.actions_[p.state][p.action].branches[p.branch];
        br.row = std::move(p.row);
        for (std::size_t j = 0; j < n; ++j)
            if (br.row[j] > 0.0) br.support.push_back(j);
        if (br.support.size() != 1) g.deterministic_ = false;
    }

    // Slot keys are dense in (state, min action, max action) order.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < g.actions_[i].size(); ++a)
            for (std::size_t b = 0; b < g.actions_[i][a].branches.size(); ++b) {
                g.actions_[i][a].branches[b].key = g.keys_.size();
                g.keys_.push_back(SlotKey{i, a, b});
            }
    std::vector<double> pay(g.keys_.size());
    for (const auto& p : pending) pay[g.actions_[p.state][p.action].branches[p.branch].key] = p.payment;
    g.payments_ = PaymentVector(std::move(pay));
    return g;
}

double branch_expectation(const GameSpec& game, std::size_t i, std::size_t a, std::size_t b,
                          const StateVector& x) {
    const Branch& br = game.branch(i, a, b);
    double s = 0.0;
    for (std::size_t j : br.support) s += br.row[j] * x[static_cast<Eigen::Index>(j)];
    return s;
}

double branch_value(const GameSpec& game, const PaymentVector& r, std::size_t i, std::size_t a,
                    std::size_t b, const StateVector& x) {
    return r[game.branch(i, a, b).key] + branch_expectation(game, i, a, b, x);
}

namespace {

template <class BranchFn>
double min_max(const GameSpec& game, std::size_t i, BranchFn&& f, std::size_t* argmin = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    const auto& acts = game.actions(i);
    for (std::size_t a = 0; a < acts.size(); ++a) {
        double inner = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < acts[a].branches.size(); ++b) inner = std::max(inner, f(a, b));
        if (inner < best) {
            best = inner;
            if (argmin) *argmin = a;
        }
    }
    return best;
}

} // namespace

StateVector shapley_apply(const GameSpec& game, const PaymentVector& r, const StateVector& x) {
    game.check_payments(r);
    game.check_vector(x);
    StateVector out(x.size());
    for (std::size_t i = 0; i < game.state_count(); ++i)
        out[static_cast<Eigen::Index>(i)] = min_max(
            game, i, [&](std::size_t a, std::size_t b) { return branch_value(game, r, i, a, b, x); });
    return out;
}

StateVector recession_apply(const GameSpec& game, const StateVector& x) {
    game.check_vector(x);
    StateVector out(x.size());
    for (std::size_t i = 0; i < game.state_count(); ++i)
        out[static_cast<Eigen::Index>(i)] = min_max(
            game, i, [&](std::size_t a, std::size_t b) { return branch_expectation(game, i, a, b, x); });
    return out;
}

Policy optimal_min_policy(const GameSpec& game, const PaymentVector& r, const StateVector& x) {
    game.check_payments(r);
    game.check_vector(x);
    Policy sigma{std::vector<std::size_t>(game.state_count(), 0)};
    for (std::size_t i = 0; i < game.state_count(); ++i)
        min_max(
            game, i, [&](std::size_t a, std::size_t b) { return branch_value(game, r, i, a, b, x); },
            &sigma.choice[i]);
    return sigma;
}

CounterPolicy optimal_max_policy(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                                 const StateVector& x) {
    game.check_policy(sigma);
    CounterPolicy pi{sigma, std::vector<std::size_t>(game.state_count(), 0)};
    for (std::size_t i = 0; i < game.state_count(); ++i) {
        const std::size_t a = sigma.choice[i];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < game.action(i, a).branches.size(); ++b) {
            const double v = branch_value(game, r, i, a, b, x);
            if (v > best) {
                best = v;
                pi.choice[i] = b;
            }
        }
    }
    return pi;
}

OnePlayerOperator::OnePlayerOperator(const GameSpec& game, PaymentVector r, Policy sigma)
    : game_(&game), r_(std::move(r)), sigma_(std::move(sigma)) {
    game.check_payments(r_);
    game.check_policy(sigma_);
}

StateVector OnePlayerOperator::apply(const StateVector& x) const {
    game_->check_vector(x);
    StateVector out(x.size());
    for (std::size_t i = 0; i < game_->state_count(); ++i) {
        const std::size_t a = sigma_.choice[i];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < game_->action(i, a).branches.size(); ++b)
            best = std::max(best, branch_value(*game_, r_, i, a, b, x));
        out[static_cast<Eigen::Index>(i)] = best;
    }
    return out;
}

OnePlayerOperator reduce_min(const GameSpec& game, const PaymentVector& r, const Policy& sigma) {
    return OnePlayerOperator(game, r, sigma);
}

PolicyMatrix matrix_of(const GameSpec& game, const PaymentVector& r, const CounterPolicy& pi) {
    game.check_payments(r);
    game.check_counter_policy(pi);
    const auto n = static_cast<Eigen::Index>(game.state_count());
    PolicyMatrix m{StateVector(n), StochasticMatrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const Branch& br = game.branch(si, pi.base.choice[si], pi.choice[si]);
        m.payment[i] = r[br.key];
        for (std::size_t j : br.support) m.transition(i, static_cast<Eigen::Index>(j)) = br.row[j];
    }
    return m;
}

ValueIterationResult value_iterate(const GameSpec& game, const PaymentVector& r, std::size_t k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "value iteration needs k >= 1");
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(game.state_count()));
    for (std::size_t j = 0; j < k; ++j) v = shapley_apply(game, r, v);
    StateVector mean = v / static_cast<double>(k);
    return {std::move(v), std::move(mean)};
}

PaymentVector state_perturbation(const GameSpec& game, const std::vector<double>& g) {
    if (g.size() != game.state_count())
        throw Error(ErrorCode::InvalidArgument, "perturbation needs one value per state");
    PaymentVector d(game.key_count(), 0.0);
    for (std::size_t k = 0; k < game.key_count(); ++k) d[k] = g[game.key(k).state];
    return d;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

} // namespace

std::uint64_t min_policy_count(const GameSpec& game) {
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < game.state_count(); ++i) c = saturating_mul(c, game.actions(i).size());
    return c;
}

std::uint64_t counter_policy_count(const GameSpec& game, const Policy& sigma) {
    game.check_policy(sigma);
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < game.state_count(); ++i)
        c = saturating_mul(c, game.action(i, sigma.choice[i]).branches.size());
    return c;
}

Policy first_policy(const GameSpec& game) {
    return Policy{std::vector<std::size_t>(game.state_count(), 0)};
}

CounterPolicy first_counter_policy(const GameSpec& game, const Policy& sigma) {
    game.check_policy(sigma);
    return CounterPolicy{sigma, std::vector<std::size_t>(game.state_count(), 0)};
}

bool next_policy(const GameSpec& game, Policy& sigma) {
    for (std::size_t i = game.state_count(); i-- > 0;) {
        if (++sigma.choice[i] < game.actions(i).size()) return true;
        sigma.choice[i] = 0;
    }
    return false;
}

bool next_counter_policy(const GameSpec& game, CounterPolicy& pi) {
    for (std::size_t i = game.state_count(); i-- > 0;) {
        if (++pi.choice[i] < game.action(i, pi.base.choice[i]).branches.size()) return true;
        pi.choice[i] = 0;
    }
    return false;
}

} // namespace mpg
