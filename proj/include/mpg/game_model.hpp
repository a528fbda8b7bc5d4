#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mpg {

/// Real vector indexed by states (value units).
using StateVector = Eigen::VectorXd;

/// Dense row-major stochastic matrix used for policy-reduced chains.
using StochasticMatrix = Eigen::MatrixXd;

/// One record of an unvalidated game description, mirroring the JSON format.
struct RawEntry {
    std::string state;
    std::string min_action;
    std::string max_action;
    std::optional<double> payment;
    std::vector<std::pair<std::string, double>> transition;
};

struct RawGame {
    std::vector<std::string> states;
    std::vector<RawEntry> entries;
};

struct ValidateOptions {
    /// Rescale rows that do not sum to one instead of rejecting them.
    bool renormalize = false;
    double row_tolerance = 1e-12;
};

/// A MAX action b in B_{i,a}, carrying the slot's payment key and transition row.
struct Branch {
    std::string id;
    std::size_t key = 0;
    std::vector<double> row;
    std::vector<std::size_t> support;
};

/// A MIN action a in A_i with its MAX responses.
struct MinAction {
    std::string id;
    std::vector<Branch> branches;
};

/// Position of a payment slot (i, a, b) in dense indices.
struct SlotKey {
    std::size_t state = 0;
    std::size_t min_action = 0;
    std::size_t max_action = 0;
};

/// Transition payments r, one entry per slot (i, a, b) of the owning game.
class PaymentVector {
public:
    PaymentVector() = default;
    explicit PaymentVector(std::vector<double> values) : values_(std::move(values)) {}
    PaymentVector(std::size_t size, double fill) : values_(size, fill) {}

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    const std::vector<double>& values() const { return values_; }
    double max_abs() const;

    PaymentVector& operator+=(const PaymentVector& other);
    friend PaymentVector operator+(PaymentVector lhs, const PaymentVector& rhs) { return lhs += rhs; }
    friend PaymentVector operator*(double s, PaymentVector v);
    friend bool operator==(const PaymentVector&, const PaymentVector&) = default;

private:
    std::vector<double> values_;
};

/// Stationary MIN policy sigma: state -> action in A_i.
struct Policy {
    std::vector<std::size_t> choice;
    friend auto operator<=>(const Policy&, const Policy&) = default;
};

/// Stationary MAX policy pi for a fixed sigma: state -> action in B_{i,sigma(i)}.
struct CounterPolicy {
    Policy base;
    std::vector<std::size_t> choice;
    friend auto operator<=>(const CounterPolicy&, const CounterPolicy&) = default;
};

/// Finite perfect-information zero-sum stochastic game. Immutable once built by validate().
class GameSpec {
public:
    std::size_t state_count() const { return state_ids_.size(); }
    const std::string& state_id(std::size_t i) const { return state_ids_[i]; }
    const std::vector<std::string>& state_ids() const { return state_ids_; }
    std::optional<std::size_t> state_index(std::string_view id) const;

    const std::vector<MinAction>& actions(std::size_t i) const { return actions_[i]; }
    const MinAction& action(std::size_t i, std::size_t a) const { return actions_[i][a]; }
    const Branch& branch(std::size_t i, std::size_t a, std::size_t b) const {
        return actions_[i][a].branches[b];
    }

    /// Number q of payment slots.
    std::size_t key_count() const { return keys_.size(); }
    const SlotKey& key(std::size_t k) const { return keys_[k]; }

    /// Payments read from the description (the default r).
    const PaymentVector& payments() const { return payments_; }

    /// Every transition row puts probability one on a single state.
    bool is_deterministic() const { return deterministic_; }

    void check_payments(const PaymentVector& r) const;
    void check_vector(const StateVector& x) const;
    void check_policy(const Policy& sigma) const;
    void check_counter_policy(const CounterPolicy& pi) const;

private:
    friend GameSpec validate(const RawGame&, const ValidateOptions&);

    std::vector<std::string> state_ids_;
    std::unordered_map<std::string, std::size_t> state_lookup_;
    std::vector<std::vector<MinAction>> actions_;
    std::vector<SlotKey> keys_;
    PaymentVector payments_;
    bool deterministic_ = true;
};

/// Checks a raw description against the model invariants. Throws mpg::Error.
GameSpec validate(const RawGame& raw, const ValidateOptions& options = {});

/// P_i^{ab} x + r_i^{ab}.
double branch_value(const GameSpec& game, const PaymentVector& r, std::size_t i, std::size_t a,
                    std::size_t b, const StateVector& x);

/// P_i^{ab} x.
double branch_expectation(const GameSpec& game, std::size_t i, std::size_t a, std::size_t b,
                          const StateVector& x);

/// [T_r(x)]_i = min_a max_b (r_i^{ab} + P_i^{ab} x).
StateVector shapley_apply(const GameSpec& game, const PaymentVector& r, const StateVector& x);

/// Payment-free operator [T^(x)]_i = min_a max_b P_i^{ab} x.
StateVector recession_apply(const GameSpec& game, const StateVector& x);

/// MIN policy attaining T_r(x); ties go to the lowest action index.
Policy optimal_min_policy(const GameSpec& game, const PaymentVector& r, const StateVector& x);

/// MAX policy attaining T_r^sigma(x); ties go to the lowest action index.
CounterPolicy optimal_max_policy(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                                 const StateVector& x);

/// One-player operator T_r^sigma obtained by fixing the MIN policy.
/// Holds a reference to the game, which must outlive it.
class OnePlayerOperator {
public:
    OnePlayerOperator(const GameSpec& game, PaymentVector r, Policy sigma);

    StateVector apply(const StateVector& x) const;
    const GameSpec& game() const { return *game_; }
    const PaymentVector& payments() const { return r_; }
    const Policy& policy() const { return sigma_; }

private:
    const GameSpec* game_;
    PaymentVector r_;
    Policy sigma_;
};

OnePlayerOperator reduce_min(const GameSpec& game, const PaymentVector& r, const Policy& sigma);

/// Payment column r^{sigma pi} and stochastic matrix P^{sigma pi}.
struct PolicyMatrix {
    StateVector payment;
    StochasticMatrix transition;
};

PolicyMatrix matrix_of(const GameSpec& game, const PaymentVector& r, const CounterPolicy& pi);

struct ValueIterationResult {
    StateVector values;
    StateVector mean_estimate;
};

/// v^0 = 0, v^{j+1} = T_r(v^j); returns v^k and v^k / k.
ValueIterationResult value_iterate(const GameSpec& game, const PaymentVector& r, std::size_t k);

/// Payment vector adding g_i to every slot of state i (the operator T_r + g).
PaymentVector state_perturbation(const GameSpec& game, const std::vector<double>& g);

/// |Sigma|, saturating at UINT64_MAX.
std::uint64_t min_policy_count(const GameSpec& game);
/// |Pi^sigma|, saturating at UINT64_MAX.
std::uint64_t counter_policy_count(const GameSpec& game, const Policy& sigma);

Policy first_policy(const GameSpec& game);
CounterPolicy first_counter_policy(const GameSpec& game, const Policy& sigma);

/// Odometer step in lexicographic order (state 0 most significant). False after the last one.
bool next_policy(const GameSpec& game, Policy& sigma);
bool next_counter_policy(const GameSpec& game, CounterPolicy& pi);

} // namespace mpg
