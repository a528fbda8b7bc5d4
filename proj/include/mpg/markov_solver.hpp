#pragma once

#include "mpg/game_model.hpp"
#include "mpg/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace mpg {

/// Final (recurrent) classes and transient states of a stochastic matrix.
struct ChainStructure {
    StochasticMatrix matrix;
    std::vector<NodeSet> final_classes; // ordered by smallest member
    NodeSet transient;
};

/// Throws NotStochastic unless every row is nonnegative and sums to 1 within `tol`.
ChainStructure chain_structure(const StochasticMatrix& p, double tol = 1e-12);

struct InvariantMeasure {
    NodeSet states;
    /// Length-n vector, zero outside `states`.
    StateVector weights;
    /// ||m P - m||_1 after the solve.
    double residual = 0.0;
};

/// Stationary distribution of the final class `cls` of P, by a direct linear solve.
InvariantMeasure invariant_measure(const StochasticMatrix& p, const NodeSet& cls);

/// Eigenvalue lambda and bias u with T(u) = lambda 1 + u, u[anchor] = 0.
struct EigenPair {
    double lambda = 0.0;
    StateVector bias;
    double residual = 0.0;
    std::size_t anchor = 0;
};

/// Returned instead of an eigenpair when the optimal gain depends on the initial state.
struct NotWellPosed {
    StateVector gain;
    CounterPolicy policy;
};

struct SolverOptions {
    /// Strict-improvement threshold for policy updates; smaller gaps count as ties.
    double improvement_tol = 1e-10;
    /// Largest gain spread still treated as a constant eigenvalue.
    double gain_tol = 1e-9;
    /// Declared residual tolerance for returned eigenpairs.
    double residual_tol = 1e-9;
    /// State whose bias entry is set to 0 in returned eigenpairs.
    std::size_t anchor = 0;
};

struct HowardResult {
    std::variant<EigenPair, NotWellPosed> outcome;
    /// Terminal MAX policy.
    CounterPolicy policy;
    /// Gain and bias of the terminal policy, bias normalized by P* h = 0.
    StateVector gain;
    StateVector bias;
    /// max_i g_i after each policy evaluation.
    std::vector<double> max_gain_history;
    std::size_t iterations = 0;

    bool well_posed() const { return std::holds_alternative<EigenPair>(outcome); }
    const EigenPair& pair() const { return std::get<EigenPair>(outcome); }
    const NotWellPosed& failure() const { return std::get<NotWellPosed>(outcome); }
};

/// Gain g = P* r and bias h = (I - P + P*)^{-1} (r - g) of a fixed Markov chain.
struct ChainEvaluation {
    StateVector gain;
    StateVector bias;
};

ChainEvaluation evaluate_chain(const StochasticMatrix& p, const StateVector& payment);

/// Multichain policy iteration of the MAX player for the one-player operator T_r^sigma.
HowardResult howard_solve(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                          const SolverOptions& options = {},
                          const std::optional<CounterPolicy>& start = std::nullopt);

/// max over pi in Pi^sigma and final classes C of P^{sigma pi} of <m_C, r^{sigma pi}>.
double lemma_eigenvalue(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                        std::uint64_t cap = 1'000'000);

/// ||T^sigma(u) - lambda 1 - u||_inf.
double one_player_residual(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                           double lambda, const StateVector& u);

struct CriticalGraphOptions {
    double tie_tol = 1e-9;
    /// Residual above which the pair is rejected as not an eigenpair of T^sigma.
    double eigen_tol = 1e-8;
    std::uint64_t pattern_cap = std::uint64_t{1} << 16;
};

struct CriticalGraphReport {
    /// Per state, the MAX actions attaining the max at the bias.
    std::vector<std::vector<std::size_t>> active_supports;
    std::vector<std::pair<std::size_t, std::size_t>> critical_arcs; // sorted
    NodeSet critical_nodes;
    std::vector<NodeSet> critical_classes;
    std::uint64_t patterns_examined = 0;
    /// Pattern cap hit: only the maximal pattern and its single-action restrictions were
    /// examined, so the class count is a lower bound.
    bool lower_bound = false;
};

/// Critical graph of T^sigma at an eigenvector: union over support patterns of active
/// actions of the final graphs of the pattern's union-support matrix.
CriticalGraphReport critical_graph(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                                   const EigenPair& pair, const CriticalGraphOptions& options = {});

/// Exactly one critical class, i.e. the bias of T^sigma is unique up to a constant.
bool one_player_uniqueness(const CriticalGraphReport& report);

/// Solves v_i = r_i - lambda + P_i v on the non-critical states of the chain P^{sigma pi},
/// with v fixed to `values` on `critical`.
StateVector extend_from_critical(const GameSpec& game, const PaymentVector& r, const CounterPolicy& pi,
                                 double lambda, const NodeSet& critical, const StateVector& values);

} // namespace mpg
