#include "mpg/markov_solver.hpp"

#include "mpg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mpg {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

Adjacency support_graph(const StochasticMatrix& p) {
    Adjacency g(static_cast<std::size_t>(p.rows()));
    for (Index i = 0; i < p.rows(); ++i)
        for (Index j = 0; j < p.cols(); ++j)
            if (p(i, j) > 0.0) g[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
    return g;
}

} // namespace

ChainStructure chain_structure(const StochasticMatrix& p, double tol) {
    if (p.rows() != p.cols() || p.rows() == 0) throw Error(ErrorCode::NotStochastic, "matrix is not square");
    for (Index i = 0; i < p.rows(); ++i) {
        if ((p.row(i).array() < 0.0).any() || !p.row(i).allFinite())
            throw Error(ErrorCode::NotStochastic, "negative or non-finite entry in row " + std::to_string(i + 1));
        if (std::abs(p.row(i).sum() - 1.0) > tol)
            throw Error(ErrorCode::NotStochastic, "row " + std::to_string(i + 1) + " does not sum to 1");
    }
    ChainStructure cs;
    cs.matrix = p;
    cs.final_classes = sink_components(support_graph(p));
    std::vector<bool> recurrent(static_cast<std::size_t>(p.rows()), false);
    for (const auto& c : cs.final_classes)
        for (std::size_t v : c) recurrent[v] = true;
    for (std::size_t v = 0; v < recurrent.size(); ++v)
        if (!recurrent[v]) cs.transient.push_back(v);
    return cs;
}

InvariantMeasure invariant_measure(const StochasticMatrix& p, const NodeSet& cls) {
    const Index n = p.rows();
    if (cls.empty()) throw Error(ErrorCode::InvalidArgument, "empty class");
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (std::size_t v : cls) {
        if (idx(v) >= n) throw Error(ErrorCode::InvalidArgument, "class member out of range");
        in[v] = true;
    }
    for (std::size_t v : cls)
        for (Index j = 0; j < n; ++j)
            if (p(idx(v), j) > 0.0 && !in[static_cast<std::size_t>(j)])
                throw Error(ErrorCode::InvalidArgument, "class is not closed under P");

    const Index c = idx(cls.size());
    Eigen::MatrixXd a(c, c);
    for (Index r = 0; r < c; ++r)
        for (Index s = 0; s < c; ++s)
            a(s, r) = p(idx(cls[static_cast<std::size_t>(r)]), idx(cls[static_cast<std::size_t>(s)])) - (r == s ? 1.0 : 0.0);
    a.row(c - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
    b[c - 1] = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "invariant measure system is singular");
    Eigen::VectorXd m = lu.solve(b);
    if (m.minCoeff() < -1e-12) throw Error(ErrorCode::SingularSystem, "invariant measure has negative weight");
    m = m.cwiseMax(0.0);
    m /= m.sum();

    InvariantMeasure out;
    out.states = cls;
    out.weights = StateVector::Zero(n);
    for (Index r = 0; r < c; ++r) out.weights[idx(cls[static_cast<std::size_t>(r)])] = m[r];
    out.residual = (out.weights.transpose() * p - out.weights.transpose()).cwiseAbs().sum();
    return out;
}

ChainEvaluation evaluate_chain(const StochasticMatrix& p, const StateVector& payment) {
    const ChainStructure cs = chain_structure(p);
    const Index n = p.rows();
    const std::size_t k = cs.final_classes.size();

    // Absorption probabilities into each final class.
    Eigen::MatrixXd absorb = Eigen::MatrixXd::Zero(n, idx(k));
    std::vector<InvariantMeasure> measures;
    for (std::size_t c = 0; c < k; ++c) {
        measures.push_back(invariant_measure(p, cs.final_classes[c]));
        for (std::size_t v : cs.final_classes[c]) absorb(idx(v), idx(c)) = 1.0;
    }
    if (!cs.transient.empty()) {
        const Index t = idx(cs.transient.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(t, t);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(t, idx(k));
        for (Index a = 0; a < t; ++a) {
            const Index ia = idx(cs.transient[static_cast<std::size_t>(a)]);
            for (Index b = 0; b < t; ++b) m(a, b) -= p(ia, idx(cs.transient[static_cast<std::size_t>(b)]));
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t v : cs.final_classes[c]) rhs(a, idx(c)) += p(ia, idx(v));
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "transient block is singular");
        const Eigen::MatrixXd x = lu.solve(rhs);
        for (Index a = 0; a < t; ++a) absorb.row(idx(cs.transient[static_cast<std::size_t>(a)])) = x.row(a);
    }

    Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(n, n); // P*
    for (std::size_t c = 0; c < k; ++c) limit += absorb.col(idx(c)) * measures[c].weights.transpose();

    ChainEvaluation ev;
    ev.gain = limit * payment;
    const Eigen::MatrixXd fundamental = Eigen::MatrixXd::Identity(n, n) - p + limit;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(fundamental);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "I - P + P* is singular");
    ev.bias = lu.solve(payment - ev.gain);
    return ev;
}

namespace {

// Incumbent if within tol of the best value, else the lowest index within tol of the best.
template <class ValueFn>
std::size_t improve_choice(std::size_t incumbent, const std::vector<std::size_t>& candidates, double tol,
                           ValueFn&& value) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    vals.reserve(candidates.size());
    for (std::size_t b : candidates) {
        vals.push_back(value(b));
        best = std::max(best, vals.back());
    }
    for (std::size_t t = 0; t < candidates.size(); ++t)
        if (candidates[t] == incumbent && vals[t] >= best - tol) return incumbent;
    for (std::size_t t = 0; t < candidates.size(); ++t)
        if (vals[t] >= best - tol) return candidates[t];
    return incumbent;
}

} // namespace

double one_player_residual(const GameSpec& game, const PaymentVector& r, const Policy& sigma, double lambda,
                           const StateVector& u) {
    const StateVector tu = reduce_min(game, r, sigma).apply(u);
    return (tu.array() - lambda - u.array()).abs().maxCoeff();
}

HowardResult howard_solve(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                          const SolverOptions& options, const std::optional<CounterPolicy>& start) {
    game.check_payments(r);
    game.check_policy(sigma);
    if (options.anchor >= game.state_count()) throw Error(ErrorCode::InvalidArgument, "anchor out of range");
    const std::size_t n = game.state_count();
    CounterPolicy pi = start ? *start : first_counter_policy(game, sigma);
    if (pi.base != sigma) throw Error(ErrorCode::InvalidArgument, "start policy belongs to another MIN policy");
    game.check_counter_policy(pi);

    HowardResult res;
    std::set<std::vector<std::size_t>> visited;
    for (;;) {
        if (!visited.insert(pi.choice).second)
            throw Error(ErrorCode::CycleDetected, "MAX policy improvement revisited a policy");
        const PolicyMatrix pm = matrix_of(game, r, pi);
        ChainEvaluation ev = evaluate_chain(pm.transition, pm.payment);
        res.max_gain_history.push_back(ev.gain.maxCoeff());
        ++res.iterations;

        CounterPolicy next = pi;
        bool changed = false;
        std::vector<std::vector<std::size_t>> gain_optimal(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = sigma.choice[i];
            const std::size_t nb = game.action(i, a).branches.size();
            std::vector<std::size_t> all(nb);
            for (std::size_t b = 0; b < nb; ++b) all[b] = b;
            auto gain_of = [&](std::size_t b) { return branch_expectation(game, i, a, b, ev.gain); };
            next.choice[i] = improve_choice(pi.choice[i], all, options.improvement_tol, gain_of);
            changed = changed || next.choice[i] != pi.choice[i];
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t b : all) best = std::max(best, gain_of(b));
            for (std::size_t b : all)
                if (gain_of(b) >= best - options.improvement_tol) gain_optimal[i].push_back(b);
        }
        if (!changed) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t a = sigma.choice[i];
                next.choice[i] = improve_choice(pi.choice[i], gain_optimal[i], options.improvement_tol,
                                                [&](std::size_t b) { return branch_value(game, r, i, a, b, ev.bias); });
                changed = changed || next.choice[i] != pi.choice[i];
            }
        }
        if (!changed) {
            res.policy = pi;
            res.gain = ev.gain;
            res.bias = ev.bias;
            break;
        }
        pi = std::move(next);
    }

    const double spread = res.gain.maxCoeff() - res.gain.minCoeff();
    if (spread > options.gain_tol) {
        res.outcome = NotWellPosed{res.gain, res.policy};
        return res;
    }
    EigenPair pair;
    pair.anchor = options.anchor;
    pair.lambda = res.gain[idx(options.anchor)];
    pair.bias = res.bias.array() - res.bias[idx(options.anchor)];
    pair.residual = one_player_residual(game, r, sigma, pair.lambda, pair.bias);
    res.outcome = std::move(pair);
    return res;
}

double lemma_eigenvalue(const GameSpec& game, const PaymentVector& r, const Policy& sigma, std::uint64_t cap) {
    const std::uint64_t count = counter_policy_count(game, sigma);
    if (count > cap)
        throw Error(ErrorCode::EnumerationCapExceeded,
                    "|Pi^sigma| = " + std::to_string(count) + " exceeds cap " + std::to_string(cap));
    double best = -std::numeric_limits<double>::infinity();
    CounterPolicy pi = first_counter_policy(game, sigma);
    do {
        const PolicyMatrix pm = matrix_of(game, r, pi);
        const ChainStructure cs = chain_structure(pm.transition);
        for (const auto& cls : cs.final_classes)
            best = std::max(best, invariant_measure(pm.transition, cls).weights.dot(pm.payment));
    } while (next_counter_policy(game, pi));
    return best;
}

CriticalGraphReport critical_graph(const GameSpec& game, const PaymentVector& r, const Policy& sigma,
                                   const EigenPair& pair, const CriticalGraphOptions& options) {
    game.check_payments(r);
    game.check_policy(sigma);
    game.check_vector(pair.bias);
    const std::size_t n = game.state_count();
    if (one_player_residual(game, r, sigma, pair.lambda, pair.bias) > options.eigen_tol)
        throw Error(ErrorCode::NoEigenpair, "vector is not an eigenvector of the one-player operator");

    CriticalGraphReport rep;
    rep.active_supports.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = sigma.choice[i];
        const std::size_t nb = game.action(i, a).branches.size();
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < nb; ++b) best = std::max(best, branch_value(game, r, i, a, b, pair.bias));
        for (std::size_t b = 0; b < nb; ++b)
            if (branch_value(game, r, i, a, b, pair.bias) >= best - options.tie_tol) rep.active_supports[i].push_back(b);
    }

    // A pattern picks a nonempty subset of active actions per state (bitmask over active_supports[i]).
    std::uint64_t total = 1;
    bool over = false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rep.active_supports[i].size();
        const std::uint64_t choices = k >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << k) - 1;
        if (choices != 0 && total > options.pattern_cap / choices) over = true;
        else total *= choices;
    }

    std::set<std::pair<std::size_t, std::size_t>> arcs;
    auto add_pattern = [&](const std::vector<std::uint64_t>& pattern) {
        Adjacency g(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<bool> seen(n, false);
            for (std::size_t t = 0; t < rep.active_supports[i].size(); ++t) {
                if (!((pattern[i] >> t) & 1U)) continue;
                const Branch& br = game.branch(i, sigma.choice[i], rep.active_supports[i][t]);
                for (std::size_t j : br.support)
                    if (!seen[j]) {
                        seen[j] = true;
                        g[i].push_back(j);
                    }
            }
        }
        for (const NodeSet& cls : sink_components(g))
            for (std::size_t v : cls)
                for (std::size_t w : g[v]) arcs.emplace(v, w);
        ++rep.patterns_examined;
    };

    std::vector<std::uint64_t> full(n);
    for (std::size_t i = 0; i < n; ++i) full[i] = (std::uint64_t{1} << rep.active_supports[i].size()) - 1;
    if (over) {
        rep.lower_bound = true;
        add_pattern(full);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < rep.active_supports[i].size(); ++t) {
                auto pattern = full;
                pattern[i] = std::uint64_t{1} << t;
                add_pattern(pattern);
            }
    } else {
        std::vector<std::uint64_t> pattern(n, 1);
        for (;;) {
            add_pattern(pattern);
            std::size_t i = n;
            while (i-- > 0) {
                if (++pattern[i] <= full[i]) break;
                pattern[i] = 1;
            }
            if (i == static_cast<std::size_t>(-1)) break;
        }
    }

    Adjacency critical(n);
    std::vector<bool> is_node(n, false);
    for (const auto& [v, w] : arcs) {
        rep.critical_arcs.emplace_back(v, w);
        critical[v].push_back(w);
        is_node[v] = is_node[w] = true;
    }
    for (std::size_t v = 0; v < n; ++v)
        if (is_node[v]) rep.critical_nodes.push_back(v);
    rep.critical_classes = strongly_connected_components(critical, is_node);
    return rep;
}

bool one_player_uniqueness(const CriticalGraphReport& report) {
    return report.critical_classes.size() == 1;
}

StateVector extend_from_critical(const GameSpec& game, const PaymentVector& r, const CounterPolicy& pi,
                                 double lambda, const NodeSet& critical, const StateVector& values) {
    game.check_vector(values);
    const PolicyMatrix pm = matrix_of(game, r, pi);
    const std::size_t n = game.state_count();
    std::vector<bool> fixed(n, false);
    for (std::size_t v : critical) fixed[v] = true;
    NodeSet free;
    for (std::size_t v = 0; v < n; ++v)
        if (!fixed[v]) free.push_back(v);
    StateVector out = values;
    if (free.empty()) return out;
    const Index f = idx(free.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(f, f);
    Eigen::VectorXd rhs(f);
    for (Index a = 0; a < f; ++a) {
        const Index ia = idx(free[static_cast<std::size_t>(a)]);
        rhs[a] = pm.payment[ia] - lambda;
        for (std::size_t v : critical) rhs[a] += pm.transition(ia, idx(v)) * values[idx(v)];
        for (Index b = 0; b < f; ++b) m(a, b) -= pm.transition(ia, idx(free[static_cast<std::size_t>(b)]));
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "non-critical block is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (Index a = 0; a < f; ++a) out[idx(free[static_cast<std::size_t>(a)])] = x[a];
    return out;
}

} // namespace mpg
