#include "mpg/hoffman_karp.hpp"

#include "mpg/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mpg {

std::string to_string(Uniqueness u) {
    switch (u) {
    case Uniqueness::Unique: return "UNIQUE";
    case Uniqueness::NotUnique: return "NOT_UNIQUE";
    case Uniqueness::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

double residual_check(const GameSpec& game, const PaymentVector& r, double lambda, const StateVector& u) {
    const StateVector tu = shapley_apply(game, r, u);
    return (tu.array() - lambda - u.array()).abs().maxCoeff();
}

double line_distance(const StateVector& a, const StateVector& b) {
    const StateVector d = a - b;
    return d.maxCoeff() - d.minCoeff();
}

namespace {

// MIN improvement: keep the incumbent when it is within tol of the minimum, else the lowest
// index within tol of it.
Policy improve_min(const GameSpec& game, const PaymentVector& r, const Policy& sigma, const StateVector& v,
                   double tol) {
    Policy next = sigma;
    for (std::size_t i = 0; i < game.state_count(); ++i) {
        const auto& acts = game.actions(i);
        std::vector<double> vals(acts.size(), -std::numeric_limits<double>::infinity());
        for (std::size_t a = 0; a < acts.size(); ++a)
            for (std::size_t b = 0; b < acts[a].branches.size(); ++b)
                vals[a] = std::max(vals[a], branch_value(game, r, i, a, b, v));
        const double best = *std::min_element(vals.begin(), vals.end());
        if (vals[sigma.choice[i]] <= best + tol) continue;
        for (std::size_t a = 0; a < acts.size(); ++a)
            if (vals[a] <= best + tol) {
                next.choice[i] = a;
                break;
            }
    }
    return next;
}

} // namespace

HoffmanKarpResult hoffman_karp(const GameSpec& game, const PaymentVector& r, const Policy& sigma0,
                               const HoffmanKarpOptions& options) {
    game.check_payments(r);
    game.check_policy(sigma0);
    std::uint64_t max_outer = options.max_outer;
    if (max_outer == 0) {
        const std::uint64_t count = min_policy_count(game);
        max_outer = count == std::numeric_limits<std::uint64_t>::max() ? count : count + 1;
    }

    HoffmanKarpResult res;
    Policy sigma = sigma0;
    for (;;) {
        if (res.trace.steps.size() >= max_outer)
            throw Error(ErrorCode::MaxOuterIterationsExceeded,
                        "policy iteration did not stabilize within " + std::to_string(max_outer) +
                            " outer steps (degenerate or cycling instance)");
        const auto t0 = std::chrono::steady_clock::now();
        const HowardResult inner = howard_solve(game, r, sigma, options.solver);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!inner.well_posed()) {
            res.trace.failure = inner.failure();
            res.final_policies = inner.policy;
            return res;
        }
        const EigenPair& ep = inner.pair();
        res.trace.steps.push_back(TraceStep{sigma, ep.lambda, ep.bias, ep.residual, inner.iterations, secs});

        Policy next = improve_min(game, r, sigma, ep.bias, options.solver.improvement_tol);
        if (next == sigma) {
            res.trace.terminal = true;
            res.final_policies = inner.policy;
            EigenPair out = ep;
            out.residual = residual_check(game, r, out.lambda, out.bias);
            res.pair = std::move(out);
            return res;
        }
        sigma = std::move(next);
    }
}

UniquenessCertificate certify_uniqueness(const GameSpec& game, const PaymentVector& r, const EigenPair& pair,
                                         const CertifyOptions& options) {
    game.check_payments(r);
    game.check_vector(pair.bias);
    const std::uint64_t count = min_policy_count(game);
    if (count > options.enumeration_cap)
        throw Error(ErrorCode::EnumerationCapExceeded,
                    "|Sigma| = " + std::to_string(count) + " exceeds cap " + std::to_string(options.enumeration_cap));

    UniquenessCertificate cert;
    cert.lambda = pair.lambda;
    const std::size_t anchor = std::min(pair.anchor, game.state_count() - 1);
    auto anchored = [&](const StateVector& v) -> StateVector { return v.array() - v[static_cast<Eigen::Index>(anchor)]; };
    auto add_line = [&](const StateVector& v) {
        for (const auto& line : cert.eigenvector_lines)
            if (line_distance(line, v) <= options.line_tol) return;
        cert.eigenvector_lines.push_back(anchored(v));
    };

    if (residual_check(game, r, pair.lambda, pair.bias) <= options.residual_tol) add_line(pair.bias);

    SolverOptions solver = options.solver;
    solver.anchor = anchor;
    Policy sigma = first_policy(game);
    do {
        ++cert.policies_examined;
        HowardResult inner;
        try {
            inner = howard_solve(game, r, sigma, solver);
        } catch (const Error&) {
            cert.blocking_policies.push_back(sigma);
            continue;
        }
        if (!inner.well_posed()) continue;
        const EigenPair& ep = inner.pair();
        if (std::abs(ep.lambda - pair.lambda) > options.lambda_tol) continue;
        const CriticalGraphReport cg = critical_graph(game, r, sigma, ep, options.critical);
        if (!one_player_uniqueness(cg)) {
            cert.blocking_policies.push_back(sigma);
            continue;
        }
        if (residual_check(game, r, pair.lambda, ep.bias) <= options.residual_tol) {
            cert.supporting_policies.push_back(sigma);
            add_line(ep.bias);
        }
    } while (next_policy(game, sigma));

    if (cert.eigenvector_lines.size() >= 2) {
        cert.verdict = Uniqueness::NotUnique;
        cert.witnesses = {cert.eigenvector_lines[0], cert.eigenvector_lines[1]};
    } else if (!cert.blocking_policies.empty() || cert.eigenvector_lines.empty()) {
        cert.verdict = Uniqueness::Inconclusive;
    } else {
        cert.verdict = Uniqueness::Unique;
    }
    return cert;
}

} // namespace mpg
