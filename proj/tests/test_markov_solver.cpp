#include "support/oracles.hpp"

#include "mpg/error.hpp"
#include "mpg/fan_explorer.hpp"
#include "mpg/markov_solver.hpp"

#include <doctest.h>

using namespace mpg;

namespace {

StateVector vec(std::initializer_list<double> v) {
    StateVector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

/// Final classes by boolean reachability: i is recurrent iff everything it reaches reaches it.
std::vector<std::vector<std::size_t>> brute_final_classes(const Eigen::MatrixXd& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0) reach[i][j] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> placed(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        bool recurrent = true;
        for (std::size_t j = 0; j < n; ++j) recurrent = recurrent && (!reach[i][j] || reach[j][i]);
        if (!recurrent || placed[i]) continue;
        std::vector<std::size_t> cls;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j]) {
                cls.push_back(j);
                placed[j] = true;
            }
        out.push_back(cls);
    }
    return out;
}

/// max over pi and final classes of <m, r> with measures from power iteration.
double brute_lemma(const GameSpec& g, const PaymentVector& r, const Policy& sigma) {
    double best = -1e300;
    CounterPolicy pi = first_counter_policy(g, sigma);
    do {
        const auto pm = matrix_of(g, r, pi);
        for (const auto& cls : brute_final_classes(pm.transition))
            best = std::max(best, oracle::power_invariant(pm.transition, cls).dot(pm.payment));
    } while (next_counter_policy(g, pi));
    return best;
}

oracle::GameShape small_shape() {
    oracle::GameShape shape;
    shape.max_states = 4;
    shape.support_density = 0.5;
    return shape;
}

} // namespace

TEST_CASE("chain structure") {
    Eigen::MatrixXd p(3, 3);
    p << 0.5, 0.5, 0, 0, 1, 0, 0, 0, 1;
    const ChainStructure cs = chain_structure(p);
    CHECK(cs.final_classes == std::vector<NodeSet>{{1}, {2}});
    CHECK(cs.transient == NodeSet{0});
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.4, 0, 1;
    CHECK_THROWS_AS(chain_structure(bad), Error);
    bad << 1.5, -0.5, 0, 1;
    CHECK_THROWS_AS(chain_structure(bad), Error);
}

TEST_CASE("invariant measure of a two-state chain") {
    Eigen::MatrixXd p(2, 2);
    p << 0.9, 0.1, 0.3, 0.7;
    const InvariantMeasure m = invariant_measure(p, {0, 1});
    CHECK(m.weights[0] == doctest::Approx(0.75));
    CHECK(m.weights[1] == doctest::Approx(0.25));
    CHECK(m.residual < 1e-14);
    Eigen::MatrixXd q(2, 2);
    q << 0.5, 0.5, 0, 1;
    CHECK_THROWS_AS(invariant_measure(q, {0}), Error);
}

TEST_CASE("property: invariant measures match power iteration") {
    oracle::Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        const GameSpec g = oracle::random_game(rng, small_shape());
        const auto pm = matrix_of(g, g.payments(), first_counter_policy(g, first_policy(g)));
        const ChainStructure cs = chain_structure(pm.transition);
        const auto brute = brute_final_classes(pm.transition);
        REQUIRE(cs.final_classes.size() == brute.size());
        for (std::size_t c = 0; c < brute.size(); ++c) {
            CHECK(cs.final_classes[c] == brute[c]);
            const InvariantMeasure m = invariant_measure(pm.transition, cs.final_classes[c]);
            CHECK((m.weights - oracle::power_invariant(pm.transition, brute[c])).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("property: chain evaluation solves the gain-bias equations") {
    oracle::Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        const GameSpec g = oracle::random_game(rng, small_shape());
        const auto pm = matrix_of(g, g.payments(), first_counter_policy(g, first_policy(g)));
        const ChainEvaluation ev = evaluate_chain(pm.transition, pm.payment);
        CHECK((pm.transition * ev.gain - ev.gain).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ev.gain + ev.bias - pm.payment - pm.transition * ev.bias).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("example game: one-player eigenpairs") {
    const ExampleFixture fx = example_fixture();
    const PaymentVector r = fx.r0 + state_perturbation(fx.game, {0.1, 0.1, 0});
    SolverOptions opts;
    opts.anchor = 2;
    const HowardResult res = howard_solve(fx.game, r, Policy{{0, 1, 0}}, opts);
    REQUIRE(res.well_posed());
    CHECK(res.pair().lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((res.pair().bias - vec({-1.8, -1.6, 0})).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(res.pair().residual <= 1e-9);
    CHECK(lemma_eigenvalue(fx.game, r, Policy{{0, 1, 0}}) == doctest::Approx(1.0).epsilon(1e-12));

    Policy s = first_policy(fx.game);
    do {
        const HowardResult h = howard_solve(fx.game, fx.r0, s);
        CHECK(h.well_posed());
    } while (next_policy(fx.game, s));
}

TEST_CASE("decoupled absorbing states: not well posed with gain (0, 1)") {
    const GameSpec g = oracle::decoupled_absorbing();
    const HowardResult res = howard_solve(g, g.payments(), first_policy(g));
    REQUIRE_FALSE(res.well_posed());
    CHECK(res.failure().gain == vec({0, 1}));
}

TEST_CASE("example game at g = 0: critical classes") {
    const ExampleFixture fx = example_fixture();
    // sigma = (a2, a2, a1) has both (-2,-2,0) and (-3,-3,0) as eigenvectors.
    const Policy sigma{{1, 1, 0}};
    const HowardResult res = howard_solve(fx.game, fx.r0, sigma);
    REQUIRE(res.well_posed());
    const CriticalGraphReport cg = critical_graph(fx.game, fx.r0, sigma, res.pair());
    CHECK_FALSE(one_player_uniqueness(cg));
    CHECK(cg.critical_classes.size() == 2);

    const PaymentVector r = fx.r0 + state_perturbation(fx.game, {0.1, 0.1, 0});
    const Policy tau{{0, 1, 0}};
    const HowardResult unique = howard_solve(fx.game, r, tau);
    CHECK(one_player_uniqueness(critical_graph(fx.game, r, tau, unique.pair())));

    EigenPair wrong = unique.pair();
    wrong.bias[0] += 1.0;
    CHECK_THROWS_AS(critical_graph(fx.game, r, tau, wrong), Error);
}

TEST_CASE("property: Howard eigenpairs are optimal and agree with the invariant-measure formula") {
    oracle::Rng rng(14);
    int checked = 0;
    for (int t = 0; t < 80; ++t) {
        const GameSpec g = oracle::random_game(rng, small_shape());
        Policy s = first_policy(g);
        do {
            const HowardResult res = howard_solve(g, g.payments(), s);
            for (std::size_t k = 1; k < res.max_gain_history.size(); ++k)
                CHECK(res.max_gain_history[k] >= res.max_gain_history[k - 1] - 1e-12);
            const double brute = brute_lemma(g, g.payments(), s);
            if (!res.well_posed()) {
                CHECK(res.failure().gain.maxCoeff() == doctest::Approx(brute).epsilon(1e-9));
                continue;
            }
            ++checked;
            const EigenPair& ep = res.pair();
            CHECK(std::abs(ep.lambda - brute) < 1e-9);
            CHECK(one_player_residual(g, g.payments(), s, ep.lambda, ep.bias) <= 1e-9);
            CHECK(ep.bias[static_cast<Eigen::Index>(ep.anchor)] == 0.0);
        } while (next_policy(g, s));
    }
    CHECK(checked > 50);
}

TEST_CASE("property: unique one-player bias is recovered from its critical values") {
    oracle::Rng rng(15);
    for (int t = 0; t < 60; ++t) {
        const GameSpec g = oracle::random_game(rng, small_shape());
        const Policy s = first_policy(g);
        const HowardResult res = howard_solve(g, g.payments(), s);
        if (!res.well_posed()) continue;
        const CriticalGraphReport cg = critical_graph(g, g.payments(), s, res.pair());
        CHECK_FALSE(cg.critical_nodes.empty());
        const StateVector ext =
            extend_from_critical(g, g.payments(), res.policy, res.pair().lambda, cg.critical_nodes, res.pair().bias);
        CHECK((ext - res.pair().bias).cwiseAbs().maxCoeff() < 1e-8);
    }
}
