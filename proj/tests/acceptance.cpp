// Acceptance gate: one PASS/FAIL line per criterion. Every criterion writes a JSON artifact;
// the whole set is produced twice and compared byte for byte.

#include "support/oracles.hpp"

#include "mpg/cli.hpp"
#include "mpg/fan_explorer.hpp"
#include "mpg/game_io.hpp"
#include "mpg/hoffman_karp.hpp"
#include "mpg/serialize.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mpg;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    json artifact;
    std::vector<std::string> notes; // supplementary lines, not part of the verdict
};

void require(Outcome& o, bool ok, const std::string& what) {
    if (ok) return;
    if (o.pass) o.detail = what;
    o.pass = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

StateVector vec(std::initializer_list<double> v) {
    StateVector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

double span(const StateVector& v) { return v.maxCoeff() - v.minCoeff(); }

// ---------------------------------------------------------------------------------------------

Outcome structure_reproduction(const fs::path& dir) {
    Outcome o;
    const ExampleFixture fx = example_fixture();
    const fs::path game_file = dir / "example_game.json";
    std::ofstream(game_file) << to_text(game_to_json(fx.game, fx.r0));

    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream out, err;
    const int code = cli::run({"check-structure", game_file.string()}, out, err);
    const double elapsed = seconds_since(t0);

    require(o, code == 0, "check-structure exited " + std::to_string(code));
    if (code != 0) return o;
    const json doc = json::parse(out.str());
    const json& s = doc["structure"];
    require(o, s["verdict"] == "SOLVABLE", "verdict");
    require(o, s["f_minus"] == json::parse(R"([[], ["1", "3"], ["1", "2", "3"]])"), "F- mismatch");
    require(o, s["f_plus"] == json::parse(R"([[], ["3"], ["1", "2", "3"]])"), "F+ mismatch");
    bool closure = false;
    for (const auto& e : s["phi"])
        if (e["I"] == json({"1", "3"})) closure = e["closure"] == json({"1", "2", "3"});
    require(o, closure, "clo({1,3}) != {1,2,3}");
    require(o, elapsed < 1.0, "took " + fmt("%.3f", elapsed) + " s");
    if (o.pass) o.detail = "families, clo({1,3}) and verdict exact in " + fmt("%.3f", elapsed) + " s";
    o.artifact = doc;
    return o;
}

Outcome eigen_reproduction() {
    Outcome o;
    const ExampleFixture fx = example_fixture();
    HoffmanKarpOptions opts;
    opts.solver.anchor = 2;
    auto at = [&](double g1, double g2) { return fx.r0 + state_perturbation(fx.game, {g1, g2, 0}); };

    struct Case {
        double g1, g2;
        StateVector expected;
    };
    const std::vector<Case> cases{{0.1, 0.1, vec({-1.8, -1.6, 0})}, {0.1, -0.3, vec({-3.1, -3.3, 0})}};
    json solved = json::array();
    for (const auto& c : cases) {
        const auto res = hoffman_karp(fx.game, at(c.g1, c.g2), first_policy(fx.game), opts);
        require(o, res.well_posed(), "not well posed");
        if (!res.well_posed()) return o;
        require(o, std::abs(res.pair->lambda - 1.0) <= 1e-9, "lambda " + fmt("%.17g", res.pair->lambda));
        require(o, line_distance(res.pair->bias, c.expected) <= 1e-8, "bias off the expected line");
        solved.push_back({{"g", {c.g1, c.g2, 0.0}}, {"eigenpair", eigenpair_to_json(fx.game, *res.pair, 1e-9)}});
    }

    const auto zero = hoffman_karp(fx.game, fx.r0, first_policy(fx.game), opts);
    require(o, zero.well_posed(), "g = 0 not well posed");
    if (!zero.well_posed()) return o;
    require(o, std::abs(zero.pair->lambda - 1.0) <= 1e-9, "lambda at g = 0");
    const double ra = residual_check(fx.game, fx.r0, 1.0, vec({-2, -2, 0}));
    const double rb = residual_check(fx.game, fx.r0, 1.0, vec({-3, -3, 0}));
    require(o, ra <= 1e-12 && rb <= 1e-12, "endpoint residuals");
    CertifyOptions copts;
    const UniquenessCertificate cert = certify_uniqueness(fx.game, fx.r0, *zero.pair, copts);
    require(o, cert.verdict != Uniqueness::Unique, "certificate at g = 0 is UNIQUE");
    if (o.pass) o.detail = "both eigenpairs on their lines, endpoints exact, g = 0 certified " + to_string(cert.verdict);
    o.artifact = {{"solved", solved},
                  {"zero", eigenpair_to_json(fx.game, *zero.pair, 1e-9)},
                  {"endpoint_residuals", {ra, rb}},
                  {"certificate", certificate_to_json(fx.game, cert, copts)}};
    return o;
}

Outcome fan_sweep() {
    Outcome o;
    const ExampleFixture fx = example_fixture();
    const AffineSlice slice = state_slice(fx.game, fx.r0, {0, 1}, {-10, 10}, 101);
    ExploreOptions opts;
    opts.anchor = 2;
    const auto t0 = std::chrono::steady_clock::now();
    const CellMap map = explore_slice(fx.game, slice, opts);
    const double elapsed = seconds_since(t0);

    const std::vector<BoundaryLine> figure{{1, 1, 0}, {2, 1, 3}, {1, 0, 5}, {1, 3, -22}, {9, 5, 44}};
    const double cell = 20.0 / 100.0;
    std::size_t off_band = 0, off_band_unique = 0, transitions = 0, near = 0;
    for (const auto& s : map.samples) {
        if (std::abs(s.coords[0] + s.coords[1]) <= 0.2) continue;
        ++off_band;
        if (s.verdict == SampleVerdict::Unique) ++off_band_unique;
    }
    for (const auto& b : map.boundaries) {
        if (!b.verdict_change) continue;
        ++transitions;
        double nearest = 1e300;
        for (const auto& l : figure) nearest = std::min(nearest, l.distance(b.midpoint[0], b.midpoint[1]));
        if (nearest <= cell) ++near;
    }
    require(o, off_band_unique == off_band,
            std::to_string(off_band - off_band_unique) + " off-band samples not UNIQUE");
    require(o, near == transitions, std::to_string(transitions - near) + " transitions away from figure lines");
    require(o, elapsed <= 600.0, "runtime " + fmt("%.1f", elapsed) + " s");
    if (o.pass)
        o.detail = std::to_string(off_band) + "/" + std::to_string(off_band) + " off-band UNIQUE, " +
                   std::to_string(transitions) + " transitions on figure lines, " + fmt("%.2f", elapsed) + " s";
    o.artifact = cellmap_to_json(fx.game, map, opts.certify.residual_tol);
    return o;
}

Outcome maxplus_oracle() {
    Outcome o;
    using Q = MaxPlus<Rational>;
    oracle::Rng rng(4004);
    json rhos = json::array();
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.index(7);
        const auto rows = oracle::random_exact_rows(rng, n, rng.uniform(0.0, 0.7));
        const auto brute = oracle::brute_circuits(rows);
        const ExactMaxPlusMatrix m(rows);
        const Rational rho = maximal_circuit_mean(m);
        require(o, rho == brute.rho, "rho mismatch at matrix " + std::to_string(t));
        const auto rep = critical_analysis(m);
        require(o, rep.critical_arcs == brute.critical_arcs && rep.critical_nodes == brute.critical_nodes &&
                       rep.critical_classes == brute.critical_classes,
                "critical graph mismatch at matrix " + std::to_string(t));
        for (const auto& u : tropical_eigenvectors(m)) {
            const auto mu = m.apply(u);
            for (std::size_t i = 0; i < n; ++i)
                require(o, mu[i] == (Q(rho) * u[i]), "exact eigenvector fails at matrix " + std::to_string(t));
        }
        const MaxPlusMatrix md(oracle::to_double_rows(rows));
        const double rho_d = maximal_circuit_mean(md);
        for (const auto& u : tropical_eigenvectors(md)) worst = std::max(worst, maxplus_residual(md, rho_d, u));
        rhos.push_back({{"n", n}, {"rho", rho.str()}, {"classes", rep.critical_classes.size()}});
    }
    require(o, worst <= 1e-12, "eigenvector residual " + fmt("%.3g", worst));
    if (o.pass) o.detail = "200 matrices exact, worst floating residual " + fmt("%.3g", worst);
    o.artifact = {{"matrices", rhos}, {"worst_residual", worst}};
    return o;
}

Outcome galois_oracle() {
    Outcome o;
    oracle::Rng rng(5005);
    oracle::GameShape shape;
    shape.max_states = 10;
    shape.max_min_actions = 2;
    shape.max_max_actions = 2;
    shape.support_density = 0.25;
    json summary = json::array();
    std::size_t pairs = 0;
    for (int t = 0; t < 100; ++t) {
        const GameSpec g = oracle::random_game(rng, shape);
        const auto brute = oracle::brute_families(g);
        const Families f = compute_families(g);
        auto sorted = [](std::vector<StateSet> v) {
            std::sort(v.begin(), v.end(), [](StateSet a, StateSet b) { return a.bits() < b.bits(); });
            return v;
        };
        const std::string at = " at structure " + std::to_string(t);
        require(o, sorted(f.minus.members) == brute.minus && sorted(f.plus.members) == brute.plus,
                "families differ" + at);

        std::map<std::uint64_t, StateSet> phi, phi_star;
        for (StateSet i : f.minus.members) {
            phi[i.bits()] = galois_phi(g, i);
            require(o, phi[i.bits()] == oracle::brute_greatest_disjoint(brute.plus, i), "phi differs" + at);
            require(o, f.plus.contains(phi[i.bits()]), "phi leaves F+" + at);
        }
        for (StateSet j : f.plus.members) {
            phi_star[j.bits()] = galois_phi_star(g, j);
            require(o, phi_star[j.bits()] == oracle::brute_greatest_disjoint(brute.minus, j), "phi* differs" + at);
            require(o, f.minus.contains(phi_star[j.bits()]), "phi* leaves F-" + at);
        }
        for (StateSet i : f.minus.members)
            for (StateSet j : f.plus.members) {
                ++pairs;
                const bool disjoint = !i.intersects(j);
                require(o, disjoint == j.subset_of(phi[i.bits()]) && disjoint == i.subset_of(phi_star[j.bits()]),
                        "adjunction fails" + at);
            }
        for (StateSet a : f.minus.members)
            for (StateSet b : f.minus.members)
                if (a.subset_of(b)) require(o, phi[b.bits()].subset_of(phi[a.bits()]), "phi not antitone" + at);
        for (StateSet i : f.minus.members) {
            const StateSet closure = phi_star[phi[i.bits()].bits()];
            require(o, i.subset_of(closure), "I not inside its closure" + at);
            require(o, phi[closure.bits()] == phi[i.bits()], "phi phi* phi != phi" + at);
        }
        summary.push_back({{"n", g.state_count()}, {"f_minus", f.minus.members.size()}, {"f_plus", f.plus.members.size()}});
    }
    if (o.pass) o.detail = "100 structures match brute force, laws hold on " + std::to_string(pairs) + " pairs";
    o.artifact = summary;
    return o;
}

oracle::GameShape well_posed_shape() {
    oracle::GameShape shape;
    shape.max_states = 4;
    shape.max_min_actions = 3;
    shape.max_max_actions = 3;
    shape.support_density = 0.5;
    return shape;
}

std::vector<GameSpec> well_posed_games() {
    oracle::Rng rng(6006);
    std::vector<GameSpec> games;
    while (games.size() < 100) {
        GameSpec g = oracle::random_game(rng, well_posed_shape());
        if (oracle::well_posed_game(g)) games.push_back(std::move(g));
    }
    return games;
}

Outcome lemma_cross_check(const std::vector<GameSpec>& games) {
    Outcome o;
    std::size_t policies = 0;
    double worst = 0.0;
    json lambdas = json::array();
    for (const auto& g : games) {
        Policy s = first_policy(g);
        do {
            const HowardResult h = howard_solve(g, g.payments(), s);
            if (!h.well_posed()) continue;
            ++policies;
            const double gap = std::abs(lemma_eigenvalue(g, g.payments(), s) - h.pair().lambda);
            worst = std::max(worst, gap);
            lambdas.push_back(h.pair().lambda);
        } while (next_policy(g, s));
    }
    require(o, worst <= 1e-9, "worst gap " + fmt("%.3g", worst));
    if (o.pass) o.detail = std::to_string(policies) + " policies, worst gap " + fmt("%.3g", worst);
    o.artifact = {{"lambdas", lambdas}, {"worst_gap", worst}};
    return o;
}

Outcome policy_iteration_contract(const std::vector<GameSpec>& games) {
    Outcome o;
    const std::size_t k = 10000;
    std::size_t over_bound = 0, over_span = 0;
    double worst_ratio = 0.0;
    json runs = json::array();
    for (std::size_t t = 0; t < games.size(); ++t) {
        const GameSpec& g = games[t];
        const PaymentVector& r = g.payments();
        const std::string at = " at game " + std::to_string(t);
        const auto res = hoffman_karp(g, r, first_policy(g));
        require(o, res.well_posed(), "not well posed" + at);
        if (!res.well_posed()) continue;
        require(o, res.trace.steps.size() <= min_policy_count(g), "too many outer steps" + at);
        for (std::size_t s = 1; s < res.trace.steps.size(); ++s)
            require(o, res.trace.steps[s].lambda <= res.trace.steps[s - 1].lambda + 1e-12, "lambda increased" + at);
        require(o, res.pair->residual <= 1e-9, "residual" + at);

        const ValueIterationResult vi = value_iterate(g, r, k);
        const double err = (vi.mean_estimate.array() - res.pair->lambda).abs().maxCoeff();
        const double bound = 2.0 * r.max_abs() / static_cast<double>(k);
        if (err > bound) ++over_bound;
        if (err > span(res.pair->bias) / static_cast<double>(k) + 1e-12) ++over_span;
        if (bound > 0) worst_ratio = std::max(worst_ratio, err / bound);
        runs.push_back({{"lambda", res.pair->lambda}, {"steps", res.trace.steps.size()}, {"mean_error", err}});
    }
    require(o, over_bound == 0,
            std::to_string(over_bound) + " games exceed 2 max|r|/k (worst ratio " + fmt("%.3g", worst_ratio) + ")");
    if (o.pass) o.detail = "100 games: step bound, monotone lambda, residuals, mean error within 2 max|r|/k";
    o.notes.push_back("criterion 7 (supplement): " + std::to_string(games.size() - over_span) + "/" +
                      std::to_string(games.size()) + " games within span(u)/k");
    o.artifact = runs;
    return o;
}

json check_non_solvable(Outcome& o, const GameSpec& g, const std::string& at) {
    const GaloisReport rep = structural_verdict(g);
    require(o, !rep.solvable() && !rep.witnesses.empty(), "no witness" + at);
    if (rep.witnesses.empty()) return {};
    const FixedPointWitness& w = rep.witnesses.front();
    const double residual = (recession_apply(g, w.point) - w.point).cwiseAbs().maxCoeff();
    require(o, w.converged && residual <= 1e-8, "witness residual " + fmt("%.3g", residual) + at);
    require(o, span(w.point) > 1e-6, "constant witness" + at);

    const PaymentVector r = oracle::split_payments(g, w.closed_set, galois_phi(g, w.closed_set));
    const ValueIterationResult vi = value_iterate(g, r, 1000);
    const double spread = span(vi.mean_estimate);
    require(o, spread >= 0.5, "mean spread " + fmt("%.3g", spread) + at);
    return {{"closed", state_set_to_json(g, w.closed_set)},
            {"witness", vector_to_json(g, w.point)},
            {"residual", residual},
            {"mean_spread", spread}};
}

Outcome non_well_posed_detection() {
    Outcome o;
    json cases = json::array();
    cases.push_back(check_non_solvable(o, oracle::decoupled_absorbing(), " on the decoupled fixture"));
    oracle::Rng rng(8008);
    oracle::GameShape shape;
    shape.max_states = 6;
    shape.support_density = 0.25;
    int found = 0;
    while (found < 20) {
        const GameSpec g = oracle::random_game(rng, shape);
        if (structural_verdict(g).solvable()) continue;
        cases.push_back(check_non_solvable(o, g, " at structure " + std::to_string(found)));
        ++found;
    }
    if (o.pass) o.detail = "decoupled fixture and 20 structures: witnesses and state-dependent means";
    o.artifact = cases;
    return o;
}

struct Criterion {
    int id;
    std::function<Outcome(const fs::path&)> run;
};

std::vector<Outcome> run_all(const fs::path& dir) {
    fs::create_directories(dir);
    const std::vector<GameSpec> games = well_posed_games();
    const std::vector<Criterion> criteria{
        {1, structure_reproduction},
        {2, [](const fs::path&) { return eigen_reproduction(); }},
        {3, [](const fs::path&) { return fan_sweep(); }},
        {4, [](const fs::path&) { return maxplus_oracle(); }},
        {5, [](const fs::path&) { return galois_oracle(); }},
        {6, [&](const fs::path&) { return lemma_cross_check(games); }},
        {7, [&](const fs::path&) { return policy_iteration_contract(games); }},
        {8, [](const fs::path&) { return non_well_posed_detection(); }},
    };
    std::vector<Outcome> out;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run(dir);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        std::ofstream(dir / ("criterion_" + std::to_string(c.id) + ".json")) << to_text(o.artifact);
        out.push_back(std::move(o));
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
    const std::vector<Outcome> first = run_all(root / "run_a");
    const std::vector<Outcome> second = run_all(root / "run_b");

    bool all = true;
    for (std::size_t k = 0; k < first.size(); ++k) {
        const Outcome& o = first[k];
        all = all && o.pass;
        std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "\n";
        for (const auto& n : o.notes) std::cout << "  " << n << "\n";
    }

    std::size_t identical = 0, files = 0;
    for (const auto& entry : fs::directory_iterator(root / "run_a")) {
        ++files;
        const fs::path other = root / "run_b" / entry.path().filename();
        if (fs::exists(other) && slurp(entry.path()) == slurp(other)) ++identical;
        else std::cout << "  differs: " << entry.path().filename().string() << "\n";
    }
    bool verdicts_match = true;
    for (std::size_t k = 0; k < first.size(); ++k)
        verdicts_match = verdicts_match && first[k].pass == second[k].pass;
    const bool deterministic = identical == files && verdicts_match;
    all = all && deterministic;
    std::cout << "criterion 9: " << (deterministic ? "PASS" : "FAIL") << "  " << identical << "/" << files
              << " artifacts byte-identical across two runs\n";
    return all ? 0 : 1;
}
