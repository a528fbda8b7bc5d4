#include "mpg/cli.hpp"

#include "mpg/error.hpp"
#include "mpg/fan_explorer.hpp"
#include "mpg/game_io.hpp"
#include "mpg/hoffman_karp.hpp"
#include "mpg/serialize.hpp"
#include "mpg/structural.hpp"

#include <CLI11.hpp>

#include <bit>
#include <fstream>
#include <ostream>
#include <sstream>

namespace mpg::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string input;
    double tol = 1e-9;
    double line_tol = 1e-8;
    double witness_tol = 1e-8;
    std::uint64_t max_outer = 0;
    std::uint64_t cap_subsets = std::uint64_t{1} << 20;
    std::uint64_t enumeration_cap = 1'000'000;
    std::uint64_t circuit_cap = 100'000;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::vector<double> g;
    std::string anchor;
    std::string out;
    bool renormalize = false;
    bool timings = false;
    std::size_t k = 10'000;
    std::vector<std::string> axes;
    std::vector<double> box{-10.0, 10.0};
    std::size_t resolution = 101;
};

/// Thrown for a solver outcome that is not an exception of the library (NotWellPosed).
struct Failure {
    int exit_code;
    json diagnostic;
};

struct Context {
    GameSpec game;
    PaymentVector r;
    std::size_t anchor = 0;
};

Context load(const RunConfig& cfg) {
    ValidateOptions vo;
    vo.renormalize = cfg.renormalize;
    Context ctx{load_game(cfg.input, vo), {}, 0};
    ctx.r = ctx.game.payments();
    if (!cfg.g.empty()) {
        if (cfg.g.size() != ctx.game.state_count())
            throw Error(ErrorCode::InvalidArgument, "--g needs one value per state (" +
                                                        std::to_string(ctx.game.state_count()) + ")");
        ctx.r += state_perturbation(ctx.game, cfg.g);
    }
    ctx.anchor = ctx.game.state_count() - 1;
    if (!cfg.anchor.empty()) {
        auto idx = ctx.game.state_index(cfg.anchor);
        if (!idx) throw Error(ErrorCode::UnknownState, "unknown anchor state '" + cfg.anchor + "'");
        ctx.anchor = *idx;
    }
    return ctx;
}

StructuralOptions structural_options(const RunConfig& cfg) {
    StructuralOptions so;
    so.state_cap = static_cast<std::size_t>(std::bit_width(cfg.cap_subsets)) - 1;
    so.witness_tolerance = cfg.witness_tol;
    return so;
}

HoffmanKarpOptions solver_options(const RunConfig& cfg, std::size_t anchor) {
    HoffmanKarpOptions hk;
    hk.max_outer = cfg.max_outer;
    hk.solver.gain_tol = cfg.tol;
    hk.solver.residual_tol = cfg.tol;
    hk.solver.anchor = anchor;
    return hk;
}

CertifyOptions certify_options(const RunConfig& cfg, std::size_t anchor) {
    CertifyOptions co;
    co.solver = solver_options(cfg, anchor).solver;
    co.critical.tie_tol = cfg.tol;
    co.lambda_tol = cfg.tol;
    co.residual_tol = cfg.tol;
    co.line_tol = cfg.line_tol;
    co.enumeration_cap = cfg.enumeration_cap;
    return co;
}

json config_json(const RunConfig& cfg) {
    return {{"command", cfg.command}, {"tol", cfg.tol}, {"seed", cfg.seed}, {"g", cfg.g}};
}

HoffmanKarpResult solve_or_fail(const Context& ctx, const RunConfig& cfg) {
    HoffmanKarpResult res = hoffman_karp(ctx.game, ctx.r, first_policy(ctx.game), solver_options(cfg, ctx.anchor));
    if (!res.well_posed()) {
        json diag = not_well_posed_to_json(ctx.game, *res.trace.failure, cfg.tol);
        diag["message"] = "the optimal mean payoff depends on the initial state";
        throw Failure{kExitSolver, std::move(diag)};
    }
    return res;
}

std::vector<std::size_t> axis_states(const GameSpec& game, const RunConfig& cfg) {
    std::vector<std::size_t> states;
    for (const auto& id : cfg.axes) {
        auto idx = game.state_index(id);
        if (!idx) throw Error(ErrorCode::UnknownState, "unknown axis state '" + id + "'");
        states.push_back(*idx);
    }
    return states;
}

AffineSlice slice_of(const Context& ctx, const RunConfig& cfg) {
    const auto states = axis_states(ctx.game, cfg);
    if (states.empty()) throw Error(ErrorCode::InvalidSlice, "--axes needs at least one state");
    AffineSlice s = state_slice(ctx.game, ctx.r, states, {0.0, 1.0}, cfg.resolution);
    if (cfg.box.size() == 2) {
        for (auto& b : s.box) b = {cfg.box[0], cfg.box[1]};
    } else if (cfg.box.size() == 2 * states.size()) {
        for (std::size_t d = 0; d < states.size(); ++d) s.box[d] = {cfg.box[2 * d], cfg.box[2 * d + 1]};
    } else {
        throw Error(ErrorCode::InvalidSlice, "--box needs 2 values or 2 per axis");
    }
    return s;
}

std::string execute(const RunConfig& cfg) {
    if (cfg.format != "json" && cfg.format != "csv")
        throw Error(ErrorCode::InvalidArgument, "--format must be json or csv");
    if (!(cfg.tol > 0) || !(cfg.line_tol > 0) || !(cfg.witness_tol > 0))
        throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    const bool csv = cfg.format == "csv";
    if (csv && cfg.command != "explore" && cfg.command != "exact-cells")
        throw Error(ErrorCode::InvalidArgument, "--format csv is only available for explore and exact-cells");

    if (cfg.command == "example") {
        const ExampleFixture fx = example_fixture();
        return to_text(game_to_json(fx.game, fx.r0));
    }

    const Context ctx = load(cfg);
    const GameSpec& game = ctx.game;
    json doc = {{"config", config_json(cfg)}};

    if (cfg.command == "check-structure") {
        const StructuralOptions so = structural_options(cfg);
        doc["structure"] = galois_report_to_json(game, structural_verdict(game, so), so);
    } else if (cfg.command == "solve") {
        const HoffmanKarpResult res = solve_or_fail(ctx, cfg);
        doc["eigenpair"] = eigenpair_to_json(game, *res.pair, cfg.tol);
        doc["policies"] = counter_policy_to_json(game, res.final_policies);
    } else if (cfg.command == "certify") {
        const HoffmanKarpResult res = solve_or_fail(ctx, cfg);
        const CertifyOptions co = certify_options(cfg, ctx.anchor);
        doc["eigenpair"] = eigenpair_to_json(game, *res.pair, cfg.tol);
        doc["certificate"] = certificate_to_json(game, certify_uniqueness(game, ctx.r, *res.pair, co), co);
        const CriticalGraphReport cg = critical_graph(game, ctx.r, res.final_policies.base, *res.pair, co.critical);
        doc["critical_graph"] = critical_graph_to_json(game, cg, co.critical);
    } else if (cfg.command == "policy-trace") {
        const HoffmanKarpResult res =
            hoffman_karp(game, ctx.r, first_policy(game), solver_options(cfg, ctx.anchor));
        doc["trace"] = trace_to_json(game, res.trace, cfg.tol, cfg.timings);
        if (!res.well_posed()) {
            json diag = not_well_posed_to_json(game, *res.trace.failure, cfg.tol);
            diag["message"] = "the optimal mean payoff depends on the initial state";
            diag["trace"] = doc["trace"];
            throw Failure{kExitSolver, std::move(diag)};
        }
    } else if (cfg.command == "value-iterate") {
        if (cfg.k == 0) throw Error(ErrorCode::InvalidArgument, "--k must be at least 1");
        doc["value_iteration"] = value_iteration_to_json(game, value_iterate(game, ctx.r, cfg.k), cfg.k);
    } else if (cfg.command == "explore") {
        ExploreOptions eo;
        eo.solver = solver_options(cfg, ctx.anchor);
        eo.certify = certify_options(cfg, ctx.anchor);
        eo.structural = structural_options(cfg);
        eo.anchor = ctx.anchor;
        const CellMap map = explore_slice(game, slice_of(ctx, cfg), eo);
        if (csv) return cellmap_to_csv(game, map);
        doc["cellmap"] = cellmap_to_json(game, map, cfg.tol);
    } else if (cfg.command == "exact-cells") {
        const auto lines = exact_deterministic_cells_2d(game, slice_of(ctx, cfg), cfg.circuit_cap);
        if (csv) {
            std::ostringstream os;
            os.precision(17);
            os << "a,b,c\n";
            for (const auto& l : lines) os << l.a << "," << l.b << "," << l.c << "\n";
            return os.str();
        }
        doc["lines"] = boundary_lines_to_json(lines);
    }
    return to_text(doc);
}

void add_game(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("game", cfg.input, "Game description (JSON)")->required();
    sub->add_flag("--renormalize", cfg.renormalize, "Rescale transition rows that do not sum to 1");
    sub->add_option("--g", cfg.g, "Per-state payment shift g (one value per state)");
}

void add_solver(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--tol", cfg.tol, "Residual, gain and tie tolerance")->capture_default_str();
    sub->add_option("--max-outer", cfg.max_outer, "Outer policy iteration bound (0: |Sigma| + 1)")
        ->capture_default_str();
    sub->add_option("--anchor", cfg.anchor, "State whose bias entry is 0 (default: last state)");
}

json diagnostic(std::string_view code, int exit_code, const std::string& message) {
    return {{"error", std::string(code)}, {"exit", exit_code}, {"message", message}};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Mean-payoff stochastic game solver", "mpgsolve"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", cfg.seed, "Seed recorded in the output")->capture_default_str();
    app.add_option("--format", cfg.format, "Output format: json or csv")->capture_default_str();
    app.add_option("--out", cfg.out, "Write results to this file instead of stdout");

    auto* check = app.add_subcommand("check-structure", "Families F-/F+, Galois maps and structural verdict");
    add_game(check, cfg);
    check->add_option("--cap-subsets", cfg.cap_subsets, "Largest number of subsets enumerated (2^n)")
        ->capture_default_str();
    check->add_option("--witness-tol", cfg.witness_tol, "Residual tolerance of fixed-point witnesses")
        ->capture_default_str();

    auto* solve = app.add_subcommand("solve", "Eigenvalue and bias by two-player policy iteration");
    add_game(solve, cfg);
    add_solver(solve, cfg);

    auto* certify = app.add_subcommand("certify", "Solve, then certify uniqueness of the bias");
    add_game(certify, cfg);
    add_solver(certify, cfg);
    certify->add_option("--line-tol", cfg.line_tol, "Distance under which two biases are one line")
        ->capture_default_str();
    certify->add_option("--cap-policies", cfg.enumeration_cap, "Largest |Sigma| swept")->capture_default_str();

    auto* trace = app.add_subcommand("policy-trace", "Per-step trace of policy iteration");
    add_game(trace, cfg);
    add_solver(trace, cfg);
    trace->add_flag("--timings", cfg.timings, "Include wall-clock seconds per step");

    auto* vi = app.add_subcommand("value-iterate", "v^k = T^k(0) and the estimate v^k / k");
    add_game(vi, cfg);
    vi->add_option("--k", cfg.k, "Number of iterations")->capture_default_str();

    auto* explore = app.add_subcommand("explore", "Uniqueness verdicts over a grid of state shifts");
    add_game(explore, cfg);
    add_solver(explore, cfg);
    explore->add_option("--axes", cfg.axes, "States whose shift g_s spans the slice")->required();
    explore->add_option("--box", cfg.box, "lo hi (shared) or lo hi per axis")->capture_default_str();
    explore->add_option("--resolution", cfg.resolution, "Samples per axis")->capture_default_str();
    explore->add_option("--line-tol", cfg.line_tol, "Distance under which two biases are one line")
        ->capture_default_str();
    explore->add_option("--cap-policies", cfg.enumeration_cap, "Largest |Sigma| swept")->capture_default_str();
    explore->add_option("--cap-subsets", cfg.cap_subsets, "Largest number of subsets enumerated (2^n)")
        ->capture_default_str();

    auto* exact = app.add_subcommand("exact-cells", "Circuit-mean equality lines of a deterministic game");
    add_game(exact, cfg);
    exact->add_option("--axes", cfg.axes, "Two states whose shifts span the slice")->required();
    exact->add_option("--box", cfg.box, "lo hi (shared) or lo hi per axis")->capture_default_str();
    exact->add_option("--cap-circuits", cfg.circuit_cap, "Largest number of elementary circuits")
        ->capture_default_str();

    app.add_subcommand("example", "Print the three-state example game");

    std::vector<std::string> argv_store{"mpgsolve"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << diagnostic("InvalidArgument", kExitValidation, e.what()).dump() << "\n";
        return kExitValidation;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    try {
        const std::string payload = execute(cfg);
        if (cfg.out.empty()) {
            out << payload;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + cfg.out + "'");
            file << payload;
        }
        return kExitOk;
    } catch (const Failure& f) {
        json diag = f.diagnostic;
        diag["exit"] = f.exit_code;
        err << diag.dump() << "\n";
        return f.exit_code;
    } catch (const Error& e) {
        const int code = is_validation_error(e.code()) ? kExitValidation : kExitSolver;
        err << diagnostic(to_string(e.code()), code, e.what()).dump() << "\n";
        return code;
    }
}

} // namespace mpg::cli
