#include "mpg/serialize.hpp"

namespace mpg {

using nlohmann::json;

json state_set_to_json(const GameSpec& game, StateSet s) {
    json out = json::array();
    for (std::size_t i : s.members()) out.push_back(game.state_id(i));
    return out;
}

json node_set_to_json(const GameSpec& game, const NodeSet& s) {
    json out = json::array();
    for (std::size_t i : s) out.push_back(game.state_id(i));
    return out;
}

json vector_to_json(const GameSpec& game, const StateVector& v) {
    json out = json::object();
    for (std::size_t i = 0; i < game.state_count(); ++i) out[game.state_id(i)] = v[static_cast<Eigen::Index>(i)];
    return out;
}

json policy_to_json(const GameSpec& game, const Policy& sigma) {
    json out = json::object();
    for (std::size_t i = 0; i < game.state_count(); ++i) out[game.state_id(i)] = game.action(i, sigma.choice[i]).id;
    return out;
}

json counter_policy_to_json(const GameSpec& game, const CounterPolicy& pi) {
    json out = json::object();
    for (std::size_t i = 0; i < game.state_count(); ++i)
        out[game.state_id(i)] = game.branch(i, pi.base.choice[i], pi.choice[i]).id;
    return {{"min", policy_to_json(game, pi.base)}, {"max", out}};
}

namespace {

std::string verdict_name(StructuralVerdict v) {
    return v == StructuralVerdict::SolvableForAllPayments ? "SOLVABLE" : "NOT_STRUCTURALLY_SOLVABLE";
}

json family_to_json(const GameSpec& game, const SubsetFamily& f) {
    json out = json::array();
    for (StateSet s : f.members) out.push_back(state_set_to_json(game, s));
    return out;
}

} // namespace

json galois_report_to_json(const GameSpec& game, const GaloisReport& report, const StructuralOptions& options) {
    json phi = json::array();
    for (StateSet i : report.minus.members)
        phi.push_back({{"I", state_set_to_json(game, i)},
                       {"phi", state_set_to_json(game, report.phi.at(i.bits()))},
                       {"closure", state_set_to_json(game, report.phi_star.at(report.phi.at(i.bits()).bits()))}});
    json phi_star = json::array();
    for (StateSet j : report.plus.members)
        phi_star.push_back(
            {{"J", state_set_to_json(game, j)}, {"phi_star", state_set_to_json(game, report.phi_star.at(j.bits()))}});
    json closed = json::array();
    for (StateSet s : report.closed_nontrivial) closed.push_back(state_set_to_json(game, s));
    json witnesses = json::array();
    for (const auto& w : report.witnesses)
        witnesses.push_back({{"closed_set", state_set_to_json(game, w.closed_set)},
                             {"point", vector_to_json(game, w.point)},
                             {"residual", w.residual},
                             {"tolerance", options.witness_tolerance},
                             {"iterations", w.iterations},
                             {"converged", w.converged},
                             {"argmin_matches", w.argmin_matches}});
    return {{"verdict", verdict_name(report.verdict)},
            {"f_minus", family_to_json(game, report.minus)},
            {"f_plus", family_to_json(game, report.plus)},
            {"phi", std::move(phi)},
            {"phi_star", std::move(phi_star)},
            {"closed_nontrivial", std::move(closed)},
            {"witnesses", std::move(witnesses)}};
}

json eigenpair_to_json(const GameSpec& game, const EigenPair& pair, double tolerance) {
    return {{"lambda", pair.lambda},
            {"bias", vector_to_json(game, pair.bias)},
            {"anchor", game.state_id(pair.anchor)},
            {"residual", pair.residual},
            {"tolerance", tolerance}};
}

json not_well_posed_to_json(const GameSpec& game, const NotWellPosed& failure, double gain_tol) {
    return {{"error", "NotWellPosed"},
            {"gain", vector_to_json(game, failure.gain)},
            {"gain_spread", failure.gain.maxCoeff() - failure.gain.minCoeff()},
            {"tolerance", gain_tol},
            {"policy", counter_policy_to_json(game, failure.policy)}};
}

json critical_graph_to_json(const GameSpec& game, const CriticalGraphReport& report,
                            const CriticalGraphOptions& options) {
    json active = json::object();
    for (std::size_t i = 0; i < report.active_supports.size(); ++i) active[game.state_id(i)] = report.active_supports[i];
    json arcs = json::array();
    for (const auto& [a, b] : report.critical_arcs) arcs.push_back({game.state_id(a), game.state_id(b)});
    json classes = json::array();
    for (const auto& c : report.critical_classes) classes.push_back(node_set_to_json(game, c));
    return {{"active_max_actions", std::move(active)},
            {"critical_arcs", std::move(arcs)},
            {"critical_nodes", node_set_to_json(game, report.critical_nodes)},
            {"critical_classes", std::move(classes)},
            {"patterns_examined", report.patterns_examined},
            {"lower_bound", report.lower_bound},
            {"tie_tolerance", options.tie_tol}};
}

json trace_to_json(const GameSpec& game, const IterationTrace& trace, double tolerance, bool include_timings) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        json step = {{"sigma", policy_to_json(game, s.sigma)},
                     {"lambda", s.lambda},
                     {"bias", vector_to_json(game, s.bias)},
                     {"residual", s.residual},
                     {"tolerance", tolerance},
                     {"inner_iterations", s.inner_iterations}};
        if (include_timings) step["seconds"] = s.seconds;
        steps.push_back(std::move(step));
    }
    json out = {{"steps", std::move(steps)}, {"terminal", trace.terminal}};
    if (trace.failure) out["failure"] = not_well_posed_to_json(game, *trace.failure, tolerance);
    return out;
}

json certificate_to_json(const GameSpec& game, const UniquenessCertificate& cert, const CertifyOptions& options) {
    json lines = json::array();
    for (const auto& v : cert.eigenvector_lines) lines.push_back(vector_to_json(game, v));
    json witnesses = json::array();
    for (const auto& v : cert.witnesses) witnesses.push_back(vector_to_json(game, v));
    json blocking = json::array();
    for (const auto& p : cert.blocking_policies) blocking.push_back(policy_to_json(game, p));
    json supporting = json::array();
    for (const auto& p : cert.supporting_policies) supporting.push_back(policy_to_json(game, p));
    return {{"verdict", to_string(cert.verdict)},
            {"lambda", cert.lambda},
            {"lambda_tolerance", options.lambda_tol},
            {"residual_tolerance", options.residual_tol},
            {"line_tolerance", options.line_tol},
            {"eigenvector_lines", std::move(lines)},
            {"witnesses", std::move(witnesses)},
            {"blocking_policies", std::move(blocking)},
            {"supporting_policies", std::move(supporting)},
            {"policies_examined", cert.policies_examined}};
}

json value_iteration_to_json(const GameSpec& game, const ValueIterationResult& result, std::size_t k) {
    return {{"k", k},
            {"values", vector_to_json(game, result.values)},
            {"mean_estimate", vector_to_json(game, result.mean_estimate)},
            {"mean_spread", result.mean_estimate.maxCoeff() - result.mean_estimate.minCoeff()}};
}

json maxplus_to_json(const MaxPlus<double>& x) {
    if (!x.is_finite()) return "-inf";
    return x.value();
}

json cellmap_to_json(const GameSpec& game, const CellMap& map, double tolerance) {
    json samples = json::array();
    for (const auto& s : map.samples) {
        json item = {{"index", s.index}, {"coords", s.coords}, {"verdict", to_string(s.verdict)},
                     {"fingerprint", s.fingerprint}};
        if (s.verdict != SampleVerdict::Failed) {
            item["lambda"] = s.lambda;
            item["bias"] = vector_to_json(game, s.bias);
            item["residual"] = s.residual;
        } else {
            item["failure"] = s.failure;
        }
        samples.push_back(std::move(item));
    }
    json bounds = json::array();
    for (const auto& b : map.boundaries)
        bounds.push_back({{"from", b.from},
                          {"to", b.to},
                          {"verdict_change", b.verdict_change},
                          {"fingerprint_change", b.fingerprint_change},
                          {"midpoint", b.midpoint}});
    return {{"shape", map.shape}, {"tolerance", tolerance}, {"samples", std::move(samples)},
            {"boundaries", std::move(bounds)}};
}

json boundary_lines_to_json(const std::vector<BoundaryLine>& lines) {
    json out = json::array();
    for (const auto& l : lines) out.push_back({l.a, l.b, l.c});
    return out;
}

std::string to_text(const json& doc) { return doc.dump(2) + "\n"; }

} // namespace mpg
