#pragma once

#include "mpg/fan_explorer.hpp"
#include "mpg/game_model.hpp"
#include "mpg/hoffman_karp.hpp"
#include "mpg/markov_solver.hpp"
#include "mpg/maxplus.hpp"
#include "mpg/structural.hpp"

#include <json.hpp>

#include <string>

namespace mpg {

// JSON views of solver results. States and actions are reported by their original identifiers,
// and every certified number sits next to the tolerance it was checked against.

nlohmann::json state_set_to_json(const GameSpec& game, StateSet s);
nlohmann::json node_set_to_json(const GameSpec& game, const NodeSet& s);
nlohmann::json vector_to_json(const GameSpec& game, const StateVector& v);
nlohmann::json policy_to_json(const GameSpec& game, const Policy& sigma);
nlohmann::json counter_policy_to_json(const GameSpec& game, const CounterPolicy& pi);

nlohmann::json galois_report_to_json(const GameSpec& game, const GaloisReport& report,
                                     const StructuralOptions& options);

nlohmann::json eigenpair_to_json(const GameSpec& game, const EigenPair& pair, double tolerance);
nlohmann::json not_well_posed_to_json(const GameSpec& game, const NotWellPosed& failure, double gain_tol);

nlohmann::json critical_graph_to_json(const GameSpec& game, const CriticalGraphReport& report,
                                      const CriticalGraphOptions& options);

nlohmann::json trace_to_json(const GameSpec& game, const IterationTrace& trace, double tolerance,
                             bool include_timings);

nlohmann::json certificate_to_json(const GameSpec& game, const UniquenessCertificate& cert,
                                   const CertifyOptions& options);

nlohmann::json value_iteration_to_json(const GameSpec& game, const ValueIterationResult& result, std::size_t k);

/// "-inf" for the max-plus zero.
nlohmann::json maxplus_to_json(const MaxPlus<double>& x);

nlohmann::json cellmap_to_json(const GameSpec& game, const CellMap& map, double tolerance);
nlohmann::json boundary_lines_to_json(const std::vector<BoundaryLine>& lines);

/// Two-space indented dump terminated by a newline.
std::string to_text(const nlohmann::json& doc);

} // namespace mpg
