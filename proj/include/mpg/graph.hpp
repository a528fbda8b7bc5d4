#pragma once

#include <cstddef>
#include <vector>

namespace mpg {

using Adjacency = std::vector<std::vector<std::size_t>>;
using NodeSet = std::vector<std::size_t>;

/// Strongly connected components; members sorted, components ordered by smallest member.
std::vector<NodeSet> strongly_connected_components(const Adjacency& graph);

/// Components with no arc leaving them (final classes of the condensation).
std::vector<NodeSet> sink_components(const Adjacency& graph);

/// Components restricted to a node subset: arcs with an endpoint outside `nodes` are ignored.
std::vector<NodeSet> strongly_connected_components(const Adjacency& graph, const std::vector<bool>& nodes);

} // namespace mpg
