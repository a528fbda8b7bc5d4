#include "mpg/graph.hpp"

#include <algorithm>
#include <limits>

namespace mpg {

namespace {

constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

// Iterative Tarjan.
std::vector<NodeSet> tarjan(const Adjacency& graph, const std::vector<bool>& active) {
    const std::size_t n = graph.size();
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<NodeSet> out;
    std::size_t counter = 0;

    struct Frame {
        std::size_t node;
        std::size_t next_arc;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (!active[root] || index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const std::size_t v = f.node;
            if (f.next_arc < graph[v].size()) {
                const std::size_t w = graph[v][f.next_arc++];
                if (!active[w]) continue;
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                NodeSet comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const NodeSet& a, const NodeSet& b) { return a.front() < b.front(); });
    return out;
}

} // namespace

std::vector<NodeSet> strongly_connected_components(const Adjacency& graph) {
    return tarjan(graph, std::vector<bool>(graph.size(), true));
}

std::vector<NodeSet> strongly_connected_components(const Adjacency& graph, const std::vector<bool>& nodes) {
    return tarjan(graph, nodes);
}

std::vector<NodeSet> sink_components(const Adjacency& graph) {
    auto comps = strongly_connected_components(graph);
    std::vector<std::size_t> comp_of(graph.size());
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t v : comps[c]) comp_of[v] = c;
    std::vector<NodeSet> sinks;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        bool closed = true;
        for (std::size_t v : comps[c])
            for (std::size_t w : graph[v])
                if (comp_of[w] != c) closed = false;
        if (closed) sinks.push_back(comps[c]);
    }
    return sinks;
}

} // namespace mpg
