#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace nonmono::graph {

using Adjacency = std::vector<std::vector<std::size_t>>;

struct Component {
  std::vector<std::size_t> nodes; // ascending
  bool cyclic = false;            // more than one node, or a self-loop
};

/// Strongly connected components in a topological order of the condensation
/// (every edge goes from an earlier component to a later or the same one).
/// Ties between incomparable components are broken by smallest member, so the
/// order depends only on the graph.
struct Condensation {
  std::vector<Component> components;
  std::vector<std::size_t> component_of;
  std::vector<std::size_t> layer_of; // longest-path depth of each component
  std::vector<std::vector<std::size_t>> layers; // component indices per depth
};

inline Condensation condense(const Adjacency &succ) {
  const std::size_t n = succ.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();

  // Iterative Tarjan.
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> raw;
  std::size_t counter = 0;
  struct Frame {
    std::size_t v, edge;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame &f = call.back();
      if (f.edge < succ[f.v].size()) {
        const std::size_t w = succ[f.v][f.edge++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> members;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = raw.size();
          members.push_back(w);
        } while (w != v);
        std::sort(members.begin(), members.end());
        raw.push_back(std::move(members));
      }
    }
  }

  // Kahn over the condensation, smallest-member first.
  const std::size_t m = raw.size();
  std::vector<std::vector<std::size_t>> csucc(m);
  std::vector<std::size_t> indeg(m, 0);
  std::vector<bool> self_loop(m, false);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : succ[v]) {
      if (comp[v] == comp[w]) {
        if (v == w) self_loop[comp[v]] = true;
        continue;
      }
      csucc[comp[v]].push_back(comp[w]);
    }
  for (auto &s : csucc) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::size_t c : s) ++indeg[c];
  }
  auto key = [&](std::size_t c) { return raw[c].front(); };
  auto cmp = [&](std::size_t x, std::size_t y) { return key(x) > key(y); };
  std::vector<std::size_t> ready;
  for (std::size_t c = 0; c < m; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  std::make_heap(ready.begin(), ready.end(), cmp);

  Condensation out;
  out.component_of.assign(n, 0);
  std::vector<std::size_t> new_id(m, 0), depth(m, 0);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), cmp);
    const std::size_t c = ready.back();
    ready.pop_back();
    new_id[c] = out.components.size();
    out.components.push_back({raw[c], raw[c].size() > 1 || self_loop[c]});
    for (std::size_t d : csucc[c]) {
      depth[d] = std::max(depth[d], depth[c] + 1);
      if (--indeg[d] == 0) {
        ready.push_back(d);
        std::push_heap(ready.begin(), ready.end(), cmp);
      }
    }
  }
  out.layer_of.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    out.layer_of[new_id[c]] = depth[c];
    for (std::size_t v : raw[c]) out.component_of[v] = new_id[c];
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (out.layers.size() <= out.layer_of[c]) out.layers.resize(out.layer_of[c] + 1);
    out.layers[out.layer_of[c]].push_back(c);
  }
  return out;
}

} // namespace nonmono::graph
