#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptdgnn/matrix.hpp"
#include "ptdgnn/rng.hpp"
#include "ptdgnn/temporal_graph.hpp"

namespace ptdgnn {

enum class SamplerKind { Dyss, LayerwiseDegree, Uniform };

struct SamplerConfig {
  int depth = 6;
  int width = 128;
  SamplerKind kind = SamplerKind::Dyss;
  std::uint64_t seed = 0;

  void validate() const {
    if (depth < 1) throw std::runtime_error("sampler depth must be at least 1");
    if (width < 1) throw std::runtime_error("sampler width must be at least 1");
  }
};

struct LocalEdge {
  int src = 0;   // local node index
  int dst = 0;   // local node index
  double t_norm = 0.0;
  int global_edge = 0;  // index into the parent graph's edge list
};

struct SampledSubgraph {
  std::vector<int> global_ids;   // local index -> global node id, no duplicates
  std::vector<LocalEdge> local_edges;
  Matrix local_attrs;

  int node_count() const { return static_cast<int>(global_ids.size()); }
};

// View of one edge block: per-node incident lists and timestamps renormalized
// to the block's own time span. Pre-training consumes only these values, so
// edges outside the block cannot influence it, not even through
// normalization.
class BlockView {
 public:
  BlockView(const TemporalGraph& g, const std::vector<int>& edge_block) {
    incident_.assign(g.node_count(), {});
    if (edge_block.empty()) return;
    std::int64_t lo = g.edges()[edge_block[0]].t_raw;
    std::int64_t hi = lo;
    for (int e : edge_block) {
      lo = std::min(lo, g.edges()[e].t_raw);
      hi = std::max(hi, g.edges()[e].t_raw);
    }
    const double span = static_cast<double>(hi - lo);
    block_edges_.reserve(edge_block.size());
    for (int e : edge_block) {
      const TimedEdge& te = g.edges()[e];
      const double t = span > 0.0 ? static_cast<double>(te.t_raw - lo) / span : 0.0;
      block_edges_.push_back({te.src, te.dst, t, e});
      incident_[te.src].push_back({te.dst, t, e});
      incident_[te.dst].push_back({te.src, t, e});
    }
    for (int v = 0; v < g.node_count(); ++v)
      if (!incident_[v].empty()) active_nodes_.push_back(v);
  }

  const std::vector<AdjEntry>& incident(int v) const { return incident_[v]; }
  int block_degree(int v) const { return static_cast<int>(incident_[v].size()); }
  const std::vector<int>& active_nodes() const { return active_nodes_; }
  // (src, dst, block-local t_norm, global edge index), block order
  const std::vector<LocalEdge>& block_edges() const { return block_edges_; }

 private:
  std::vector<std::vector<AdjEntry>> incident_;  // t_norm is block-local here
  std::vector<int> active_nodes_;
  std::vector<LocalEdge> block_edges_;  // src/dst are global ids here
};

// Selection probabilities of Eq. 1: score squared over the pool's sum of
// squares. An all-zero pool falls back to uniform (the formula is 0/0 there).
inline std::vector<double> eq1_probabilities(const std::vector<double>& scores) {
  if (scores.empty()) throw std::runtime_error("eq1_probabilities: empty pool");
  std::vector<double> probs(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < 0.0) throw std::runtime_error("eq1_probabilities: negative score");
    probs[i] = scores[i] * scores[i];
    total += probs[i];
  }
  if (total <= 0.0) {
    const double u = 1.0 / static_cast<double>(scores.size());
    std::fill(probs.begin(), probs.end(), u);
    return probs;
  }
  for (double& p : probs) p /= total;
  return probs;
}

namespace detail {

struct PoolEntry {
  int node = 0;
  double score = 0.0;
  bool alive = true;
};

// Frontier expansion shared by all sampler kinds; `accumulate` controls
// whether a contribution adds to the score (DySS) or just sets it
// (degree / uniform baselines).
inline SampledSubgraph frontier_sample(const TemporalGraph& g, const BlockView& view,
                                       const SamplerConfig& cfg) {
  cfg.validate();
  if (view.block_edges().empty())
    throw std::runtime_error("sampler: edge block is empty");

  Rng rng(cfg.seed);
  const std::vector<int>& eligible = view.active_nodes();

  std::vector<int> subgraph_nodes;  // doubles as SN, the frontier
  std::vector<char> in_subgraph(g.node_count(), 0);
  for (std::size_t idx :
       rng.sample_without_replacement(eligible.size(), static_cast<std::size_t>(cfg.width))) {
    subgraph_nodes.push_back(eligible[idx]);
    in_subgraph[eligible[idx]] = 1;
  }

  std::vector<PoolEntry> pool;
  std::unordered_map<int, std::size_t> pool_index;

  for (int iter = 0; iter < cfg.depth; ++iter) {
    // Alg. 1 rescans the whole frontier each round, so scores of candidates
    // that stay in the pool keep accumulating.
    for (int v : subgraph_nodes) {
      for (const AdjEntry& a : view.incident(v)) {
        if (in_subgraph[a.neighbor]) continue;
        auto it = pool_index.find(a.neighbor);
        std::size_t pos;
        if (it == pool_index.end()) {
          pos = pool.size();
          pool.push_back({a.neighbor, 0.0, true});
          pool_index.emplace(a.neighbor, pos);
        } else {
          pos = it->second;
        }
        switch (cfg.kind) {
          case SamplerKind::Dyss:
            pool[pos].score += a.t_norm;
            break;
          case SamplerKind::LayerwiseDegree:
            pool[pos].score = static_cast<double>(view.block_degree(a.neighbor));
            break;
          case SamplerKind::Uniform:
            pool[pos].score = 1.0;
            break;
        }
      }
    }

    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].alive) alive.push_back(i);
    if (alive.empty()) continue;

    const std::size_t picks = std::min<std::size_t>(cfg.width, alive.size());
    for (std::size_t p = 0; p < picks; ++p) {
      std::vector<double> weights(alive.size());
      for (std::size_t i = 0; i < alive.size(); ++i) {
        const double s = pool[alive[i]].score;
        weights[i] = s * s;
      }
      const std::size_t chosen = rng.weighted_index(weights);
      const int node = pool[alive[chosen]].node;
      pool[alive[chosen]].alive = false;
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(chosen));
      subgraph_nodes.push_back(node);
      in_subgraph[node] = 1;
    }
  }

  SampledSubgraph sg;
  sg.global_ids = subgraph_nodes;
  std::unordered_map<int, int> local_of;
  local_of.reserve(subgraph_nodes.size() * 2);
  for (std::size_t i = 0; i < subgraph_nodes.size(); ++i)
    local_of.emplace(subgraph_nodes[i], static_cast<int>(i));

  for (const LocalEdge& be : view.block_edges()) {
    auto s = local_of.find(be.src);
    auto d = local_of.find(be.dst);
    if (s == local_of.end() || d == local_of.end()) continue;
    sg.local_edges.push_back({s->second, d->second, be.t_norm, be.global_edge});
  }

  // Renormalize the induced edges over the subgraph's own time span; a
  // subgraph covering a narrow slice of the block would otherwise present
  // nearly flat timestamps to the masker.
  if (!sg.local_edges.empty()) {
    double lo = sg.local_edges[0].t_norm;
    double hi = lo;
    for (const LocalEdge& e : sg.local_edges) {
      lo = std::min(lo, e.t_norm);
      hi = std::max(hi, e.t_norm);
    }
    const double span = hi - lo;
    for (LocalEdge& e : sg.local_edges)
      e.t_norm = span > 0.0 ? (e.t_norm - lo) / span : 0.0;
  }

  const Matrix& attrs = g.attrs();
  sg.local_attrs = Matrix(sg.node_count(), attrs.cols);
  for (int i = 0; i < sg.node_count(); ++i)
    for (int c = 0; c < attrs.cols; ++c)
      sg.local_attrs.at(i, c) = attrs.at(sg.global_ids[i], c);
  return sg;
}

}  // namespace detail

inline SampledSubgraph dyss_sample(const TemporalGraph& g, const std::vector<int>& edge_block,
                                   const SamplerConfig& cfg) {
  if (cfg.kind != SamplerKind::Dyss)
    throw std::runtime_error("dyss_sample called with a non-dyss config");
  return detail::frontier_sample(g, BlockView(g, edge_block), cfg);
}

inline SampledSubgraph layerwise_degree_sample(const TemporalGraph& g,
                                               const std::vector<int>& edge_block,
                                               const SamplerConfig& cfg) {
  if (cfg.kind != SamplerKind::LayerwiseDegree)
    throw std::runtime_error("layerwise_degree_sample called with wrong config kind");
  return detail::frontier_sample(g, BlockView(g, edge_block), cfg);
}

inline SampledSubgraph sample_subgraph(const TemporalGraph& g, const std::vector<int>& edge_block,
                                       const SamplerConfig& cfg) {
  return detail::frontier_sample(g, BlockView(g, edge_block), cfg);
}

// Test oracle for the weighted draws: repeat the single Eq. 1 selection and
// report how often each candidate came up.
inline std::vector<double> empirical_selection_frequencies(const std::vector<double>& weights,
                                                           std::size_t trials,
                                                           std::uint64_t seed) {
  if (weights.empty()) throw std::runtime_error("empirical_selection_frequencies: empty weights");
  if (trials == 0) throw std::runtime_error("empirical_selection_frequencies: zero trials");
  std::vector<double> squared(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0)
      throw std::runtime_error("empirical_selection_frequencies: negative weight");
    squared[i] = weights[i] * weights[i];
  }
  Rng rng(seed);
  std::vector<std::size_t> counts(weights.size(), 0);
  for (std::size_t t = 0; t < trials; ++t) counts[rng.weighted_index(squared)]++;
  std::vector<double> freq(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  return freq;
}

// Debug export: canonical local edge list plus the local -> global id map.
inline std::string subgraph_to_text(const SampledSubgraph& sg) {
  std::string out;
  for (std::size_t i = 0; i < sg.global_ids.size(); ++i) {
    out += "# node ";
    out += std::to_string(i);
    out += " ";
    out += std::to_string(sg.global_ids[i]);
    out += '\n';
  }
  std::vector<LocalEdge> sorted = sg.local_edges;
  std::sort(sorted.begin(), sorted.end(), [](const LocalEdge& a, const LocalEdge& b) {
    if (a.t_norm != b.t_norm) return a.t_norm < b.t_norm;
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });
  char buf[64];
  for (const LocalEdge& e : sorted) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", e.src, e.dst, e.t_norm);
    out += buf;
  }
  return out;
}

}  // namespace ptdgnn
