#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdgnn/rng.hpp"
#include "ptdgnn/sampler.hpp"

namespace ptdgnn {

enum class MaskProbKind { Softmax, Linear };
enum class MaskScheme { TimeBased, Random };

struct MaskConfig {
  double edge_mask_ratio = 0.5;
  MaskProbKind prob_kind = MaskProbKind::Softmax;
  MaskScheme scheme = MaskScheme::TimeBased;
  double attr_mask_fraction = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(edge_mask_ratio > 0.0 && edge_mask_ratio < 1.0))
      throw std::runtime_error("edge_mask_ratio must be in (0, 1)");
    if (!(attr_mask_fraction > 0.0 && attr_mask_fraction <= 1.0))
      throw std::runtime_error("attr_mask_fraction must be in (0, 1]");
  }
};

struct MaskPlan {
  std::vector<int> masked_edges;      // local edge indices, ascending
  std::vector<int> observed_edges;    // complement, ascending
  std::vector<int> attr_masked_nodes; // local node indices, ascending
};

// Per-edge mask probability for one node's incident list: softmax over the
// timestamps, or direct normalization for the linear variant. A linear
// all-zero list falls back to uniform (0/0 otherwise).
inline std::vector<double> mask_probabilities(const std::vector<double>& t_values,
                                              MaskProbKind kind) {
  if (t_values.empty()) throw std::runtime_error("mask_probabilities: empty list");
  std::vector<double> probs(t_values.size());
  if (kind == MaskProbKind::Softmax) {
    const double m = *std::max_element(t_values.begin(), t_values.end());
    double total = 0.0;
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      probs[i] = std::exp(t_values[i] - m);
      total += probs[i];
    }
    for (double& p : probs) p /= total;
  } else {
    double total = 0.0;
    for (double t : t_values) {
      if (t < 0.0) throw std::runtime_error("mask_probabilities: negative timestamp");
      total += t;
    }
    if (total <= 0.0) {
      std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(t_values.size()));
    } else {
      for (std::size_t i = 0; i < t_values.size(); ++i) probs[i] = t_values[i] / total;
    }
  }
  return probs;
}

namespace detail {

inline MaskPlan edge_mask(const SampledSubgraph& sg, const MaskConfig& cfg) {
  cfg.validate();
  const int n = sg.node_count();
  const int m = static_cast<int>(sg.local_edges.size());

  std::vector<std::vector<int>> incident(n);
  for (int e = 0; e < m; ++e) {
    incident[sg.local_edges[e].src].push_back(e);
    incident[sg.local_edges[e].dst].push_back(e);
  }

  // Per-node budget; the deg - 1 cap guarantees every node with two or more
  // incident edges keeps at least one observed.
  std::vector<int> target(n, 0);
  for (int v = 0; v < n; ++v) {
    const int deg = static_cast<int>(incident[v].size());
    if (deg >= 2)
      target[v] = std::min(static_cast<int>(std::floor(cfg.edge_mask_ratio * deg)), deg - 1);
  }

  std::vector<char> masked(m, 0);
  std::vector<int> masked_incident(n, 0);
  Rng rng(cfg.seed);

  // An edge is masked once but counts toward both endpoints' budgets, so a
  // draw may only take an edge whose other endpoint still has capacity (or
  // has degree 1 and no budget at all). The global masked fraction then
  // tracks the ratio instead of compounding across endpoints.
  auto absorbable = [&](int u) {
    return incident[u].size() < 2 || masked_incident[u] < target[u];
  };

  for (int v = 0; v < n; ++v) {
    while (masked_incident[v] < target[v]) {
      std::vector<int> cand;
      for (int e : incident[v]) {
        if (masked[e]) continue;
        const LocalEdge& le = sg.local_edges[e];
        const int u = le.src == v ? le.dst : le.src;
        if (absorbable(u)) cand.push_back(e);
      }
      if (cand.empty()) break;

      std::vector<double> weights;
      if (cfg.scheme == MaskScheme::Random) {
        weights.assign(cand.size(), 1.0);
      } else {
        std::vector<double> ts(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) ts[i] = sg.local_edges[cand[i]].t_norm;
        weights = mask_probabilities(ts, cfg.prob_kind);
      }

      const int e = cand[rng.weighted_index(weights)];
      masked[e] = 1;
      masked_incident[sg.local_edges[e].src]++;
      masked_incident[sg.local_edges[e].dst]++;
    }
  }

  MaskPlan plan;
  for (int e = 0; e < m; ++e)
    (masked[e] ? plan.masked_edges : plan.observed_edges).push_back(e);
  return plan;
}

}  // namespace detail

inline MaskPlan time_based_edge_mask(const SampledSubgraph& sg, const MaskConfig& cfg) {
  if (cfg.scheme != MaskScheme::TimeBased)
    throw std::runtime_error("time_based_edge_mask called with wrong scheme");
  return detail::edge_mask(sg, cfg);
}

inline MaskPlan random_edge_mask(const SampledSubgraph& sg, const MaskConfig& cfg) {
  if (cfg.scheme != MaskScheme::Random)
    throw std::runtime_error("random_edge_mask called with wrong scheme");
  return detail::edge_mask(sg, cfg);
}

inline std::vector<int> select_attr_masked_nodes(const SampledSubgraph& sg,
                                                 const MaskConfig& cfg) {
  cfg.validate();
  const int n = sg.node_count();
  std::vector<int> nodes;
  if (cfg.attr_mask_fraction >= 1.0) {
    nodes.resize(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    return nodes;
  }
  const auto k = static_cast<std::size_t>(std::ceil(cfg.attr_mask_fraction * n));
  Rng rng(derive_seed(cfg.seed, 0x61747472 /* "attr" */));
  for (std::size_t idx : rng.sample_without_replacement(static_cast<std::size_t>(n), k))
    nodes.push_back(static_cast<int>(idx));
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

inline MaskPlan make_mask_plan(const SampledSubgraph& sg, const MaskConfig& cfg) {
  MaskPlan plan = detail::edge_mask(sg, cfg);
  plan.attr_masked_nodes = select_attr_masked_nodes(sg, cfg);
  return plan;
}

inline nlohmann::json mask_plan_to_json(const MaskPlan& plan) {
  return nlohmann::json{{"masked_edges", plan.masked_edges},
                        {"observed_edges", plan.observed_edges},
                        {"attr_masked_nodes", plan.attr_masked_nodes}};
}

inline MaskPlan mask_plan_from_json(const nlohmann::json& j) {
  MaskPlan plan;
  plan.masked_edges = j.at("masked_edges").get<std::vector<int>>();
  plan.observed_edges = j.at("observed_edges").get<std::vector<int>>();
  plan.attr_masked_nodes = j.at("attr_masked_nodes").get<std::vector<int>>();
  return plan;
}

}  // namespace ptdgnn
