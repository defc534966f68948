#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptdgnn/encoder.hpp"
#include "ptdgnn/metrics.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/rng.hpp"
#include "ptdgnn/tape.hpp"
#include "ptdgnn/temporal_graph.hpp"

namespace ptdgnn {

struct EvalPairs {
  std::vector<std::pair<int, int>> positives;
  std::vector<std::pair<int, int>> negatives;
};

inline std::pair<int, int> undirected_pair(int u, int v) {
  return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

// Positives: deduplicated node pairs of the target block. Negatives: an equal
// count of uniform pairs that appear in no block at all, with both endpoints
// seen in the pretrain or train blocks.
inline EvalPairs build_eval_pairs(const TemporalGraph& g, const SplitBlocks& blocks,
                                  int target_block, std::uint64_t seed) {
  if (target_block < 0 || target_block > 3) throw std::runtime_error("bad target block index");
  if (blocks.blocks[target_block].empty()) throw std::runtime_error("target block is empty");

  std::set<std::pair<int, int>> pos_set;
  for (int e : blocks.blocks[target_block])
    pos_set.insert(undirected_pair(g.edges()[e].src, g.edges()[e].dst));

  std::set<std::pair<int, int>> known;
  for (const auto& block : blocks.blocks)
    for (int e : block) known.insert(undirected_pair(g.edges()[e].src, g.edges()[e].dst));

  std::set<int> endpoint_set;
  for (int k = 0; k < 2; ++k)
    for (int e : blocks.blocks[k]) {
      endpoint_set.insert(g.edges()[e].src);
      endpoint_set.insert(g.edges()[e].dst);
    }
  const std::vector<int> endpoints(endpoint_set.begin(), endpoint_set.end());
  if (endpoints.size() < 2) throw std::runtime_error("too few eligible endpoints for negatives");

  EvalPairs out;
  out.positives.assign(pos_set.begin(), pos_set.end());

  Rng rng(seed);
  std::set<std::pair<int, int>> negs;
  const std::size_t want = out.positives.size();
  std::size_t attempts = 0;
  const std::size_t max_attempts = 100 * want + 100;
  while (negs.size() < want) {
    if (++attempts > max_attempts)
      throw std::runtime_error("could not sample enough negative pairs (graph too dense)");
    const int u = endpoints[rng.below(endpoints.size())];
    const int v = endpoints[rng.below(endpoints.size())];
    if (u == v) continue;
    const auto p = undirected_pair(u, v);
    if (known.count(p) || negs.count(p)) continue;
    negs.insert(p);
    out.negatives.push_back(p);
  }
  return out;
}

struct PairScores {
  std::vector<double> scores;
  int cold_endpoints = 0;  // pairs with an endpoint of degree 0 in the scoring graph
};

// score(i, j) = sigmoid(r_i . r_j) with embeddings from the encoder run over
// the given input edge set.
inline PairScores score_pairs(ParamStore& params, const EncoderConfig& cfg,
                              const TemporalGraph& g,
                              const std::vector<std::pair<int, int>>& input_pairs,
                              const std::vector<std::pair<int, int>>& eval_pairs) {
  const Matrix emb = encode_graph(g.attrs(), input_pairs, params, cfg);
  std::vector<int> degree(g.node_count(), 0);
  for (const auto& [u, v] : input_pairs) {
    ++degree[u];
    ++degree[v];
  }
  PairScores out;
  out.scores.reserve(eval_pairs.size());
  for (const auto& [u, v] : eval_pairs) {
    double s = 0.0;
    for (int c = 0; c < emb.cols; ++c) s += emb.at(u, c) * emb.at(v, c);
    out.scores.push_back(sigmoid(s));
    if (degree[u] == 0 || degree[v] == 0) ++out.cold_endpoints;
  }
  return out;
}

struct EvalReport {
  double auc = 0.0;
  double ap = 0.0;
  double f1 = 0.0;
  int n_pos = 0;
  int n_neg = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  int cold_pairs = 0;  // pairs involving a node unseen in the scoring graph

  nlohmann::json to_json() const {
    return nlohmann::json{{"auc", auc},           {"ap", ap},
                          {"f1", f1},             {"n_pos", n_pos},
                          {"n_neg", n_neg},       {"seed", seed},
                          {"config_hash", config_hash}, {"cold_pairs", cold_pairs}};
  }
};

inline std::vector<std::pair<int, int>> block_pairs(const TemporalGraph& g,
                                                    const std::vector<int>& edge_indices) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edge_indices.size());
  for (int e : edge_indices) pairs.emplace_back(g.edges()[e].src, g.edges()[e].dst);
  return pairs;
}

// Link-prediction evaluation against one block. The scoring graph is every
// block strictly earlier than the target.
inline EvalReport evaluate_block(const TemporalGraph& g, const SplitBlocks& blocks,
                                 ParamStore& params, const EncoderConfig& cfg, int target_block,
                                 std::uint64_t seed) {
  const EvalPairs pairs = build_eval_pairs(g, blocks, target_block, seed);

  std::vector<std::pair<int, int>> input;
  for (int k = 0; k < target_block; ++k) {
    const auto bp = block_pairs(g, blocks.blocks[k]);
    input.insert(input.end(), bp.begin(), bp.end());
  }

  std::vector<std::pair<int, int>> all_pairs = pairs.positives;
  all_pairs.insert(all_pairs.end(), pairs.negatives.begin(), pairs.negatives.end());
  const PairScores scored = score_pairs(params, cfg, g, input, all_pairs);

  std::vector<double> pos(scored.scores.begin(),
                          scored.scores.begin() + static_cast<std::ptrdiff_t>(pairs.positives.size()));
  std::vector<double> neg(scored.scores.begin() + static_cast<std::ptrdiff_t>(pairs.positives.size()),
                          scored.scores.end());

  EvalReport report;
  report.auc = auc(pos, neg);
  report.ap = average_precision(pos, neg);
  report.f1 = f1_score(pos, neg);
  report.n_pos = static_cast<int>(pos.size());
  report.n_neg = static_cast<int>(neg.size());
  report.seed = seed;
  report.cold_pairs = scored.cold_endpoints;
  return report;
}

}  // namespace ptdgnn
