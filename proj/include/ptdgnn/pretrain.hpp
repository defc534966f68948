#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptdgnn/encoder.hpp"
#include "ptdgnn/masker.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/sampler.hpp"
#include "ptdgnn/tape.hpp"
#include "ptdgnn/temporal_graph.hpp"

namespace ptdgnn {

struct EdgeAnchor {
  int node = 0;
  std::vector<int> positives;  // masked-edge partners, ascending, deduplicated
  std::vector<int> negatives;  // sampled non-neighbors
};

using EdgeLossBatch = std::vector<EdgeAnchor>;

// Uniform draw without replacement from the subgraph nodes that are not i
// and not adjacent to i over any subgraph edge, observed or masked.
inline std::vector<int> sample_negatives_with_rng(const SampledSubgraph& sg, int anchor,
                                                  std::size_t count, Rng& rng) {
  std::vector<char> excluded(sg.node_count(), 0);
  excluded[anchor] = 1;
  for (const LocalEdge& e : sg.local_edges) {
    if (e.src == anchor) excluded[e.dst] = 1;
    if (e.dst == anchor) excluded[e.src] = 1;
  }
  std::vector<int> eligible;
  for (int v = 0; v < sg.node_count(); ++v)
    if (!excluded[v]) eligible.push_back(v);
  if (eligible.size() <= count) return eligible;
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t idx : rng.sample_without_replacement(eligible.size(), count))
    out.push_back(eligible[idx]);
  return out;
}

inline std::vector<int> sample_negatives(const SampledSubgraph& sg, int anchor, std::size_t count,
                                         std::uint64_t seed) {
  Rng rng(seed);
  return sample_negatives_with_rng(sg, anchor, count, rng);
}

// Anchors are both endpoints of every masked edge. Negative count per anchor
// is max(k_neg, number of positives), which keeps the softmax balanced at the
// default k_neg = 1.
inline EdgeLossBatch build_edge_batch(const SampledSubgraph& sg, const MaskPlan& plan, int k_neg,
                                      std::uint64_t seed) {
  if (k_neg < 1) throw std::runtime_error("k_neg must be at least 1");
  std::vector<std::set<int>> partners(sg.node_count());
  for (int e : plan.masked_edges) {
    const LocalEdge& le = sg.local_edges[e];
    partners[le.src].insert(le.dst);
    partners[le.dst].insert(le.src);
  }
  Rng rng(seed);
  EdgeLossBatch batch;
  for (int v = 0; v < sg.node_count(); ++v) {
    if (partners[v].empty()) continue;
    EdgeAnchor a;
    a.node = v;
    a.positives.assign(partners[v].begin(), partners[v].end());
    const std::size_t want = std::max<std::size_t>(static_cast<std::size_t>(k_neg),
                                                   a.positives.size());
    a.negatives = sample_negatives_with_rng(sg, v, want, rng);
    batch.push_back(std::move(a));
  }
  return batch;
}

// Contrastive edge-generation loss: for each anchor i and each masked partner
// j+, -log of exp(r_i . r_j+) over the sum of exp(r_i . r_j) across all of
// i's positives and sampled negatives. Computed with max subtraction.
inline Tape::NodeId edge_loss_on_tape(Tape& tape, Tape::NodeId emb, EdgeLossBatch batch) {
  const Matrix& r = tape.value(emb);
  const int h = r.cols;
  auto dot = [&](const Matrix& m, int a, int b) {
    double s = 0.0;
    for (int c = 0; c < h; ++c) s += m.at(a, c) * m.at(b, c);
    return s;
  };

  double loss = 0.0;
  for (const EdgeAnchor& a : batch) {
    if (a.positives.empty()) continue;
    double best = -1e300;
    std::vector<double> logits;
    logits.reserve(a.positives.size() + a.negatives.size());
    for (int j : a.positives) logits.push_back(dot(r, a.node, j));
    for (int j : a.negatives) logits.push_back(dot(r, a.node, j));
    for (double z : logits) best = std::max(best, z);
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - best);
    const double lse = best + std::log(denom);
    double pos_sum = 0.0;
    for (std::size_t p = 0; p < a.positives.size(); ++p) pos_sum += logits[p];
    loss += static_cast<double>(a.positives.size()) * lse - pos_sum;
  }

  Matrix out(1, 1);
  out.data[0] = loss;
  const bool ng = tape.needs_grad(emb);
  return tape.custom(std::move(out), ng,
                     [&tape, emb, batch = std::move(batch), h](const Matrix& g) {
                       if (!tape.needs_grad(emb)) return;
                       const double gs = g.data[0];
                       const Matrix& r = tape.value(emb);
                       Matrix ge(r.rows, r.cols);
                       for (const EdgeAnchor& a : batch) {
                         if (a.positives.empty()) continue;
                         std::vector<int> cand = a.positives;
                         cand.insert(cand.end(), a.negatives.begin(), a.negatives.end());
                         std::vector<double> logits(cand.size());
                         double best = -1e300;
                         for (std::size_t k = 0; k < cand.size(); ++k) {
                           double s = 0.0;
                           for (int c = 0; c < h; ++c) s += r.at(a.node, c) * r.at(cand[k], c);
                           logits[k] = s;
                           best = std::max(best, s);
                         }
                         double denom = 0.0;
                         for (double z : logits) denom += std::exp(z - best);
                         const double npos = static_cast<double>(a.positives.size());
                         for (std::size_t k = 0; k < cand.size(); ++k) {
                           double coeff = npos * std::exp(logits[k] - best) / denom;
                           if (k < a.positives.size()) coeff -= 1.0;
                           coeff *= gs;
                           for (int c = 0; c < h; ++c) {
                             ge.at(a.node, c) += coeff * r.at(cand[k], c);
                             ge.at(cand[k], c) += coeff * r.at(a.node, c);
                           }
                         }
                       }
                       tape.accumulate(emb, ge);
                     });
}

// Value-only evaluation for tests and oracles.
inline double edge_loss(const Matrix& emb, const EdgeLossBatch& batch) {
  Tape tape;
  return tape.scalar(edge_loss_on_tape(tape, tape.input(emb), batch));
}

// Squared-L2 attribute reconstruction loss over the attr-masked rows.
inline Tape::NodeId attr_loss_on_tape(Tape& tape, const BoundParams& bound,
                                      const SampledSubgraph& sg, const MaskPlan& plan,
                                      Tape::NodeId r_a) {
  const auto& nodes = plan.attr_masked_nodes;
  Matrix targets(static_cast<int>(nodes.size()), sg.local_attrs.cols);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (int c = 0; c < sg.local_attrs.cols; ++c)
      targets.at(static_cast<int>(i), c) = sg.local_attrs.at(nodes[i], c);
  const Tape::NodeId pred = decode_attrs_on_tape(tape, bound, r_a);
  return tape.sqdiff_sum(pred, std::move(targets));
}

inline double attr_loss(const SampledSubgraph& sg, const MaskPlan& plan,
                        const DualEmbedding& dual, ParamStore& params) {
  if (plan.attr_masked_nodes.empty()) return 0.0;
  Tape tape;
  BoundParams bound(tape, params);
  Matrix rows(static_cast<int>(plan.attr_masked_nodes.size()), dual.r_a.cols);
  for (std::size_t i = 0; i < plan.attr_masked_nodes.size(); ++i)
    for (int c = 0; c < dual.r_a.cols; ++c)
      rows.at(static_cast<int>(i), c) = dual.r_a.at(plan.attr_masked_nodes[i], c);
  return tape.scalar(attr_loss_on_tape(tape, bound, sg, plan, tape.input(rows)));
}

struct PretrainConfig {
  int epochs = 20;
  int subgraphs_per_epoch = 8;
  SamplerConfig sampler;
  MaskConfig mask;
  int k_neg = 1;
  double loss_weight_attr = 1.0;
  AdamwConfig opt;
  EncoderConfig encoder;

  void validate() const {
    if (epochs < 1) throw std::runtime_error("pretrain epochs must be at least 1");
    if (subgraphs_per_epoch < 1)
      throw std::runtime_error("subgraphs_per_epoch must be at least 1");
    if (k_neg < 1) throw std::runtime_error("k_neg must be at least 1");
    if (loss_weight_attr < 0.0) throw std::runtime_error("loss_weight_attr must be nonnegative");
    sampler.validate();
    mask.validate();
    encoder.validate();
  }
};

struct StepLoss {
  int epoch = 0;
  int step = 0;  // global step counter
  double edge = 0.0;
  double attr = 0.0;
  double total = 0.0;
};

struct PretrainResult {
  ParamStore params;
  std::vector<StepLoss> trace;
};

// Pre-training loop: sample -> mask -> encode -> L^E + lambda * L^A ->
// backward -> AdamW. Per-step seeds are derived from the master seed and a
// running counter, so a fixed master seed fixes the whole trace.
inline PretrainResult pretrain(
    const TemporalGraph& g, const std::vector<int>& pretrain_block, const PretrainConfig& cfg,
    std::uint64_t master_seed,
    const std::function<void(int, const ParamStore&)>& epoch_callback = {}) {
  cfg.validate();
  if (pretrain_block.empty()) throw std::runtime_error("pretrain block is empty");
  if (g.attrs().cols < 1) throw std::runtime_error("graph has no node attributes");

  PretrainResult result;
  result.params = init_params(g.attrs().cols, cfg.encoder, derive_seed(master_seed, 100));
  const BlockView view(g, pretrain_block);

  int counter = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (int s = 0; s < cfg.subgraphs_per_epoch; ++s, ++counter) {
      SamplerConfig sampler_cfg = cfg.sampler;
      sampler_cfg.seed = derive_seed(master_seed, 1, static_cast<std::uint64_t>(counter));
      MaskConfig mask_cfg = cfg.mask;
      mask_cfg.seed = derive_seed(master_seed, 2, static_cast<std::uint64_t>(counter));

      const SampledSubgraph sg = detail::frontier_sample(g, view, sampler_cfg);
      if (sg.node_count() == 0) continue;  // nothing to train on
      const MaskPlan plan = make_mask_plan(sg, mask_cfg);
      const EdgeLossBatch batch = build_edge_batch(
          sg, plan, cfg.k_neg, derive_seed(master_seed, 3, static_cast<std::uint64_t>(counter)));

      Tape tape;
      BoundParams bound(tape, result.params);
      const EncodeResult enc = encode_on_tape(tape, bound, sg, plan, cfg.encoder);
      const Tape::NodeId loss_e = edge_loss_on_tape(tape, enc.r_e, batch);
      Tape::NodeId loss_a;
      if (enc.r_a >= 0) {
        loss_a = attr_loss_on_tape(tape, bound, sg, plan, enc.r_a);
      } else {
        Matrix zero(1, 1);
        loss_a = tape.input(std::move(zero));
      }
      const Tape::NodeId total = tape.scalar_axpy(loss_e, loss_a, cfg.loss_weight_attr);

      StepLoss sl;
      sl.epoch = epoch;
      sl.step = counter;
      sl.edge = tape.scalar(loss_e);
      sl.attr = tape.scalar(loss_a);
      sl.total = tape.scalar(total);
      if (!std::isfinite(sl.total))
        throw std::runtime_error("non-finite pre-training loss at step " +
                                 std::to_string(counter));
      result.trace.push_back(sl);

      tape.backward(total);
      bound.collect_grads();
      adamw_step(result.params, cfg.opt);
    }
    if (epoch_callback) epoch_callback(epoch, result.params);
  }
  return result;
}

}  // namespace ptdgnn
