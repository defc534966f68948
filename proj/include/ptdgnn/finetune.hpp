#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdgnn/encoder.hpp"
#include "ptdgnn/evaluate.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/sampler.hpp"
#include "ptdgnn/tape.hpp"
#include "ptdgnn/temporal_graph.hpp"

namespace ptdgnn {

struct FinetuneConfig {
  int epochs = 20;
  int walk_len = 10;
  int walks_per_node = 5;
  int window = 2;
  int q_negatives = 2;       // Q in the skip-gram loss
  double neg_power = 0.75;   // P_n proportional to degree^neg_power
  AdamwConfig opt;

  void validate() const {
    if (epochs < 0) throw std::runtime_error("finetune epochs must be nonnegative");
    if (walk_len < 2) throw std::runtime_error("walk_len must be at least 2");
    if (walks_per_node < 1) throw std::runtime_error("walks_per_node must be at least 1");
    if (window < 1) throw std::runtime_error("window must be at least 1");
    if (q_negatives < 1) throw std::runtime_error("q_negatives must be at least 1");
  }
};

struct WalkCorpus {
  std::vector<std::vector<int>> walks;              // node-id sequences
  std::vector<std::vector<std::int64_t>> times;     // raw edge timestamps, len-1 each
};

// Temporal random walks: start from a uniform block edge and keep moving
// along incident edges whose timestamp is >= the current one, so timestamps
// never decrease along a walk.
inline WalkCorpus temporal_walks(const TemporalGraph& g, const std::vector<int>& train_block,
                                 const FinetuneConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const BlockView view(g, train_block);
  if (view.block_edges().empty()) throw std::runtime_error("temporal_walks: empty train block");

  const std::size_t n_walks =
      static_cast<std::size_t>(cfg.walks_per_node) * view.active_nodes().size();
  Rng rng(seed);
  WalkCorpus corpus;
  corpus.walks.reserve(n_walks);
  corpus.times.reserve(n_walks);

  std::vector<int> candidates;
  for (std::size_t w = 0; w < n_walks; ++w) {
    const LocalEdge& start = view.block_edges()[rng.below(view.block_edges().size())];
    std::vector<int> walk{start.src, start.dst};
    std::vector<std::int64_t> times{g.edges()[start.global_edge].t_raw};
    double now = start.t_norm;  // block-local; ordering matches raw timestamps

    while (static_cast<int>(walk.size()) < cfg.walk_len) {
      const int u = walk.back();
      candidates.clear();
      const auto& inc = view.incident(u);
      for (std::size_t i = 0; i < inc.size(); ++i)
        if (inc[i].t_norm >= now) candidates.push_back(static_cast<int>(i));
      if (candidates.empty()) break;
      const AdjEntry& step = inc[candidates[rng.below(candidates.size())]];
      walk.push_back(step.neighbor);
      times.push_back(g.edges()[step.edge].t_raw);
      now = step.t_norm;
    }
    corpus.walks.push_back(std::move(walk));
    corpus.times.push_back(std::move(times));
  }
  return corpus;
}

// Ordered co-occurrence pairs within the window; both endpoints act as the
// anchor once.
inline std::vector<std::pair<int, int>> co_occurrence_pairs(const WalkCorpus& corpus, int window) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& walk : corpus.walks) {
    for (std::size_t a = 0; a < walk.size(); ++a) {
      const std::size_t hi = std::min(walk.size(), a + static_cast<std::size_t>(window) + 1);
      for (std::size_t b = a + 1; b < hi; ++b) {
        if (walk[a] == walk[b]) continue;
        pairs.emplace_back(walk[a], walk[b]);
        pairs.emplace_back(walk[b], walk[a]);
      }
    }
  }
  return pairs;
}

// Degree^power negative distribution over the nodes active in a block.
class NegativeTable {
 public:
  NegativeTable(const TemporalGraph& g, const std::vector<int>& block, double power) {
    const BlockView view(g, block);
    nodes_ = view.active_nodes();
    if (nodes_.empty()) throw std::runtime_error("negative table: empty block");
    cumulative_.resize(nodes_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      acc += std::pow(static_cast<double>(view.block_degree(nodes_[i])), power);
      cumulative_[i] = acc;
    }
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), nodes_.size() - 1);
    return nodes_[idx];
  }

 private:
  std::vector<int> nodes_;
  std::vector<double> cumulative_;
};

struct SkipgramPair {
  int anchor = 0;
  int context = 0;
  std::vector<int> negatives;  // Q draws from P_n
};

// Skip-gram objective with negative sampling: -log sigmoid(r_i . r_j) for the
// positive and -log sigmoid(-r_i . r_jn) for each sampled negative.
inline Tape::NodeId finetune_loss_on_tape(Tape& tape, Tape::NodeId emb,
                                          std::vector<SkipgramPair> pairs) {
  const Matrix& r = tape.value(emb);
  const int h = r.cols;
  auto dot = [h](const Matrix& m, int a, int b) {
    double s = 0.0;
    for (int c = 0; c < h; ++c) s += m.at(a, c) * m.at(b, c);
    return s;
  };

  double loss = 0.0;
  for (const SkipgramPair& p : pairs) {
    loss += neg_log_sigmoid(dot(r, p.anchor, p.context));
    for (int n : p.negatives) loss += neg_log_sigmoid(-dot(r, p.anchor, n));
  }
  if (!std::isfinite(loss)) throw std::runtime_error("non-finite fine-tuning loss");

  Matrix out(1, 1);
  out.data[0] = loss;
  const bool ng = tape.needs_grad(emb);
  return tape.custom(std::move(out), ng,
                     [&tape, emb, pairs = std::move(pairs), h](const Matrix& g) {
                       if (!tape.needs_grad(emb)) return;
                       const double gs = g.data[0];
                       const Matrix& r = tape.value(emb);
                       Matrix ge(r.rows, r.cols);
                       auto dot = [h](const Matrix& m, int a, int b) {
                         double s = 0.0;
                         for (int c = 0; c < h; ++c) s += m.at(a, c) * m.at(b, c);
                         return s;
                       };
                       for (const SkipgramPair& p : pairs) {
                         const double sp = dot(r, p.anchor, p.context);
                         const double cp = (sigmoid(sp) - 1.0) * gs;
                         for (int c = 0; c < h; ++c) {
                           ge.at(p.anchor, c) += cp * r.at(p.context, c);
                           ge.at(p.context, c) += cp * r.at(p.anchor, c);
                         }
                         for (int n : p.negatives) {
                           const double sn = dot(r, p.anchor, n);
                           const double cn = sigmoid(sn) * gs;
                           for (int c = 0; c < h; ++c) {
                             ge.at(p.anchor, c) += cn * r.at(n, c);
                             ge.at(n, c) += cn * r.at(p.anchor, c);
                           }
                         }
                       }
                       tape.accumulate(emb, ge);
                     });
}

inline double finetune_loss(const Matrix& emb, const std::vector<SkipgramPair>& pairs) {
  Tape tape;
  return tape.scalar(finetune_loss_on_tape(tape, tape.input(emb), pairs));
}

struct EpochEval {
  int epoch = 0;
  double auc = 0.0;
  double ap = 0.0;
  double f1 = 0.0;
};

struct FinetuneResult {
  ParamStore params;  // parameters of the best validation epoch
  std::vector<EpochEval> trace;
  int best_epoch = 0;
};

namespace detail {

inline ParamStore copy_values(const ParamStore& src) {
  ParamStore out;
  for (const auto& [name, t] : src.tensors()) out.add(name, t.value);
  return out;
}

}  // namespace detail

// Link-prediction fine-tuning. Starts from a pre-trained checkpoint when one
// is given (fresh initialization otherwise, the no-pre-training baseline),
// trains the encoder on the train block, and keeps the parameters of the
// epoch with the best validation AUC (earliest epoch wins ties).
inline FinetuneResult finetune(const TemporalGraph& g, const SplitBlocks& blocks,
                               const std::optional<Checkpoint>& pretrained,
                               const FinetuneConfig& cfg, const EncoderConfig& enc_cfg,
                               std::uint64_t master_seed) {
  cfg.validate();
  enc_cfg.validate();
  if (g.attrs().cols < 1) throw std::runtime_error("graph has no node attributes");

  FinetuneResult result;
  if (pretrained) {
    if (pretrained->encoder.layers != enc_cfg.layers ||
        pretrained->encoder.hidden != enc_cfg.hidden ||
        pretrained->encoder.base != enc_cfg.base)
      throw std::runtime_error("checkpoint encoder config does not match");
    if (pretrained->attr_dim != g.attrs().cols)
      throw std::runtime_error("checkpoint attr_dim does not match graph attributes");
    result.params = detail::copy_values(pretrained->params);
  } else {
    result.params = init_params(g.attrs().cols, enc_cfg, derive_seed(master_seed, 200));
  }
  if (cfg.epochs == 0) return result;

  const std::vector<std::pair<int, int>> train_pairs = block_pairs(g, blocks.train());
  if (train_pairs.empty()) throw std::runtime_error("finetune: empty train block");
  const NegativeTable neg_table(g, blocks.train(), cfg.neg_power);
  const std::vector<std::string> enc_names = encoder_param_names(enc_cfg);

  ParamStore best;
  double best_auc = -1.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const WalkCorpus corpus =
        temporal_walks(g, blocks.train(), cfg, derive_seed(master_seed, 10, epoch));
    std::vector<std::pair<int, int>> co = co_occurrence_pairs(corpus, cfg.window);

    Rng neg_rng(derive_seed(master_seed, 11, epoch));
    std::vector<SkipgramPair> pairs;
    pairs.reserve(co.size());
    for (const auto& [i, j] : co) {
      SkipgramPair p;
      p.anchor = i;
      p.context = j;
      p.negatives.reserve(cfg.q_negatives);
      for (int q = 0; q < cfg.q_negatives; ++q) p.negatives.push_back(neg_table.draw(neg_rng));
      pairs.push_back(std::move(p));
    }

    Tape tape;
    BoundParams bound(tape, result.params);
    const Tape::NodeId emb = encode_graph_on_tape(tape, bound, g.attrs(), train_pairs, enc_cfg);
    const Tape::NodeId loss = finetune_loss_on_tape(tape, emb, std::move(pairs));
    tape.backward(loss);
    bound.collect_grads();
    adamw_step(result.params, cfg.opt, enc_names);

    const EvalReport val = evaluate_block(g, blocks, result.params, enc_cfg, /*target=*/2,
                                          derive_seed(master_seed, 12));
    result.trace.push_back({epoch, val.auc, val.ap, val.f1});
    if (val.auc > best_auc) {
      best_auc = val.auc;
      best = detail::copy_values(result.params);
      result.best_epoch = epoch;
    }
  }

  result.params = std::move(best);
  return result;
}

}  // namespace ptdgnn
