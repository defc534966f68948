#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "harness.hpp"
#include "oracles.hpp"
#include "ptdgnn/finetune.hpp"
#include "ptdgnn/temporal_graph.hpp"

using namespace ptdgnn;

namespace {

TemporalGraph path_graph_abc() {
  // a=0 - b=1 (t=1), b=1 - c=2 (t=2)
  std::vector<TimedEdge> edges{{0, 1, 1, 0.0}, {1, 2, 2, 0.0}};
  return TemporalGraph(3, edges, false);
}

std::vector<int> all_edges(const TemporalGraph& g) {
  std::vector<int> idx(g.edges().size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

TemporalGraph featured_graph(int n, std::uint64_t seed) {
  TemporalGraph g = generate_synthetic(n, 2, 0, seed);
  FeatureInit fi;
  fi.kind = FeatureKind::DegreeBuckets;
  fi.attr_dim = 8;
  return g.with_attrs(init_features(g, fi));
}

}  // namespace

TEST(TemporalWalks, MonotonicityOnPathGraph) {
  const TemporalGraph g = path_graph_abc();
  FinetuneConfig cfg;
  cfg.walk_len = 4;
  cfg.walks_per_node = 30;
  const WalkCorpus corpus = temporal_walks(g, all_edges(g), cfg, 3);

  bool saw_continuation = false;
  for (const auto& walk : corpus.walks) {
    ASSERT_GE(walk.size(), 2u);
    if (walk[0] == 0 && walk.size() > 2) saw_continuation = true;  // a-b then c
    if (walk[0] == 1 && walk[1] == 2) {
      // started on the newer edge: node a is unreachable
      for (int v : walk) EXPECT_NE(v, 0);
    }
  }
  EXPECT_TRUE(saw_continuation);
}

TEST(TemporalWalks, EqualTimestampsWalkFreely) {
  std::vector<TimedEdge> edges{{0, 1, 5, 0.0}, {1, 2, 5, 0.0}, {2, 3, 5, 0.0}, {3, 0, 5, 0.0}};
  const TemporalGraph g(4, edges, false);
  FinetuneConfig cfg;
  cfg.walk_len = 6;
  cfg.walks_per_node = 10;
  const WalkCorpus corpus = temporal_walks(g, all_edges(g), cfg, 5);
  for (const auto& walk : corpus.walks) EXPECT_EQ(walk.size(), 6u);
}

TEST(TemporalWalks, AllWalksTimestampMonotone) {
  const TemporalGraph g = featured_graph(400, 9);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  FinetuneConfig cfg;
  cfg.walk_len = 10;
  cfg.walks_per_node = 5;
  const WalkCorpus corpus = temporal_walks(g, blocks.train(), cfg, 7);
  ASSERT_FALSE(corpus.walks.empty());
  for (const auto& times : corpus.times) {
    for (std::size_t i = 1; i < times.size(); ++i) EXPECT_LE(times[i - 1], times[i]);
  }
}

TEST(TemporalWalks, EmptyBlockRejected) {
  const TemporalGraph g = path_graph_abc();
  FinetuneConfig cfg;
  EXPECT_THROW(temporal_walks(g, {}, cfg, 1), std::runtime_error);
}

TEST(CoOccurrencePairs, WindowSemantics) {
  WalkCorpus corpus;
  corpus.walks = {{0, 1, 2, 3}};
  const auto pairs = co_occurrence_pairs(corpus, 2);
  // unordered pairs within distance 2: (0,1),(0,2),(1,2),(1,3),(2,3) -> 10 ordered
  EXPECT_EQ(pairs.size(), 10u);
  std::set<std::pair<int, int>> set(pairs.begin(), pairs.end());
  EXPECT_TRUE(set.count({0, 1}));
  EXPECT_TRUE(set.count({1, 0}));
  EXPECT_TRUE(set.count({1, 3}));
  EXPECT_FALSE(set.count({0, 3}));  // distance 3 > window
}

TEST(CoOccurrencePairs, RepeatedNodeSkipsSelfPairs) {
  WalkCorpus corpus;
  corpus.walks = {{0, 1, 0}};
  const auto pairs = co_occurrence_pairs(corpus, 2);
  for (const auto& [i, j] : pairs) EXPECT_NE(i, j);
}

TEST(FinetuneLoss, ZeroDotsGiveTwoLogTwoPerPair) {
  Matrix emb(4, 2);  // all zeros -> every dot = 0
  std::vector<SkipgramPair> pairs{{0, 1, {2}}, {1, 3, {0}}};
  EXPECT_NEAR(finetune_loss(emb, pairs), 4.0 * std::log(2.0), 1e-12);
}

TEST(FinetuneLoss, SaturatedPairDrivesLossToZero) {
  Matrix emb(3, 1);
  emb.at(0, 0) = 10.0;
  emb.at(1, 0) = 10.0;   // positive dot = 100
  emb.at(2, 0) = -10.0;  // negative dot = -100
  std::vector<SkipgramPair> pairs{{0, 1, {2}}};
  EXPECT_NEAR(finetune_loss(emb, pairs), 0.0, 1e-12);
}

TEST(FinetuneLoss, LiteralOracleOnThreePairs) {
  Rng rng(11);
  Matrix emb(6, 3);
  for (double& v : emb.data) v = rng.normal();
  std::vector<SkipgramPair> pairs{{0, 1, {2, 3}}, {2, 4, {5, 0}}, {3, 5, {1, 4}}};
  EXPECT_NEAR(finetune_loss(emb, pairs), oracles::finetune_loss_literal(emb, pairs), 1e-12);
}

TEST(FinetuneLoss, GradientMatchesFiniteDifferences) {
  const TemporalGraph g = featured_graph(30, 13);
  const std::vector<std::pair<int, int>> pairs = block_pairs(g, all_edges(g));
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 5;
  ParamStore params = init_params(8, cfg, 15);

  std::vector<SkipgramPair> sg_pairs{{0, 1, {2, 9}}, {3, 4, {5, 8}}, {6, 2, {7, 0}}};
  const auto analytic = harness::finetune_analytic_grads(params, g.attrs(), pairs, sg_pairs, cfg);
  const auto res = oracles::check_gradients(
      params,
      [&]() { return harness::finetune_total_loss(params, g.attrs(), pairs, sg_pairs, cfg); },
      analytic);
  EXPECT_LT(res.max_rel_err, 1e-4) << res.worst_param;
}

TEST(NegativeTable, DegreeBiasedDraws) {
  // star: center 0 has block degree 4, leaves degree 1; weights deg^0.75
  std::vector<TimedEdge> edges{{0, 1, 1, 0}, {0, 2, 2, 0}, {0, 3, 3, 0}, {0, 4, 4, 0}};
  const TemporalGraph g(5, edges, false);
  const NegativeTable table(g, all_edges(g), 0.75);
  Rng rng(17);
  int center = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t)
    if (table.draw(rng) == 0) ++center;
  const double w_center = std::pow(4.0, 0.75);
  const double expected = w_center / (w_center + 4.0);
  EXPECT_NEAR(static_cast<double>(center) / trials, expected, 0.02);
}

TEST(Finetune, ZeroEpochsReturnsCheckpointUnchanged) {
  const TemporalGraph g = featured_graph(60, 19);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 6;

  Checkpoint ck;
  ck.params = init_params(8, enc, 21);
  ck.encoder = enc;
  ck.attr_dim = 8;

  FinetuneConfig cfg;
  cfg.epochs = 0;
  const FinetuneResult res = finetune(g, blocks, ck, cfg, enc, 23);
  EXPECT_TRUE(res.trace.empty());
  for (const auto& [name, t] : ck.params.tensors())
    EXPECT_TRUE(res.params.value(name) == t.value) << name;
}

TEST(Finetune, CheckpointConfigMismatchRejected) {
  const TemporalGraph g = featured_graph(60, 25);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 6;

  Checkpoint ck;
  EncoderConfig other = enc;
  other.hidden = 12;
  ck.params = init_params(8, other, 27);
  ck.encoder = other;
  ck.attr_dim = 8;

  EXPECT_THROW(finetune(g, blocks, ck, FinetuneConfig{}, enc, 29), std::runtime_error);
}

TEST(Finetune, ReturnsParamsOfBestValidationEpoch) {
  const TemporalGraph g = featured_graph(150, 31);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 8;
  FinetuneConfig cfg;
  cfg.epochs = 4;

  const std::uint64_t master = 33;
  const FinetuneResult res = finetune(g, blocks, std::nullopt, cfg, enc, master);
  ASSERT_EQ(res.trace.size(), 4u);

  double best = -1.0;
  int best_epoch = 0;
  for (const EpochEval& e : res.trace)
    if (e.auc > best) {
      best = e.auc;
      best_epoch = e.epoch;
    }
  EXPECT_EQ(res.best_epoch, best_epoch);

  // Re-evaluating the returned parameters on the same validation pairs must
  // reproduce the best epoch's AUC exactly.
  ParamStore params = res.params;
  const EvalReport again =
      evaluate_block(g, blocks, params, enc, 2, derive_seed(master, 12));
  EXPECT_DOUBLE_EQ(again.auc, best);
}

TEST(Finetune, FreshAndPretrainedPathsBothRun) {
  const TemporalGraph g = featured_graph(120, 35);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 8;
  FinetuneConfig cfg;
  cfg.epochs = 2;

  const FinetuneResult fresh = finetune(g, blocks, std::nullopt, cfg, enc, 37);
  EXPECT_EQ(fresh.trace.size(), 2u);

  Checkpoint ck;
  ck.params = init_params(8, enc, 39);
  ck.encoder = enc;
  ck.attr_dim = 8;
  const FinetuneResult warm = finetune(g, blocks, ck, cfg, enc, 37);
  EXPECT_EQ(warm.trace.size(), 2u);
}

TEST(Finetune, TrainingInputsUntouchedByLaterBlocks) {
  // Walks, co-occurrence pairs, and the loss value depend only on the train
  // block: deleting validation/test edges changes nothing.
  const TemporalGraph g = featured_graph(200, 47);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  FinetuneConfig cfg;

  std::vector<int> kept = blocks.pretrain();
  kept.insert(kept.end(), blocks.train().begin(), blocks.train().end());
  const TemporalGraph ablated = g.edge_subset(kept);
  std::vector<int> train_in_ablated(blocks.train().size());
  std::iota(train_in_ablated.begin(), train_in_ablated.end(),
            static_cast<int>(blocks.pretrain().size()));

  const WalkCorpus full = temporal_walks(g, blocks.train(), cfg, 51);
  const WalkCorpus cut = temporal_walks(ablated, train_in_ablated, cfg, 51);
  ASSERT_EQ(full.walks.size(), cut.walks.size());
  for (std::size_t i = 0; i < full.walks.size(); ++i) EXPECT_EQ(full.walks[i], cut.walks[i]);

  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 6;
  ParamStore params = init_params(8, enc, 53);
  const auto pairs_full = block_pairs(g, blocks.train());
  const auto pairs_cut = block_pairs(ablated, train_in_ablated);
  std::vector<SkipgramPair> sg_pairs{{0, 1, {4, 5}}, {2, 3, {6, 7}}};
  const double lf = harness::finetune_total_loss(params, g.attrs(), pairs_full, sg_pairs, enc);
  const double lc = harness::finetune_total_loss(params, ablated.attrs(), pairs_cut, sg_pairs, enc);
  EXPECT_EQ(lf, lc);
}

TEST(Finetune, OnlyEncoderParamsChange) {
  const TemporalGraph g = featured_graph(100, 41);
  const SplitBlocks blocks = chronological_split(g, SplitSpec{});
  EncoderConfig enc;
  enc.layers = 2;
  enc.hidden = 6;
  FinetuneConfig cfg;
  cfg.epochs = 2;

  Checkpoint ck;
  ck.params = init_params(8, enc, 43);
  ck.encoder = enc;
  ck.attr_dim = 8;
  const FinetuneResult res = finetune(g, blocks, ck, cfg, enc, 45);

  // decoder and x_prime play no role in the link objective
  EXPECT_TRUE(res.params.value("x_prime") == ck.params.value("x_prime"));
  EXPECT_TRUE(res.params.value("dec1.W") == ck.params.value("dec1.W"));
  EXPECT_FALSE(res.params.value("enc1.W") == ck.params.value("enc1.W"));
}
