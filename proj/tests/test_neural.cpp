#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "harness.hpp"
#include "oracles.hpp"
#include "ptdgnn/encoder.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/tape.hpp"

using namespace ptdgnn;

namespace {

SampledSubgraph tiny_subgraph(int n, int attr_dim, const std::vector<LocalEdge>& edges,
                              const std::vector<double>& attrs) {
  SampledSubgraph sg;
  sg.global_ids.resize(n);
  std::iota(sg.global_ids.begin(), sg.global_ids.end(), 0);
  sg.local_edges = edges;
  sg.local_attrs = Matrix(n, attr_dim, attrs);
  return sg;
}

MaskPlan plan_all_observed(const SampledSubgraph& sg, std::vector<int> attr_masked = {}) {
  MaskPlan plan;
  plan.observed_edges.resize(sg.local_edges.size());
  std::iota(plan.observed_edges.begin(), plan.observed_edges.end(), 0);
  plan.attr_masked_nodes = std::move(attr_masked);
  return plan;
}

void set_identity(Matrix& w) {
  w.fill(0.0);
  for (int i = 0; i < std::min(w.rows, w.cols); ++i) w.at(i, i) = 1.0;
}

}  // namespace

TEST(Tape, QuadraticGradient) {
  Tape tape;
  Matrix p(2, 3);
  for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = 0.5 * (i + 1);
  const auto node = tape.param(p);
  const auto loss = tape.sum_squares(node);
  tape.backward(loss);
  const Matrix& g = tape.grad(node);
  for (std::size_t i = 0; i < p.data.size(); ++i) EXPECT_DOUBLE_EQ(g.data[i], 2.0 * p.data[i]);
}

TEST(Tape, MatmulChainMatchesFiniteDifferences) {
  Rng rng(3);
  Matrix a(3, 4), b(4, 2);
  for (double& v : a.data) v = rng.normal();
  for (double& v : b.data) v = rng.normal();

  ParamStore params;
  params.add("a", a);
  params.add("b", b);
  auto loss = [&params]() {
    Tape tape;
    const auto na = tape.param(params.value("a"));
    const auto nb = tape.param(params.value("b"));
    return tape.scalar(tape.sum_squares(tape.relu(tape.matmul(na, nb))));
  };
  std::map<std::string, Matrix> analytic;
  {
    Tape tape;
    const auto na = tape.param(params.value("a"));
    const auto nb = tape.param(params.value("b"));
    tape.backward(tape.sum_squares(tape.relu(tape.matmul(na, nb))));
    analytic.emplace("a", tape.grad(na));
    analytic.emplace("b", tape.grad(nb));
  }
  const auto res = oracles::check_gradients(params, loss, analytic);
  EXPECT_LT(res.max_rel_err, 1e-6) << res.worst_param;
}

TEST(Adamw, ZeroGradZeroDecayIsNoOp) {
  ParamStore params;
  Matrix p(1, 3);
  p.fill(1.5);
  params.add("w", p);
  AdamwConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(params, cfg);
  for (double v : params.value("w").data) EXPECT_DOUBLE_EQ(v, 1.5);
}

TEST(Adamw, HandEvaluatedFirstStep) {
  // p=1, g=1, lr=1e-3, betas (0.9, 0.999), eps 1e-8, wd 0: bias-corrected
  // first step moves by almost exactly lr.
  ParamStore params;
  Matrix p(1, 1);
  p.data[0] = 1.0;
  params.add("w", p);
  params.grad("w").data[0] = 1.0;
  AdamwConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(params, cfg);
  EXPECT_NEAR(params.value("w").data[0], 0.999, 1e-9);
}

TEST(Adamw, DecoupledDecayOnly) {
  ParamStore params;
  Matrix p(1, 1);
  p.data[0] = 1.0;
  params.add("w", p);
  AdamwConfig cfg;
  cfg.lr = 1e-3;
  cfg.weight_decay = 0.01;
  adamw_step(params, cfg);
  EXPECT_NEAR(params.value("w").data[0], 0.99999, 1e-12);
}

TEST(Adamw, NonFiniteGradientAborts) {
  ParamStore params;
  Matrix p(1, 1);
  params.add("w", p);
  params.grad("w").data[0] = std::nan("");
  try {
    adamw_step(params, AdamwConfig{});
    FAIL() << "expected abort";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("'w'"), std::string::npos);
  }
}

TEST(Adamw, GradientsZeroedAfterStep) {
  ParamStore params;
  Matrix p(1, 2);
  params.add("w", p);
  params.grad("w").fill(3.0);
  adamw_step(params, AdamwConfig{});
  for (double v : params.grad("w").data) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Encode, SingleNodeIdentityLayers) {
  // One node, identity weights, zero bias: A_hat = I. The hidden layer
  // applies ReLU, the output layer is linear, so a two-layer stack maps X to
  // relu(X).
  const SampledSubgraph sg = tiny_subgraph(1, 2, {}, {0.7, -0.3});
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 2;
  ParamStore params = init_params(2, cfg, 1);
  set_identity(params.value("enc1.W"));
  set_identity(params.value("enc2.W"));
  params.value("enc1.b").fill(0.0);
  params.value("enc2.b").fill(0.0);

  const DualEmbedding dual = encode(sg, plan_all_observed(sg), params, cfg);
  EXPECT_DOUBLE_EQ(dual.r_e.at(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(dual.r_e.at(0, 1), 0.0);

  // single linear layer passes X through untouched
  EncoderConfig one;
  one.layers = 1;
  one.hidden = 2;
  ParamStore p1 = init_params(2, one, 1);
  set_identity(p1.value("enc1.W"));
  p1.value("enc1.b").fill(0.0);
  const DualEmbedding lin = encode(sg, plan_all_observed(sg), p1, one);
  EXPECT_DOUBLE_EQ(lin.r_e.at(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(lin.r_e.at(0, 1), -0.3);
}

TEST(Encode, NoObservedEdgesReducesToRowwiseTransform) {
  // All edges masked: every node sees only its self-loop, so rows transform
  // independently and identically per attributes.
  SampledSubgraph sg = tiny_subgraph(3, 2, {{0, 1, 0.5, 0}, {1, 2, 0.7, 1}},
                                     {1.0, 2.0, 1.0, 2.0, -1.0, 0.5});
  MaskPlan plan;
  plan.masked_edges = {0, 1};
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 3;
  ParamStore params = init_params(2, cfg, 5);

  const DualEmbedding dual = encode(sg, plan, params, cfg);
  // nodes 0 and 1 share attributes -> identical rows
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(dual.r_e.at(0, c), dual.r_e.at(1, c));
}

TEST(Encode, IsomorphicNodesGetIdenticalRows) {
  // Leaves 1 and 2 hang off node 0 with the same attributes.
  const SampledSubgraph sg = tiny_subgraph(
      3, 2, {{0, 1, 0.2, 0}, {0, 2, 0.8, 1}}, {1.0, -1.0, 0.5, 0.25, 0.5, 0.25});
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 4;
  ParamStore params = init_params(2, cfg, 7);
  const DualEmbedding dual = encode(sg, plan_all_observed(sg), params, cfg);
  for (int c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(dual.r_e.at(1, c), dual.r_e.at(2, c));
}

TEST(Encode, AttrStreamIsolatedFromMessagePassing) {
  // Zeroing or randomizing X' must not change any r^E value.
  const harness::SmallInstance inst = harness::make_small_instance(10, 4, 11);
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.hidden = 6;
  ParamStore params = init_params(4, cfg, 3);

  const DualEmbedding before = encode(inst.sg, inst.plan, params, cfg);
  params.value("x_prime").fill(123.0);
  const DualEmbedding after = encode(inst.sg, inst.plan, params, cfg);
  EXPECT_TRUE(before.r_e == after.r_e);
  EXPECT_FALSE(before.r_a == after.r_a);
}

TEST(Encode, MaskedEdgeBlindness) {
  // r^E must be identical whether masked edges exist in the subgraph or are
  // deleted outright.
  const harness::SmallInstance inst = harness::make_small_instance(10, 4, 13);
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 5;
  ParamStore params = init_params(4, cfg, 9);

  const DualEmbedding with_masked = encode(inst.sg, inst.plan, params, cfg);

  SampledSubgraph pruned = inst.sg;
  pruned.local_edges.clear();
  for (int e : inst.plan.observed_edges) pruned.local_edges.push_back(inst.sg.local_edges[e]);
  MaskPlan pruned_plan = plan_all_observed(pruned, inst.plan.attr_masked_nodes);
  const DualEmbedding without_masked = encode(pruned, pruned_plan, params, cfg);

  EXPECT_TRUE(with_masked.r_e == without_masked.r_e);
}

TEST(Encode, PermutationEquivariance) {
  const harness::SmallInstance inst = harness::make_small_instance(8, 3, 17);
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 4;
  ParamStore params = init_params(3, cfg, 21);
  const DualEmbedding base = encode(inst.sg, inst.plan, params, cfg);

  // relabel i -> (i + 3) % n
  const int n = inst.sg.node_count();
  auto perm = [n](int v) { return (v + 3) % n; };
  SampledSubgraph rel = inst.sg;
  for (LocalEdge& e : rel.local_edges) {
    e.src = perm(e.src);
    e.dst = perm(e.dst);
  }
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < rel.local_attrs.cols; ++c)
      rel.local_attrs.at(perm(i), c) = inst.sg.local_attrs.at(i, c);
  MaskPlan rel_plan = inst.plan;
  for (int& v : rel_plan.attr_masked_nodes) v = perm(v);
  std::sort(rel_plan.attr_masked_nodes.begin(), rel_plan.attr_masked_nodes.end());

  const DualEmbedding moved = encode(rel, rel_plan, params, cfg);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < base.r_e.cols; ++c)
      EXPECT_NEAR(moved.r_e.at(perm(i), c), base.r_e.at(i, c), 1e-12);
}

TEST(Encode, DeterministicBitIdentical) {
  const harness::SmallInstance inst = harness::make_small_instance(9, 3, 19);
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.hidden = 5;
  ParamStore params = init_params(3, cfg, 2);
  const DualEmbedding a = encode(inst.sg, inst.plan, params, cfg);
  const DualEmbedding b = encode(inst.sg, inst.plan, params, cfg);
  EXPECT_TRUE(a.r_e == b.r_e);
  EXPECT_TRUE(a.r_a == b.r_a);
}

TEST(Encode, NonFiniteActivationNamesLayer) {
  const harness::SmallInstance inst = harness::make_small_instance(6, 2, 23);
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 3;
  ParamStore params = init_params(2, cfg, 4);
  params.value("enc2.W").data[0] = std::numeric_limits<double>::infinity();
  try {
    encode(inst.sg, inst.plan, params, cfg);
    FAIL() << "expected numeric error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos);
  }
}

TEST(DecodeAttrs, ZeroWeightsYieldBias) {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.hidden = 3;
  ParamStore params = init_params(2, cfg, 6);
  params.value("dec1.W").fill(0.0);
  params.value("dec2.W").fill(0.0);
  params.value("dec2.b").at(0, 0) = 0.25;
  params.value("dec2.b").at(0, 1) = -0.5;

  Matrix r(2, 3);
  r.fill(1.0);
  const Matrix out = decode_attrs(r, params);
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(out.at(i, 0), 0.25);
    EXPECT_DOUBLE_EQ(out.at(i, 1), -0.5);
  }
}

TEST(DecodeAttrs, FiniteInputsFiniteOutputs) {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.hidden = 4;
  ParamStore params = init_params(3, cfg, 8);
  Matrix r(5, 4);
  Rng rng(1);
  for (double& v : r.data) v = rng.normal() * 10.0;
  EXPECT_TRUE(decode_attrs(r, params).all_finite());
}

TEST(Gradients, FullLossMatchesFiniteDifferences) {
  // 12-node subgraph, full L^E + lambda L^A through encoder and decoder.
  const harness::SmallInstance inst = harness::make_small_instance(12, 4, 29);
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.hidden = 6;
  ParamStore params = init_params(4, cfg, 31);

  const auto analytic =
      harness::pretrain_analytic_grads(params, inst.sg, inst.plan, inst.batch, cfg, 1.0);
  const auto res = oracles::check_gradients(
      params,
      [&]() {
        return harness::pretrain_total_loss(params, inst.sg, inst.plan, inst.batch, cfg, 1.0);
      },
      analytic);
  EXPECT_LT(res.max_rel_err, 1e-4) << "worst: " << res.worst_param;
}

TEST(Gradients, SgcBaseMatchesFiniteDifferences) {
  const harness::SmallInstance inst = harness::make_small_instance(10, 3, 37);
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.hidden = 5;
  cfg.base = EncoderBase::Sgc;
  ParamStore params = init_params(3, cfg, 41);

  const auto analytic =
      harness::pretrain_analytic_grads(params, inst.sg, inst.plan, inst.batch, cfg, 0.7);
  const auto res = oracles::check_gradients(
      params,
      [&]() {
        return harness::pretrain_total_loss(params, inst.sg, inst.plan, inst.batch, cfg, 0.7);
      },
      analytic);
  EXPECT_LT(res.max_rel_err, 1e-4) << "worst: " << res.worst_param;
}

TEST(Gradients, ZeroLossZeroGradients) {
  // No masked edges and no attr-masked nodes: the loss is exactly zero and
  // every gradient must be exactly zero.
  const SampledSubgraph sg = tiny_subgraph(3, 2, {{0, 1, 0.5, 0}, {1, 2, 0.9, 1}},
                                           {1.0, 0.0, 0.5, 0.5, 0.0, 1.0});
  const MaskPlan plan = plan_all_observed(sg);
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 3;
  ParamStore params = init_params(2, cfg, 43);

  EXPECT_DOUBLE_EQ(harness::pretrain_total_loss(params, sg, plan, {}, cfg, 1.0), 0.0);
  const auto grads = harness::pretrain_analytic_grads(params, sg, plan, {}, cfg, 1.0);
  for (const auto& [name, g] : grads)
    for (double v : g.data) EXPECT_DOUBLE_EQ(v, 0.0) << name;
}

TEST(Checkpoint, RoundTripPreservesValues) {
  EncoderConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 4;
  ParamStore params = init_params(3, cfg, 47);
  const auto path = (std::filesystem::temp_directory_path() / "ptdgnn_ckpt.json").string();
  save_checkpoint(params, cfg, 3, path);

  const Checkpoint ck = load_checkpoint(path);
  EXPECT_EQ(ck.encoder.layers, 2);
  EXPECT_EQ(ck.encoder.hidden, 4);
  EXPECT_EQ(ck.attr_dim, 3);
  for (const auto& [name, t] : params.tensors())
    EXPECT_TRUE(ck.params.value(name) == t.value) << name;
}

TEST(Checkpoint, WrongShapeRejected) {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.hidden = 2;
  ParamStore params = init_params(2, cfg, 53);
  nlohmann::json j = checkpoint_to_json(params, cfg, 2);
  j["tensors"]["enc1.W"]["shape"] = {5, 5};
  EXPECT_THROW(checkpoint_from_json(j), std::runtime_error);
}

TEST(Checkpoint, MissingTensorRejected) {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.hidden = 2;
  ParamStore params = init_params(2, cfg, 59);
  nlohmann::json j = checkpoint_to_json(params, cfg, 2);
  j["tensors"].erase("x_prime");
  EXPECT_THROW(checkpoint_from_json(j), std::exception);
}

TEST(InitParams, ShapesFollowConfig) {
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.hidden = 7;
  ParamStore params = init_params(5, cfg, 61);
  EXPECT_EQ(params.value("enc1.W").rows, 5);
  EXPECT_EQ(params.value("enc1.W").cols, 7);
  EXPECT_EQ(params.value("enc3.W").rows, 7);
  EXPECT_EQ(params.value("x_prime").cols, 5);
  EXPECT_EQ(params.value("dec2.W").cols, 5);

  // SGC keeps a single transform regardless of propagation depth
  cfg.base = EncoderBase::Sgc;
  ParamStore sgc = init_params(5, cfg, 61);
  EXPECT_TRUE(sgc.has("enc1.W"));
  EXPECT_FALSE(sgc.has("enc2.W"));
}
