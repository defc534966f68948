#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdgnn/evaluate.hpp"
#include "ptdgnn/finetune.hpp"
#include "ptdgnn/masker.hpp"
#include "ptdgnn/metrics.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/pretrain.hpp"
#include "ptdgnn/sampler.hpp"
#include "ptdgnn/temporal_graph.hpp"

namespace ptdgnn {

// Shortest round-trip decimal form; keeps CSV artifacts byte-stable.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::runtime_error("config section '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::runtime_error("unknown config key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace detail

struct SyntheticSpec {
  int n = 1000;
  int m_per_node = 2;
  std::int64_t horizon = 0;
  std::uint64_t seed = 1;
};

struct DatasetConfig {
  std::string path;  // SNAP edge list; empty when synthetic
  bool directed = true;
  std::optional<SyntheticSpec> synthetic;
};

// One JSON document drives a whole experiment. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  DatasetConfig dataset;
  FeatureInit features;
  SplitSpec split;
  EncoderConfig encoder;
  SamplerConfig sampler;
  MaskConfig mask;
  PretrainConfig pretrain;
  FinetuneConfig finetune;
  std::string from_checkpoint;  // optional pre-trained checkpoint path
  int repetitions = 1;
  double pretrain_fraction = 1.0;
  nlohmann::json sweep_values;  // optional array for the sweep command
  nlohmann::json raw;           // normalized document, hashed into artifacts

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
};

inline FeatureKind feature_kind_from_name(const std::string& s) {
  if (s == "seeded-gaussian") return FeatureKind::SeededGaussian;
  if (s == "degree-buckets") return FeatureKind::DegreeBuckets;
  if (s == "file") return FeatureKind::File;
  throw std::runtime_error("unknown feature kind: " + s);
}

inline SamplerKind sampler_kind_from_name(const std::string& s) {
  if (s == "dyss") return SamplerKind::Dyss;
  if (s == "layerwise-degree") return SamplerKind::LayerwiseDegree;
  if (s == "uniform") return SamplerKind::Uniform;
  throw std::runtime_error("unknown sampler kind: " + s);
}

inline std::string sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::Dyss: return "dyss";
    case SamplerKind::LayerwiseDegree: return "layerwise-degree";
    case SamplerKind::Uniform: return "uniform";
  }
  return "?";
}

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
  using detail::get_or;
  using detail::reject_unknown_keys;

  reject_unknown_keys(j, "config",
                      {"seed", "out_dir", "dataset", "features", "split", "encoder", "sampler",
                       "mask", "pretrain", "finetune", "eval", "pretrain_fraction",
                       "sweep_values"});

  RunConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 42);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "out");

  if (!j.contains("dataset")) throw std::runtime_error("config requires a 'dataset' section");
  const auto& d = j.at("dataset");
  reject_unknown_keys(d, "dataset", {"path", "directed", "synthetic"});
  if (d.contains("synthetic") == d.contains("path"))
    throw std::runtime_error("dataset needs exactly one of 'path' or 'synthetic'");
  cfg.dataset.directed = get_or<bool>(d, "directed", true);
  if (d.contains("path")) {
    cfg.dataset.path = d.at("path").get<std::string>();
  } else {
    const auto& s = d.at("synthetic");
    reject_unknown_keys(s, "dataset.synthetic", {"n", "m_per_node", "horizon", "seed"});
    SyntheticSpec spec;
    spec.n = get_or<int>(s, "n", 1000);
    spec.m_per_node = get_or<int>(s, "m_per_node", 2);
    spec.horizon = get_or<std::int64_t>(s, "horizon", 0);
    spec.seed = get_or<std::uint64_t>(s, "seed", 1);
    cfg.dataset.synthetic = spec;
    cfg.dataset.directed = false;
  }

  if (j.contains("features")) {
    const auto& f = j.at("features");
    reject_unknown_keys(f, "features", {"kind", "attr_dim", "seed", "path"});
    cfg.features.kind = feature_kind_from_name(get_or<std::string>(f, "kind", "seeded-gaussian"));
    cfg.features.attr_dim = get_or<int>(f, "attr_dim", 128);
    cfg.features.seed = get_or<std::uint64_t>(f, "seed", 7);
    cfg.features.path = get_or<std::string>(f, "path", "");
  }

  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown_keys(s, "split", {"ratios"});
    if (s.contains("ratios")) {
      const auto r = s.at("ratios").get<std::vector<double>>();
      if (r.size() != 4) throw std::runtime_error("split.ratios must have 4 entries");
      for (int k = 0; k < 4; ++k) cfg.split.ratios[k] = r[k];
    }
  }

  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    reject_unknown_keys(e, "encoder", {"layers", "hidden", "base", "activation"});
    cfg.encoder.layers = get_or<int>(e, "layers", 3);
    cfg.encoder.hidden = get_or<int>(e, "hidden", 400);
    cfg.encoder.base = encoder_base_from_name(get_or<std::string>(e, "base", "gcn"));
    const std::string act = get_or<std::string>(e, "activation", "relu");
    if (act != "relu") throw std::runtime_error("unsupported encoder activation: " + act);
  }

  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    reject_unknown_keys(s, "sampler", {"kind", "depth", "width"});
    cfg.sampler.kind = sampler_kind_from_name(get_or<std::string>(s, "kind", "dyss"));
    cfg.sampler.depth = get_or<int>(s, "depth", 6);
    cfg.sampler.width = get_or<int>(s, "width", 128);
  }

  if (j.contains("mask")) {
    const auto& m = j.at("mask");
    reject_unknown_keys(m, "mask",
                        {"edge_mask_ratio", "prob_kind", "scheme", "attr_mask_fraction"});
    cfg.mask.edge_mask_ratio = get_or<double>(m, "edge_mask_ratio", 0.5);
    const std::string pk = get_or<std::string>(m, "prob_kind", "softmax");
    if (pk == "softmax")
      cfg.mask.prob_kind = MaskProbKind::Softmax;
    else if (pk == "linear")
      cfg.mask.prob_kind = MaskProbKind::Linear;
    else
      throw std::runtime_error("unknown mask prob_kind: " + pk);
    const std::string sc = get_or<std::string>(m, "scheme", "time-based");
    if (sc == "time-based")
      cfg.mask.scheme = MaskScheme::TimeBased;
    else if (sc == "random")
      cfg.mask.scheme = MaskScheme::Random;
    else
      throw std::runtime_error("unknown mask scheme: " + sc);
    cfg.mask.attr_mask_fraction = get_or<double>(m, "attr_mask_fraction", 1.0);
  }

  auto read_opt = [](const nlohmann::json& o, const std::string& where) {
    detail::reject_unknown_keys(o, where, {"lr", "beta1", "beta2", "eps", "weight_decay"});
    AdamwConfig a;
    a.lr = detail::get_or<double>(o, "lr", 1e-3);
    a.beta1 = detail::get_or<double>(o, "beta1", 0.9);
    a.beta2 = detail::get_or<double>(o, "beta2", 0.999);
    a.eps = detail::get_or<double>(o, "eps", 1e-8);
    a.weight_decay = detail::get_or<double>(o, "weight_decay", 0.01);
    return a;
  };

  if (j.contains("pretrain")) {
    const auto& p = j.at("pretrain");
    reject_unknown_keys(p, "pretrain",
                        {"epochs", "subgraphs_per_epoch", "k_neg", "loss_weight_attr",
                         "optimizer"});
    cfg.pretrain.epochs = get_or<int>(p, "epochs", 20);
    cfg.pretrain.subgraphs_per_epoch = get_or<int>(p, "subgraphs_per_epoch", 8);
    cfg.pretrain.k_neg = get_or<int>(p, "k_neg", 1);
    cfg.pretrain.loss_weight_attr = get_or<double>(p, "loss_weight_attr", 1.0);
    if (p.contains("optimizer")) cfg.pretrain.opt = read_opt(p.at("optimizer"), "pretrain.optimizer");
  }

  if (j.contains("finetune")) {
    const auto& f = j.at("finetune");
    reject_unknown_keys(f, "finetune",
                        {"epochs", "walk_len", "walks_per_node", "window", "q_negatives",
                         "neg_power", "optimizer", "from_checkpoint"});
    cfg.from_checkpoint = get_or<std::string>(f, "from_checkpoint", "");
    cfg.finetune.epochs = get_or<int>(f, "epochs", 20);
    cfg.finetune.walk_len = get_or<int>(f, "walk_len", 10);
    cfg.finetune.walks_per_node = get_or<int>(f, "walks_per_node", 5);
    cfg.finetune.window = get_or<int>(f, "window", 2);
    cfg.finetune.q_negatives = get_or<int>(f, "q_negatives", 2);
    cfg.finetune.neg_power = get_or<double>(f, "neg_power", 0.75);
    if (f.contains("optimizer")) cfg.finetune.opt = read_opt(f.at("optimizer"), "finetune.optimizer");
  }

  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    reject_unknown_keys(e, "eval", {"repetitions"});
    cfg.repetitions = get_or<int>(e, "repetitions", 1);
    if (cfg.repetitions < 1) throw std::runtime_error("eval.repetitions must be at least 1");
  }

  cfg.pretrain_fraction = get_or<double>(j, "pretrain_fraction", 1.0);
  if (!(cfg.pretrain_fraction > 0.0 && cfg.pretrain_fraction <= 1.0))
    throw std::runtime_error("pretrain_fraction must be in (0, 1]");
  if (j.contains("sweep_values")) cfg.sweep_values = j.at("sweep_values");

  cfg.pretrain.sampler = cfg.sampler;
  cfg.pretrain.mask = cfg.mask;
  cfg.pretrain.encoder = cfg.encoder;
  cfg.raw = j;
  return cfg;
}

inline RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config is not valid JSON: " + std::string(e.what()));
  }
  return from_json(j);
}

// FNV-1a over the normalized (sorted-key) document.
inline std::string config_hash(const RunConfig& cfg) {
  const std::string dump = cfg.raw.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct Workspace {
  TemporalGraph graph;
  SplitBlocks blocks;
  std::vector<int> pretrain_block;  // possibly truncated by pretrain_fraction
};

inline Workspace prepare_workspace(const RunConfig& cfg) {
  TemporalGraph g =
      cfg.dataset.synthetic
          ? generate_synthetic(cfg.dataset.synthetic->n, cfg.dataset.synthetic->m_per_node,
                               cfg.dataset.synthetic->horizon, cfg.dataset.synthetic->seed)
          : load_snap_edgelist(cfg.dataset.path, cfg.dataset.directed);
  g = g.with_attrs(init_features(g, cfg.features));

  Workspace ws{std::move(g), {}, {}};
  ws.blocks = chronological_split(ws.graph, cfg.split);
  ws.pretrain_block = ws.blocks.pretrain();
  if (cfg.pretrain_fraction < 1.0) {
    // keep the chronologically latest fraction, adjacent to the train block
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(cfg.pretrain_fraction * static_cast<double>(ws.pretrain_block.size()))));
    ws.pretrain_block.assign(ws.pretrain_block.end() - static_cast<std::ptrdiff_t>(keep),
                             ws.pretrain_block.end());
  }
  return ws;
}

struct PretrainArtifacts {
  std::string checkpoint_path;
  std::string loss_csv_path;
};

inline PretrainArtifacts cmd_pretrain(const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Workspace ws = prepare_workspace(cfg);
  const std::string hash = config_hash(cfg);

  PretrainArtifacts art;
  art.checkpoint_path = out_dir + "/checkpoint.json";
  art.loss_csv_path = out_dir + "/pretrain_loss.csv";

  const int attr_dim = ws.graph.attrs().cols;
  const PretrainResult result =
      pretrain(ws.graph, ws.pretrain_block, cfg.pretrain, cfg.seed,
               [&](int, const ParamStore& p) {
                 save_checkpoint(p, cfg.encoder, attr_dim, art.checkpoint_path);
               });

  std::ofstream csv(art.loss_csv_path);
  if (!csv) throw std::runtime_error("cannot write " + art.loss_csv_path);
  csv << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
  csv << "step,epoch,loss_edge,loss_attr,loss_total\n";
  for (const StepLoss& s : result.trace)
    csv << s.step << "," << s.epoch << "," << fmt_double(s.edge) << "," << fmt_double(s.attr)
        << "," << fmt_double(s.total) << "\n";
  return art;
}

struct EvalArtifacts {
  std::string eval_csv_path;
  std::string eval_json_path;
  std::string valtrace_csv_path;
  std::string checkpoint_path;  // fine-tuned parameters of the first repetition
  std::vector<EvalReport> reports;
};

inline EvalArtifacts cmd_finetune_eval(const RunConfig& cfg,
                                       const std::optional<std::string>& checkpoint_path,
                                       const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Workspace ws = prepare_workspace(cfg);
  const std::string hash = config_hash(cfg);

  std::optional<Checkpoint> ck;
  if (checkpoint_path)
    ck = load_checkpoint(*checkpoint_path);
  else if (!cfg.from_checkpoint.empty())
    ck = load_checkpoint(cfg.from_checkpoint);

  EvalArtifacts art;
  art.eval_csv_path = out_dir + "/eval.csv";
  art.eval_json_path = out_dir + "/eval.json";
  art.valtrace_csv_path = out_dir + "/validation_trace.csv";
  art.checkpoint_path = out_dir + "/finetuned_checkpoint.json";

  std::ofstream vcsv(art.valtrace_csv_path);
  if (!vcsv) throw std::runtime_error("cannot write " + art.valtrace_csv_path);
  vcsv << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
  vcsv << "rep,epoch,auc,ap,f1\n";

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, 1000, static_cast<std::uint64_t>(rep));
    FinetuneResult ft = finetune(ws.graph, ws.blocks, ck, cfg.finetune, cfg.encoder, rep_seed);
    for (const EpochEval& e : ft.trace)
      vcsv << rep << "," << e.epoch << "," << fmt_double(e.auc) << "," << fmt_double(e.ap) << ","
           << fmt_double(e.f1) << "\n";

    EvalReport report = evaluate_block(ws.graph, ws.blocks, ft.params, cfg.encoder,
                                       /*target=*/3, derive_seed(rep_seed, 13));
    report.config_hash = hash;
    art.reports.push_back(report);

    if (rep == 0)
      save_checkpoint(ft.params, cfg.encoder, ws.graph.attrs().cols, art.checkpoint_path);
  }

  std::vector<double> aucs, aps, f1s;
  for (const EvalReport& r : art.reports) {
    aucs.push_back(r.auc);
    aps.push_back(r.ap);
    f1s.push_back(r.f1);
  }
  const MeanStd auc_ms = mean_stddev(aucs), ap_ms = mean_stddev(aps), f1_ms = mean_stddev(f1s);

  std::ofstream csv(art.eval_csv_path);
  if (!csv) throw std::runtime_error("cannot write " + art.eval_csv_path);
  csv << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
  csv << "rep,auc,ap,f1,n_pos,n_neg,cold_pairs,seed,config_hash\n";
  for (int rep = 0; rep < static_cast<int>(art.reports.size()); ++rep) {
    const EvalReport& r = art.reports[rep];
    csv << rep << "," << fmt_double(r.auc) << "," << fmt_double(r.ap) << "," << fmt_double(r.f1)
        << "," << r.n_pos << "," << r.n_neg << "," << r.cold_pairs << "," << r.seed << "," << hash
        << "\n";
  }
  csv << "mean," << fmt_double(auc_ms.mean) << "," << fmt_double(ap_ms.mean) << ","
      << fmt_double(f1_ms.mean) << ",,,,," << hash << "\n";
  csv << "stddev," << fmt_double(auc_ms.stddev) << "," << fmt_double(ap_ms.stddev) << ","
      << fmt_double(f1_ms.stddev) << ",,,,," << hash << "\n";

  nlohmann::json jr;
  jr["config_hash"] = hash;
  jr["seed"] = cfg.seed;
  jr["repetitions"] = cfg.repetitions;
  jr["auc"] = {{"mean", auc_ms.mean}, {"stddev", auc_ms.stddev}};
  jr["ap"] = {{"mean", ap_ms.mean}, {"stddev", ap_ms.stddev}};
  jr["f1"] = {{"mean", f1_ms.mean}, {"stddev", f1_ms.stddev}};
  jr["reports"] = nlohmann::json::array();
  for (const EvalReport& r : art.reports) jr["reports"].push_back(r.to_json());
  std::ofstream js(art.eval_json_path);
  if (!js) throw std::runtime_error("cannot write " + art.eval_json_path);
  js << jr.dump(2) << "\n";
  return art;
}

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {"sample_depth",      "sample_width",
                                                "pretrain_fraction", "mask_ratio",
                                                "sampler_kind",      "base_model"};
  return axes;
}

inline nlohmann::json default_sweep_values(const std::string& axis) {
  if (axis == "sample_depth") return nlohmann::json::array({2, 4, 6});
  if (axis == "sample_width") return nlohmann::json::array({32, 64, 128});
  if (axis == "pretrain_fraction") return nlohmann::json::array({0.25, 0.5, 0.75, 1.0});
  if (axis == "mask_ratio") return nlohmann::json::array({0.1, 0.3, 0.5, 0.7});
  if (axis == "sampler_kind") return nlohmann::json::array({"dyss", "layerwise-degree"});
  if (axis == "base_model") return nlohmann::json::array({"gcn", "sgc"});
  throw std::runtime_error("unknown sweep axis: " + axis);
}

inline nlohmann::json apply_sweep_value(const nlohmann::json& base, const std::string& axis,
                                        const nlohmann::json& value) {
  nlohmann::json j = base;
  if (axis == "sample_depth")
    j["sampler"]["depth"] = value;
  else if (axis == "sample_width")
    j["sampler"]["width"] = value;
  else if (axis == "pretrain_fraction")
    j["pretrain_fraction"] = value;
  else if (axis == "mask_ratio")
    j["mask"]["edge_mask_ratio"] = value;
  else if (axis == "sampler_kind")
    j["sampler"]["kind"] = value;
  else if (axis == "base_model")
    j["encoder"]["base"] = value;
  else
    throw std::runtime_error("unknown sweep axis: " + axis);
  return j;
}

inline std::string sweep_cell_name(const nlohmann::json& value) {
  std::string s = value.is_string() ? value.get<std::string>() : value.dump();
  for (char& c : s)
    if (c == '.') c = '_';
  return s;
}

struct SweepArtifacts {
  std::string sweep_csv_path;
};

// Grid-run the full pipeline varying one axis; everything else fixed.
inline SweepArtifacts cmd_sweep(const RunConfig& cfg, const std::string& axis,
                                const std::string& out_dir) {
  nlohmann::json values = cfg.sweep_values.is_array() && !cfg.sweep_values.empty()
                              ? cfg.sweep_values
                              : default_sweep_values(axis);
  std::filesystem::create_directories(out_dir);

  SweepArtifacts art;
  art.sweep_csv_path = out_dir + "/sweep.csv";
  std::ofstream csv(art.sweep_csv_path);
  if (!csv) throw std::runtime_error("cannot write " + art.sweep_csv_path);
  csv << "# config_hash=" << config_hash(cfg) << " seed=" << cfg.seed << " axis=" << axis << "\n";
  csv << "axis,value,auc_mean,auc_stddev,ap_mean,ap_stddev,f1_mean,f1_stddev,config_hash\n";

  for (const auto& value : values) {
    nlohmann::json cell_json = apply_sweep_value(cfg.raw, axis, value);
    const RunConfig cell = RunConfig::from_json(cell_json);
    const std::string cell_dir = out_dir + "/" + axis + "_" + sweep_cell_name(value);

    const PretrainArtifacts pt = cmd_pretrain(cell, cell_dir);
    const EvalArtifacts ev = cmd_finetune_eval(cell, pt.checkpoint_path, cell_dir);

    std::vector<double> aucs, aps, f1s;
    for (const EvalReport& r : ev.reports) {
      aucs.push_back(r.auc);
      aps.push_back(r.ap);
      f1s.push_back(r.f1);
    }
    const MeanStd a = mean_stddev(aucs), p = mean_stddev(aps), f = mean_stddev(f1s);
    csv << axis << "," << sweep_cell_name(value) << "," << fmt_double(a.mean) << ","
        << fmt_double(a.stddev) << "," << fmt_double(p.mean) << "," << fmt_double(p.stddev) << ","
        << fmt_double(f.mean) << "," << fmt_double(f.stddev) << "," << config_hash(cell) << "\n";
  }
  return art;
}

inline std::string cmd_gen_synthetic(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.dataset.synthetic)
    throw std::runtime_error("gen-synthetic requires a dataset.synthetic section");
  std::filesystem::create_directories(out_dir);
  const SyntheticSpec& s = *cfg.dataset.synthetic;
  const TemporalGraph g = generate_synthetic(s.n, s.m_per_node, s.horizon, s.seed);
  const std::string path = out_dir + "/synthetic.edges";
  write_canonical_edgelist(g, path);
  return path;
}

inline nlohmann::json cmd_inspect(const RunConfig& cfg) {
  const Workspace ws = prepare_workspace(cfg);
  const TemporalGraph& g = ws.graph;

  int max_degree = 0;
  double degree_sum = 0.0;
  for (int v = 0; v < g.node_count(); ++v) {
    max_degree = std::max(max_degree, g.degree(v));
    degree_sum += g.degree(v);
  }

  nlohmann::json j;
  j["nodes"] = g.node_count();
  j["edges"] = g.edges().size();
  j["directed"] = g.directed();
  j["attr_dim"] = g.attrs().cols;
  j["t_min"] = g.t_min();
  j["t_max"] = g.t_max();
  j["max_degree"] = max_degree;
  j["mean_degree"] = g.node_count() > 0 ? degree_sum / g.node_count() : 0.0;
  j["block_sizes"] = {ws.blocks.pretrain().size(), ws.blocks.train().size(),
                      ws.blocks.validation().size(), ws.blocks.test().size()};
  j["pretrain_block_used"] = ws.pretrain_block.size();
  j["config_hash"] = config_hash(cfg);
  return j;
}

}  // namespace ptdgnn
