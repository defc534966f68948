#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptdgnn/matrix.hpp"
#include "ptdgnn/rng.hpp"

namespace ptdgnn {

struct TimedEdge {
  int src = 0;
  int dst = 0;
  std::int64_t t_raw = 0;
  double t_norm = 0.0;
};

struct AdjEntry {
  int neighbor = 0;
  double t_norm = 0.0;
  int edge = 0;  // index into the edge list
};

// Immutable timestamped graph. Edges keep file order; adjacency is the union
// neighborhood (out and in) so directed datasets still propagate
// symmetrically. t_norm maps the raw time span onto [0, 1].
class TemporalGraph {
 public:
  TemporalGraph() = default;

  TemporalGraph(int node_count, std::vector<TimedEdge> edges, bool directed,
                Matrix attrs = Matrix())
      : node_count_(node_count),
        edges_(std::move(edges)),
        directed_(directed),
        attrs_(std::move(attrs)) {
    if (attrs_.rows == 0 && attrs_.cols == 0) attrs_ = Matrix(node_count_, 0);
    validate();
    normalize_times();
    build_adjacency();
  }

  int node_count() const { return node_count_; }
  const std::vector<TimedEdge>& edges() const { return edges_; }
  bool directed() const { return directed_; }
  const Matrix& attrs() const { return attrs_; }
  const std::vector<AdjEntry>& neighbors(int v) const { return adjacency_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

  std::int64_t t_min() const { return t_min_; }
  std::int64_t t_max() const { return t_max_; }

  TemporalGraph with_attrs(Matrix attrs) const {
    if (attrs.rows != node_count_)
      throw std::runtime_error("with_attrs: expected " + std::to_string(node_count_) +
                               " rows, got " + std::to_string(attrs.rows));
    return TemporalGraph(node_count_, edges_, directed_, std::move(attrs));
  }

  // Same node set and ids, edge list restricted to the given indices (kept in
  // the given order). Used for block ablation experiments.
  TemporalGraph edge_subset(const std::vector<int>& edge_indices) const {
    std::vector<TimedEdge> kept;
    kept.reserve(edge_indices.size());
    for (int e : edge_indices) kept.push_back(edges_.at(e));
    return TemporalGraph(node_count_, std::move(kept), directed_, attrs_);
  }

  bool operator==(const TemporalGraph& o) const {
    if (node_count_ != o.node_count_ || directed_ != o.directed_ ||
        edges_.size() != o.edges_.size() || !(attrs_ == o.attrs_))
      return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const TimedEdge& a = edges_[i];
      const TimedEdge& b = o.edges_[i];
      if (a.src != b.src || a.dst != b.dst || a.t_raw != b.t_raw || a.t_norm != b.t_norm)
        return false;
    }
    return true;
  }

 private:
  void validate() const {
    if (node_count_ < 0) throw std::runtime_error("node_count must be nonnegative");
    for (const TimedEdge& e : edges_) {
      if (e.src < 0 || e.src >= node_count_ || e.dst < 0 || e.dst >= node_count_)
        throw std::runtime_error("edge endpoint out of range");
    }
    if (attrs_.rows != node_count_)
      throw std::runtime_error("attribute row count does not match node count");
  }

  void normalize_times() {
    if (edges_.empty()) {
      t_min_ = t_max_ = 0;
      return;
    }
    t_min_ = edges_[0].t_raw;
    t_max_ = edges_[0].t_raw;
    for (const TimedEdge& e : edges_) {
      t_min_ = std::min(t_min_, e.t_raw);
      t_max_ = std::max(t_max_, e.t_raw);
    }
    const double span = static_cast<double>(t_max_ - t_min_);
    for (TimedEdge& e : edges_)
      e.t_norm = span > 0.0 ? static_cast<double>(e.t_raw - t_min_) / span : 0.0;
  }

  void build_adjacency() {
    adjacency_.assign(node_count_, {});
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      const TimedEdge& e = edges_[i];
      adjacency_[e.src].push_back({e.dst, e.t_norm, i});
      adjacency_[e.dst].push_back({e.src, e.t_norm, i});
    }
    for (auto& list : adjacency_)
      std::sort(list.begin(), list.end(), [](const AdjEntry& a, const AdjEntry& b) {
        if (a.neighbor != b.neighbor) return a.neighbor < b.neighbor;
        return a.edge < b.edge;
      });
  }

  int node_count_ = 0;
  std::vector<TimedEdge> edges_;
  bool directed_ = true;
  Matrix attrs_;
  std::vector<std::vector<AdjEntry>> adjacency_;
  std::int64_t t_min_ = 0;
  std::int64_t t_max_ = 0;
};

// SNAP edge-list text: "SRC DST UNIXTIME", '#' comments, extra fields ignored.
// Node ids are compacted to [0, n) in first-appearance order over kept edges;
// self-loops are dropped; repeated (src, dst, t) interactions are kept.
inline TemporalGraph load_snap_edgelist(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  struct RawEdge {
    std::int64_t src, dst, t;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::int64_t f[3];
    for (int k = 0; k < 3; ++k) {
      std::string tok;
      if (!(ls >> tok))
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": expected 3 fields");
      try {
        std::size_t used = 0;
        f[k] = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": non-integer field '" + tok + "'");
      }
    }
    if (f[0] == f[1]) continue;  // self-loop
    raw.push_back({f[0], f[1], f[2]});
  }
  if (raw.empty()) throw std::runtime_error("edge list is empty: " + path);

  std::unordered_map<std::int64_t, int> id_map;
  id_map.reserve(raw.size() * 2);
  std::vector<TimedEdge> edges;
  edges.reserve(raw.size());
  auto intern = [&id_map](std::int64_t v) {
    return id_map.try_emplace(v, static_cast<int>(id_map.size())).first->second;
  };
  for (const RawEdge& r : raw) {
    TimedEdge e;
    e.src = intern(r.src);
    e.dst = intern(r.dst);
    e.t_raw = r.t;
    edges.push_back(e);
  }
  return TemporalGraph(static_cast<int>(id_map.size()), std::move(edges), directed);
}

// Canonical export: edges sorted by (t_raw, src, dst), one "SRC DST T" per line.
inline std::string to_canonical_edgelist(const TemporalGraph& g) {
  std::vector<TimedEdge> sorted = g.edges();
  std::stable_sort(sorted.begin(), sorted.end(), [](const TimedEdge& a, const TimedEdge& b) {
    if (a.t_raw != b.t_raw) return a.t_raw < b.t_raw;
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });
  std::string out;
  for (const TimedEdge& e : sorted) {
    out += std::to_string(e.src);
    out += ' ';
    out += std::to_string(e.dst);
    out += ' ';
    out += std::to_string(e.t_raw);
    out += '\n';
  }
  return out;
}

inline void write_canonical_edgelist(const TemporalGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  out << to_canonical_edgelist(g);
}

struct SplitSpec {
  // pretrain, train, validation, test
  std::array<double, 4> ratios{0.7, 0.1, 0.1, 0.1};

  void validate() const {
    double sum = 0.0;
    for (double r : ratios) {
      if (r < 0.0) throw std::runtime_error("split ratio must be nonnegative");
      sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::runtime_error("split ratios must sum to 1");
  }
};

struct SplitBlocks {
  // edge indices into TemporalGraph::edges(), chronological within each block
  std::array<std::vector<int>, 4> blocks;

  const std::vector<int>& pretrain() const { return blocks[0]; }
  const std::vector<int>& train() const { return blocks[1]; }
  const std::vector<int>& validation() const { return blocks[2]; }
  const std::vector<int>& test() const { return blocks[3]; }
};

// Sort edges by (t_raw, file order) and slice into contiguous blocks of sizes
// round(ratio_k * |E|); the last block absorbs the rounding remainder.
inline SplitBlocks chronological_split(const TemporalGraph& g, const SplitSpec& spec) {
  spec.validate();
  const auto& edges = g.edges();
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&edges](int a, int b) {
    return edges[a].t_raw < edges[b].t_raw;
  });

  const std::size_t m = edges.size();
  std::array<std::size_t, 4> sizes{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    sizes[k] = static_cast<std::size_t>(std::llround(spec.ratios[k] * static_cast<double>(m)));
    sizes[k] = std::min(sizes[k], m - assigned);
    assigned += sizes[k];
  }
  sizes[3] = m - assigned;

  for (int k = 0; k < 4; ++k)
    if (spec.ratios[k] > 0.0 && sizes[k] == 0)
      throw std::runtime_error("invalid split: block " + std::to_string(k) +
                               " is empty at ratio " + std::to_string(spec.ratios[k]));

  SplitBlocks out;
  std::size_t pos = 0;
  for (int k = 0; k < 4; ++k) {
    out.blocks[k].assign(order.begin() + pos, order.begin() + pos + sizes[k]);
    pos += sizes[k];
  }
  return out;
}

enum class FeatureKind { SeededGaussian, DegreeBuckets, File };

struct FeatureInit {
  FeatureKind kind = FeatureKind::SeededGaussian;
  int attr_dim = 128;
  std::uint64_t seed = 7;
  std::string path;  // File kind only

  void validate() const {
    if (attr_dim < 1) throw std::runtime_error("attr_dim must be at least 1");
    if (kind == FeatureKind::File && path.empty())
      throw std::runtime_error("file feature init requires a path");
  }
};

inline Matrix init_features(const TemporalGraph& g, const FeatureInit& init) {
  init.validate();
  const int n = g.node_count();
  switch (init.kind) {
    case FeatureKind::SeededGaussian: {
      Matrix m(n, init.attr_dim);
      Rng rng(init.seed);
      const double scale = 1.0 / std::sqrt(static_cast<double>(init.attr_dim));
      for (double& v : m.data) v = rng.normal() * scale;
      return m;
    }
    case FeatureKind::DegreeBuckets: {
      Matrix m(n, init.attr_dim);
      for (int v = 0; v < n; ++v) {
        const int deg = g.degree(v);
        int bucket = deg <= 0 ? 0 : static_cast<int>(std::floor(std::log2(static_cast<double>(deg))));
        bucket = std::min(bucket, init.attr_dim - 1);
        m.at(v, bucket) = 1.0;
      }
      return m;
    }
    case FeatureKind::File: {
      std::ifstream in(init.path);
      if (!in) throw std::runtime_error("cannot open feature file: " + init.path);
      Matrix m(n, init.attr_dim);
      std::string line;
      int row = 0;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (row >= n)
          throw std::runtime_error("feature file has more rows than nodes (" +
                                   std::to_string(n) + " expected)");
        std::istringstream ls(line);
        for (int c = 0; c < init.attr_dim; ++c) {
          if (!(ls >> m.at(row, c)))
            throw std::runtime_error("feature file row " + std::to_string(row + 1) +
                                     ": expected " + std::to_string(init.attr_dim) + " values");
        }
        ++row;
      }
      if (row != n)
        throw std::runtime_error("feature file has " + std::to_string(row) +
                                 " rows, expected " + std::to_string(n));
      return m;
    }
  }
  throw std::runtime_error("unreachable feature kind");
}

// Time-ordered preferential attachment: the node arriving at step k connects
// to m existing nodes drawn with probability proportional to degree + 1, and
// all of its edges carry timestamp k (stretched by horizon when given). Late
// edges therefore depend on the degrees earlier edges created.
inline TemporalGraph generate_synthetic(int n, int m_per_node, std::int64_t horizon,
                                        std::uint64_t seed) {
  if (n < 10) throw std::runtime_error("generate_synthetic: n must be at least 10");
  if (m_per_node < 1) throw std::runtime_error("generate_synthetic: m_per_node must be at least 1");

  Rng rng(seed);
  const std::int64_t step = std::max<std::int64_t>(1, n > 1 ? horizon / (n - 1) : 1);

  // Urn of node ids: one ticket per incident edge endpoint plus one base
  // ticket per node, giving degree + 1 attachment weights.
  std::vector<int> urn;
  urn.reserve(static_cast<std::size_t>(n) * (2 * m_per_node + 1));
  urn.push_back(0);

  std::vector<TimedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * m_per_node);
  for (int k = 1; k < n; ++k) {
    const int want = std::min(m_per_node, k);
    std::vector<int> targets;
    targets.reserve(want);
    while (static_cast<int>(targets.size()) < want) {
      const int cand = urn[rng.below(urn.size())];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end())
        targets.push_back(cand);
    }
    for (int tgt : targets) {
      TimedEdge e;
      e.src = k;
      e.dst = tgt;
      e.t_raw = static_cast<std::int64_t>(k) * step;
      edges.push_back(e);
      urn.push_back(k);
      urn.push_back(tgt);
    }
    urn.push_back(k);
  }
  return TemporalGraph(n, std::move(edges), /*directed=*/false);
}

}  // namespace ptdgnn
