#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdgnn/masker.hpp"
#include "ptdgnn/matrix.hpp"
#include "ptdgnn/params.hpp"
#include "ptdgnn/sampler.hpp"
#include "ptdgnn/tape.hpp"

namespace ptdgnn {

// Symmetric-normalized adjacency with self-loops over deduplicated undirected
// node pairs: A_hat = D^{-1/2} (A + I) D^{-1/2}.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency(int n, const std::vector<std::pair<int, int>>& pairs) : n_(n) {
    std::vector<std::set<int>> nbr(n);
    for (auto [u, v] : pairs) {
      if (u == v) continue;
      nbr[u].insert(v);
      nbr[v].insert(u);
    }
    std::vector<double> inv_sqrt(n);
    diag_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = static_cast<double>(nbr[i].size()) + 1.0;
      inv_sqrt[i] = 1.0 / std::sqrt(d);
      diag_[i] = 1.0 / d;
    }
    full_.rows = full_.cols = n;
    full_.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) full_.row_ptr[i + 1] = full_.row_ptr[i] + static_cast<int>(nbr[i].size()) + 1;
    full_.col_idx.resize(full_.row_ptr[n]);
    full_.vals.resize(full_.row_ptr[n]);
    for (int i = 0; i < n; ++i) {
      int p = full_.row_ptr[i];
      bool self_placed = false;
      for (int j : nbr[i]) {
        if (!self_placed && i < j) {
          full_.col_idx[p] = i;
          full_.vals[p] = diag_[i];
          ++p;
          self_placed = true;
        }
        full_.col_idx[p] = j;
        full_.vals[p] = inv_sqrt[i] * inv_sqrt[j];
        ++p;
      }
      if (!self_placed) {
        full_.col_idx[p] = i;
        full_.vals[p] = diag_[i];
        ++p;
      }
    }
  }

  int size() const { return n_; }
  const SparseMatrix& full() const { return full_; }
  const std::vector<double>& diag() const { return diag_; }

  // Off-diagonal entries of the selected rows, as a |rows| x n matrix.
  SparseMatrix off_diagonal_rows(const std::vector<int>& rows) const {
    SparseMatrix s;
    s.rows = static_cast<int>(rows.size());
    s.cols = n_;
    s.row_ptr.assign(rows.size() + 1, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int i = rows[r];
      int count = 0;
      for (int p = full_.row_ptr[i]; p < full_.row_ptr[i + 1]; ++p)
        if (full_.col_idx[p] != i) ++count;
      s.row_ptr[r + 1] = s.row_ptr[r] + count;
    }
    s.col_idx.resize(s.row_ptr[rows.size()]);
    s.vals.resize(s.row_ptr[rows.size()]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int i = rows[r];
      int q = s.row_ptr[r];
      for (int p = full_.row_ptr[i]; p < full_.row_ptr[i + 1]; ++p) {
        if (full_.col_idx[p] == i) continue;
        s.col_idx[q] = full_.col_idx[p];
        s.vals[q] = full_.vals[p];
        ++q;
      }
    }
    return s;
  }

  std::vector<double> diag_of(const std::vector<int>& rows) const {
    std::vector<double> d(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) d[r] = diag_[rows[r]];
    return d;
  }

 private:
  int n_ = 0;
  SparseMatrix full_;
  std::vector<double> diag_;
};

struct DualEmbedding {
  Matrix r_e;                        // n x h, message-passing states
  Matrix r_a;                        // n x h, attr-masked rows carry the X' stream
  std::vector<int> attr_masked;      // rows of r_a that differ from r_e
};

// Tape handles for one parameter subset; collects leaf gradients back into
// the store after backward.
class BoundParams {
 public:
  BoundParams(Tape& tape, ParamStore& store) : tape_(tape), store_(store) {
    for (const auto& [name, t] : store.tensors()) nodes_[name] = tape.param(t.value);
  }

  Tape::NodeId operator[](const std::string& name) const {
    auto it = nodes_.find(name);
    if (it == nodes_.end()) throw std::runtime_error("unbound parameter: " + name);
    return it->second;
  }

  // += tape leaf gradients into the store's gradient buffers
  void collect_grads() {
    for (const auto& [name, node] : nodes_) {
      const Matrix& g = tape_.grad(node);
      Matrix& dst = store_.grad(name);
      if (g.rows == 0) continue;
      for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
    }
  }

 private:
  Tape& tape_;
  ParamStore& store_;
  std::map<std::string, Tape::NodeId> nodes_;
};

namespace detail {

inline void check_finite(const Tape& tape, Tape::NodeId node, int layer) {
  if (!tape.value(node).all_finite())
    throw std::runtime_error("non-finite activation in encoder layer " + std::to_string(layer));
}

}  // namespace detail

struct EncodeResult {
  Tape::NodeId r_e = -1;
  Tape::NodeId r_a = -1;  // |attr_masked| x h; -1 when no nodes are attr-masked
  std::vector<int> attr_masked;
};

// Masked-graph forward pass. The r^E stream starts from the real attributes
// and propagates over observed edges only. The r^A stream starts from X' on
// the attr-masked nodes; at every hop those rows aggregate neighbor r^E
// states plus their own r^A self-loop, and never feed back into any
// neighbor sum.
inline EncodeResult encode_on_tape(Tape& tape, const BoundParams& bound,
                                   const SampledSubgraph& sg, const MaskPlan& plan,
                                   const EncoderConfig& cfg) {
  cfg.validate();
  const int n = sg.node_count();
  if (sg.local_attrs.rows != n) throw std::runtime_error("encode: attribute rows != nodes");

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(plan.observed_edges.size());
  for (int e : plan.observed_edges)
    pairs.emplace_back(sg.local_edges[e].src, sg.local_edges[e].dst);
  NormalizedAdjacency adj(n, pairs);

  EncodeResult out;
  out.attr_masked = plan.attr_masked_nodes;
  const bool with_attr_stream = !out.attr_masked.empty();
  SparseMatrix off;
  std::vector<double> self_scale;
  if (with_attr_stream) {
    off = adj.off_diagonal_rows(out.attr_masked);
    self_scale = adj.diag_of(out.attr_masked);
  }

  const Tape::NodeId x = tape.input(sg.local_attrs);

  if (cfg.base == EncoderBase::Gcn) {
    // ReLU between layers; the final layer is linear so the embedding dot
    // products used by the losses and the scorer can take either sign.
    Tape::NodeId h_e = x;
    Tape::NodeId h_a = -1;
    if (with_attr_stream)
      h_a = tape.broadcast_row(bound["x_prime"], static_cast<int>(out.attr_masked.size()));
    for (int l = 1; l <= cfg.layers; ++l) {
      const bool last = l == cfg.layers;
      const Tape::NodeId w = bound["enc" + std::to_string(l) + ".W"];
      const Tape::NodeId b = bound["enc" + std::to_string(l) + ".b"];
      Tape::NodeId next_e = tape.add_rowvec(tape.matmul(tape.spmm(adj.full(), h_e), w), b);
      if (!last) next_e = tape.relu(next_e);
      if (with_attr_stream) {
        const Tape::NodeId agg_a =
            tape.add(tape.spmm(off, h_e), tape.rowscale(self_scale, h_a));
        Tape::NodeId next_a = tape.add_rowvec(tape.matmul(agg_a, w), b);
        if (!last) next_a = tape.relu(next_a);
        h_a = next_a;
        detail::check_finite(tape, h_a, l);
      }
      h_e = next_e;
      detail::check_finite(tape, h_e, l);
    }
    out.r_e = h_e;
    out.r_a = h_a;
  } else {
    // SGC: L-fold propagation, then one linear transform.
    Tape::NodeId p = x;
    Tape::NodeId z = -1;
    if (with_attr_stream)
      z = tape.broadcast_row(bound["x_prime"], static_cast<int>(out.attr_masked.size()));
    for (int l = 1; l <= cfg.layers; ++l) {
      if (with_attr_stream)
        z = tape.add(tape.spmm(off, p), tape.rowscale(self_scale, z));
      p = tape.spmm(adj.full(), p);
      detail::check_finite(tape, p, l);
    }
    const Tape::NodeId w = bound["enc1.W"];
    const Tape::NodeId b = bound["enc1.b"];
    out.r_e = tape.add_rowvec(tape.matmul(p, w), b);
    if (with_attr_stream) out.r_a = tape.add_rowvec(tape.matmul(z, w), b);
    detail::check_finite(tape, out.r_e, cfg.layers);
  }
  return out;
}

// Plain forward pass over an explicit edge set (fine-tuning and scoring).
inline Tape::NodeId encode_graph_on_tape(Tape& tape, const BoundParams& bound,
                                         const Matrix& attrs,
                                         const std::vector<std::pair<int, int>>& pairs,
                                         const EncoderConfig& cfg) {
  cfg.validate();
  NormalizedAdjacency adj(attrs.rows, pairs);
  const Tape::NodeId x = tape.input(attrs);
  if (cfg.base == EncoderBase::Gcn) {
    Tape::NodeId h = x;
    for (int l = 1; l <= cfg.layers; ++l) {
      h = tape.add_rowvec(
          tape.matmul(tape.spmm(adj.full(), h), bound["enc" + std::to_string(l) + ".W"]),
          bound["enc" + std::to_string(l) + ".b"]);
      if (l < cfg.layers) h = tape.relu(h);
      detail::check_finite(tape, h, l);
    }
    return h;
  }
  Tape::NodeId p = x;
  for (int l = 1; l <= cfg.layers; ++l) p = tape.spmm(adj.full(), p);
  const Tape::NodeId h = tape.add_rowvec(tape.matmul(p, bound["enc1.W"]), bound["enc1.b"]);
  detail::check_finite(tape, h, cfg.layers);
  return h;
}

// MLP decoder: W2 * relu(W1 * r + b1) + b2.
inline Tape::NodeId decode_attrs_on_tape(Tape& tape, const BoundParams& bound, Tape::NodeId r_a) {
  const Tape::NodeId hidden =
      tape.relu(tape.add_rowvec(tape.matmul(r_a, bound["dec1.W"]), bound["dec1.b"]));
  return tape.add_rowvec(tape.matmul(hidden, bound["dec2.W"]), bound["dec2.b"]);
}

inline DualEmbedding encode(const SampledSubgraph& sg, const MaskPlan& plan, ParamStore& params,
                            const EncoderConfig& cfg) {
  Tape tape;
  BoundParams bound(tape, params);
  const EncodeResult r = encode_on_tape(tape, bound, sg, plan, cfg);
  DualEmbedding dual;
  dual.r_e = tape.value(r.r_e);
  dual.r_a = dual.r_e;
  dual.attr_masked = r.attr_masked;
  if (r.r_a >= 0) {
    const Matrix& ra = tape.value(r.r_a);
    for (std::size_t i = 0; i < r.attr_masked.size(); ++i)
      for (int c = 0; c < ra.cols; ++c)
        dual.r_a.at(r.attr_masked[i], c) = ra.at(static_cast<int>(i), c);
  }
  return dual;
}

inline Matrix decode_attrs(const Matrix& r_rows, ParamStore& params) {
  Tape tape;
  BoundParams bound(tape, params);
  return tape.value(decode_attrs_on_tape(tape, bound, tape.input(r_rows)));
}

inline Matrix encode_graph(const Matrix& attrs, const std::vector<std::pair<int, int>>& pairs,
                           ParamStore& params, const EncoderConfig& cfg) {
  Tape tape;
  BoundParams bound(tape, params);
  return tape.value(encode_graph_on_tape(tape, bound, attrs, pairs, cfg));
}

}  // namespace ptdgnn
