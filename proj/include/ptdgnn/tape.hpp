#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdgnn/matrix.hpp"

namespace ptdgnn {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)), evaluated as softplus(-x)
inline double neg_log_sigmoid(double x) {
  if (x > 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

// Reverse-mode tape over dense matrices. Nodes hold values eagerly; backward
// replays the recorded closures in reverse. Scalars are 1x1 matrices.
class Tape {
 public:
  using NodeId = int;

  NodeId input(Matrix value) { return add_node(std::move(value), false, {}); }

  NodeId param(Matrix value) { return add_node(std::move(value), true, {}); }

  const Matrix& value(NodeId id) const { return nodes_[check(id)].value; }
  const Matrix& grad(NodeId id) const { return nodes_[check(id)].grad; }

  double scalar(NodeId id) const {
    const Matrix& v = value(id);
    if (v.rows != 1 || v.cols != 1) throw std::runtime_error("node is not a scalar");
    return v.data[0];
  }

  NodeId matmul(NodeId a, NodeId b) {
    Matrix out = ptdgnn::matmul(value(a), value(b));
    return add_node(std::move(out), needs_grad(a) || needs_grad(b),
                    [this, a, b](const Matrix& g) {
                      if (needs_grad(a)) accumulate(a, matmul_nt(g, value(b)));
                      if (needs_grad(b)) accumulate(b, matmul_tn(value(a), g));
                    });
  }

  NodeId add(NodeId a, NodeId b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (!va.same_shape(vb)) throw std::runtime_error("add shape mismatch");
    Matrix out = va;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += vb.data[i];
    return add_node(std::move(out), needs_grad(a) || needs_grad(b),
                    [this, a, b](const Matrix& g) {
                      if (needs_grad(a)) accumulate(a, g);
                      if (needs_grad(b)) accumulate(b, g);
                    });
  }

  // a + bias, bias broadcast over rows (bias is 1 x cols)
  NodeId add_rowvec(NodeId a, NodeId bias) {
    const Matrix& va = value(a);
    const Matrix& vb = value(bias);
    if (vb.rows != 1 || vb.cols != va.cols) throw std::runtime_error("bias shape mismatch");
    Matrix out = va;
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out.at(i, j) += vb.at(0, j);
    return add_node(std::move(out), needs_grad(a) || needs_grad(bias),
                    [this, a, bias](const Matrix& g) {
                      if (needs_grad(a)) accumulate(a, g);
                      if (needs_grad(bias)) {
                        Matrix gb(1, g.cols);
                        for (int i = 0; i < g.rows; ++i)
                          for (int j = 0; j < g.cols; ++j) gb.at(0, j) += g.at(i, j);
                        accumulate(bias, gb);
                      }
                    });
  }

  NodeId relu(NodeId a) {
    Matrix out = value(a);
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return add_node(std::move(out), needs_grad(a), [this, a](const Matrix& g) {
      if (!needs_grad(a)) return;
      Matrix ga = g;
      const Matrix& va = value(a);
      for (std::size_t i = 0; i < ga.data.size(); ++i)
        if (va.data[i] <= 0.0) ga.data[i] = 0.0;
      accumulate(a, ga);
    });
  }

  // s * a with constant sparse s
  NodeId spmm(const SparseMatrix& s, NodeId a) {
    Matrix out = ptdgnn::spmm(s, value(a));
    return add_node(std::move(out), needs_grad(a), [this, s, a](const Matrix& g) {
      if (!needs_grad(a)) return;
      Matrix ga(value(a).rows, value(a).cols);
      spmm_transpose_add(s, g, ga);
      accumulate(a, ga);
    });
  }

  // row i of a scaled by constant scale[i]
  NodeId rowscale(const std::vector<double>& scale, NodeId a) {
    const Matrix& va = value(a);
    if (static_cast<int>(scale.size()) != va.rows)
      throw std::runtime_error("rowscale length mismatch");
    Matrix out = va;
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out.at(i, j) *= scale[i];
    return add_node(std::move(out), needs_grad(a), [this, scale, a](const Matrix& g) {
      if (!needs_grad(a)) return;
      Matrix ga = g;
      for (int i = 0; i < ga.rows; ++i)
        for (int j = 0; j < ga.cols; ++j) ga.at(i, j) *= scale[i];
      accumulate(a, ga);
    });
  }

  // n copies of a 1 x c row vector
  NodeId broadcast_row(NodeId x, int n) {
    const Matrix& vx = value(x);
    if (vx.rows != 1) throw std::runtime_error("broadcast_row expects a row vector");
    Matrix out(n, vx.cols);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < vx.cols; ++j) out.at(i, j) = vx.at(0, j);
    return add_node(std::move(out), needs_grad(x), [this, x](const Matrix& g) {
      if (!needs_grad(x)) return;
      Matrix gx(1, g.cols);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) gx.at(0, j) += g.at(i, j);
      accumulate(x, gx);
    });
  }

  NodeId gather_rows(NodeId a, std::vector<int> idx) {
    const Matrix& va = value(a);
    Matrix out(static_cast<int>(idx.size()), va.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < va.cols; ++j) out.at(static_cast<int>(i), j) = va.at(idx[i], j);
    return add_node(std::move(out), needs_grad(a),
                    [this, a, idx = std::move(idx)](const Matrix& g) {
                      if (!needs_grad(a)) return;
                      Matrix ga(value(a).rows, value(a).cols);
                      for (std::size_t i = 0; i < idx.size(); ++i)
                        for (int j = 0; j < g.cols; ++j)
                          ga.at(idx[i], j) += g.at(static_cast<int>(i), j);
                      accumulate(a, ga);
                    });
  }

  // sum of squared differences against a constant target
  NodeId sqdiff_sum(NodeId a, Matrix target) {
    const Matrix& va = value(a);
    if (!va.same_shape(target)) throw std::runtime_error("sqdiff_sum shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < va.data.size(); ++i) {
      const double d = va.data[i] - target.data[i];
      total += d * d;
    }
    Matrix out(1, 1);
    out.data[0] = total;
    return add_node(std::move(out), needs_grad(a),
                    [this, a, target = std::move(target)](const Matrix& g) {
                      if (!needs_grad(a)) return;
                      const double gs = g.data[0];
                      Matrix ga(value(a).rows, value(a).cols);
                      const Matrix& va = value(a);
                      for (std::size_t i = 0; i < va.data.size(); ++i)
                        ga.data[i] = 2.0 * (va.data[i] - target.data[i]) * gs;
                      accumulate(a, ga);
                    });
  }

  NodeId sum_squares(NodeId a) {
    const Matrix& va = value(a);
    double total = 0.0;
    for (double v : va.data) total += v * v;
    Matrix out(1, 1);
    out.data[0] = total;
    return add_node(std::move(out), needs_grad(a), [this, a](const Matrix& g) {
      if (!needs_grad(a)) return;
      const double gs = g.data[0];
      Matrix ga = value(a);
      for (double& v : ga.data) v *= 2.0 * gs;
      accumulate(a, ga);
    });
  }

  // a + weight * b over scalars
  NodeId scalar_axpy(NodeId a, NodeId b, double weight) {
    Matrix out(1, 1);
    out.data[0] = scalar(a) + weight * scalar(b);
    return add_node(std::move(out), needs_grad(a) || needs_grad(b),
                    [this, a, b, weight](const Matrix& g) {
                      if (needs_grad(a)) accumulate(a, g);
                      if (needs_grad(b)) {
                        Matrix gb(1, 1);
                        gb.data[0] = weight * g.data[0];
                        accumulate(b, gb);
                      }
                    });
  }

  void backward(NodeId loss) {
    const Matrix& v = value(loss);
    if (v.rows != 1 || v.cols != 1)
      throw std::runtime_error("backward expects a scalar loss node");
    for (Node& n : nodes_) {
      n.grad = Matrix(n.value.rows, n.value.cols);
    }
    nodes_[loss].grad.data[0] = 1.0;
    for (int i = loss; i >= 0; --i) {
      if (nodes_[i].backprop && nodes_[i].grad.rows > 0) nodes_[i].backprop(nodes_[i].grad);
    }
  }

  bool needs_grad(NodeId id) const { return nodes_[check(id)].needs_grad; }

  void accumulate(NodeId id, const Matrix& g) {
    Matrix& dst = nodes_[check(id)].grad;
    if (!dst.same_shape(g)) throw std::runtime_error("gradient shape mismatch");
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
  }

  // Escape hatch for fused ops defined outside the class.
  NodeId custom(Matrix value, bool needs_grad, std::function<void(const Matrix&)> backprop) {
    return add_node(std::move(value), needs_grad, std::move(backprop));
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    std::function<void(const Matrix&)> backprop;
  };

  NodeId add_node(Matrix value, bool needs_grad, std::function<void(const Matrix&)> backprop) {
    nodes_.push_back({std::move(value), Matrix(), needs_grad, std::move(backprop)});
    return static_cast<NodeId>(nodes_.size()) - 1;
  }

  NodeId check(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
      throw std::runtime_error("invalid tape node id");
    return id;
  }

  std::vector<Node> nodes_;
};

}  // namespace ptdgnn
