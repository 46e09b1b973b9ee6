#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bignn/errors.hpp"
#include "bignn/matrix.hpp"

namespace bignn {

class Tape;

// Handle to a node on a tape. Cheap to copy; the tape owns all storage.
struct Tensor {
  Tape* tape = nullptr;
  std::int32_t id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

enum class OpKind : std::uint8_t {
  Leaf,
  MatMul,
  Add,
  Sub,
  Mul,
  Relu,
  LeakyRelu,
  Sigmoid,
  Exp,
  Log,
  RsqrtOrZero,
  Scale,
  AddRowBias,
  ConcatCols,
  ConcatRows,
  GatherRows,
  ScaleRows,
  RowSum,
  Sum,
  MeanRows,
  SegmentSoftmax,
  SegmentSum,
  CrossEntropyWithLogits,
};

// Reverse-mode autodiff tape over dense 2-D tensors.
//
// Nodes are recorded in topological (creation) order; one backward() sweep per
// tape fills gradients for every grad-flagged leaf reachable from the loss.
// Parameters live outside the tape and are re-bound as leaves each forward
// pass; the tape is single-use.
class Tape {
public:
  struct Node {
    OpKind op = OpKind::Leaf;
    std::vector<std::int32_t> inputs;
    Matrix value;
    Matrix grad;   // allocated lazily during backward
    Matrix saved;  // op-specific forward state (e.g. CE softmax)
    std::vector<std::int64_t> indices;  // gather rows / segment ids / labels
    std::int64_t count = 0;             // num_segments
    double scalar = 0.0;                // leaky slope / scale constant
    bool requires_grad = false;
  };

  Tensor constant(Matrix v) { return push_leaf(std::move(v), false); }
  Tensor parameter(Matrix v) { return push_leaf(std::move(v), true); }

  const Matrix& value(Tensor t) const { return node_at(t).value; }

  // Gradient of a leaf (or any node) after backward(). Zero for nodes the
  // loss does not reach.
  const Matrix& grad(Tensor t) {
    Node& n = node_at(t);
    if (n.grad.size() == 0) n.grad = Matrix::zeros(n.value.rows(), n.value.cols());
    return n.grad;
  }

  bool consumed() const { return backward_done_; }
  std::size_t num_nodes() const { return nodes_.size(); }

  void backward(Tensor loss) {
    Node& top = node_at(loss);
    if (top.value.rows() != 1 || top.value.cols() != 1) {
      throw ShapeError("backward: loss must be 1x1, got " + top.value.shape_str());
    }
    if (backward_done_) throw Error("backward: tape already consumed");
    backward_done_ = true;
    top.grad = Matrix::filled(1, 1, 1.0);
    for (std::int32_t i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.requires_grad || n.grad.size() == 0) continue;
      backward_node(n);
    }
  }

  // --- op recording ------------------------------------------------------

  Tensor matmul(Tensor a, Tensor b) {
    const Matrix& A = node_at(a).value;
    const Matrix& B = node_at(b).value;
    if (A.cols() != B.rows()) {
      throw ShapeError("matmul: inner dimensions differ, " + A.shape_str() + " x " +
                       B.shape_str());
    }
    Matrix C(A.rows(), B.cols());
    matmul_into(A, B, C, false, false);
    return push(OpKind::MatMul, {a.id, b.id}, std::move(C));
  }

  Tensor add(Tensor a, Tensor b) { return binary(OpKind::Add, a, b); }
  Tensor sub(Tensor a, Tensor b) { return binary(OpKind::Sub, a, b); }
  Tensor mul(Tensor a, Tensor b) { return binary(OpKind::Mul, a, b); }

  Tensor relu(Tensor x) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v = v > 0.0 ? v : 0.0;
    return push(OpKind::Relu, {x.id}, std::move(y));
  }

  Tensor leaky_relu(Tensor x, double slope) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v = v > 0.0 ? v : slope * v;
    Tensor t = push(OpKind::LeakyRelu, {x.id}, std::move(y));
    node_at(t).scalar = slope;
    return t;
  }

  Tensor sigmoid(Tensor x) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v = 1.0 / (1.0 + std::exp(-v));
    return push(OpKind::Sigmoid, {x.id}, std::move(y));
  }

  Tensor exp(Tensor x) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v = std::exp(v);
    return push(OpKind::Exp, {x.id}, std::move(y));
  }

  Tensor log(Tensor x) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) {
      if (v <= 0.0) throw DomainError("log: non-positive entry " + std::to_string(v));
      v = std::log(v);
    }
    return push(OpKind::Log, {x.id}, std::move(y));
  }

  // y = x > 0 ? 1/sqrt(x) : 0. Used for inverse norms; the zero branch is the
  // cos(0-vector) = 0 convention.
  Tensor rsqrt_or_zero(Tensor x) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v = v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
    return push(OpKind::RsqrtOrZero, {x.id}, std::move(y));
  }

  Tensor scale(Tensor x, double c) {
    Matrix y = node_at(x).value;
    for (auto& v : y.data()) v *= c;
    Tensor t = push(OpKind::Scale, {x.id}, std::move(y));
    node_at(t).scalar = c;
    return t;
  }

  // The one permitted broadcast: add a 1xN bias row to every row of x.
  Tensor add_row_bias(Tensor x, Tensor bias) {
    const Matrix& X = node_at(x).value;
    const Matrix& B = node_at(bias).value;
    if (B.rows() != 1 || B.cols() != X.cols()) {
      throw ShapeError("add_row_bias: bias " + B.shape_str() + " does not match " +
                       X.shape_str());
    }
    Matrix y = X;
    for (std::size_t r = 0; r < y.rows(); ++r)
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += B(0, c);
    return push(OpKind::AddRowBias, {x.id, bias.id}, std::move(y));
  }

  Tensor concat_cols(Tensor a, Tensor b) {
    const Matrix& A = node_at(a).value;
    const Matrix& B = node_at(b).value;
    if (A.rows() != B.rows()) {
      throw ShapeError("concat_cols: row counts differ, " + A.shape_str() + " vs " +
                       B.shape_str());
    }
    Matrix y(A.rows(), A.cols() + B.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      for (std::size_t c = 0; c < A.cols(); ++c) y(r, c) = A(r, c);
      for (std::size_t c = 0; c < B.cols(); ++c) y(r, A.cols() + c) = B(r, c);
    }
    return push(OpKind::ConcatCols, {a.id, b.id}, std::move(y));
  }

  Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    const std::size_t cols = node_at(parts[0]).value.cols();
    std::size_t rows = 0;
    std::vector<std::int32_t> ids;
    ids.reserve(parts.size());
    for (Tensor p : parts) {
      const Matrix& M = node_at(p).value;
      if (M.cols() != cols) {
        throw ShapeError("concat_rows: column counts differ, " +
                         node_at(parts[0]).value.shape_str() + " vs " + M.shape_str());
      }
      rows += M.rows();
      ids.push_back(p.id);
    }
    Matrix y(rows, cols);
    std::size_t at = 0;
    for (Tensor p : parts) {
      const Matrix& M = node_at(p).value;
      for (std::size_t r = 0; r < M.rows(); ++r)
        for (std::size_t c = 0; c < cols; ++c) y(at + r, c) = M(r, c);
      at += M.rows();
    }
    return push(OpKind::ConcatRows, std::move(ids), std::move(y));
  }

  Tensor gather_rows(Tensor x, std::vector<std::int64_t> idx) {
    const Matrix& X = node_at(x).value;
    Matrix y(idx.size(), X.cols());
    for (std::size_t e = 0; e < idx.size(); ++e) {
      const std::int64_t r = idx[e];
      if (r < 0 || r >= static_cast<std::int64_t>(X.rows())) {
        throw IndexError("gather_rows: row " + std::to_string(r) + " out of " +
                         std::to_string(X.rows()));
      }
      for (std::size_t c = 0; c < X.cols(); ++c)
        y(e, c) = X(static_cast<std::size_t>(r), c);
    }
    Tensor t = push(OpKind::GatherRows, {x.id}, std::move(y));
    node_at(t).indices = std::move(idx);
    return t;
  }

  // Row-wise scaling: out(r, :) = x(r, :) * s(r, 0).
  Tensor scale_rows(Tensor x, Tensor s) {
    const Matrix& X = node_at(x).value;
    const Matrix& S = node_at(s).value;
    if (S.rows() != X.rows() || S.cols() != 1) {
      throw ShapeError("scale_rows: scale " + S.shape_str() + " does not match " +
                       X.shape_str());
    }
    Matrix y = X;
    for (std::size_t r = 0; r < y.rows(); ++r)
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) *= S(r, 0);
    return push(OpKind::ScaleRows, {x.id, s.id}, std::move(y));
  }

  Tensor row_sum(Tensor x) {
    const Matrix& X = node_at(x).value;
    Matrix y(X.rows(), 1);
    for (std::size_t r = 0; r < X.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < X.cols(); ++c) s += X(r, c);
      y(r, 0) = s;
    }
    return push(OpKind::RowSum, {x.id}, std::move(y));
  }

  Tensor sum(Tensor x) {
    const Matrix& X = node_at(x).value;
    double s = 0.0;
    for (double v : X.data()) s += v;
    return push(OpKind::Sum, {x.id}, Matrix::filled(1, 1, s));
  }

  // Column means; pairwise summation so permuting rows moves the result by
  // well under 1e-12 at desk scale.
  Tensor mean_rows(Tensor x) {
    const Matrix& X = node_at(x).value;
    if (X.rows() == 0) throw DomainError("mean_rows: empty graph (0 rows)");
    Matrix y(1, X.cols());
    for (std::size_t c = 0; c < X.cols(); ++c) {
      const double s = pairwise_sum(0, X.rows(), [&](std::size_t r) { return X(r, c); });
      y(0, c) = s / static_cast<double>(X.rows());
    }
    return push(OpKind::MeanRows, {x.id}, std::move(y));
  }

  // Softmax within each segment of an Ex1 logit vector. Segment ids are
  // arbitrary int64 keys. Max-subtraction per segment for stability.
  Tensor segment_softmax(Tensor logits, std::vector<std::int64_t> segment_of) {
    const Matrix& X = node_at(logits).value;
    if (X.cols() != 1) {
      throw ShapeError("segment_softmax: want Ex1 logits, got " + X.shape_str());
    }
    if (segment_of.size() != X.rows()) {
      throw ShapeError("segment_softmax: " + std::to_string(segment_of.size()) +
                       " segment ids for " + std::to_string(X.rows()) + " logits");
    }
    const std::size_t n = X.rows();
    std::unordered_map<std::int64_t, double> seg_max;
    seg_max.reserve(n);
    for (std::size_t e = 0; e < n; ++e) {
      auto [it, fresh] = seg_max.try_emplace(segment_of[e], X(e, 0));
      if (!fresh && X(e, 0) > it->second) it->second = X(e, 0);
    }
    Matrix y(n, 1);
    std::unordered_map<std::int64_t, double> seg_sum;
    seg_sum.reserve(seg_max.size());
    for (std::size_t e = 0; e < n; ++e) {
      y(e, 0) = std::exp(X(e, 0) - seg_max[segment_of[e]]);
      seg_sum[segment_of[e]] += y(e, 0);
    }
    for (std::size_t e = 0; e < n; ++e) y(e, 0) /= seg_sum[segment_of[e]];
    Tensor t = push(OpKind::SegmentSoftmax, {logits.id}, std::move(y));
    node_at(t).indices = std::move(segment_of);
    return t;
  }

  // Sum rows into their segment; segments with no members stay zero.
  Tensor segment_sum(Tensor values, std::vector<std::int64_t> segment_of,
                     std::size_t num_segments) {
    const Matrix& X = node_at(values).value;
    if (segment_of.size() != X.rows()) {
      throw ShapeError("segment_sum: " + std::to_string(segment_of.size()) +
                       " segment ids for " + std::to_string(X.rows()) + " rows");
    }
    Matrix y(num_segments, X.cols());
    for (std::size_t e = 0; e < X.rows(); ++e) {
      const std::int64_t s = segment_of[e];
      if (s < 0 || s >= static_cast<std::int64_t>(num_segments)) {
        throw IndexError("segment_sum: segment " + std::to_string(s) + " out of " +
                         std::to_string(num_segments));
      }
      for (std::size_t c = 0; c < X.cols(); ++c)
        y(static_cast<std::size_t>(s), c) += X(e, c);
    }
    Tensor t = push(OpKind::SegmentSum, {values.id}, std::move(y));
    node_at(t).indices = std::move(segment_of);
    node_at(t).count = static_cast<std::int64_t>(num_segments);
    return t;
  }

  // Mean over rows of -log softmax(logits)[label], via log-sum-exp.
  Tensor cross_entropy_with_logits(Tensor logits, std::vector<std::int64_t> labels) {
    const Matrix& X = node_at(logits).value;
    const std::size_t n = X.rows(), C = X.cols();
    if (C < 2) throw ShapeError("cross_entropy_with_logits: need >= 2 classes");
    if (labels.size() != n) {
      throw ShapeError("cross_entropy_with_logits: " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(n) + " rows");
    }
    Matrix softmax(n, C);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::int64_t lab = labels[r];
      if (lab < 0 || lab >= static_cast<std::int64_t>(C)) {
        throw IndexError("cross_entropy_with_logits: label " + std::to_string(lab) +
                         " out of " + std::to_string(C));
      }
      double mx = X(r, 0);
      for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, X(r, c));
      double z = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        softmax(r, c) = std::exp(X(r, c) - mx);
        z += softmax(r, c);
      }
      for (std::size_t c = 0; c < C; ++c) softmax(r, c) /= z;
      total += (mx + std::log(z)) - X(r, static_cast<std::size_t>(lab));
    }
    Tensor t = push(OpKind::CrossEntropyWithLogits, {logits.id},
                    Matrix::filled(1, 1, total / static_cast<double>(n)));
    Node& nd = node_at(t);
    nd.indices = std::move(labels);
    nd.saved = std::move(softmax);
    return t;
  }

private:
  friend struct Tensor;

  std::vector<Node> nodes_;
  bool backward_done_ = false;

  Node& node_at(Tensor t) {
    if (t.tape != this) throw Error("tensor does not belong to this tape");
    if (t.id < 0 || static_cast<std::size_t>(t.id) >= nodes_.size())
      throw IndexError("bad tensor id " + std::to_string(t.id));
    return nodes_[static_cast<std::size_t>(t.id)];
  }
  const Node& node_at(Tensor t) const {
    return const_cast<Tape*>(this)->node_at(t);
  }

  Tensor push_leaf(Matrix v, bool requires_grad) {
    Node n;
    n.op = OpKind::Leaf;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return Tensor{this, static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  Tensor push(OpKind op, std::vector<std::int32_t> inputs, Matrix value) {
    Node n;
    n.op = op;
    n.requires_grad = false;
    for (std::int32_t i : inputs) {
      if (nodes_[static_cast<std::size_t>(i)].requires_grad) n.requires_grad = true;
    }
    n.inputs = std::move(inputs);
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Tensor{this, static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  Tensor binary(OpKind op, Tensor a, Tensor b) {
    const Matrix& A = node_at(a).value;
    const Matrix& B = node_at(b).value;
    const char* name = op == OpKind::Add ? "add" : op == OpKind::Sub ? "sub" : "mul";
    check_same_shape(A, B, name);
    Matrix y = A;
    switch (op) {
      case OpKind::Add:
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += B[i];
        break;
      case OpKind::Sub:
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= B[i];
        break;
      default:
        for (std::size_t i = 0; i < y.size(); ++i) y[i] *= B[i];
        break;
    }
    return push(op, {a.id, b.id}, std::move(y));
  }

  static void matmul_into(const Matrix& A, const Matrix& B, Matrix& C, bool transpose_a,
                          bool transpose_b) {
    const std::size_t m = C.rows(), n = C.cols();
    const std::size_t k = transpose_a ? A.rows() : A.cols();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double a = transpose_a ? A(p, i) : A(i, p);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          C(i, j) += a * (transpose_b ? B(j, p) : B(p, j));
        }
      }
    }
  }

  Matrix& grad_of(std::int32_t id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) n.grad = Matrix::zeros(n.value.rows(), n.value.cols());
    return n.grad;
  }

  bool input_needs_grad(const Node& n, std::size_t slot) const {
    return nodes_[static_cast<std::size_t>(n.inputs[slot])].requires_grad;
  }

  const Matrix& input_value(const Node& n, std::size_t slot) const {
    return nodes_[static_cast<std::size_t>(n.inputs[slot])].value;
  }

  void backward_node(Node& n) {
    const Matrix& G = n.grad;
    switch (n.op) {
      case OpKind::Leaf:
        break;
      case OpKind::MatMul: {
        const Matrix& A = input_value(n, 0);
        const Matrix& B = input_value(n, 1);
        if (input_needs_grad(n, 0)) matmul_into(G, B, grad_of(n.inputs[0]), false, true);
        if (input_needs_grad(n, 1)) matmul_into(A, G, grad_of(n.inputs[1]), true, false);
        break;
      }
      case OpKind::Add: {
        for (std::size_t s = 0; s < 2; ++s) {
          if (!input_needs_grad(n, s)) continue;
          Matrix& g = grad_of(n.inputs[s]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
        }
        break;
      }
      case OpKind::Sub: {
        if (input_needs_grad(n, 0)) {
          Matrix& g = grad_of(n.inputs[0]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
        }
        if (input_needs_grad(n, 1)) {
          Matrix& g = grad_of(n.inputs[1]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] -= G[i];
        }
        break;
      }
      case OpKind::Mul: {
        const Matrix& A = input_value(n, 0);
        const Matrix& B = input_value(n, 1);
        if (input_needs_grad(n, 0)) {
          Matrix& g = grad_of(n.inputs[0]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * B[i];
        }
        if (input_needs_grad(n, 1)) {
          Matrix& g = grad_of(n.inputs[1]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * A[i];
        }
        break;
      }
      case OpKind::Relu: {
        const Matrix& X = input_value(n, 0);
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (X[i] > 0.0) g[i] += G[i];
        break;
      }
      case OpKind::LeakyRelu: {
        const Matrix& X = input_value(n, 0);
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i)
          g[i] += G[i] * (X[i] > 0.0 ? 1.0 : n.scalar);
        break;
      }
      case OpKind::Sigmoid: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i)
          g[i] += G[i] * n.value[i] * (1.0 - n.value[i]);
        break;
      }
      case OpKind::Exp: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * n.value[i];
        break;
      }
      case OpKind::Log: {
        const Matrix& X = input_value(n, 0);
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] / X[i];
        break;
      }
      case OpKind::RsqrtOrZero: {
        const Matrix& X = input_value(n, 0);
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (X[i] > 0.0)
            g[i] += G[i] * (-0.5 * n.value[i] * n.value[i] * n.value[i]);
        }
        break;
      }
      case OpKind::Scale: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * n.scalar;
        break;
      }
      case OpKind::AddRowBias: {
        if (input_needs_grad(n, 0)) {
          Matrix& g = grad_of(n.inputs[0]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
        }
        if (input_needs_grad(n, 1)) {
          Matrix& g = grad_of(n.inputs[1]);
          for (std::size_t r = 0; r < G.rows(); ++r)
            for (std::size_t c = 0; c < G.cols(); ++c) g(0, c) += G(r, c);
        }
        break;
      }
      case OpKind::ConcatCols: {
        const std::size_t p = input_value(n, 0).cols();
        if (input_needs_grad(n, 0)) {
          Matrix& g = grad_of(n.inputs[0]);
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < p; ++c) g(r, c) += G(r, c);
        }
        if (input_needs_grad(n, 1)) {
          Matrix& g = grad_of(n.inputs[1]);
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += G(r, p + c);
        }
        break;
      }
      case OpKind::ConcatRows: {
        std::size_t at = 0;
        for (std::size_t s = 0; s < n.inputs.size(); ++s) {
          const std::size_t nr = input_value(n, s).rows();
          if (input_needs_grad(n, s)) {
            Matrix& g = grad_of(n.inputs[s]);
            for (std::size_t r = 0; r < nr; ++r)
              for (std::size_t c = 0; c < G.cols(); ++c) g(r, c) += G(at + r, c);
          }
          at += nr;
        }
        break;
      }
      case OpKind::GatherRows: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t e = 0; e < n.indices.size(); ++e) {
          const auto r = static_cast<std::size_t>(n.indices[e]);
          for (std::size_t c = 0; c < G.cols(); ++c) g(r, c) += G(e, c);
        }
        break;
      }
      case OpKind::ScaleRows: {
        const Matrix& X = input_value(n, 0);
        const Matrix& S = input_value(n, 1);
        if (input_needs_grad(n, 0)) {
          Matrix& g = grad_of(n.inputs[0]);
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += G(r, c) * S(r, 0);
        }
        if (input_needs_grad(n, 1)) {
          Matrix& g = grad_of(n.inputs[1]);
          for (std::size_t r = 0; r < X.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < X.cols(); ++c) s += G(r, c) * X(r, c);
            g(r, 0) += s;
          }
        }
        break;
      }
      case OpKind::RowSum: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += G(r, 0);
        break;
      }
      case OpKind::Sum: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += G(0, 0);
        break;
      }
      case OpKind::MeanRows: {
        Matrix& g = grad_of(n.inputs[0]);
        const double inv = 1.0 / static_cast<double>(g.rows());
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += G(0, c) * inv;
        break;
      }
      case OpKind::SegmentSoftmax: {
        // d logit_e = alpha_e * (dy_e - sum_{e' in seg} alpha_e' dy_e')
        Matrix& g = grad_of(n.inputs[0]);
        std::unordered_map<std::int64_t, double> seg_dot;
        seg_dot.reserve(n.indices.size());
        for (std::size_t e = 0; e < n.indices.size(); ++e)
          seg_dot[n.indices[e]] += n.value(e, 0) * G(e, 0);
        for (std::size_t e = 0; e < n.indices.size(); ++e)
          g(e, 0) += n.value(e, 0) * (G(e, 0) - seg_dot[n.indices[e]]);
        break;
      }
      case OpKind::SegmentSum: {
        Matrix& g = grad_of(n.inputs[0]);
        for (std::size_t e = 0; e < n.indices.size(); ++e) {
          const auto s = static_cast<std::size_t>(n.indices[e]);
          for (std::size_t c = 0; c < g.cols(); ++c) g(e, c) += G(s, c);
        }
        break;
      }
      case OpKind::CrossEntropyWithLogits: {
        Matrix& g = grad_of(n.inputs[0]);
        const double scale = G(0, 0) / static_cast<double>(g.rows());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) {
            const double onehot =
                static_cast<std::int64_t>(c) == n.indices[r] ? 1.0 : 0.0;
            g(r, c) += scale * (n.saved(r, c) - onehot);
          }
        }
        break;
      }
    }
  }
};

inline const Matrix& Tensor::value() const { return tape->value(*this); }

// --- free-function op surface ---------------------------------------------

inline Tensor matmul(Tensor a, Tensor b) { return a.tape->matmul(a, b); }
inline Tensor add(Tensor a, Tensor b) { return a.tape->add(a, b); }
inline Tensor sub(Tensor a, Tensor b) { return a.tape->sub(a, b); }
inline Tensor mul(Tensor a, Tensor b) { return a.tape->mul(a, b); }
inline Tensor relu(Tensor x) { return x.tape->relu(x); }
inline Tensor leaky_relu(Tensor x, double slope) { return x.tape->leaky_relu(x, slope); }
inline Tensor sigmoid(Tensor x) { return x.tape->sigmoid(x); }
inline Tensor exp(Tensor x) { return x.tape->exp(x); }
inline Tensor log(Tensor x) { return x.tape->log(x); }
inline Tensor rsqrt_or_zero(Tensor x) { return x.tape->rsqrt_or_zero(x); }
inline Tensor scale(Tensor x, double c) { return x.tape->scale(x, c); }
inline Tensor add_row_bias(Tensor x, Tensor bias) { return x.tape->add_row_bias(x, bias); }
inline Tensor concat_cols(Tensor a, Tensor b) { return a.tape->concat_cols(a, b); }
inline Tensor concat_rows(std::span<const Tensor> parts) {
  return parts[0].tape->concat_rows(parts);
}
inline Tensor gather_rows(Tensor x, std::vector<std::int64_t> idx) {
  return x.tape->gather_rows(x, std::move(idx));
}
inline Tensor scale_rows(Tensor x, Tensor s) { return x.tape->scale_rows(x, s); }
inline Tensor row_sum(Tensor x) { return x.tape->row_sum(x); }
inline Tensor sum(Tensor x) { return x.tape->sum(x); }
inline Tensor mean_rows(Tensor x) { return x.tape->mean_rows(x); }
inline Tensor segment_softmax(Tensor logits, std::vector<std::int64_t> segment_of) {
  return logits.tape->segment_softmax(logits, std::move(segment_of));
}
inline Tensor segment_sum(Tensor values, std::vector<std::int64_t> segment_of,
                          std::size_t num_segments) {
  return values.tape->segment_sum(values, std::move(segment_of), num_segments);
}
inline Tensor cross_entropy_with_logits(Tensor logits, std::vector<std::int64_t> labels) {
  return logits.tape->cross_entropy_with_logits(logits, std::move(labels));
}

inline Tensor operator+(Tensor a, Tensor b) { return add(a, b); }
inline Tensor operator-(Tensor a, Tensor b) { return sub(a, b); }
inline Tensor operator*(Tensor a, Tensor b) { return mul(a, b); }

}  // namespace bignn
