#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bignn/errors.hpp"
#include "bignn/graph.hpp"
#include "bignn/tape.hpp"

namespace bignn {

// GAT attention nonlinearity slope (standard default; the attention logits
// pass through LeakyReLU before the per-node softmax).
inline constexpr double kLeakyReluSlope = 0.2;

// Directed message list: entry e sends src[e] -> tgt[e]. Attention softmax
// groups by tgt. Self-loops are explicit entries.
struct EdgeList {
  std::vector<std::int64_t> tgt;
  std::vector<std::int64_t> src;

  std::size_t size() const { return tgt.size(); }

  void push(std::int64_t t, std::int64_t s) {
    tgt.push_back(t);
    src.push_back(s);
  }
};

// Neighbors-plus-self message list for one molecule, ordered by target then
// source so evaluation order is reproducible.
inline EdgeList molecule_edges(const RepresentationGraph& g) {
  const std::size_t n = g.atoms.size();
  auto nbrs = g.neighbor_lists();
  EdgeList edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> srcs{static_cast<std::int64_t>(i)};
    for (int j : nbrs[i]) srcs.push_back(j);
    std::sort(srcs.begin(), srcs.end());
    for (std::int64_t s : srcs) edges.push(static_cast<std::int64_t>(i), s);
  }
  return edges;
}

// Per-relation message lists over an entity graph. Every node gets a
// self-loop in every relation.
inline std::vector<EdgeList> relation_edges(std::size_t num_entities,
                                            std::span<const TypedEdge> edges,
                                            std::size_t num_relations) {
  std::vector<std::vector<std::vector<std::int64_t>>> nbrs(
      num_relations, std::vector<std::vector<std::int64_t>>(num_entities));
  for (const TypedEdge& e : edges) {
    if (e.relation < 0 || static_cast<std::size_t>(e.relation) >= num_relations)
      throw ConfigError("edge relation " + std::to_string(e.relation) +
                        " has no layer parameters");
    auto& adj = nbrs[static_cast<std::size_t>(e.relation)];
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  std::vector<EdgeList> out(num_relations);
  for (std::size_t r = 0; r < num_relations; ++r) {
    for (std::size_t i = 0; i < num_entities; ++i) {
      std::vector<std::int64_t> srcs{static_cast<std::int64_t>(i)};
      srcs.insert(srcs.end(), nbrs[r][i].begin(), nbrs[r][i].end());
      std::sort(srcs.begin(), srcs.end());
      for (std::int64_t s : srcs) out[r].push(static_cast<std::int64_t>(i), s);
    }
  }
  return out;
}

// Tape-bound GAT layer parameters: W maps D_in -> D_out, a is the 2*D_out x 1
// attention vector.
struct GatParams {
  Tensor W;
  Tensor a;
};

// Attention-weighted neighborhood sum before the output nonlinearity:
//   xh      = x W
//   e_ij    = LeakyReLU(a^T [xh_i || xh_j])   for j in N(i) u {i}
//   alpha_i = softmax over that neighborhood (self term counted once)
//   pre_i   = sum_j alpha_ij xh_j
inline Tensor gat_preactivation(Tensor x, const EdgeList& edges, const GatParams& p) {
  const auto n = static_cast<std::size_t>(x.rows());
  Tensor xh = matmul(x, p.W);
  Tensor xi = gather_rows(xh, edges.tgt);
  Tensor xj = gather_rows(xh, edges.src);
  Tensor logits = leaky_relu(matmul(concat_cols(xi, xj), p.a), kLeakyReluSlope);
  Tensor alpha = segment_softmax(logits, edges.tgt);
  return segment_sum(scale_rows(xj, alpha), edges.tgt, n);
}

// One GAT layer: ReLU over the attention-weighted sum.
inline Tensor gat_forward(Tensor x, const EdgeList& edges, const GatParams& p) {
  return relu(gat_preactivation(x, edges, p));
}

// Multi-relational GAT: per-relation attention with per-relation parameters,
// contributions summed over relations, one ReLU over the total.
inline Tensor rel_gat_forward(Tensor x, std::span<const EdgeList> edges_per_relation,
                              std::span<const GatParams> params_per_relation) {
  if (edges_per_relation.size() != params_per_relation.size())
    throw ConfigError("rel_gat_forward: " + std::to_string(edges_per_relation.size()) +
                      " relations but " + std::to_string(params_per_relation.size()) +
                      " parameter sets");
  if (edges_per_relation.empty()) throw ConfigError("rel_gat_forward: no relations");
  Tensor acc = gat_preactivation(x, edges_per_relation[0], params_per_relation[0]);
  for (std::size_t r = 1; r < edges_per_relation.size(); ++r)
    acc = add(acc, gat_preactivation(x, edges_per_relation[r], params_per_relation[r]));
  return relu(acc);
}

// Graph-level embedding: mean of node embeddings per layer, concatenated in
// layer order (width K*D).
inline Tensor multi_scale_readout(std::span<const Tensor> per_layer_nodes) {
  if (per_layer_nodes.empty()) throw ConfigError("multi_scale_readout: no layers");
  Tensor out = mean_rows(per_layer_nodes[0]);
  for (std::size_t k = 1; k < per_layer_nodes.size(); ++k)
    out = concat_cols(out, mean_rows(per_layer_nodes[k]));
  return out;
}

enum class CoAttentionKind { Mhcaddi, Gmn };

// Cross-graph attention parameters. The GMN variant is parameter-free; the
// MHCADDI variant carries the message transform W1 and the attention-space
// transform W2.
struct CoAttention {
  CoAttentionKind kind = CoAttentionKind::Gmn;
  Tensor w1;
  Tensor w2;
};

struct CoAttentionOut {
  Tensor inter_a;
  Tensor inter_b;
};

// Inter-graph messages for both graphs of a pair.
//   gmn:     alpha_ij = softmax_j cos(x_i, x_j);  inter_i = sum_j alpha_ij (x_i - x_j)
//   mhcaddi: alpha_ij = softmax_j <W2 x_i, W2 x_j>;  inter_i = sum_j alpha_ij W1 x_j
// Both directions share the pairwise score table.
inline CoAttentionOut coattention(Tensor xa, Tensor xb, const CoAttention& co) {
  const auto na = static_cast<std::size_t>(xa.rows());
  const auto nb = static_cast<std::size_t>(xb.rows());
  if (na == 0 || nb == 0) throw DomainError("coattention: empty graph");
  std::vector<std::int64_t> ia, ib;
  ia.reserve(na * nb);
  ib.reserve(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      ia.push_back(static_cast<std::int64_t>(i));
      ib.push_back(static_cast<std::int64_t>(j));
    }
  }

  CoAttentionOut out;
  if (co.kind == CoAttentionKind::Gmn) {
    Tensor xi = gather_rows(xa, ia);
    Tensor xj = gather_rows(xb, ib);
    Tensor dots = row_sum(mul(xi, xj));
    // cos via inverse norms; zero rows get cos = 0
    Tensor inv_na = rsqrt_or_zero(row_sum(mul(xa, xa)));
    Tensor inv_nb = rsqrt_or_zero(row_sum(mul(xb, xb)));
    Tensor cos = mul(mul(dots, gather_rows(inv_na, ia)), gather_rows(inv_nb, ib));
    Tensor diff = sub(xi, xj);
    Tensor alpha_a = segment_softmax(cos, ia);
    out.inter_a = segment_sum(scale_rows(diff, alpha_a), ia, na);
    Tensor alpha_b = segment_softmax(cos, ib);
    out.inter_b = segment_sum(scale_rows(scale(diff, -1.0), alpha_b), ib, nb);
  } else {
    Tensor ya = gather_rows(matmul(xa, co.w2), ia);
    Tensor yb = gather_rows(matmul(xb, co.w2), ib);
    Tensor dots = row_sum(mul(ya, yb));
    Tensor wa = matmul(xa, co.w1);
    Tensor wb = matmul(xb, co.w1);
    Tensor alpha_a = segment_softmax(dots, ia);
    out.inter_a = segment_sum(scale_rows(gather_rows(wb, ib), alpha_a), ia, na);
    Tensor alpha_b = segment_softmax(dots, ib);
    out.inter_b = segment_sum(scale_rows(gather_rows(wa, ia), alpha_b), ib, nb);
  }
  return out;
}

// One MHCADDI-style block: intra-graph GAT and inter-graph co-attention on
// the incoming representations, combined through a learned linear + ReLU.
// The same parameters serve both graphs, so swapping (xa, xb) swaps outputs.
struct BlockOut {
  Tensor xa;
  Tensor xb;
};

inline BlockOut mhcaddi_block(Tensor xa, const EdgeList& edges_a, Tensor xb,
                              const EdgeList& edges_b, const GatParams& intra,
                              const CoAttention& co, Tensor w_combine) {
  Tensor intra_a = gat_forward(xa, edges_a, intra);
  Tensor intra_b = gat_forward(xb, edges_b, intra);
  CoAttentionOut inter = coattention(xa, xb, co);
  BlockOut out;
  out.xa = relu(matmul(concat_cols(intra_a, inter.inter_a), w_combine));
  out.xb = relu(matmul(concat_cols(intra_b, inter.inter_b), w_combine));
  return out;
}

// Fully connected stack: ReLU between layers, raw logits at the output.
struct MlpParams {
  std::vector<std::pair<Tensor, Tensor>> layers;  // (weight, bias)
};

inline Tensor mlp_forward(Tensor x, const MlpParams& p) {
  if (p.layers.empty()) throw ConfigError("mlp_forward: no layers");
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    x = add_row_bias(matmul(x, p.layers[l].first), p.layers[l].second);
    if (l + 1 < p.layers.size()) x = relu(x);
  }
  return x;
}

// Pair decoder, symmetrized over argument order: interactions are undirected
// but MLP([x_i || x_j]) is not, so both orders are averaged.
inline Tensor mlp_decode(Tensor xi, Tensor xj, const MlpParams& p) {
  Tensor fwd = mlp_forward(concat_cols(xi, xj), p);
  Tensor rev = mlp_forward(concat_cols(xj, xi), p);
  return scale(add(fwd, rev), 0.5);
}

}  // namespace bignn
