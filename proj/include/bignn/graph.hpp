#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bignn/errors.hpp"
#include "bignn/matrix.hpp"
#include "bignn/rng.hpp"

namespace bignn {

enum class BondType : std::uint8_t { Single, Double, Triple, Aromatic };
enum class Hybridization : std::uint8_t { Sp, Sp2, Sp3, Other, Unspecified };
enum class TriState : std::uint8_t { Yes, No, Unspecified };

struct AtomFeatures {
  int atomic_number = 6;
  int num_hydrogens = 0;
  Hybridization hybridization = Hybridization::Unspecified;
  TriState is_donor = TriState::Unspecified;
  TriState is_acceptor = TriState::Unspecified;
  bool is_aromatic = false;

  bool operator==(const AtomFeatures&) const = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondType type = BondType::Single;

  bool operator==(const Bond&) const = default;
};

// A lower-level graph: one molecule, atoms with categorical features and
// typed undirected bonds.
struct RepresentationGraph {
  std::string entity_id;
  std::vector<AtomFeatures> atoms;
  std::vector<Bond> bonds;

  std::size_t num_atoms() const { return atoms.size(); }

  void validate() const {
    if (atoms.empty()) throw DataError("representation graph '" + entity_id + "' has no atoms");
    std::set<std::pair<int, int>> seen;
    for (const Bond& b : bonds) {
      if (b.a == b.b)
        throw DataError("self-bond on atom " + std::to_string(b.a) + " in '" + entity_id + "'");
      if (b.a < 0 || b.b < 0 || b.a >= static_cast<int>(atoms.size()) ||
          b.b >= static_cast<int>(atoms.size()))
        throw DataError("bond endpoint out of range in '" + entity_id + "'");
      auto key = std::minmax(b.a, b.b);
      if (!seen.insert(key).second)
        throw DataError("duplicate bond " + std::to_string(key.first) + "-" +
                        std::to_string(key.second) + " in '" + entity_id + "'");
    }
  }

  std::vector<std::vector<int>> neighbor_lists() const {
    std::vector<std::vector<int>> nbrs(atoms.size());
    for (const Bond& b : bonds) {
      nbrs[static_cast<std::size_t>(b.a)].push_back(b.b);
      nbrs[static_cast<std::size_t>(b.b)].push_back(b.a);
    }
    return nbrs;
  }

  bool operator==(const RepresentationGraph&) const = default;
};

// One-hot encoder for atom features. Five categorical blocks plus one
// aromatic flag slot; width is fixed so feature dimensions do not depend on
// the dataset.
class FeatureEncoder {
public:
  static constexpr std::array<int, 11> kElements = {1, 5, 6, 7, 8, 9, 15, 16, 17, 35, 53};
  static constexpr std::size_t kElementSlots = 12;    // 11 named + other
  static constexpr std::size_t kHydrogenSlots = 5;    // 0,1,2,3,4+
  static constexpr std::size_t kHybridSlots = 5;      // sp,sp2,sp3,other,unspecified
  static constexpr std::size_t kTriStateSlots = 3;    // yes,no,unspecified
  static constexpr std::size_t kWidth =
      kElementSlots + kHydrogenSlots + kHybridSlots + 2 * kTriStateSlots + 1;  // 29

  static std::size_t element_slot(int atomic_number) {
    for (std::size_t i = 0; i < kElements.size(); ++i)
      if (kElements[i] == atomic_number) return i;
    return kElements.size();  // "other"
  }

  static void encode_into(const AtomFeatures& a, Matrix& out, std::size_t row) {
    std::size_t base = 0;
    out(row, base + element_slot(a.atomic_number)) = 1.0;
    base += kElementSlots;
    const int h = std::clamp(a.num_hydrogens, 0, 4);
    out(row, base + static_cast<std::size_t>(h)) = 1.0;
    base += kHydrogenSlots;
    out(row, base + static_cast<std::size_t>(a.hybridization)) = 1.0;
    base += kHybridSlots;
    out(row, base + static_cast<std::size_t>(a.is_donor)) = 1.0;
    base += kTriStateSlots;
    out(row, base + static_cast<std::size_t>(a.is_acceptor)) = 1.0;
    base += kTriStateSlots;
    if (a.is_aromatic) out(row, base) = 1.0;
  }
};

// Row i = one-hot encoding of atom i; output is N_i x 29.
inline Matrix encode_atoms(const RepresentationGraph& g) {
  Matrix out(g.atoms.size(), FeatureEncoder::kWidth);
  for (std::size_t i = 0; i < g.atoms.size(); ++i)
    FeatureEncoder::encode_into(g.atoms[i], out, i);
  return out;
}

// Undirected typed edge of the interaction graph, stored smaller index first.
struct TypedEdge {
  int a = 0;
  int b = 0;
  int relation = 0;

  bool operator==(const TypedEdge&) const = default;
};

// The higher-level graph: entities, typed undirected interactions.
struct InteractionGraph {
  std::vector<std::string> entity_ids;
  std::vector<std::string> relations;
  std::vector<TypedEdge> edges;

  std::size_t num_entities() const { return entity_ids.size(); }
  std::size_t num_relations() const { return relations.size(); }

  int entity_index(const std::string& id) const {
    for (std::size_t i = 0; i < entity_ids.size(); ++i)
      if (entity_ids[i] == id) return static_cast<int>(i);
    return -1;
  }

  void add_edge(int a, int b, int relation) {
    if (a == b) throw DataError("self-interaction on entity " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges.push_back(TypedEdge{a, b, relation});
  }

  void validate() const {
    std::set<std::tuple<int, int, int>> seen;
    for (const TypedEdge& e : edges) {
      if (e.a >= e.b) throw DataError("edge not stored smaller-index-first");
      if (e.b >= static_cast<int>(entity_ids.size()) || e.a < 0)
        throw DataError("edge endpoint out of range");
      if (e.relation < 0 || e.relation >= static_cast<int>(relations.size()))
        throw DataError("edge relation out of range");
      if (!seen.insert({e.a, e.b, e.relation}).second)
        throw DataError("duplicate edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                        " relation " + std::to_string(e.relation));
    }
  }

  bool operator==(const InteractionGraph&) const = default;
};

enum class Split : std::uint8_t { Train, Val, Test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    default: return "test";
  }
}

// The bi-level dataset: interaction graph + one representation graph per
// entity + a split label per positive edge.
struct BiLevelDataset {
  InteractionGraph interaction;
  std::vector<RepresentationGraph> rep_graphs;  // indexed by entity
  std::vector<Split> splits;                    // parallel to interaction.edges

  std::size_t num_entities() const { return interaction.num_entities(); }
  std::size_t num_classes() const { return interaction.num_relations() + 1; }

  void validate() const {
    interaction.validate();
    if (rep_graphs.size() != interaction.num_entities())
      throw DataError("expected one representation graph per entity");
    for (const auto& g : rep_graphs) g.validate();
    if (splits.size() != interaction.edges.size())
      throw DataError("split assignment does not cover every edge exactly once");
  }

  std::vector<TypedEdge> edges_in(Split s) const {
    std::vector<TypedEdge> out;
    for (std::size_t i = 0; i < interaction.edges.size(); ++i)
      if (splits[i] == s) out.push_back(interaction.edges[i]);
    return out;
  }

  // Set of undirected pairs that are positive under any relation.
  std::set<std::pair<int, int>> positive_pairs() const {
    std::set<std::pair<int, int>> out;
    for (const TypedEdge& e : interaction.edges) out.insert({e.a, e.b});
    return out;
  }
};

// Stratified split: per relation, shuffle and take the first TR fraction as
// train; the remainder goes half to val, half to test. Relations with fewer
// than 3 edges cannot be stratified and fall back to train entirely.
inline std::vector<std::string> split_dataset(BiLevelDataset& d, double train_ratio,
                                              std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ConfigError("train_ratio must be in (0, 1), got " + std::to_string(train_ratio));
  std::vector<std::string> warnings;
  RngStream rng = RngStream::named(seed, "split");
  d.splits.assign(d.interaction.edges.size(), Split::Train);
  for (std::size_t r = 0; r < d.interaction.num_relations(); ++r) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.interaction.edges.size(); ++i)
      if (d.interaction.edges[i].relation == static_cast<int>(r)) idx.push_back(i);
    if (idx.size() < 3) {
      if (!idx.empty())
        warnings.push_back("relation '" + d.interaction.relations[r] +
                           "' has fewer than 3 edges; all assigned to train");
      continue;
    }
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_ratio * static_cast<double>(idx.size())));
    const std::size_t rest = idx.size() - n_train;
    const std::size_t n_val = rest / 2;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      Split s = k < n_train              ? Split::Train
                : (k < n_train + n_val) ? Split::Val
                                         : Split::Test;
      d.splits[idx[k]] = s;
    }
  }
  return warnings;
}

// Default degree-bin boundaries: 0 | 1-2 | 3-6 | 7-14 | 15-30 | 31+.
inline const std::vector<int>& default_bin_upper_bounds() {
  static const std::vector<int> bounds = {0, 2, 6, 14, 30};
  return bounds;
}

inline int degree_to_bin(int degree, const std::vector<int>& upper_bounds) {
  for (std::size_t i = 0; i < upper_bounds.size(); ++i)
    if (degree <= upper_bounds[i]) return static_cast<int>(i);
  return static_cast<int>(upper_bounds.size());
}

// Per-entity bin index from node degree, optionally counting only
// training-split edges.
inline std::vector<int> degree_bins(const BiLevelDataset& d, bool train_edges_only,
                                    const std::vector<int>& upper_bounds =
                                        default_bin_upper_bounds()) {
  std::vector<int> degree(d.num_entities(), 0);
  for (std::size_t i = 0; i < d.interaction.edges.size(); ++i) {
    if (train_edges_only && d.splits[i] != Split::Train) continue;
    degree[static_cast<std::size_t>(d.interaction.edges[i].a)] += 1;
    degree[static_cast<std::size_t>(d.interaction.edges[i].b)] += 1;
  }
  std::vector<int> bins(d.num_entities());
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] = degree_to_bin(degree[i], upper_bounds);
  return bins;
}

}  // namespace bignn
