#pragma once

// Synthetic data generators shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "bignn/fingerprint.hpp"
#include "bignn/graph.hpp"
#include "bignn/rng.hpp"
#include "bignn/smiles.hpp"

namespace bignn::synth {

// Random molecule: a spanning tree over 5..15 atoms plus an occasional ring
// edge, organic elements, hydrogens filled from default valences.
inline RepresentationGraph random_molecule(RngStream& rng, std::string id,
                                           std::size_t min_atoms = 5,
                                           std::size_t max_atoms = 15) {
  static const int elements[] = {6, 6, 6, 6, 7, 8, 16, 9, 17};  // C-heavy mix
  RepresentationGraph g;
  g.entity_id = std::move(id);
  const std::size_t n = min_atoms + rng.below(max_atoms - min_atoms + 1);
  for (std::size_t i = 0; i < n; ++i) {
    AtomFeatures a;
    a.atomic_number = elements[rng.below(std::size(elements))];
    a.hybridization = Hybridization::Unspecified;
    g.atoms.push_back(a);
  }
  auto add_bond = [&](int a, int b) {
    BondType t = rng.below(5) == 0 ? BondType::Double : BondType::Single;
    g.bonds.push_back(Bond{a, b, t});
  };
  for (std::size_t i = 1; i < n; ++i)
    add_bond(static_cast<int>(rng.below(i)), static_cast<int>(i));
  if (n >= 4 && rng.below(10) < 3) {
    // one extra ring edge if it does not duplicate a tree edge
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    bool dup = a == b;
    for (const Bond& e : g.bonds)
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) dup = true;
    if (!dup) add_bond(a, b);
  }
  std::vector<int> order_sum(n, 0);
  for (const Bond& b : g.bonds) {
    const int o = smiles_detail::bond_order(b.type);
    order_sum[static_cast<std::size_t>(b.a)] += o;
    order_sum[static_cast<std::size_t>(b.b)] += o;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int dv = smiles_detail::default_valence(g.atoms[i].atomic_number);
    g.atoms[i].num_hydrogens = std::max(0, dv - order_sum[i]);
  }
  return g;
}

// Relabel atoms by a permutation: atom perm[i] of the output is atom i of the
// input. Used for invariance checks.
inline RepresentationGraph permute_atoms(const RepresentationGraph& g,
                                         const std::vector<std::size_t>& perm) {
  RepresentationGraph out;
  out.entity_id = g.entity_id;
  out.atoms.resize(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) out.atoms[perm[i]] = g.atoms[i];
  for (const Bond& b : g.bonds) {
    out.bonds.push_back(Bond{static_cast<int>(perm[static_cast<std::size_t>(b.a)]),
                             static_cast<int>(perm[static_cast<std::size_t>(b.b)]),
                             b.type});
  }
  return out;
}

// Dataset whose links are fully determined by molecular structure:
// entities interact iff their fingerprint bit overlap reaches `threshold`.
inline BiLevelDataset molecule_rule_dataset(std::size_t n_entities, std::uint64_t seed,
                                            double threshold) {
  RngStream rng = RngStream::named(seed, "synth-molecules");
  BiLevelDataset d;
  d.interaction.relations = {"interacts"};
  std::vector<Fingerprint> fps;
  for (std::size_t i = 0; i < n_entities; ++i) {
    std::string id = "m" + std::to_string(i);
    d.interaction.entity_ids.push_back(id);
    d.rep_graphs.push_back(random_molecule(rng, id));
    fps.push_back(ecfp(d.rep_graphs.back(), 2, 64));
  }
  for (std::size_t i = 0; i < n_entities; ++i)
    for (std::size_t j = i + 1; j < n_entities; ++j)
      if (fingerprint_overlap(fps[i], fps[j]) >= threshold)
        d.interaction.add_edge(static_cast<int>(i), static_cast<int>(j), 0);
  d.splits.assign(d.interaction.edges.size(), Split::Train);
  return d;
}

// Dataset whose links come from latent geometry while molecules are pure
// noise: only the interaction structure is informative.
inline BiLevelDataset latent_rule_dataset(std::size_t n_entities, std::uint64_t seed,
                                          std::size_t latent_dim = 4,
                                          double threshold = 0.0) {
  RngStream rng = RngStream::named(seed, "synth-latent");
  BiLevelDataset d;
  d.interaction.relations = {"interacts"};
  std::vector<std::vector<double>> latents;
  for (std::size_t i = 0; i < n_entities; ++i) {
    std::string id = "e" + std::to_string(i);
    d.interaction.entity_ids.push_back(id);
    d.rep_graphs.push_back(random_molecule(rng, id));
    std::vector<double> u(latent_dim);
    for (auto& v : u) v = rng.uniform(-1.0, 1.0);
    latents.push_back(u);
  }
  for (std::size_t i = 0; i < n_entities; ++i) {
    for (std::size_t j = i + 1; j < n_entities; ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < latent_dim; ++k) dot += latents[i][k] * latents[j][k];
      if (dot > threshold)
        d.interaction.add_edge(static_cast<int>(i), static_cast<int>(j), 0);
    }
  }
  d.splits.assign(d.interaction.edges.size(), Split::Train);
  return d;
}

}  // namespace bignn::synth
