#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "bignn/errors.hpp"
#include "bignn/graph.hpp"
#include "bignn/matrix.hpp"

namespace bignn {

namespace fp_detail {

// Fixed 64-bit mixer (splitmix64 finalizer); the fingerprint must hash the
// same on every platform and run, so no std::hash.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Doubled bond order keeps the aromatic 1.5 integral: 2, 4, 6, 3.
inline int doubled_order(BondType t) {
  switch (t) {
    case BondType::Single: return 2;
    case BondType::Double: return 4;
    case BondType::Triple: return 6;
    default: return 3;
  }
}

}  // namespace fp_detail

// Extended-connectivity (circular) fingerprint.
struct Fingerprint {
  std::vector<std::uint8_t> bits;
  int radius = 0;

  std::size_t nbits() const { return bits.size(); }

  bool operator==(const Fingerprint&) const = default;
};

// Per-atom identifiers from iterated neighborhood hashing. Iteration 0 hashes
// local atom invariants; iteration k+1 hashes (own id, sorted neighbor
// (bond, id) list). Returns ids for iterations 0..radius.
inline std::vector<std::vector<std::uint64_t>> ecfp_identifiers(const RepresentationGraph& g,
                                                                int radius) {
  if (radius < 0) throw ConfigError("fingerprint radius must be >= 0");
  const std::size_t n = g.atoms.size();
  std::vector<int> degree(n, 0), order_sum(n, 0);
  std::vector<std::vector<std::pair<int, std::size_t>>> nbrs(n);  // (bond ordinal, atom)
  for (const Bond& b : g.bonds) {
    const int t = static_cast<int>(b.type);
    degree[static_cast<std::size_t>(b.a)] += 1;
    degree[static_cast<std::size_t>(b.b)] += 1;
    order_sum[static_cast<std::size_t>(b.a)] += fp_detail::doubled_order(b.type);
    order_sum[static_cast<std::size_t>(b.b)] += fp_detail::doubled_order(b.type);
    nbrs[static_cast<std::size_t>(b.a)].push_back({t, static_cast<std::size_t>(b.b)});
    nbrs[static_cast<std::size_t>(b.b)].push_back({t, static_cast<std::size_t>(b.a)});
  }

  std::vector<std::vector<std::uint64_t>> rounds;
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AtomFeatures& a = g.atoms[i];
    std::uint64_t h = 0x6f3d9c1b2a84e570ULL;
    h = fp_detail::hash_combine(h, static_cast<std::uint64_t>(a.atomic_number));
    h = fp_detail::hash_combine(h, static_cast<std::uint64_t>(a.num_hydrogens));
    h = fp_detail::hash_combine(h, static_cast<std::uint64_t>(degree[i]));
    h = fp_detail::hash_combine(h, a.is_aromatic ? 1u : 0u);
    h = fp_detail::hash_combine(h, static_cast<std::uint64_t>(order_sum[i]));
    ids[i] = h;
  }
  rounds.push_back(ids);

  for (int round = 1; round <= radius; ++round) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> env;
      env.reserve(nbrs[i].size());
      for (const auto& [bond, j] : nbrs[i]) env.push_back({bond, ids[j]});
      std::sort(env.begin(), env.end());
      std::uint64_t h = fp_detail::hash_combine(0x1db5c2f4a6e89307ULL, ids[i]);
      for (const auto& [bond, id] : env) {
        h = fp_detail::hash_combine(h, static_cast<std::uint64_t>(bond));
        h = fp_detail::hash_combine(h, id);
      }
      next[i] = h;
    }
    rounds.push_back(next);
    ids = std::move(next);
  }
  return rounds;
}

// Identifiers from all iterations folded into nbits buckets (presence bits).
inline Fingerprint ecfp(const RepresentationGraph& g, int radius = 2,
                        std::size_t nbits = 64) {
  if (nbits < 1) throw ConfigError("fingerprint nbits must be >= 1");
  Fingerprint fp;
  fp.radius = radius;
  fp.bits.assign(nbits, 0);
  for (const auto& round : ecfp_identifiers(g, radius))
    for (std::uint64_t id : round) fp.bits[id % nbits] = 1;
  return fp;
}

// Count-folded variant (how many identifiers landed in each bucket).
inline std::vector<std::uint32_t> ecfp_counts(const RepresentationGraph& g, int radius = 2,
                                              std::size_t nbits = 64) {
  if (nbits < 1) throw ConfigError("fingerprint nbits must be >= 1");
  std::vector<std::uint32_t> counts(nbits, 0);
  for (const auto& round : ecfp_identifiers(g, radius))
    for (std::uint64_t id : round) counts[id % nbits] += 1;
  return counts;
}

// Hex string with bit k weighted 2^k (big-integer convention), zero-padded to
// ceil(nbits/4) digits.
inline std::string fingerprint_hex(const Fingerprint& fp) {
  const std::size_t digits = (fp.nbits() + 3) / 4;
  std::vector<int> nibble(digits, 0);
  for (std::size_t b = 0; b < fp.nbits(); ++b)
    if (fp.bits[b]) nibble[b / 4] |= 1 << (b % 4);
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d)
    out[digits - 1 - d] = "0123456789abcdef"[nibble[d]];
  return out;
}

inline double fingerprint_overlap(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits() != b.nbits()) throw ConfigError("fingerprint widths differ");
  double n = 0;
  for (std::size_t i = 0; i < a.nbits(); ++i)
    if (a.bits[i] && b.bits[i]) n += 1;
  return n;
}

// Fingerprint rows as doubles, one entity per row (model feature matrix).
inline Matrix fingerprint_features(const std::vector<RepresentationGraph>& graphs, int radius,
                                   std::size_t nbits) {
  Matrix out(graphs.size(), nbits);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    Fingerprint fp = ecfp(graphs[i], radius, nbits);
    for (std::size_t b = 0; b < nbits; ++b) out(i, b) = fp.bits[b] ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace bignn
