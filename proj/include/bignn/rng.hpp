#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bignn/matrix.hpp"

namespace bignn {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Deterministic random stream. All randomness in the engine flows from a
// single root seed split into named streams, so adding a consumer does not
// perturb the draws of another. Uniform doubles and index draws avoid
// std::uniform_*_distribution, whose output is implementation-defined.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream named(std::uint64_t root_seed, std::string_view name) {
    std::uint64_t s = root_seed ^ detail::fnv1a(name);
    // one mixing round so nearby root seeds do not give nearby engine seeds
    return RngStream(detail::splitmix64(s));
  }

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased uniform index in [0, n)
  std::size_t below(std::size_t n) {
    if (n == 0) throw DomainError("RngStream::below(0)");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  bool coin() { return (gen_() & 1ULL) != 0; }

  // Fisher-Yates; hand-rolled so shuffles are reproducible across platforms.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + below(n - i)]);
    }
    pool.resize(k);
    return pool;
  }

  Matrix uniform_matrix(std::size_t rows, std::size_t cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = uniform(lo, hi);
    return m;
  }

  // Glorot-style init: uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
  Matrix glorot_matrix(std::size_t rows, std::size_t cols, std::size_t fan_in,
                       std::size_t fan_out) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    return uniform_matrix(rows, cols, -s, s);
  }

  std::string save_state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
  }

  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
    if (is.fail()) throw ConfigError("bad RNG state string");
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace bignn
