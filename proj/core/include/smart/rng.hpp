#ifndef SMART_RNG_HPP
#define SMART_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace smart {

// Deterministic generator with platform-independent sampling. std::mt19937
// plus std::uniform_int_distribution is implementation-defined, so pipelines
// that must produce byte-identical benches across toolchains use this instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64();

  // Uniform in [lo, hi], inclusive. Requires lo <= hi.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Uniform index in [0, n). Requires n > 0.
  size_t index(size_t n);

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  uint64_t seed_for_child(uint64_t stream) ;

 private:
  uint64_t state_;
};

// Stable sub-seed derivation: same (root, label) always gives the same seed,
// independent of processing order.
uint64_t derive_seed(uint64_t root, std::string_view label);

}  // namespace smart

#endif
