#ifndef INFILLGP_RNG_HPP
#define INFILLGP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace infillgp {

/* Counter-based generator keyed by (seed, replicate, stream).  Each draw is
 * a stateless hash of (key, counter), so replicate loops can run in any
 * order or thread layout and still produce identical streams. */
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replicate = 0, std::uint64_t stream = 0) {
    key_ = mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(replicate + 0xBF58476D1CE4E5B9ull) ^
               mix(stream + 0x94D049BB133111EBull));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  double next_uniform() {  // in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_gaussian() {  // Box-Muller, two uniforms per draw
    double u1 = 1.0 - next_uniform();  // (0, 1]
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace infillgp

#endif
