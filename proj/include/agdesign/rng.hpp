#pragma once

#include <array>
#include <cstdint>

namespace agdesign::num {

// Derives a child seed from (seed, salt); used to give every table row /
// replicate / subject its own independent stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Splittable deterministic random stream. The same (master_seed, stream_index)
// produces the same draw sequence on every platform and at any thread count:
// the state is seeded by a 64-bit hash of the pair, the generator is
// xoshiro256++ and all samplers below are implemented in-library (no
// std::distribution, whose output is implementation-defined).
//
// A stream is single-owner: never share one instance between threads.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  // Independent child stream; substream(i) != substream(j) for i != j.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();

  double uniform();                           // strictly inside (0, 1)
  double exponential(double rate);            // rate > 0
  double normal();                            // N(0,1) by quantile inversion
  double gamma(double shape, double scale);   // Marsaglia-Tsang
  long poisson(double mean);                  // Knuth below mean 10, PTRS above

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace agdesign::num
