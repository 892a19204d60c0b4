#pragma once

#include <cstdint>

namespace mehler {

// Counter-seeded xoshiro256++ stream. Hand-rolled so that byte-identical
// output does not depend on standard library distribution internals: the
// (master seed, stream index) pair fully determines every draw on every
// platform.
class PathRng {
  public:
    PathRng(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    // Uniform on (0, 1].
    double uniform();
    // Standard normal by the Box-Muller transform; pairs are cached.
    double normal();
    // Poisson by inversion of the cumulative sum.
    int poisson(double mean);

  private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mehler
