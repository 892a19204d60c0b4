#include "mehler/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mehler {

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::uint64_t mix = master_seed;
    std::uint64_t idx = stream_index;
    std::uint64_t state = splitmix64(mix) ^ (splitmix64(idx) + 0x9E3779B97F4A7C15ULL * (stream_index + 1));
    for (int i = 0; i < 4; ++i) s_[i] = splitmix64(state);
}

std::uint64_t PathRng::next_u64() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double PathRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double PathRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(6.28318530717958647692 * u2);
    double s = std::sin(6.28318530717958647692 * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
}

int PathRng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean > 700.0) throw std::domain_error("poisson: mean too large for inversion");
    double u = uniform();
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u > cum && k < 100000) {
        ++k;
        p *= mean / k;
        cum += p;
    }
    return k;
}

}  // namespace mehler
