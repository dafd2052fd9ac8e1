// Counter-based random number generation (Philox4x64-10).
//
// Every sample path owns an independent substream addressed by
// (seed, stream id).  Streams can be created in any order and on any
// thread; the draws of a stream depend only on (seed, stream id, draw
// index), so parallel runs replay bit-identically regardless of the
// worker count.

#pragma once

#include <array>
#include <cstdint>
#include <cstddef>

namespace illiq::rng {

// One 256-bit counter / 128-bit key block of Philox4x64 with 10 rounds.
// Word order matches the reference implementation (and numpy.random.Philox),
// which is handy when cross-checking keystreams.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

// Bit mixer used to derive auxiliary seeds (nested simulations, bridge
// lanes) without correlating streams.
std::uint64_t mix64(std::uint64_t x);

// A deterministic substream of uniforms/gaussians/etc.
//
// key = (seed, stream), counter = (block index, 0, 0, 0).  Consuming a
// variable number of draws (rejection samplers) is fine: the stream is
// sequential, and no other stream is affected.
class PathStream {
  public:
    PathStream(std::uint64_t seed, std::uint64_t stream)
        : key_{seed, stream} {}

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1) with 53-bit resolution.
    double next_uniform();

    // Standard normal via the inverse-CDF transform (one uniform per draw).
    double next_gaussian();

    // Poisson(lambda); inversion for small means, PTRS rejection otherwise.
    std::uint64_t next_poisson(double lambda);

    // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang).
    double next_gamma(double shape);

  private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    unsigned pos_ = 4;  // empty
};

}  // namespace illiq::rng
