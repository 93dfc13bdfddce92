#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levyrisk {

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator,
/// so it plugs into the <random> distributions.
///
/// stream(seed, id) gives the generator for path `id`; paths can be simulated in
/// any order or in parallel and still reproduce the serial result.
class StreamRng {
public:
    using result_type = std::uint64_t;

    explicit StreamRng(std::uint64_t seed);
    static StreamRng stream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    /// Uniform on the open interval (0, 1).
    double uniform_open();

private:
    std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace levyrisk
