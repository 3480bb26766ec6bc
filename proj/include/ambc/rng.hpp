#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace ambc {

/// Philox4x32-10 block function; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator. The 64-bit seed is the Philox key and the
/// stream id occupies the upper half of the 128-bit counter, so any
/// (seed, stream_id) pair is an independent, reproducible substream.
class SeededRng {
public:
    SeededRng(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Fresh generator on another substream of the same seed.
    SeededRng substream(std::uint64_t stream_id) const { return {seed_, stream_id}; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Circularly symmetric CN(0, 1): real and imaginary parts N(0, 1/2).
    std::complex<double> complex_normal();
    /// Gamma(shape, 1).
    double gamma(double shape);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Stream-id layout shared by the experiment drivers so that every
/// (realization, blocklength, tag symbol, purpose) tuple draws from its own
/// substream regardless of how work is scheduled.
enum class StreamPurpose : std::uint64_t {
    Channel = 1,
    OutputLaw = 2,
    ConditionalLaw = 3,
    TiltedOutputLaw = 4,
    ConverseLaw = 5,
    BerryEsseen = 6,
    TagSimulation = 7,
    ConverseTilt = 8,
};

std::uint64_t stream_for(StreamPurpose purpose, std::uint64_t realization,
                         std::uint64_t blocklength_index = 0, int tag_symbol = 0);

/// Same stream id with the purpose field or the tag-symbol field replaced.
std::uint64_t with_purpose(std::uint64_t stream_id, StreamPurpose purpose);
std::uint64_t with_tag_symbol(std::uint64_t stream_id, int tag_symbol);

}  // namespace ambc
