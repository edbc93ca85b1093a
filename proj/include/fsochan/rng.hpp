#pragma once

#include <cstdint>

namespace fsochan {

// Counter-based generator. A stream is fully determined by
// (seed, stream tag, index), so samples do not depend on evaluation order.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

    // Child generator for a sub-stream.
    Rng split(std::uint64_t stream, std::uint64_t index) const;

    std::uint64_t next_u64();
    double uniform();          // [0,1)
    double uniform_open();     // (0,1)
    double normal();           // N(0,1), Box-Muller

    std::uint64_t key() const { return key_; }

private:
    explicit Rng(std::uint64_t key) : key_(key) {}
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags used across the library.
namespace stream {
inline constexpr std::uint64_t pointing = 0x706f696e74ULL;
inline constexpr std::uint64_t scintillation = 0x7363696e74ULL;
inline constexpr std::uint64_t screen = 0x73637265656eULL;
inline constexpr std::uint64_t test = 0x74657374ULL;
}  // namespace stream

std::uint64_t mix64(std::uint64_t x);

}  // namespace fsochan
