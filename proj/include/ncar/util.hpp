#ifndef NCAR_UTIL_HPP
#define NCAR_UTIL_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace ncar {

/// Shortest round-trip decimal representation of a double.
inline std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// splitmix64 avalanche step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic per-replication seed derivation, worker-count independent.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t r) {
    return splitmix64(base ^ splitmix64(r + 1));
}

}  // namespace ncar

#endif
