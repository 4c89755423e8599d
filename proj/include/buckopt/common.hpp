#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace buckopt {

/// Bad or inconsistent component data (geometry, table construction).
struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation failure: domain violation or no periodic settlement.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Surrogate training failure (divergence, failed gradient check).
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or wrong-schema file content.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// splitmix64 step, used to derive independent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives the seed of a named random stream from a base seed.
/// Streams ("sampling", "training", "ga") stay decoupled, so changing the
/// consumption pattern of one never shifts the others.
inline std::uint64_t seed_for(std::uint64_t base, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ h);
}

}  // namespace buckopt
