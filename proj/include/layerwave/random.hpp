#pragma once

// Portable draws from mt19937_64. The standard distributions are
// implementation-defined, so fixtures would differ between libraries.

#include <cstdint>
#include <random>

namespace layerwave {

using Engine = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& engine, double low, double high) {
    return low + (high - low) * uniform01(engine);
}

/// +1 or -1 with equal probability.
inline int random_sign(Engine& engine) {
    return (engine() >> 63) != 0 ? -1 : 1;
}

}  // namespace layerwave
