#pragma once

#include <cstdint>
#include <random>

// Seeded uniforms built from the raw mt19937_64 stream so values are
// identical across standard libraries.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }

private:
    std::mt19937_64 eng_;
};
