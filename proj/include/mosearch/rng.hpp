#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mosearch {

// Deterministic random source. mt19937_64 output is fixed by the standard,
// but the std distributions are not, so bounded draws are implemented here
// to keep runs reproducible across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("index: empty range");
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }

    // Uniform real in [0, 1).
    double uniform_real() {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mosearch
