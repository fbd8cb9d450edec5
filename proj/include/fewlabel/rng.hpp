#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace fewlabel {

// Deterministic generator used by every seeded component. std::mt19937_64 has a
// standard-specified output sequence; the derived draws below deliberately avoid
// std::uniform_*_distribution, whose results may differ between standard library
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be positive.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    // Fisher-Yates, descending, so results do not depend on std::shuffle internals.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_index(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Stable per-item seeds (e.g. one generator per document or per tree) derived
// from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

} // namespace fewlabel
