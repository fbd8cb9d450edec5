#include "fewlabel/rng.hpp"

namespace fewlabel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view tag) {
    return splitmix64(base_seed ^ fnv1a64(tag));
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return splitmix64(base_seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

} // namespace fewlabel
