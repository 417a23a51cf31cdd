#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace wbqa {

// mt19937_64 output is fully specified by the standard, so draws are stable
// across platforms. std::uniform_int_distribution is implementation-defined,
// which would break byte-identical dataset generation — hence the hand-rolled
// draws below.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, n); n must be > 0
    std::size_t uniform(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    // uniform in [lo, hi] inclusive
    int range(int lo, int hi) { return lo + static_cast<int>(uniform(static_cast<std::size_t>(hi - lo + 1))); }

    // uniform in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform(i)]);
    }

    // derive an independent stream, e.g. one per template
    static std::uint64_t derive(std::uint64_t seed, const std::string& tag) {
        std::uint64_t h = 1469598103934665603ull ^ seed;
        for (unsigned char c : tag) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= seed >> 7;
        return h;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wbqa
