#pragma once

// Deterministic random utilities. Everything downstream (scoring, forests,
// simulation) must replay byte-for-byte from a seed, so this header avoids
// std::uniform_*_distribution (implementation-defined sequences) and draws
// directly from the standardized mt19937_64 engine.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace peertruth {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {
inline std::uint64_t ingest(std::uint64_t h, std::string_view part) {
    h ^= fnv1a(part);
    return splitmix64(h);
}
inline std::uint64_t ingest(std::uint64_t h, std::uint64_t part) {
    h ^= part;
    return splitmix64(h);
}
inline std::uint64_t ingest(std::uint64_t h, std::int64_t part) {
    return ingest(h, static_cast<std::uint64_t>(part));
}
inline std::uint64_t ingest(std::uint64_t h, int part) {
    return ingest(h, static_cast<std::uint64_t>(part));
}
}  // namespace detail

// Derive an independent stream seed from a base seed and a key path, e.g.
// derive_seed(seed, "freq", item_id, rater_id). Insensitive to evaluation
// order elsewhere; stable across platforms.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, Parts&&... parts) {
    std::uint64_t h = splitmix64(base);
    ((h = detail::ingest(h, parts)), ...);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) by rejection sampling. n must be > 0.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real01() < p; }

    // Index drawn from a discrete distribution. Weights must be nonnegative;
    // they are normalized by their sum.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = real01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    // k distinct indices from [0, n), returned in ascending order
    // (Floyd's algorithm; O(k log k)). k > n returns all of [0, n).
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> out;
        if (k >= n) {
            out.resize(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = i;
            return out;
        }
        out.reserve(k);
        for (std::size_t j = n - k; j < n; ++j) {
            std::size_t t = static_cast<std::size_t>(index(j + 1));
            if (std::find(out.begin(), out.end(), t) != out.end()) {
                out.push_back(j);
            } else {
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace peertruth
