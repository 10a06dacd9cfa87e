#pragma once
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace solwalk {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding.  A fixed algorithm keeps sample
// streams bit-reproducible across compilers, which std::uniform_real_distribution
// does not guarantee.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        for (auto& w : s_) w = splitmix64(seed);
    }

    // decorrelated substream for a (master seed, index) pair; index is a sample
    // or worker id, so results do not depend on how work is chunked
    static Rng stream(std::uint64_t master, std::uint64_t index) {
        std::uint64_t x = master ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull));
        return Rng(splitmix64(x));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

// cumulative-table sampler over nonnegative weights (renormalized once)
class DiscreteSampler {
  public:
    explicit DiscreteSampler(const std::vector<double>& weights) {
        if (weights.empty()) throw validation_error("DiscreteSampler: empty weight list");
        double total = 0;
        for (double w : weights) {
            if (w < 0) throw validation_error("DiscreteSampler: negative weight");
            total += w;
        }
        if (total <= 0) throw validation_error("DiscreteSampler: zero total weight");
        cum_.reserve(weights.size());
        double acc = 0;
        for (double w : weights) {
            acc += w / total;
            cum_.push_back(acc);
        }
        cum_.back() = 1.0;  // guard against roundoff shortfall
    }

    std::size_t operator()(Rng& rng) const {
        double u = rng.uniform();
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cum_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    std::size_t size() const { return cum_.size(); }

  private:
    std::vector<double> cum_;
};

}  // namespace solwalk
