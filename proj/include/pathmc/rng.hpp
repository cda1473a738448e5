#pragma once

#include <cmath>
#include <cstdint>

#include "pathmc/types.hpp"

namespace pathmc {

namespace detail {

// splitmix64 finalizer; the workhorse of the counter-based streams below.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-based random sequence: draw j is a pure function of (key, j), so a
// sequence can be replayed or evaluated out of order without shared state.
class RngSequence {
public:
    explicit RngSequence(std::uint64_t key) : key_(key) {}

    // uniform on (0, 1]
    double u01() {
        const std::uint64_t bits = detail::mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
        return (double(bits >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; platform-independent given the stream
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = u01();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec gauss_vec(int d) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = gauss();
        return v;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream keyed by (master seed, replica index). Distinct replicas give
// independent streams; segment() splits one further per path segment so the
// draws are independent of evaluation order across segments and workers.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t replica)
        : key_(detail::mix64(detail::mix64(master_seed + 0x9E3779B97F4A7C15ull) ^
                             (replica * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull))) {}

    RngSequence segment(std::uint64_t segment_index) const {
        return RngSequence(detail::mix64(key_ ^ (segment_index * 0xDB4F0B9175AE2165ull + 0xE7037ED1A0B428DBull)));
    }

    RngSequence sequence() const { return RngSequence(key_); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

} // namespace pathmc
