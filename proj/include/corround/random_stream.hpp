#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace corround {

/// Seeded source of uniform, exponential, Bernoulli and categorical draws.
///
/// Same seed, same sequence. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard, and every derived draw below is
/// computed by hand so results do not depend on the standard library's
/// distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform on (0, 1]; never returns 0.
    double uniform_open0();

    /// Exp(rate) by inverse CDF: -ln(U) / rate with U on (0, 1].
    double exponential(double rate);

    bool bernoulli(double p);

    /// Index i with probability weights[i] / sum(weights).
    std::size_t categorical(std::span<const double> weights);

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for concurrent stream `index` under `base`, namespaced by
/// `tag` so that streams for different purposes never coincide.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index);

namespace seed_tag {
inline constexpr std::uint64_t kInstance = 1;
inline constexpr std::uint64_t kArrivals = 2;
inline constexpr std::uint64_t kDecisions = 3;
inline constexpr std::uint64_t kBattery = 4;
}  // namespace seed_tag

}  // namespace corround
