#include "corround/random_stream.hpp"

#include <cmath>

#include "corround/error.hpp"

namespace corround {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::RowSumMismatch: return "RowSumMismatch";
        case ErrorCode::EmptyInstance: return "EmptyInstance";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::InfeasibleFractional: return "InfeasibleFractional";
        case ErrorCode::DegenerateSubset: return "DegenerateSubset";
        case ErrorCode::SizeImpossible: return "SizeImpossible";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index) {
    return base ^ splitmix64(splitmix64(tag) ^ index);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t RandomStream::next_u64() {
    ++draws_;
    return engine_();
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open0() { return 1.0 - uniform(); }

double RandomStream::exponential(double rate) { return -std::log(uniform_open0()) / rate; }

bool RandomStream::bernoulli(double p) { return uniform() < p; }

std::size_t RandomStream::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double target = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        if (target < weights[i]) return i;
        target -= weights[i];
    }
    return last_positive;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    // Rejection sampling; plain modulo would be biased.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

}  // namespace corround
