#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsm/rng.hpp"

namespace hsm {

enum class Orientation { descending, ascending };

/// A parameterized weight family over the ordinal support 1..k.
///
/// Text form (see parse_distribution):
///   uniform | tri:<ratio>[:asc|:desc] | pow:<exp>[:asc|:desc] | spow:<exp>
///   | exp:<rate>[:asc|:desc] | explicit:<w1,w2,...>
struct DistributionSpec {
    enum class Family { uniform, triangular, power, shifted_power, exponential, explicit_weights };

    Family family = Family::uniform;
    /// Ratio for triangular, exponent for power/shifted_power, rate for exponential.
    double parameter = 1.0;
    Orientation orientation = Orientation::descending;
    std::vector<double> weights;

    static DistributionSpec uniform();
    static DistributionSpec triangular(double ratio, Orientation o = Orientation::descending);
    static DistributionSpec power(double exponent, Orientation o = Orientation::descending);
    static DistributionSpec shifted_power(double exponent);
    static DistributionSpec exponential(double rate, Orientation o = Orientation::descending);
    static DistributionSpec explicit_weights(std::vector<double> w);

    /// Throws InvalidSpec when a family invariant is violated.
    void validate() const;

    /// Canonical text form; parse_distribution(to_string()) reproduces the spec.
    std::string to_string() const;

    /// True when the family produces identical weights for every k (uniform, ratio-1 triangular).
    bool is_flat() const;

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

DistributionSpec parse_distribution(std::string_view text);

/// Normalized probability mass function over indices 0..k-1 with an inversion sampler.
class Pmf {
public:
    /// Normalizes non-negative weights. Zero entries are allowed and are never sampled.
    explicit Pmf(std::vector<double> weights);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

    /// Draws one index using exactly one uniform variate.
    std::size_t sample(Rng& rng) const;

    /// Index that `sample` returns for the uniform variate u in [0, 1).
    std::size_t invert(double u) const;

private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
    // guide_[g] = first index whose cdf exceeds g / guide_.size(); narrows the search.
    std::vector<std::size_t> guide_;
};

/// Instantiates `spec` on support size k (k >= 1).
Pmf make_pmf(const DistributionSpec& spec, std::size_t k);

/// Raw (unnormalized) weights of `spec` on support size k; make_pmf normalizes these.
std::vector<double> family_weights(const DistributionSpec& spec, std::size_t k);

} // namespace hsm
