#include "hsm/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"
#include "hsm/error.hpp"

namespace hsm {

DistributionSpec DistributionSpec::uniform()
{
    return {};
}

DistributionSpec DistributionSpec::triangular(double ratio, Orientation o)
{
    DistributionSpec s;
    s.family = Family::triangular;
    s.parameter = ratio;
    s.orientation = o;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::power(double exponent, Orientation o)
{
    DistributionSpec s;
    s.family = Family::power;
    s.parameter = exponent;
    s.orientation = o;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::shifted_power(double exponent)
{
    DistributionSpec s;
    s.family = Family::shifted_power;
    s.parameter = exponent;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::exponential(double rate, Orientation o)
{
    DistributionSpec s;
    s.family = Family::exponential;
    s.parameter = rate;
    s.orientation = o;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::explicit_weights(std::vector<double> w)
{
    DistributionSpec s;
    s.family = Family::explicit_weights;
    s.weights = std::move(w);
    s.validate();
    return s;
}

void DistributionSpec::validate() const
{
    switch (family) {
    case Family::uniform:
        return;
    case Family::triangular:
        if (!(parameter >= 1.0) || !std::isfinite(parameter))
            throw InvalidSpec("triangular ratio must be >= 1, got " + detail::fmt_double(parameter));
        return;
    case Family::power:
    case Family::shifted_power:
    case Family::exponential:
        if (!(parameter > 0.0) || !std::isfinite(parameter))
            throw InvalidSpec("exponent/rate must be > 0, got " + detail::fmt_double(parameter));
        return;
    case Family::explicit_weights:
        if (weights.empty())
            throw InvalidSpec("explicit distribution needs at least one weight");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw InvalidSpec("explicit weights must be > 0, got " + detail::fmt_double(w));
        return;
    }
}

bool DistributionSpec::is_flat() const
{
    return family == Family::uniform || (family == Family::triangular && parameter == 1.0);
}

std::string DistributionSpec::to_string() const
{
    const auto orient = [&] { return orientation == Orientation::ascending ? ":asc" : ""; };
    switch (family) {
    case Family::uniform:
        return "uniform";
    case Family::triangular:
        return "tri:" + detail::fmt_double(parameter) + orient();
    case Family::power:
        return "pow:" + detail::fmt_double(parameter) + orient();
    case Family::shifted_power:
        return "spow:" + detail::fmt_double(parameter);
    case Family::exponential:
        return "exp:" + detail::fmt_double(parameter) + orient();
    case Family::explicit_weights: {
        std::string out = "explicit:";
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (i)
                out += ',';
            out += detail::fmt_double(weights[i]);
        }
        return out;
    }
    }
    return {};
}

DistributionSpec parse_distribution(std::string_view text)
{
    text = detail::trim(text);
    const auto bad = [&](std::string_view why) {
        return InvalidSpec("bad distribution '" + std::string(text) + "': " + std::string(why));
    };
    if (text == "uniform")
        return DistributionSpec::uniform();

    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw bad("unknown family");
    const auto family = text.substr(0, colon);
    auto rest = text.substr(colon + 1);

    if (family == "explicit") {
        std::vector<double> w;
        while (true) {
            const auto comma = rest.find(',');
            const auto v = detail::parse_double(rest.substr(0, comma));
            if (!v)
                throw bad("weight is not a number");
            w.push_back(*v);
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
        return DistributionSpec::explicit_weights(std::move(w));
    }

    Orientation orient = Orientation::descending;
    if (const auto c2 = rest.find(':'); c2 != std::string_view::npos) {
        const auto o = rest.substr(c2 + 1);
        if (o == "asc")
            orient = Orientation::ascending;
        else if (o != "desc")
            throw bad("orientation must be asc or desc");
        rest = rest.substr(0, c2);
    }
    const auto value = detail::parse_double(rest);
    if (!value)
        throw bad("parameter is not a number");

    if (family == "tri")
        return DistributionSpec::triangular(*value, orient);
    if (family == "pow")
        return DistributionSpec::power(*value, orient);
    if (family == "exp")
        return DistributionSpec::exponential(*value, orient);
    if (family == "spow") {
        if (orient != Orientation::descending)
            throw bad("spow takes no orientation");
        return DistributionSpec::shifted_power(*value);
    }
    throw bad("unknown family");
}

std::vector<double> family_weights(const DistributionSpec& spec, std::size_t k)
{
    using Family = DistributionSpec::Family;
    spec.validate();
    if (k == 0)
        throw InvalidSpec("support size must be >= 1");
    if (spec.family == Family::explicit_weights && spec.weights.size() != k)
        throw InvalidSpec("explicit weight count " + std::to_string(spec.weights.size()) +
                          " does not match support size " + std::to_string(k));
    if (k == 1)
        return {1.0};

    std::vector<double> w(k);
    const double kd = static_cast<double>(k);
    for (std::size_t idx = 0; idx < k; ++idx) {
        const double i = static_cast<double>(idx + 1);
        switch (spec.family) {
        case Family::uniform:
            w[idx] = 1.0;
            break;
        case Family::triangular:
            w[idx] = spec.parameter - (spec.parameter - 1.0) * (i - 1.0) / (kd - 1.0);
            break;
        case Family::power:
            w[idx] = std::pow(i, -spec.parameter);
            break;
        case Family::shifted_power:
            w[idx] = std::pow(kd + 1.0 - i, -spec.parameter);
            break;
        case Family::exponential:
            // e^{-rate*i} up to a constant; anchored at i=1 so the head never underflows.
            w[idx] = std::exp(-spec.parameter * (i - 1.0));
            break;
        case Family::explicit_weights:
            w[idx] = spec.weights[idx];
            break;
        }
    }
    if (spec.orientation == Orientation::ascending)
        std::reverse(w.begin(), w.end());
    return w;
}

Pmf make_pmf(const DistributionSpec& spec, std::size_t k)
{
    return Pmf(family_weights(spec, k));
}

Pmf::Pmf(std::vector<double> weights) : probs_(std::move(weights))
{
    if (probs_.empty())
        throw InvalidSpec("pmf needs at least one entry");
    long double total = 0;
    for (double w : probs_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InvalidSpec("pmf weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0))
        throw InvalidSpec("pmf weights sum to zero");

    const std::size_t k = probs_.size();
    cdf_.resize(k);
    long double running = 0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < k; ++i) {
        running += probs_[i];
        probs_[i] = static_cast<double>(probs_[i] / total);
        cdf_[i] = static_cast<double>(running / total);
        if (probs_[i] > 0)
            last_positive = i;
    }
    // Pin the top of the cdf so every u in [0,1) lands on a positive-mass index.
    std::fill(cdf_.begin() + static_cast<std::ptrdiff_t>(last_positive), cdf_.end(), 1.0);

    const std::size_t g = std::min<std::size_t>(k, std::size_t{1} << 20);
    guide_.resize(g);
    std::size_t i = 0;
    for (std::size_t j = 0; j < g; ++j) {
        const double threshold = static_cast<double>(j) / static_cast<double>(g);
        while (cdf_[i] <= threshold)
            ++i;
        guide_[j] = i;
    }
}

std::size_t Pmf::invert(double u) const
{
    auto j = static_cast<std::size_t>(u * static_cast<double>(guide_.size()));
    if (j >= guide_.size())
        j = guide_.size() - 1;
    std::size_t i = guide_[j];
    while (i > 0 && cdf_[i - 1] > u)
        --i;
    while (cdf_[i] <= u)
        ++i;
    return i;
}

std::size_t Pmf::sample(Rng& rng) const
{
    return invert(rng.uniform());
}

} // namespace hsm
