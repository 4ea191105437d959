#include "hsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "format.hpp"
#include "hsm/error.hpp"
#include "hsm/rng.hpp"

namespace hsm {

void HierarchySpec::validate() const
{
    if (n_hierarchies < 1)
        throw InvalidSpec("number of hierarchies must be >= 1");
    if (n_objects < n_hierarchies)
        throw InvalidSpec("N = " + std::to_string(n_objects) + " < M = " + std::to_string(n_hierarchies) +
                          ": every hierarchy needs at least one object");
    fm.validate();
    fw.validate();
    fc.validate();
    if (n_hierarchies * 10 > n_objects)
        warn("M = " + std::to_string(n_hierarchies) + " exceeds N/10 (N = " + std::to_string(n_objects) +
             "); the model assumes M << N");
}

ModelInstance::ModelInstance(std::vector<std::size_t> counts, Pmf fc, std::vector<Pmf> fw)
    : counts_(std::move(counts)), fc_(std::move(fc)), fw_(std::move(fw))
{
    if (counts_.empty())
        throw InvalidSpec("model needs at least one hierarchy");
    if (fc_.size() != counts_.size() || fw_.size() != counts_.size())
        throw InvalidSpec("fc/fw sizes do not match the hierarchy count");
    offsets_.resize(counts_.size());
    for (std::size_t h = 0; h < counts_.size(); ++h) {
        if (counts_[h] < 1)
            throw InvalidSpec("every hierarchy needs at least one object");
        if (fw_[h].size() != counts_[h])
            throw InvalidSpec("fw support does not match hierarchy size");
        offsets_[h] = n_objects_;
        n_objects_ += counts_[h];
    }
}

std::vector<std::size_t> apportion(std::size_t total, const Pmf& shares)
{
    const std::size_t m = shares.size();
    if (total < m)
        throw InvalidSpec("cannot give each of " + std::to_string(m) + " hierarchies an object out of " +
                          std::to_string(total));
    std::vector<std::size_t> seats(m);
    std::vector<double> remainder(m);
    std::size_t assigned = 0;
    for (std::size_t h = 0; h < m; ++h) {
        const double quota = static_cast<double>(total) * shares[h];
        const double whole = std::floor(quota);
        seats[h] = static_cast<std::size_t>(whole);
        remainder[h] = quota - whole;
        assigned += seats[h];
    }
    // Rounding in the quotas can overshoot by a seat in pathological cases.
    while (assigned > total) {
        auto it = std::max_element(seats.begin(), seats.end());
        --*it;
        --assigned;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % m, ++assigned)
        ++seats[order[i]];

    for (std::size_t h = 0; h < m; ++h) {
        if (seats[h] == 0) {
            auto largest = std::max_element(seats.begin(), seats.end());
            --*largest;
            seats[h] = 1;
        }
    }
    return seats;
}

ModelInstance build_instance(const HierarchySpec& spec)
{
    spec.validate();
    auto counts = apportion(spec.n_objects, make_pmf(spec.fm, spec.n_hierarchies));
    std::vector<Pmf> fw;
    fw.reserve(counts.size());
    for (std::size_t n : counts)
        fw.push_back(make_pmf(spec.fw, n));
    return ModelInstance(std::move(counts), make_pmf(spec.fc, spec.n_hierarchies), std::move(fw));
}

std::vector<double> exact_pmf(const ModelInstance& inst)
{
    std::vector<double> p(inst.n_objects());
    for (std::size_t h = 0; h < inst.n_hierarchies(); ++h) {
        const Pmf& w = inst.fw(h);
        for (std::size_t j = 0; j < w.size(); ++j)
            p[inst.offset(h) + j] = inst.fc()[h] * w[j];
    }
    return p;
}

namespace {

FrequencyTable empty_table(const ModelInstance& inst)
{
    FrequencyTable t;
    t.rows.reserve(inst.n_objects());
    for (std::size_t h = 0; h < inst.n_hierarchies(); ++h)
        for (std::size_t j = 0; j < inst.counts()[h]; ++j)
            t.rows.push_back({inst.offset(h) + j + 1, h + 1, j + 1, 0.0});
    return t;
}

} // namespace

FrequencyTable simulate(const ModelInstance& inst, std::uint64_t draws, std::uint64_t seed)
{
    if (draws < 1)
        throw InvalidSpec("draws must be >= 1");
    std::vector<std::uint64_t> counts(inst.n_objects(), 0);
    Rng rng(seed);
    for (std::uint64_t t = 0; t < draws; ++t) {
        const std::size_t h = inst.fc().sample(rng);
        const std::size_t j = inst.fw(h).sample(rng);
        ++counts[inst.offset(h) + j];
    }
    FrequencyTable table = empty_table(inst);
    for (std::size_t i = 0; i < counts.size(); ++i)
        table.rows[i].count = static_cast<double>(counts[i]);
    table.total = static_cast<double>(draws);
    return table;
}

FrequencyTable expected_frequencies(const ModelInstance& inst, double draws)
{
    if (!(draws >= 1))
        throw InvalidSpec("draws must be >= 1");
    FrequencyTable table = empty_table(inst);
    for (std::size_t h = 0; h < inst.n_hierarchies(); ++h) {
        const Pmf& w = inst.fw(h);
        for (std::size_t j = 0; j < w.size(); ++j)
            table.rows[inst.offset(h) + j].count = draws * (inst.fc()[h] * w[j]);
    }
    table.total = draws;
    return table;
}

void write_csv(std::ostream& out, const FrequencyTable& table)
{
    out << "object_id,hierarchy,within_rank,count\n";
    for (const auto& r : table.rows)
        out << r.object_id << ',' << r.hierarchy << ',' << r.within_rank << ',' << detail::fmt_double(r.count)
            << '\n';
}

} // namespace hsm
