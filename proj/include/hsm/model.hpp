#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hsm/dist.hpp"

namespace hsm {

/// Parameters of a Hierarchical Selection Model.
///
/// Hierarchy 1 is the top: it should hold the fewest objects (fm ascending)
/// and be selected most often (fc descending).
struct HierarchySpec {
    std::size_t n_objects = 0;
    std::size_t n_hierarchies = 0;
    DistributionSpec fm = DistributionSpec::triangular(1.0, Orientation::ascending);
    DistributionSpec fw = DistributionSpec::uniform();
    DistributionSpec fc = DistributionSpec::uniform();

    /// Throws InvalidSpec unless 1 <= M <= N; warns when M > N/10.
    void validate() const;
};

/// Concrete model: object counts per hierarchy and the two selection stages.
///
/// Object ids are assigned hierarchy by hierarchy: hierarchy 1 holds ids
/// 1..n_1, hierarchy 2 holds n_1+1..n_1+n_2, and so on; within a hierarchy
/// ids follow the within-rank.
class ModelInstance {
public:
    ModelInstance(std::vector<std::size_t> counts, Pmf fc, std::vector<Pmf> fw);

    std::size_t n_objects() const noexcept { return n_objects_; }
    std::size_t n_hierarchies() const noexcept { return counts_.size(); }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    const Pmf& fc() const noexcept { return fc_; }
    const Pmf& fw(std::size_t h) const { return fw_.at(h); }

    /// Zero-based offset of hierarchy h's first object.
    std::size_t offset(std::size_t h) const { return offsets_.at(h); }

private:
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> offsets_;
    Pmf fc_;
    std::vector<Pmf> fw_;
    std::size_t n_objects_ = 0;
};

/// Largest-remainder apportionment of `total` seats by `shares`, ties to the
/// lower index; afterwards every zero entry is raised to 1 by taking a seat
/// from the (first) largest entry. Requires total >= shares.size().
std::vector<std::size_t> apportion(std::size_t total, const Pmf& shares);

ModelInstance build_instance(const HierarchySpec& spec);

/// Selection probability of every object, indexed by zero-based object id.
std::vector<double> exact_pmf(const ModelInstance& inst);

struct FrequencyRow {
    std::size_t object_id = 0;   // 1-based
    std::size_t hierarchy = 0;   // 1-based
    std::size_t within_rank = 0; // 1-based
    double count = 0;
};

struct FrequencyTable {
    std::vector<FrequencyRow> rows; // sorted by object_id, one per object
    double total = 0;
};

/// T two-step draws (hierarchy, then within-rank); fixed selection
/// probabilities, no reinforcement. Deterministic in (inst, draws, seed).
FrequencyTable simulate(const ModelInstance& inst, std::uint64_t draws, std::uint64_t seed);

/// Noise-free counterpart of simulate: count = draws * exact probability.
FrequencyTable expected_frequencies(const ModelInstance& inst, double draws);

/// CSV `object_id,hierarchy,within_rank,count`.
void write_csv(std::ostream& out, const FrequencyTable& table);

} // namespace hsm
