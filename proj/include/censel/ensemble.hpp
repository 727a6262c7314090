#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "censel/data.hpp"
#include "censel/selectors.hpp"

namespace censel {

/// Permuted copies of eligible features appended to a dataset. Boolean
/// features never get probes; the one-hot columns of a categorical variable
/// are permuted jointly.
struct ProbeSet {
    std::vector<int> probes;   // probe column ids
    std::vector<int> parents;  // parent column id, parallel to `probes`
    std::vector<int> groups;   // probes sharing a group share a permutation

    bool empty() const { return probes.empty(); }
    bool contains(int column) const;
    bool operator==(const ProbeSet&) const = default;
};

struct EnsembleRun {
    SelectorKind kind = SelectorKind::uni;
    std::vector<SelectionResult> results;  // one per bootstrap replicate
    std::vector<std::uint64_t> seeds;
    std::optional<ProbeSet> probes;
    int universe = 0;  // columns scored, probes included
    int failed = 0;

    int replicates() const { return static_cast<int>(results.size()); }
    bool operator==(const EnsembleRun&) const = default;
};

std::vector<int> bootstrap_rows(int n, std::uint64_t seed);
Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed);

std::pair<Dataset, ProbeSet> inject_probes(const Dataset& ds, std::uint64_t seed);

/// Redraws every probe column as a fresh permutation of its parent column.
Dataset repermute_probes(const Dataset& ds, const ProbeSet& probes, std::uint64_t seed);

/// B bootstrap replicates of one selector. Replicate i draws only from
/// derive_seed(seed, i), so results do not depend on `workers`.
EnsembleRun run_ensemble(SelectorKind kind, const Dataset& ds, int replicates, bool use_probes,
                         std::uint64_t seed, const SelectorOptions& options = {},
                         std::size_t workers = 1);

/// Rounded (half up) mean selected-subset size, at least 1. For the univariate
/// filter a feature counts when its C-index exceeds 0.5.
int mean_subset_length(const EnsembleRun& run);

}  // namespace censel
