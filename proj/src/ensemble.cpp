#include "censel/ensemble.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace censel {

bool ProbeSet::contains(int column) const {
    return std::find(probes.begin(), probes.end(), column) != probes.end();
}

std::vector<int> bootstrap_rows(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    return rows;
}

Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed) {
    return ds.select_rows(bootstrap_rows(static_cast<int>(ds.rows()), seed));
}

std::pair<Dataset, ProbeSet> inject_probes(const Dataset& ds, std::uint64_t seed) {
    ProbeSet probes;
    std::vector<FeatureMeta> meta = ds.meta();
    std::vector<int> parents;
    std::map<std::string, int> categorical_group;
    int next_group = 0;
    for (Eigen::Index j = 0; j < ds.cols(); ++j) {
        const auto& m = ds.meta()[j];
        if (m.is_probe() || m.kind == FeatureKind::boolean) continue;
        int group;
        if (m.source == FeatureSource::one_hot) {
            auto [it, fresh] = categorical_group.try_emplace(m.group, next_group);
            if (fresh) ++next_group;
            group = it->second;
        } else {
            group = next_group++;
        }
        const int id = static_cast<int>(ds.cols()) + static_cast<int>(parents.size());
        parents.push_back(static_cast<int>(j));
        probes.probes.push_back(id);
        probes.parents.push_back(static_cast<int>(j));
        probes.groups.push_back(group);
        FeatureMeta pm = m;
        pm.name = "probe:" + m.name;
        pm.source = FeatureSource::probe;
        pm.parent = static_cast<int>(j);
        meta.push_back(std::move(pm));
    }
    if (probes.empty()) return {ds, probes};

    Eigen::MatrixXd x(ds.rows(), ds.cols() + static_cast<Eigen::Index>(parents.size()));
    x.leftCols(ds.cols()) = ds.x();
    for (std::size_t k = 0; k < parents.size(); ++k) x.col(ds.cols() + k) = ds.x().col(parents[k]);
    Dataset augmented(std::move(x), std::move(meta), ds.outcomes());
    return {repermute_probes(augmented, probes, seed), probes};
}

Dataset repermute_probes(const Dataset& ds, const ProbeSet& probes, std::uint64_t seed) {
    if (probes.empty()) return ds;
    const int n = static_cast<int>(ds.rows());
    Eigen::MatrixXd x = ds.x();
    std::map<int, std::vector<int>> perms;
    for (std::size_t k = 0; k < probes.probes.size(); ++k) {
        auto [it, fresh] = perms.try_emplace(probes.groups[k]);
        if (fresh) {
            it->second.resize(static_cast<std::size_t>(n));
            std::iota(it->second.begin(), it->second.end(), 0);
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(probes.groups[k])));
            std::shuffle(it->second.begin(), it->second.end(), rng);
        }
        const auto& perm = it->second;
        const auto parent = ds.x().col(probes.parents[k]);
        for (int i = 0; i < n; ++i) x(i, probes.probes[k]) = parent[perm[i]];
    }
    return Dataset(std::move(x), ds.meta(), ds.outcomes(), ds.missing_mask());
}

EnsembleRun run_ensemble(SelectorKind kind, const Dataset& ds, int replicates, bool use_probes,
                         std::uint64_t seed, const SelectorOptions& options, std::size_t workers) {
    if (replicates < 1) throw ValidationError("ensemble needs at least one replicate");
    if (ds.has_missing()) throw ValidationError("ensemble input must be imputed");

    EnsembleRun run;
    run.kind = kind;
    Dataset base = ds;
    if (use_probes) {
        auto [augmented, probes] = inject_probes(ds, derive_seed(seed, 0x9e0beULL));
        base = std::move(augmented);
        run.probes = std::move(probes);
    }
    run.universe = static_cast<int>(base.cols());
    run.results.resize(static_cast<std::size_t>(replicates));
    run.seeds.resize(static_cast<std::size_t>(replicates));
    for (int b = 0; b < replicates; ++b)
        run.seeds[b] = derive_seed(seed, 0xb007ULL, static_cast<std::uint64_t>(b));

    const int n = static_cast<int>(base.rows());
    parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t b) {
        const std::uint64_t s = run.seeds[b];
        try {
            Dataset sample = base.select_rows(bootstrap_rows(n, derive_seed(s, 1)));
            if (run.probes && !run.probes->empty())
                sample = repermute_probes(sample, *run.probes, derive_seed(s, 2));
            run.results[b] = run_selector(kind, sample, derive_seed(s, 3), options);
        } catch (const Error&) {
            SelectionResult empty;
            empty.sparse = is_sparse(kind);
            empty.failed = true;
            empty.scores.assign(static_cast<std::size_t>(run.universe), 0.0);
            run.results[b] = std::move(empty);
        }
    });
    run.failed = static_cast<int>(std::count_if(run.results.begin(), run.results.end(),
                                                [](const SelectionResult& r) { return r.failed; }));
    if (5 * run.failed > replicates)
        throw FitError(std::to_string(run.failed) + " of " + std::to_string(replicates) +
                       " bootstrap replicates failed");
    return run;
}

int mean_subset_length(const EnsembleRun& run) {
    if (run.results.empty()) return 1;
    long long total = 0;
    for (const auto& r : run.results) {
        if (r.sparse || r.failed) {
            total += static_cast<long long>(r.selected.size());
        } else {
            total += std::count_if(r.scores.begin(), r.scores.end(), [](double s) { return s > 0.5; });
        }
    }
    const long long b = static_cast<long long>(run.results.size());
    const long long k = (2 * total + b) / (2 * b);
    return static_cast<int>(std::max(1LL, k));
}

}  // namespace censel
