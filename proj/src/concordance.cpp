#include <algorithm>
#include <numeric>

#include "censel/coxnet.hpp"

namespace censel {

namespace {

// Fenwick tree over compressed risk ranks.
class CountTree {
public:
    explicit CountTree(std::size_t size) : tree_(size + 1, 0.0) {}
    void add(std::size_t rank) {
        for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += 1.0;
    }
    // Number of inserted ranks strictly below `rank`.
    double below(std::size_t rank) const {
        double s = 0.0;
        for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<double> tree_;
};

}  // namespace

ConcordanceCounts concordance_counts(std::span<const double> risk,
                                     std::span<const SurvivalOutcome> outcomes) {
    if (risk.size() != outcomes.size()) throw ValidationError("risk and outcome lengths differ");
    const std::size_t n = risk.size();

    std::vector<double> levels(risk.begin(), risk.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i)
        rank[i] = static_cast<std::size_t>(
            std::lower_bound(levels.begin(), levels.end(), risk[i]) - levels.begin());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return outcomes[a].time > outcomes[b].time; });

    // Walk from the longest time down; the tree holds every subject with a
    // strictly longer time than the current tie group.
    CountTree tree(levels.size());
    ConcordanceCounts counts;
    double inserted = 0.0;
    for (std::size_t g = 0; g < n;) {
        std::size_t end = g;
        while (end < n && outcomes[order[end]].time == outcomes[order[g]].time) ++end;
        for (std::size_t k = g; k < end; ++k) {
            const std::size_t i = order[k];
            if (!outcomes[i].event) continue;
            const double lower = tree.below(rank[i]);
            const double upto = tree.below(rank[i] + 1);
            counts.comparable += inserted;
            counts.concordant += lower;
            counts.tied_risk += upto - lower;
        }
        for (std::size_t k = g; k < end; ++k) {
            tree.add(rank[order[k]]);
            inserted += 1.0;
        }
        g = end;
    }
    return counts;
}

double concordance_index(std::span<const double> risk, std::span<const SurvivalOutcome> outcomes) {
    const auto c = concordance_counts(risk, outcomes);
    if (c.comparable == 0) throw ValidationError("no comparable pairs");
    return (c.concordant + 0.5 * c.tied_risk) / c.comparable;
}

}  // namespace censel
