#pragma once

#include <optional>
#include <string>
#include <vector>

#include "censel/ensemble.hpp"
#include "censel/selectors.hpp"

namespace censel {

enum class AggregatorKind { mr, mw, rra, ta, ma };

std::string to_string(AggregatorKind kind);
AggregatorKind aggregator_from_string(const std::string& name);
/// RRA, TA and MedRank select a subset on their own.
inline bool has_intrinsic_threshold(AggregatorKind kind) {
    return kind == AggregatorKind::rra || kind == AggregatorKind::ta || kind == AggregatorKind::ma;
}

/// Feature ids ordered by (score desc, id asc). Sparse results list only the
/// features they selected.
struct RankedList {
    std::vector<int> ids;
    std::vector<double> scores;
    int universe = 0;

    static RankedList from(const SelectionResult& res);
    std::size_t size() const { return ids.size(); }
};

struct AggregateResult {
    AggregatorKind kind = AggregatorKind::mr;
    std::vector<int> order;      // consensus ordering, best first
    std::vector<double> score;   // per feature id
    bool higher_is_better = true;
    std::optional<std::vector<int>> selected;  // ascending ids
    std::optional<std::vector<double>> p_values;
    // Replicates in which each feature had a positive importance.
    std::vector<int> selection_count;
    // Sequential-access depth at which TA/MedRank stopped.
    int stop_depth = 0;

    int universe() const { return static_cast<int>(score.size()); }
    /// Scores flipped where needed so that larger always means better.
    std::vector<double> oriented_scores() const;
};

AggregateResult mean_rank(const std::vector<Ranking>& lists);
AggregateResult mean_weight(const std::vector<SelectionResult>& lists);

/// P(k-th smallest of B iid uniforms <= x) = sum_{l>=k} C(B,l) x^l (1-x)^(B-l).
double beta_order_tail(int k, int total, double x);

/// Minimum order-statistic probability over a feature's normalized ranks.
double rra_rho(std::vector<double> normalized_ranks);

/// Robust rank aggregation. p = min(1, rho * correction) with correction
/// defaulting to the number of lists; features with p < alpha are selected.
AggregateResult rra(const std::vector<Ranking>& lists, double alpha = 0.05,
                    std::optional<double> correction = std::nullopt);

/// Fagin's threshold algorithm with summed scores. Absent features score 0 on
/// random access. Features tied with the k-th total are kept.
AggregateResult threshold_algorithm(const std::vector<RankedList>& lists, int k);

/// Emits a feature once it has been seen in more than quorum * B lists.
AggregateResult medrank(const std::vector<RankedList>& lists, int k, double quorum = 0.2);

struct AggregateOptions {
    double rra_alpha = 0.05;
    double medrank_quorum = 0.2;
};

AggregateResult aggregate(AggregatorKind kind, const EnsembleRun& run,
                          const AggregateOptions& options = {});

}  // namespace censel
