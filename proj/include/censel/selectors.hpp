#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "censel/coxnet.hpp"
#include "censel/data.hpp"

namespace censel {

enum class SelectorKind { uni, lasso, enet, cboost };

std::string to_string(SelectorKind kind);
SelectorKind selector_from_string(const std::string& name);
inline bool is_sparse(SelectorKind kind) { return kind != SelectorKind::uni; }

/// Tuning knobs shared by every selector.
struct SelectorOptions {
    double enet_alpha = 0.5;
    int lambda_points = 20;
    double lambda_ratio = 0.01;
    int cv_folds = 3;
    BoostConfig boost;
    FitOptions fit;
};

struct SelectionResult {
    std::vector<double> scores;  // non-negative importance per feature
    std::vector<int> selected;   // ascending feature ids
    bool sparse = false;
    bool failed = false;

    bool operator==(const SelectionResult&) const = default;
};

/// Ranks with 1 = best; tied scores share the mean of the positions they occupy.
struct Ranking {
    std::vector<double> rank;
};

SelectionResult run_selector(SelectorKind kind, const Dataset& ds, std::uint64_t seed,
                             const SelectorOptions& options = {});

/// Penalty chosen by internal CV over a log grid from lambda_max down, maximizing
/// mean held-out C-index.
double choose_lambda_cv(const Dataset& ds, double alpha, std::uint64_t seed,
                        const SelectorOptions& options = {});

Ranking rank_scores(const std::vector<double>& scores);
Ranking rank_features(const SelectionResult& res);

/// Keeps the ceil(fraction * p) best-ranked features plus anything tied with
/// the last kept rank. Result is sorted by feature id.
std::vector<int> apply_fixed_threshold(const Ranking& ranking, double fraction);

}  // namespace censel
