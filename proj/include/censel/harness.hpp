#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "censel/aggregate.hpp"
#include "censel/data.hpp"
#include "censel/selectors.hpp"
#include "censel/threshold.hpp"

namespace censel {

/// One point of the experimental grid. Individual cells run the selector once
/// per training fold, without bootstrap or aggregation.
struct CellId {
    SelectorKind selector = SelectorKind::uni;
    std::optional<AggregatorKind> aggregator;
    ThresholdKind threshold;

    bool individual() const { return !aggregator.has_value(); }
    std::string aggregator_label() const;
    std::string label() const;  // "LASSO/MR/fixed-0.10"
    bool operator==(const CellId&) const = default;
};

struct ExperimentConfig {
    std::vector<SelectorKind> selectors{SelectorKind::uni, SelectorKind::lasso, SelectorKind::enet,
                                        SelectorKind::cboost};
    std::vector<AggregatorKind> aggregators{AggregatorKind::mr, AggregatorKind::mw, AggregatorKind::rra,
                                            AggregatorKind::ta, AggregatorKind::ma};
    // Applied after MR and MW. RRA, TA and MedRank always use their own selection.
    std::vector<ThresholdKind> thresholds{ThresholdKind::fixed(0.10), ThresholdKind::fixed(0.25),
                                          ThresholdKind::fixed(0.33),
                                          ThresholdKind::of(ThresholdType::quantile75),
                                          ThresholdKind::of(ThresholdType::kde),
                                          ThresholdKind::of(ThresholdType::best_probe)};
    int replicates = 50;
    int k_folds = 5;
    int repeats = 5;
    std::uint64_t seed = 1;
    bool include_individual = true;
    AggregateOptions aggregate;
    SelectorOptions selector;
};

/// Throws ValidationError for pairings the grid does not allow.
void validate_cell(const CellId& cell);

/// Every cell of the grid in report order: per selector, the ensemble cells
/// followed by its individual rows.
std::vector<CellId> enumerate_cells(const ExperimentConfig& cfg);

struct FoldRecord {
    double cindex = 0.0;  // 0 when the fold failed
    bool failed = false;
    std::string flag;     // threshold flag, "ok" when unremarkable
    std::string error;
    std::vector<int> subset;  // original feature ids

    bool operator==(const FoldRecord&) const = default;
};

struct ModelResult {
    CellId cell;
    double mean_cindex = 0.0;
    double cw_rel = 0.0;
    double distance = 0.0;
    std::vector<FoldRecord> folds;
    int n_failed_folds = 0;
    bool failed = false;     // more than 20% of folds failed
    bool all_empty = false;  // every fold subset empty

    bool operator==(const ModelResult&) const = default;
};

struct ExperimentResult {
    std::vector<std::string> feature_names;
    std::vector<ModelResult> results;

    bool operator==(const ExperimentResult&) const = default;
};

/// Training/test split of one fold after imputation and normalization, both
/// fitted on the training rows.
struct PreparedFold {
    Dataset train;
    Dataset test;
};

PreparedFold prepare_fold(const Dataset& ds, const FoldPlan& plan, int fold);

/// Ridge model fitted on `subset` of the training rows, scored by C-index on
/// the test rows. An empty subset scores 0.5.
double evaluate_subset(const PreparedFold& fold, const std::vector<int>& subset, std::uint64_t seed);

/// Means over successful folds, stability over their subsets, and the
/// combined distance. `universe` is the number of original features.
void finalize_result(ModelResult& result, int universe);

ModelResult run_cell(const CellId& cell, const Dataset& ds, const FoldPlan& plan,
                     const ExperimentConfig& cfg);

std::vector<ModelResult> run_individual(SelectorKind kind, const Dataset& ds, const FoldPlan& plan,
                                        const std::vector<ThresholdKind>& thresholds,
                                        const ExperimentConfig& cfg);

/// Full grid. Ensembles are shared between cells that differ only in the
/// aggregator or threshold; `workers` never changes the result.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds, std::size_t workers = 1);

struct ThresholdRow {
    std::string threshold;
    double mean_distance = 0.0;
    int cells = 0;
};

/// Mean distance per threshold over the ensemble cells, best first.
std::vector<ThresholdRow> rank_thresholds(const std::vector<ModelResult>& results);

/// Features present in more than half of a model's successful fold subsets.
std::vector<int> majority_features(const ModelResult& result);

struct ConsensusReport {
    std::vector<int> features;
    std::vector<std::string> names;
    std::vector<std::string> models;              // top cells, best first
    std::vector<std::vector<bool>> indicators;    // [feature][model]
    int top_t = 0;
    double freq = 0.0;
    bool truncated = false;  // fewer cells than top_t were available
};

ConsensusReport consensus_features(const ExperimentResult& experiment, int top_t = 10, double freq = 0.8);

// Report files.
std::string report_csv(const std::vector<ModelResult>& results);
std::string report_json(const ExperimentResult& experiment);
ExperimentResult parse_report_json(const std::string& text);
std::string scatter_svg(const std::vector<ModelResult>& results);

void emit_report(const ExperimentResult& experiment, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path);
void emit_scatter(const std::vector<ModelResult>& results, const std::filesystem::path& path);

}  // namespace censel
