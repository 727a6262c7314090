#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "censel/harness.hpp"
#include "helpers.hpp"

using namespace censel;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.selectors = {SelectorKind::uni, SelectorKind::lasso};
    cfg.aggregators = {AggregatorKind::mr, AggregatorKind::rra};
    cfg.thresholds = {ThresholdKind::fixed(0.25), ThresholdKind::of(ThresholdType::kde),
                      ThresholdKind::of(ThresholdType::best_probe)};
    cfg.replicates = 4;
    cfg.k_folds = 3;
    cfg.repeats = 1;
    cfg.seed = 17;
    return cfg;
}

const Dataset& small_data() {
    static const Dataset ds =
        generate_synthetic(fixtures::planted(120, 8, {{0, 1.2}, {1, -1.2}}, 0.3, 137)).data;
    return ds;
}

const ExperimentResult& small_result() {
    static const ExperimentResult r = run_experiment(small_config(), small_data(), 1);
    return r;
}

}  // namespace

TEST(Cells, DefaultGridSize) {
    const auto cells = enumerate_cells(ExperimentConfig{});
    // UNI: 6 + 6 + 3 ensemble cells and 4 individual rows; sparse kinds: 15 + 1.
    EXPECT_EQ(cells.size(), 19u + 3 * 16u);
    for (const auto& c : cells) EXPECT_NO_THROW(validate_cell(c));
}

TEST(Cells, InvalidPairings) {
    EXPECT_THROW(validate_cell({SelectorKind::uni, AggregatorKind::rra, ThresholdKind::fixed(0.1)}),
                 ValidationError);
    EXPECT_THROW(validate_cell({SelectorKind::uni, AggregatorKind::mr, ThresholdKind::of(ThresholdType::intrinsic)}),
                 ValidationError);
    EXPECT_THROW(validate_cell({SelectorKind::lasso, std::nullopt, ThresholdKind::fixed(0.1)}), ValidationError);
    EXPECT_THROW(validate_cell({SelectorKind::uni, std::nullopt, ThresholdKind::of(ThresholdType::quantile75)}),
                 ValidationError);
}

TEST(Cells, LabelsAndOrder) {
    const auto cells = enumerate_cells(small_config());
    ASSERT_EQ(cells.size(), 11u);
    EXPECT_EQ(cells.front().label(), "UNI/MR/fixed-0.25");
    EXPECT_EQ(cells.back().label(), "LASSO/individual/none");
}

TEST(Individual, SparseSelectorGivesOneRow) {
    const auto cfg = small_config();
    const FoldPlan plan = make_folds(static_cast<int>(small_data().rows()), 3, 1, 5);
    const auto rows = run_individual(SelectorKind::lasso, small_data(), plan,
                                     {ThresholdKind::fixed(0.10), ThresholdKind::fixed(0.25),
                                      ThresholdKind::of(ThresholdType::kde)},
                                     cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].cell.threshold.type, ThresholdType::none);
}

TEST(Individual, FilterGetsOneRowPerFixedThresholdAndKde) {
    const auto cfg = small_config();
    const FoldPlan plan = make_folds(static_cast<int>(small_data().rows()), 3, 1, 5);
    const auto rows = run_individual(SelectorKind::uni, small_data(), plan,
                                     {ThresholdKind::fixed(0.10), ThresholdKind::fixed(0.25),
                                      ThresholdKind::fixed(0.33), ThresholdKind::of(ThresholdType::kde),
                                      ThresholdKind::of(ThresholdType::quantile75)},
                                     cfg);
    EXPECT_EQ(rows.size(), 4u);
}

TEST(Experiment, CellRunMatchesGridRun) {
    const auto cfg = small_config();
    const auto& grid = small_result();
    const FoldPlan plan = make_folds(static_cast<int>(small_data().rows()), cfg.k_folds, cfg.repeats,
                                     derive_seed(cfg.seed, 0xF0));
    for (std::size_t i : {0u, 2u, 3u, 4u, 5u, 6u, 9u, 10u}) {
        const ModelResult single = run_cell(grid.results[i].cell, small_data(), plan, cfg);
        EXPECT_EQ(single, grid.results[i]) << grid.results[i].cell.label();
    }
}

TEST(Experiment, WorkersDoNotChangeTheResult) {
    EXPECT_EQ(run_experiment(small_config(), small_data(), 3), small_result());
}

TEST(Experiment, ResultsAreWellFormed) {
    const auto& r = small_result();
    ASSERT_EQ(r.feature_names.size(), 8u);
    for (const auto& m : r.results) {
        EXPECT_FALSE(m.failed) << m.cell.label();
        EXPECT_EQ(m.folds.size(), 3u);
        EXPECT_GE(m.distance, 0.0);
        EXPECT_LE(m.distance, std::sqrt(2.0));
        for (const auto& f : m.folds) {
            EXPECT_TRUE(std::is_sorted(f.subset.begin(), f.subset.end()));
            for (int id : f.subset) EXPECT_LT(id, 8);
            if (f.subset.empty()) EXPECT_EQ(f.cindex, 0.5);
        }
    }
}

TEST(Experiment, RejectsBadConfig) {
    auto cfg = small_config();
    cfg.replicates = 0;
    EXPECT_THROW(run_experiment(cfg, small_data()), ValidationError);
    cfg = small_config();
    cfg.k_folds = 1;
    EXPECT_THROW(run_experiment(cfg, small_data()), ValidationError);
}

TEST(Finalize, FailedFoldsAreExcluded) {
    ModelResult r;
    r.folds = {{0.7, false, "ok", "", {0, 1}}, {0.0, true, "", "boom", {}}, {0.6, false, "ok", "", {0, 1}},
               {0.8, false, "ok", "", {0, 1}}, {0.9, false, "ok", "", {0, 1}}};
    finalize_result(r, 5);
    EXPECT_EQ(r.n_failed_folds, 1);
    EXPECT_FALSE(r.failed);
    EXPECT_DOUBLE_EQ(r.mean_cindex, 0.75);
    EXPECT_DOUBLE_EQ(r.cw_rel, 1.0);
    r.folds[2].failed = true;
    finalize_result(r, 5);
    EXPECT_TRUE(r.failed);
}

TEST(Finalize, AllEmptySubsets) {
    ModelResult r;
    r.folds = {{0.5, false, "ok", "", {}}, {0.5, false, "ok", "", {}}};
    finalize_result(r, 4);
    EXPECT_TRUE(r.all_empty);
    EXPECT_EQ(r.cw_rel, 0.0);
    EXPECT_DOUBLE_EQ(r.distance, 0.5);
}

TEST(Evaluate, EmptySubsetIsTheNullModel) {
    const FoldPlan plan = make_folds(static_cast<int>(small_data().rows()), 3, 1, 1);
    const PreparedFold fold = prepare_fold(small_data(), plan, 0);
    EXPECT_EQ(evaluate_subset(fold, {}, 1), 0.5);
    EXPECT_GT(evaluate_subset(fold, {0, 1}, 1), 0.6);
}

TEST(Summaries, ThresholdTableWithOneCellEach) {
    ModelResult a, b;
    a.cell = {SelectorKind::uni, AggregatorKind::mr, ThresholdKind::fixed(0.1)};
    a.distance = 0.9;
    b.cell = {SelectorKind::uni, AggregatorKind::mr, ThresholdKind::of(ThresholdType::kde)};
    b.distance = 1.1;
    const auto rows = rank_thresholds({a, b});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].threshold, "kde");
    EXPECT_DOUBLE_EQ(rows[0].mean_distance, 1.1);
    EXPECT_DOUBLE_EQ(rows[1].mean_distance, 0.9);
}

TEST(Summaries, ConsensusOfOneModelIsItsMajority) {
    const auto& r = small_result();
    const auto report = consensus_features(r, 1, 0.8);
    ASSERT_EQ(report.models.size(), 1u);
    const auto best = std::max_element(r.results.begin(), r.results.end(),
                                       [](const ModelResult& a, const ModelResult& b) { return a.distance < b.distance; });
    EXPECT_EQ(report.features, majority_features(*best));
    EXPECT_FALSE(report.truncated);
}

TEST(Summaries, FullFrequencyIsAnIntersection) {
    const auto& r = small_result();
    const auto report = consensus_features(r, 5, 1.0);
    for (const auto& row : report.indicators)
        EXPECT_TRUE(std::all_of(row.begin(), row.end(), [](bool b) { return b; }));
    EXPECT_TRUE(consensus_features(r, 100, 0.8).truncated);
    EXPECT_THROW(consensus_features(r, 0, 0.8), ValidationError);
}

TEST(Summaries, PlantedFeaturesReachTheConsensus) {
    ExperimentConfig cfg;
    cfg.selectors = {SelectorKind::uni, SelectorKind::lasso};
    cfg.aggregators = {AggregatorKind::mr, AggregatorKind::mw, AggregatorKind::rra};
    cfg.thresholds = {ThresholdKind::fixed(0.25), ThresholdKind::of(ThresholdType::kde),
                      ThresholdKind::of(ThresholdType::best_probe)};
    cfg.replicates = 10;
    cfg.k_folds = 3;
    cfg.repeats = 1;
    int exact = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto synth = generate_synthetic(
            fixtures::planted(300, 30, {{0, 1.0}, {1, -1.0}, {2, 1.0}, {3, -1.0}, {4, 1.0}}, 0.3, 1000 + seed));
        cfg.seed = seed;
        const auto report = consensus_features(run_experiment(cfg, synth.data), 10, 0.8);
        exact += report.features == std::vector<int>{0, 1, 2, 3, 4};
    }
    EXPECT_GE(exact, 8);
}

TEST(Reports, JsonRoundTrip) {
    const auto& r = small_result();
    EXPECT_EQ(parse_report_json(report_json(r)), r);
    EXPECT_THROW(parse_report_json("{not json"), Error);
}

TEST(Reports, CsvHasOneRowPerCell) {
    const auto& r = small_result();
    std::istringstream csv(report_csv(r.results));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "selector,aggregator,threshold,mean_cindex,cw_rel,distance,n_failed_folds");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    }
    EXPECT_EQ(rows, r.results.size());
}

TEST(Reports, ScatterHasOneMarkerPerCell) {
    const auto& r = small_result();
    const std::string svg = scatter_svg(r.results);
    std::size_t markers = 0;
    for (auto pos = svg.find("class=\"marker\""); pos != std::string::npos;
         pos = svg.find("class=\"marker\"", pos + 1))
        ++markers;
    EXPECT_EQ(markers, r.results.size());
    EXPECT_EQ(svg.rfind("</svg>"), svg.size() - 7);
}
