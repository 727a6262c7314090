#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "censel/ensemble.hpp"
#include "helpers.hpp"

using namespace censel;

TEST(Bootstrap, DistinctFractionNearExpectation) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto rows = bootstrap_rows(500, seed);
        ASSERT_EQ(rows.size(), 500u);
        total += static_cast<double>(std::set<int>(rows.begin(), rows.end()).size()) / 500.0;
    }
    EXPECT_NEAR(total / 100.0, 1.0 - std::exp(-1.0), 0.02);
}

TEST(Bootstrap, DeterministicAndDegenerate) {
    EXPECT_EQ(bootstrap_rows(50, 7), bootstrap_rows(50, 7));
    EXPECT_NE(bootstrap_rows(50, 7), bootstrap_rows(50, 8));
    EXPECT_EQ(bootstrap_rows(1, 3), std::vector<int>{0});
    Eigen::MatrixXd x(1, 1);
    x << 4.0;
    const Dataset one = fixtures::make_dataset(x, {2.0}, {true});
    const Dataset sample = bootstrap_sample(one, 11);
    EXPECT_EQ(sample, one);
}

TEST(Probes, PermutationOfParentColumn) {
    Eigen::MatrixXd x(3, 1);
    x << 1, 2, 3;
    const Dataset ds = fixtures::make_dataset(x, {1, 2, 3}, {true, false, true});
    const auto [augmented, probes] = inject_probes(ds, 5);
    ASSERT_EQ(probes.probes, std::vector<int>{1});
    EXPECT_EQ(probes.parents, std::vector<int>{0});
    EXPECT_TRUE(augmented.meta()[1].is_probe());
    EXPECT_EQ(augmented.meta()[1].parent, 0);
    std::vector<double> values(augmented.x().col(1).data(), augmented.x().col(1).data() + 3);
    std::sort(values.begin(), values.end());
    EXPECT_EQ(values, (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(augmented.x().col(0), ds.x().col(0));
}

TEST(Probes, BooleansAreSkipped) {
    Eigen::MatrixXd x(4, 2);
    x << 0, 1, 1, 0, 1, 1, 0, 0;
    Dataset plain = fixtures::make_dataset(x, {1, 2, 3, 4}, {true, true, false, true});
    auto meta = plain.meta();
    for (auto& m : meta) m.kind = FeatureKind::boolean;
    const Dataset ds(x, meta, plain.outcomes());
    const auto [augmented, probes] = inject_probes(ds, 1);
    EXPECT_TRUE(probes.empty());
    EXPECT_EQ(augmented.cols(), 2);
}

TEST(Probes, OneHotColumnsShareAPermutation) {
    Eigen::MatrixXd x(6, 2);
    x << 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0;
    Dataset plain = fixtures::make_dataset(x, {1, 2, 3, 4, 5, 6}, {true, true, true, true, true, true});
    auto meta = plain.meta();
    for (auto& m : meta) {
        m.kind = FeatureKind::categorical;
        m.source = FeatureSource::one_hot;
        m.group = "site";
    }
    const Dataset ds(x, meta, plain.outcomes());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [augmented, probes] = inject_probes(ds, seed);
        ASSERT_EQ(probes.probes.size(), 2u);
        EXPECT_EQ(probes.groups[0], probes.groups[1]);
        // A joint permutation keeps each row a valid one-hot code.
        for (int i = 0; i < 6; ++i) EXPECT_LE(augmented.x()(i, 2) + augmented.x()(i, 3), 1.0);
    }
}

TEST(Probes, UncorrelatedWithParentOnAverage) {
    std::mt19937_64 rng(61);
    const Dataset ds = fixtures::random_instance(rng, 500, 1);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [augmented, probes] = inject_probes(ds, seed);
        const Eigen::VectorXd a = augmented.x().col(0).array() - augmented.x().col(0).mean();
        const Eigen::VectorXd b = augmented.x().col(1).array() - augmented.x().col(1).mean();
        total += a.dot(b) / (a.norm() * b.norm());
    }
    EXPECT_NEAR(total / 100.0, 0.0, 0.1);
}

TEST(Probes, RepermuteChangesOnlyProbeColumns) {
    std::mt19937_64 rng(62);
    const Dataset ds = fixtures::random_instance(rng, 40, 3);
    const auto [augmented, probes] = inject_probes(ds, 1);
    const Dataset again = repermute_probes(augmented, probes, 2);
    EXPECT_EQ(again.x().leftCols(3), augmented.x().leftCols(3));
    EXPECT_NE(again.x().rightCols(3), augmented.x().rightCols(3));
}

TEST(Ensemble, WorkersDoNotChangeTheRun) {
    const auto synth = generate_synthetic(fixtures::planted(150, 8, {{0, 1.0}, {3, -1.0}}, 0.4, 67));
    for (auto kind : {SelectorKind::uni, SelectorKind::lasso, SelectorKind::cboost}) {
        const auto serial = run_ensemble(kind, synth.data, 6, true, 99, {}, 1);
        const auto threaded = run_ensemble(kind, synth.data, 6, true, 99, {}, 4);
        EXPECT_EQ(serial, threaded) << to_string(kind);
        EXPECT_EQ(serial.universe, 16);
        ASSERT_TRUE(serial.probes.has_value());
        EXPECT_EQ(serial.probes->probes.size(), 8u);
    }
}

TEST(Ensemble, LassoFindsStrongFeatureInNearlyEveryReplicate) {
    const auto synth = generate_synthetic(fixtures::planted(300, 15, {{4, 1.5}}, 0.3, 71));
    const auto run = run_ensemble(SelectorKind::lasso, synth.data, 20, false, 5);
    int hits = 0;
    for (const auto& r : run.results) hits += r.scores[4] > 0.0;
    EXPECT_GE(hits, 18);
    EXPECT_EQ(run.failed, 0);
}

TEST(Ensemble, RejectsBadInput) {
    std::mt19937_64 rng(73);
    const Dataset ds = fixtures::random_instance(rng, 20, 2);
    EXPECT_THROW(run_ensemble(SelectorKind::uni, ds, 0, false, 1), ValidationError);
}

namespace {

EnsembleRun sparse_run(const std::vector<int>& lengths) {
    EnsembleRun run;
    run.kind = SelectorKind::lasso;
    run.universe = 10;
    for (int len : lengths) {
        SelectionResult r;
        r.sparse = true;
        r.scores.assign(10, 0.0);
        for (int j = 0; j < len; ++j) {
            r.scores[j] = 1.0;
            r.selected.push_back(j);
        }
        run.results.push_back(r);
    }
    return run;
}

}  // namespace

TEST(MeanSubsetLength, Examples) {
    EXPECT_EQ(mean_subset_length(sparse_run({3, 5})), 4);
    EXPECT_EQ(mean_subset_length(sparse_run({0, 0, 0})), 1);
    EXPECT_EQ(mean_subset_length(sparse_run({2, 3})), 3);
}

TEST(MeanSubsetLength, UnivariateCountsAboveChance) {
    EnsembleRun run;
    SelectionResult r;
    r.scores = {0.7, 0.5, 0.6, 0.4};
    run.results = {r, r};
    EXPECT_EQ(mean_subset_length(run), 2);
}
