#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "censel/data.hpp"
#include "censel/selectors.hpp"
#include "helpers.hpp"

using namespace censel;
using censel::fixtures::make_dataset;

namespace {

Dataset parse(const std::string& text, const CsvOptions& opts = {}) {
    std::istringstream in(text);
    return parse_csv(in, opts);
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Csv, CategoricalWithThreeLevelsBecomesTwoOneHotColumns) {
    const Dataset ds = parse("time,event,site\n1,1,a\n2,0,b\n3,1,c\n4,1,a\n");
    ASSERT_EQ(ds.cols(), 2);
    EXPECT_EQ(ds.meta()[0].name, "site=b");
    EXPECT_EQ(ds.meta()[1].name, "site=c");
    EXPECT_EQ(ds.meta()[0].source, FeatureSource::one_hot);
    EXPECT_EQ(ds.meta()[0].group, "site");
    EXPECT_EQ(ds.x()(1, 0), 1.0);
    EXPECT_EQ(ds.x()(2, 1), 1.0);
    EXPECT_EQ(ds.x().row(0).sum(), 0.0);
}

TEST(Csv, ColumnKindsAndOutcomes) {
    const Dataset ds = parse(
        "age,smoker,flag,time,event\n"
        "50.5,0,TRUE,3.5,1\n"
        "61,1,FALSE,2,0\n"
        "47,1,true,7,TRUE\n");
    ASSERT_EQ(ds.cols(), 3);
    EXPECT_EQ(ds.meta()[0].kind, FeatureKind::continuous);
    EXPECT_EQ(ds.meta()[1].kind, FeatureKind::boolean);
    EXPECT_EQ(ds.meta()[2].kind, FeatureKind::boolean);
    EXPECT_EQ(ds.x()(0, 2), 1.0);
    EXPECT_EQ(ds.x()(1, 2), 0.0);
    EXPECT_EQ(ds.outcomes()[0], (SurvivalOutcome{3.5, true}));
    EXPECT_EQ(ds.outcomes()[1], (SurvivalOutcome{2.0, false}));
    EXPECT_TRUE(ds.outcomes()[2].event);
    EXPECT_EQ(ds.events(), 2);
    EXPECT_NEAR(ds.censoring_rate(), 1.0 / 3.0, 1e-15);
}

TEST(Csv, ZeroTimeNamesTheRow) {
    const auto msg = message_of([] { parse("x,time,event\n1,2,1\n2,0,1\n"); });
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_THROW(parse("x,time,event\n1,2,1\n2,0,1\n"), ValidationError);
}

TEST(Csv, MalformedRowsAreParseErrors) {
    EXPECT_THROW(parse("x,time,event\n1,2,1\n2,3\n"), ParseError);
    EXPECT_THROW(parse("x,time,event\n1,2,1\n2,abc,1\n"), ParseError);
    EXPECT_THROW(parse("x,time,event\n1,2,1\n2,3,2\n"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_NE(message_of([] { parse("x,time,event\n1,2,1\n1,2,1\n2,3\n"); }).find("row 3"), std::string::npos);
}

TEST(Csv, MissingColumnsAndDuplicates) {
    EXPECT_THROW(parse("x,t,event\n1,2,1\n2,3,1\n"), ValidationError);
    EXPECT_THROW(parse("x,x,time,event\n1,1,2,1\n2,2,3,1\n"), ValidationError);
}

TEST(Csv, CustomOutcomeColumns) {
    CsvOptions opts;
    opts.time_col = "months";
    opts.event_col = "dead";
    const Dataset ds = parse("months,x,dead\n4,1.5,1\n5,2.5,0\n", opts);
    EXPECT_EQ(ds.cols(), 1);
    EXPECT_EQ(ds.outcomes()[1].time, 5.0);
}

TEST(Csv, ConstantColumnIsKeptAndFlagged) {
    const Dataset ds = parse("c,x,time,event\n5,1,1,1\n5,2,2,0\n5,3,3,1\n");
    ASSERT_EQ(ds.cols(), 2);
    EXPECT_TRUE(ds.meta()[0].constant);
    EXPECT_FALSE(ds.meta()[1].constant);
}

TEST(Csv, MissingTokenBuildsMask) {
    const Dataset ds = parse("x,b,time,event\n1,NA,1,1\nNA,1,2,0\n3,0,3,1\n");
    EXPECT_TRUE(ds.has_missing());
    EXPECT_TRUE(ds.missing(0, 1));
    EXPECT_TRUE(ds.missing(1, 0));
    EXPECT_FALSE(ds.missing(2, 0));
    EXPECT_EQ(ds.meta()[1].kind, FeatureKind::boolean);
}

TEST(Csv, RareLevelsArePooled) {
    std::string text = "grp,time,event\n";
    for (int i = 0; i < 6; ++i) text += "common," + std::to_string(i + 1) + ",1\n";
    for (int i = 0; i < 6; ++i) text += "big," + std::to_string(i + 10) + ",0\n";
    text += "r1,20,1\nr2,21,1\nr3,22,0\n";
    const Dataset ds = parse(text);
    std::vector<std::string> names;
    for (const auto& m : ds.meta()) names.push_back(m.name);
    EXPECT_EQ(names, (std::vector<std::string>{"grp=common", "grp=other"}));
    EXPECT_EQ(ds.x().col(1).sum(), 3.0);
}

TEST(Csv, OneHotColumnsOfOneParentSumToAtMostOne) {
    std::string text = "g,time,event\n";
    const char* levels[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 40; ++i) text += std::string(levels[(i * 7) % 4]) + "," + std::to_string(i + 1) + ",1\n";
    const Dataset ds = parse(text);
    ASSERT_EQ(ds.cols(), 3);
    for (Eigen::Index i = 0; i < ds.rows(); ++i) EXPECT_LE(ds.x().row(i).sum(), 1.0);
}

TEST(Csv, RoundTripOfSyntheticData) {
    const auto synth = generate_synthetic(fixtures::planted(60, 7, {{1, 0.8}}, 0.4, 9));
    std::stringstream buf;
    write_csv(synth.data, buf);
    const Dataset back = parse_csv(buf);
    ASSERT_EQ(back.rows(), synth.data.rows());
    ASSERT_EQ(back.cols(), synth.data.cols());
    EXPECT_LE((back.x() - synth.data.x()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(back.outcomes(), synth.data.outcomes());
    for (Eigen::Index j = 0; j < back.cols(); ++j) EXPECT_EQ(back.meta()[j].name, synth.data.meta()[j].name);
}

TEST(Csv, LoadFromFile) {
    const auto dir = std::filesystem::temp_directory_path() / "censel_data_test";
    std::filesystem::create_directories(dir);
    const auto synth = generate_synthetic(fixtures::planted(30, 3, {}, 0.3, 2));
    write_csv(synth.data, dir / "d.csv");
    const Dataset back = load_csv(dir / "d.csv");
    EXPECT_EQ(back.rows(), 30);
    EXPECT_THROW(load_csv(dir / "absent.csv"), ValidationError);
}

TEST(Normalizer, SymmetricColumn) {
    Eigen::MatrixXd x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    const Dataset ds = make_dataset(x, {1, 2, 3}, {true, true, false});
    const Normalizer norm = fit_normalizer(ds);
    const Dataset z = apply_normalizer(norm, ds);
    EXPECT_NEAR(z.x()(0, 0), -1.0, 1e-15);
    EXPECT_NEAR(z.x()(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(z.x()(2, 0), 1.0, 1e-15);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(z.x()(i, 1), 0.0);
}

TEST(Normalizer, TestRowsUseTrainingStatistics) {
    Eigen::MatrixXd x(3, 1);
    x << 1, 2, 3;
    const Dataset train = make_dataset(x, {1, 2, 3}, {true, true, true});
    Eigen::MatrixXd xt(1, 1);
    xt << 4;
    const Dataset test = make_dataset(xt, {1}, {true});
    EXPECT_NEAR(apply_normalizer(fit_normalizer(train), test).x()(0, 0), 2.0, 1e-15);
}

TEST(Normalizer, TrainingOutputIsStandardizedAndBooleansPass) {
    const Dataset ds = parse(
        "a,b,time,event\n0.3,1,1,1\n1.7,0,2,1\n-2.2,1,3,0\n4.0,1,4,1\n0.1,0,5,1\n");
    const Dataset z = apply_normalizer(fit_normalizer(ds), ds);
    const Eigen::VectorXd a = z.x().col(0);
    EXPECT_LT(std::abs(a.mean()), 1e-10);
    EXPECT_NEAR(std::sqrt((a.array() - a.mean()).square().sum() / 4.0), 1.0, 1e-12);
    EXPECT_EQ(z.x().col(1), ds.x().col(1));
}

TEST(Impute, MeanAndModeFromTrainingRows) {
    const Dataset train = parse("x,b,time,event\n1,1,1,1\nNA,1,2,0\n3,0,3,1\n");
    const Dataset test = parse("x,b,time,event\nNA,NA,1,1\n7,0,2,1\n");
    const auto [tr, te] = impute_simple(train, test);
    EXPECT_FALSE(tr.has_missing());
    EXPECT_FALSE(te.has_missing());
    EXPECT_EQ(tr.x()(1, 0), 2.0);
    EXPECT_EQ(te.x()(0, 0), 2.0);
    EXPECT_EQ(te.x()(0, 1), 1.0);
    EXPECT_EQ(te.x()(1, 0), 7.0);
}

TEST(Impute, FullyMissingTrainingColumnIsNamed) {
    const Dataset train = parse("x,gone,time,event\n1,NA,1,1\n2,NA,2,0\n");
    const auto msg = message_of([&] { impute_simple(train, train); });
    EXPECT_NE(msg.find("gone"), std::string::npos) << msg;
}

TEST(Leakage, TestRowPerturbationsNeverMoveTrainingStatistics) {
    std::mt19937_64 rng(3);
    const Dataset ds = fixtures::random_instance(rng, 40, 4);
    const FoldPlan plan = make_folds(40, 5, 1, 11);
    const auto train_rows = plan.train(0, 0, 40);
    const Normalizer base = fit_normalizer(ds.select_rows(train_rows));

    Eigen::MatrixXd x = ds.x();
    for (int row : plan.test(0, 0)) x.row(row).array() += 1000.0;
    const Dataset shifted(x, ds.meta(), ds.outcomes());
    const Normalizer again = fit_normalizer(shifted.select_rows(train_rows));
    EXPECT_EQ(base.mean, again.mean);
    EXPECT_EQ(base.sd, again.sd);
}

TEST(Folds, EvenSplitAcrossRepeats) {
    const FoldPlan plan = make_folds(10, 5, 5, 1);
    ASSERT_EQ(plan.folds(), 25);
    for (const auto& t : plan.test_sets) EXPECT_EQ(t.size(), 2u);
}

TEST(Folds, RemainderGoesToLeadingFolds) {
    const FoldPlan plan = make_folds(11, 5, 1, 4);
    std::vector<std::size_t> sizes;
    for (int f = 0; f < 5; ++f) sizes.push_back(plan.test(0, f).size());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));
}

TEST(Folds, PartitionPerRepeatAndDeterminism) {
    const FoldPlan plan = make_folds(23, 4, 3, 99);
    for (int r = 0; r < 3; ++r) {
        std::vector<int> seen(23, 0);
        for (int f = 0; f < 4; ++f) {
            for (int row : plan.test(r, f)) ++seen[row];
            const auto train = plan.train(r, f, 23);
            EXPECT_EQ(train.size() + plan.test(r, f).size(), 23u);
        }
        for (int c : seen) EXPECT_EQ(c, 1);
    }
    EXPECT_EQ(make_folds(23, 4, 3, 99).test_sets, plan.test_sets);
    EXPECT_NE(make_folds(23, 4, 3, 100).test_sets, plan.test_sets);
    EXPECT_NE(plan.test(0, 0), plan.test(1, 0));
}

TEST(Folds, Preconditions) {
    EXPECT_THROW(make_folds(3, 5, 1, 1), ValidationError);
    EXPECT_THROW(make_folds(10, 1, 1, 1), ValidationError);
}

TEST(Synthetic, NullCensoringCalibration) {
    const auto synth = generate_synthetic(fixtures::planted(2000, 5, {}, 0.5, 17));
    EXPECT_GE(synth.data.censoring_rate(), 0.45);
    EXPECT_LE(synth.data.censoring_rate(), 0.55);
    EXPECT_EQ(synth.realized_censoring, synth.data.censoring_rate());
}

TEST(Synthetic, CalibrationOverSeeds) {
    for (double target : {0.3, 0.5, 0.93}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto synth = generate_synthetic(fixtures::planted(500, 6, {{0, 1.0}, {3, -0.5}}, target, seed));
            EXPECT_NEAR(synth.data.censoring_rate(), target, 0.05) << "seed " << seed;
        }
    }
}

TEST(Synthetic, StrongFeatureHasTheBestUnivariateCIndex) {
    const auto synth = generate_synthetic(fixtures::planted(1000, 8, {{0, 2.0}}, 0.3, 5));
    const auto res = run_selector(SelectorKind::uni, synth.data, 1);
    const auto best = std::max_element(res.scores.begin(), res.scores.end()) - res.scores.begin();
    EXPECT_EQ(best, 0);
    EXPECT_EQ(synth.relevant, std::vector<int>{0});
}

TEST(Synthetic, DeterministicAndValidated) {
    const auto cfg = fixtures::planted(50, 4, {{2, 0.5}}, 0.5, 8);
    EXPECT_EQ(generate_synthetic(cfg).data, generate_synthetic(cfg).data);
    auto bad = cfg;
    bad.target_censoring = 1.0;
    EXPECT_THROW(generate_synthetic(bad), ValidationError);
    bad = cfg;
    bad.relevant = {{7, 1.0}};
    EXPECT_THROW(generate_synthetic(bad), ValidationError);
}

TEST(Dataset, SelectColumnsReordersAndRenumbers) {
    std::mt19937_64 rng(1);
    const Dataset ds = fixtures::random_instance(rng, 5, 3);
    const std::vector<int> cols{2, 0};
    const Dataset sub = ds.select_columns(cols);
    EXPECT_EQ(sub.meta()[0].name, "f2");
    EXPECT_EQ(sub.x().col(1), ds.x().col(0));
    EXPECT_EQ(sub.column_index("f0"), 1);
    EXPECT_EQ(sub.column_index("nope"), -1);
}
