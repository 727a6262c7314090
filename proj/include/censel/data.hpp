#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "censel/common.hpp"

namespace censel {

struct SurvivalOutcome {
    double time = 1.0;
    bool event = false;

    bool operator==(const SurvivalOutcome&) const = default;
};

enum class FeatureKind { continuous, boolean, categorical };
enum class FeatureSource { original, probe, one_hot };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    FeatureSource source = FeatureSource::original;
    // Probes: column id of the permuted parent. Otherwise -1.
    int parent = -1;
    // One-hot columns: the categorical variable and the level this column flags.
    std::string group;
    std::string level;
    // Set at ingestion for columns with a single observed value.
    bool constant = false;

    bool is_probe() const { return source == FeatureSource::probe; }
    bool operator==(const FeatureMeta&) const = default;
};

/// Encoded feature matrix (n rows x p columns) with survival outcomes.
///
/// Values are immutable once constructed. An optional missing mask marks
/// entries that still need imputation; a dataset is complete when the mask is
/// empty.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::MatrixXd x, std::vector<FeatureMeta> meta,
            std::vector<SurvivalOutcome> outcomes,
            std::vector<std::uint8_t> missing = {});

    Eigen::Index rows() const { return x_.rows(); }
    Eigen::Index cols() const { return x_.cols(); }
    const Eigen::MatrixXd& x() const { return x_; }
    const std::vector<FeatureMeta>& meta() const { return meta_; }
    const std::vector<SurvivalOutcome>& outcomes() const { return outcomes_; }

    bool has_missing() const { return !missing_.empty(); }
    bool missing(Eigen::Index row, Eigen::Index col) const {
        return !missing_.empty() && missing_[col * x_.rows() + row] != 0;
    }
    const std::vector<std::uint8_t>& missing_mask() const { return missing_; }

    int events() const;
    double censoring_rate() const;
    int column_index(const std::string& name) const;

    Dataset select_rows(std::span<const int> rows) const;
    Dataset select_columns(std::span<const int> cols) const;
    /// Ids of columns that are not probes.
    std::vector<int> original_columns() const;

    bool operator==(const Dataset&) const = default;

private:
    Eigen::MatrixXd x_;
    std::vector<FeatureMeta> meta_;
    std::vector<SurvivalOutcome> outcomes_;
    std::vector<std::uint8_t> missing_;
};

struct CsvOptions {
    std::string time_col = "time";
    std::string event_col = "event";
    std::string missing_token = "NA";
    // Categorical levels rarer than this are pooled into an "other" level.
    int min_level_count = 5;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const CsvOptions& options = {});
void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options = {});

/// Per-column centering and scaling fitted on training rows.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<bool> scaled;
};

Normalizer fit_normalizer(const Dataset& train);
Dataset apply_normalizer(const Normalizer& norm, const Dataset& ds);

/// Mean fill for continuous columns, mode fill otherwise, using statistics
/// from `train` only. Returns the completed (train, test) pair.
std::pair<Dataset, Dataset> impute_simple(const Dataset& train, const Dataset& test);

struct FoldPlan {
    int k = 0;
    int repeats = 0;
    // test_sets[repeat * k + fold] holds sorted row ids.
    std::vector<std::vector<int>> test_sets;

    const std::vector<int>& test(int repeat, int fold) const {
        return test_sets[static_cast<std::size_t>(repeat * k + fold)];
    }
    std::vector<int> train(int repeat, int fold, int n) const;
    int folds() const { return k * repeats; }
};

FoldPlan make_folds(int n, int k, int repeats, std::uint64_t seed);

struct PlantedEffect {
    int feature = 0;
    double beta = 0.0;
};

struct SynthConfig {
    int n = 500;
    int p = 20;
    std::vector<PlantedEffect> relevant;
    double target_censoring = 0.5;
    double correlation = 0.0;
    std::uint64_t seed = 1;
};

struct SyntheticData {
    Dataset data;
    std::vector<int> relevant;
    double realized_censoring = 0.0;
};

SyntheticData generate_synthetic(const SynthConfig& cfg);

/// JSON sidecar naming the planted features of a synthetic dataset.
void write_ground_truth(const SyntheticData& synth, const SynthConfig& cfg,
                        const std::filesystem::path& path);

}  // namespace censel
