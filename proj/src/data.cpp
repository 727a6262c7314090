#include "censel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace censel {

Dataset::Dataset(Eigen::MatrixXd x, std::vector<FeatureMeta> meta,
                 std::vector<SurvivalOutcome> outcomes, std::vector<std::uint8_t> missing)
    : x_(std::move(x)), meta_(std::move(meta)), outcomes_(std::move(outcomes)),
      missing_(std::move(missing)) {
    if (static_cast<std::size_t>(x_.cols()) != meta_.size())
        throw ValidationError("column count does not match feature metadata");
    if (static_cast<std::size_t>(x_.rows()) != outcomes_.size())
        throw ValidationError("row count does not match outcome count");
    if (!missing_.empty() && missing_.size() != static_cast<std::size_t>(x_.size()))
        throw ValidationError("missing mask has the wrong size");
    if (std::none_of(missing_.begin(), missing_.end(), [](std::uint8_t m) { return m != 0; }))
        missing_.clear();
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
        if (!(outcomes_[i].time > 0.0))
            throw ValidationError("row " + std::to_string(i + 1) + ": survival time must be positive");
}

int Dataset::events() const {
    return static_cast<int>(std::count_if(outcomes_.begin(), outcomes_.end(),
                                          [](const SurvivalOutcome& o) { return o.event; }));
}

double Dataset::censoring_rate() const {
    if (outcomes_.empty()) return 0.0;
    return 1.0 - static_cast<double>(events()) / static_cast<double>(outcomes_.size());
}

int Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < meta_.size(); ++j)
        if (meta_[j].name == name) return static_cast<int>(j);
    return -1;
}

Dataset Dataset::select_rows(std::span<const int> rows) const {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, x_.cols());
    std::vector<SurvivalOutcome> y(rows.size());
    std::vector<std::uint8_t> miss;
    if (!missing_.empty()) miss.assign(static_cast<std::size_t>(n * x_.cols()), 0);
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = x_(rows[i], j);
            if (!missing_.empty()) miss[j * n + i] = missing_[j * x_.rows() + rows[i]];
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) y[i] = outcomes_[rows[i]];
    return Dataset(std::move(x), meta_, std::move(y), std::move(miss));
}

Dataset Dataset::select_columns(std::span<const int> cols) const {
    const auto p = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd x(x_.rows(), p);
    std::vector<FeatureMeta> meta;
    meta.reserve(cols.size());
    std::vector<std::uint8_t> miss;
    if (!missing_.empty()) miss.assign(static_cast<std::size_t>(x_.rows() * p), 0);
    for (Eigen::Index c = 0; c < p; ++c) {
        x.col(c) = x_.col(cols[c]);
        meta.push_back(meta_[cols[c]]);
        if (!missing_.empty())
            std::copy_n(missing_.begin() + cols[c] * x_.rows(), x_.rows(),
                        miss.begin() + c * x_.rows());
    }
    // Probe parent ids refer to the old column numbering.
    for (auto& m : meta) {
        if (!m.is_probe()) continue;
        auto it = std::find(cols.begin(), cols.end(), m.parent);
        m.parent = it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
    }
    return Dataset(std::move(x), std::move(meta), outcomes_, std::move(miss));
}

std::vector<int> Dataset::original_columns() const {
    std::vector<int> out;
    for (std::size_t j = 0; j < meta_.size(); ++j)
        if (!meta_[j].is_probe()) out.push_back(static_cast<int>(j));
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

int parse_bool_word(const std::string& s) {
    if (s == "TRUE" || s == "true" || s == "True") return 1;
    if (s == "FALSE" || s == "false" || s == "False") return 0;
    return -1;
}

std::string row_label(std::size_t row) {
    return "row " + std::to_string(row + 1) + " (line " + std::to_string(row + 2) + ")";
}

struct RawColumn {
    std::string name;
    std::vector<std::string> cells;
};

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV: header row missing");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    int time_col = -1, event_col = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == options.time_col) time_col = static_cast<int>(j);
        if (header[j] == options.event_col) event_col = static_cast<int>(j);
    }
    if (time_col < 0) throw ValidationError("time column '" + options.time_col + "' not found");
    if (event_col < 0) throw ValidationError("event column '" + options.event_col + "' not found");
    {
        auto sorted = header;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw ValidationError("duplicate column name '" + *dup + "'");
    }

    std::vector<RawColumn> raw;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != time_col && static_cast<int>(j) != event_col)
            raw.push_back({header[j], {}});

    std::vector<SurvivalOutcome> outcomes;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(row_label(row) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        SurvivalOutcome y;
        const std::string t = trim(fields[time_col]);
        if (!parse_double(t, y.time))
            throw ParseError(row_label(row) + ": time value '" + t + "' is not a number");
        if (!(y.time > 0.0))
            throw ValidationError(row_label(row) + ": time must be positive, got " + t);
        const std::string e = trim(fields[event_col]);
        if (e == "1" || parse_bool_word(e) == 1) {
            y.event = true;
        } else if (e == "0" || parse_bool_word(e) == 0) {
            y.event = false;
        } else {
            throw ParseError(row_label(row) + ": event value '" + e + "' must be 0 or 1");
        }
        outcomes.push_back(y);
        std::size_t r = 0;
        for (std::size_t j = 0; j < fields.size(); ++j)
            if (static_cast<int>(j) != time_col && static_cast<int>(j) != event_col)
                raw[r++].cells.push_back(trim(fields[j]));
        ++row;
    }
    const std::size_t n = outcomes.size();
    if (n < 2) throw ValidationError("dataset needs at least 2 rows");

    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint8_t>> masks;
    std::vector<FeatureMeta> meta;
    bool any_missing = false;

    for (const auto& col : raw) {
        std::vector<double> numeric(n, 0.0);
        std::vector<std::uint8_t> miss(n, 0);
        bool all_numeric = true, all_bool_words = true;
        std::size_t observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cell = col.cells[i];
            if (cell == options.missing_token || cell.empty()) {
                miss[i] = 1;
                any_missing = true;
                continue;
            }
            ++observed;
            double v;
            if (parse_double(cell, v)) {
                numeric[i] = v;
            } else {
                all_numeric = false;
            }
            if (parse_bool_word(cell) < 0) all_bool_words = false;
        }
        if (observed == 0) all_bool_words = false;

        if (all_numeric || all_bool_words) {
            FeatureMeta m;
            m.name = col.name;
            bool binary = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (miss[i]) continue;
                if (all_bool_words && !all_numeric) numeric[i] = parse_bool_word(col.cells[i]);
                if (numeric[i] != 0.0 && numeric[i] != 1.0) binary = false;
            }
            m.kind = binary && observed > 0 ? FeatureKind::boolean : FeatureKind::continuous;
            double first = 0.0;
            bool seen = false, constant = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (miss[i]) continue;
                if (!seen) {
                    first = numeric[i];
                    seen = true;
                } else if (numeric[i] != first) {
                    constant = false;
                }
            }
            m.constant = constant;
            values.push_back(std::move(numeric));
            masks.push_back(std::move(miss));
            meta.push_back(std::move(m));
            continue;
        }

        // Categorical. Rare levels become "other" when at least two are rare
        // and at least one common level remains.
        std::map<std::string, int> counts;
        for (std::size_t i = 0; i < n; ++i)
            if (!miss[i]) ++counts[col.cells[i]];
        std::map<std::string, std::string> remap;
        int rare = 0, common = 0;
        for (const auto& [lvl, c] : counts) (c < options.min_level_count ? rare : common)++;
        const bool pool = rare >= 2 && common >= 1;
        std::vector<std::string> levels;
        bool has_other = false;
        for (const auto& [lvl, c] : counts) {
            if (pool && c < options.min_level_count) {
                remap[lvl] = "other";
                has_other = true;
            } else {
                remap[lvl] = lvl;
                levels.push_back(lvl);
            }
        }
        if (has_other) {
            if (std::find(levels.begin(), levels.end(), "other") != levels.end())
                throw ValidationError("column '" + col.name +
                                      "': level 'other' collides with pooled rare levels");
            levels.push_back("other");
        }
        // First level is the reference and gets no column.
        for (std::size_t l = 1; l < levels.size(); ++l) {
            std::vector<double> v(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (!miss[i] && remap[col.cells[i]] == levels[l]) v[i] = 1.0;
            FeatureMeta m;
            m.name = col.name + "=" + levels[l];
            m.kind = FeatureKind::categorical;
            m.source = FeatureSource::one_hot;
            m.group = col.name;
            m.level = levels[l];
            m.constant = std::all_of(v.begin(), v.end(), [&](double z) { return z == v[0]; });
            values.push_back(std::move(v));
            masks.push_back(miss);
            meta.push_back(std::move(m));
        }
    }

    const auto p = static_cast<Eigen::Index>(values.size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    std::vector<std::uint8_t> mask;
    if (any_missing) mask.reserve(n * values.size());
    for (Eigen::Index j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), j) = values[j][i];
        if (any_missing) mask.insert(mask.end(), masks[j].begin(), masks[j].end());
    }
    {
        std::vector<std::string> names;
        for (const auto& m : meta) names.push_back(m.name);
        std::sort(names.begin(), names.end());
        auto dup = std::adjacent_find(names.begin(), names.end());
        if (dup != names.end()) throw ValidationError("encoded feature name '" + *dup + "' is not unique");
    }
    return Dataset(std::move(x), std::move(meta), std::move(outcomes), std::move(mask));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return parse_csv(in, options);
}

void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options) {
    out << std::setprecision(17);
    for (const auto& m : ds.meta()) out << m.name << ',';
    out << options.time_col << ',' << options.event_col << '\n';
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.cols(); ++j) {
            if (ds.missing(i, j))
                out << options.missing_token;
            else
                out << ds.x()(i, j);
            out << ',';
        }
        const auto& y = ds.outcomes()[static_cast<std::size_t>(i)];
        out << y.time << ',' << (y.event ? 1 : 0) << '\n';
    }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, const CsvOptions& options) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    write_csv(ds, out, options);
    if (!out) throw ValidationError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Normalization and imputation

Normalizer fit_normalizer(const Dataset& train) {
    const auto p = static_cast<std::size_t>(train.cols());
    Normalizer norm{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0),
                    std::vector<bool>(p, false)};
    for (std::size_t j = 0; j < p; ++j) {
        if (train.meta()[j].kind != FeatureKind::continuous) continue;
        norm.scaled[j] = true;
        const auto col = static_cast<Eigen::Index>(j);
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (train.missing(i, col)) continue;
            sum += train.x()(i, col);
            ++count;
        }
        const double mean = count > 0 ? sum / count : 0.0;
        double ss = 0.0;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (train.missing(i, col)) continue;
            const double d = train.x()(i, col) - mean;
            ss += d * d;
        }
        norm.mean[j] = mean;
        norm.sd[j] = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
    }
    return norm;
}

Dataset apply_normalizer(const Normalizer& norm, const Dataset& ds) {
    if (norm.mean.size() != static_cast<std::size_t>(ds.cols()))
        throw ValidationError("normalizer was fitted on a different column set");
    Eigen::MatrixXd x = ds.x();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!norm.scaled[j]) continue;
        // Zero-spread columns carry no information; map them to zeros.
        if (!(norm.sd[j] > 0.0)) {
            x.col(j).setZero();
            continue;
        }
        x.col(j) = (x.col(j).array() - norm.mean[j]) / norm.sd[j];
    }
    return Dataset(std::move(x), ds.meta(), ds.outcomes(), ds.missing_mask());
}

std::pair<Dataset, Dataset> impute_simple(const Dataset& train, const Dataset& test) {
    if (train.cols() != test.cols()) throw ValidationError("train/test column mismatch");
    std::vector<double> fill(static_cast<std::size_t>(train.cols()), 0.0);
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
        double sum = 0.0;
        int count = 0, ones = 0;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (train.missing(i, j)) continue;
            sum += train.x()(i, j);
            ones += train.x()(i, j) != 0.0;
            ++count;
        }
        const bool needed = train.has_missing() || test.has_missing();
        if (count == 0 && needed)
            throw ValidationError("column '" + train.meta()[j].name +
                                  "' is entirely missing in the training rows");
        if (count == 0) continue;
        if (train.meta()[j].kind == FeatureKind::continuous)
            fill[j] = sum / count;
        else
            fill[j] = 2 * ones > count ? 1.0 : 0.0;  // ties fall to 0
    }
    auto complete = [&](const Dataset& ds) {
        if (!ds.has_missing()) return ds;
        Eigen::MatrixXd x = ds.x();
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                if (ds.missing(i, j)) x(i, j) = fill[j];
        return Dataset(std::move(x), ds.meta(), ds.outcomes());
    };
    return {complete(train), complete(test)};
}

// ---------------------------------------------------------------------------
// Folds

std::vector<int> FoldPlan::train(int repeat, int fold, int n) const {
    std::vector<std::uint8_t> in_test(static_cast<std::size_t>(n), 0);
    for (int i : test(repeat, fold)) in_test[i] = 1;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        if (!in_test[i]) out.push_back(i);
    return out;
}

FoldPlan make_folds(int n, int k, int repeats, std::uint64_t seed) {
    if (k < 2) throw ValidationError("k must be at least 2");
    if (n < k) throw ValidationError("cannot split " + std::to_string(n) + " rows into " +
                                     std::to_string(k) + " folds");
    if (repeats < 1) throw ValidationError("repeats must be at least 1");
    FoldPlan plan{k, repeats, {}};
    plan.test_sets.reserve(static_cast<std::size_t>(k * repeats));
    for (int r = 0; r < repeats; ++r) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
        for (int i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
        for (auto& f : folds) {
            std::sort(f.begin(), f.end());
            plan.test_sets.push_back(std::move(f));
        }
    }
    return plan;
}

}  // namespace censel
