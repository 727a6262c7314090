#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "censel/aggregate.hpp"
#include "censel/ensemble.hpp"

namespace censel {

enum class ThresholdType { fixed, quantile75, kde, best_probe, intrinsic, none };

struct ThresholdKind {
    ThresholdType type = ThresholdType::none;
    double fraction = 0.0;  // fixed only

    static ThresholdKind fixed(double f) { return {ThresholdType::fixed, f}; }
    static ThresholdKind of(ThresholdType t) { return {t, 0.0}; }

    /// "fixed-0.10", "q75", "kde", "best-probe", "intrinsic", "none".
    std::string label() const;
    static ThresholdKind parse(const std::string& label);
    bool operator==(const ThresholdKind&) const = default;
};

enum class ThresholdFlag {
    ok,
    all_equal,       // quantile threshold on constant scores: nothing kept
    no_threshold,    // KDE found no usable split: everything kept
    no_bandwidth,    // KDE bandwidth degenerate: everything kept
    probe_fallback,  // no probe was ever selected: every selected feature kept
};

std::string to_string(ThresholdFlag flag);

struct ThresholdOutcome {
    std::vector<int> subset;  // ascending ids
    ThresholdFlag flag = ThresholdFlag::ok;
};

/// Linear interpolation between order statistics at 1 + prob * (n - 1).
double quantile_linear(std::vector<double> values, double prob);

/// Keeps entries strictly above the 0.75 quantile; indices refer to `scores`.
ThresholdOutcome quantile75(std::span<const double> scores);

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5). When the IQR is zero the sd is used
/// alone; nullopt when the spread is zero.
std::optional<double> silverman_bandwidth(std::span<const double> scores);

struct KdeExtrema {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<int> maxima;  // grid indices, ascending
    std::vector<int> minima;
    double bandwidth = 0.0;
};

inline constexpr int kKdeGridPoints = 512;
inline constexpr int kKdeMaxShrinks = 10;
inline constexpr double kKdeShrink = 0.75;

/// Gaussian KDE on a 512-point grid over [min - 3h, max + 3h]. A run of equal
/// density values counts as one extremum located at its midpoint.
KdeExtrema kde_extrema(std::span<const double> scores, double bandwidth);

/// Features scoring above the first density minimum to the right of the
/// highest density peak. Shrinks the bandwidth by 0.75 up to ten times while
/// no such minimum exists, then gives up and keeps everything.
ThresholdOutcome kde_threshold(std::span<const double> scores);

/// Keeps original features whose consensus score is strictly better than the
/// best probe's.
ThresholdOutcome best_probe_threshold(const AggregateResult& agg, const ProbeSet& probes, bool sparse);

/// Applies `kind` to the aggregate, never returning probe columns.
ThresholdOutcome apply_threshold(const ThresholdKind& kind, const AggregateResult& agg,
                                 const ProbeSet& probes, bool sparse);

}  // namespace censel
