#include "censel/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace censel {

std::string ThresholdKind::label() const {
    switch (type) {
        case ThresholdType::fixed: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "fixed-%.2f", fraction);
            return buf;
        }
        case ThresholdType::quantile75: return "q75";
        case ThresholdType::kde: return "kde";
        case ThresholdType::best_probe: return "best-probe";
        case ThresholdType::intrinsic: return "intrinsic";
        case ThresholdType::none: return "none";
    }
    return "?";
}

ThresholdKind ThresholdKind::parse(const std::string& label) {
    if (label == "q75") return of(ThresholdType::quantile75);
    if (label == "kde") return of(ThresholdType::kde);
    if (label == "best-probe") return of(ThresholdType::best_probe);
    if (label == "intrinsic") return of(ThresholdType::intrinsic);
    if (label == "none") return of(ThresholdType::none);
    if (label.rfind("fixed-", 0) == 0) {
        char* end = nullptr;
        const double f = std::strtod(label.c_str() + 6, &end);
        if (end && *end == '\0' && f > 0.0 && f <= 1.0) return fixed(f);
    }
    throw ValidationError("unknown threshold '" + label + "'");
}

std::string to_string(ThresholdFlag flag) {
    switch (flag) {
        case ThresholdFlag::ok: return "ok";
        case ThresholdFlag::all_equal: return "all-equal";
        case ThresholdFlag::no_threshold: return "no-threshold";
        case ThresholdFlag::no_bandwidth: return "no-bandwidth";
        case ThresholdFlag::probe_fallback: return "probe-fallback";
    }
    return "?";
}

double quantile_linear(std::vector<double> values, double prob) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::vector<int> everything(std::size_t n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
}

std::vector<int> above(std::span<const double> scores, double cut) {
    std::vector<int> out;
    for (std::size_t j = 0; j < scores.size(); ++j)
        if (scores[j] > cut) out.push_back(static_cast<int>(j));
    return out;
}

}  // namespace

ThresholdOutcome quantile75(std::span<const double> scores) {
    if (scores.empty()) return {};
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (*lo == *hi) return {{}, ThresholdFlag::all_equal};
    const double q = quantile_linear({scores.begin(), scores.end()}, 0.75);
    return {above(scores, q), ThresholdFlag::ok};
}

std::optional<double> silverman_bandwidth(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 2) throw ValidationError("bandwidth needs at least two scores");
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    std::vector<double> v(scores.begin(), scores.end());
    const double iqr = quantile_linear(v, 0.75) - quantile_linear(v, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) return std::nullopt;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeExtrema kde_extrema(std::span<const double> scores, double bandwidth) {
    if (scores.empty()) throw ValidationError("density of an empty sample");
    if (!(bandwidth > 0.0)) throw ValidationError("bandwidth must be positive");
    KdeExtrema ex;
    ex.bandwidth = bandwidth;
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double left = *lo - 3.0 * bandwidth;
    const double right = *hi + 3.0 * bandwidth;
    const double step = (right - left) / (kKdeGridPoints - 1);
    const double norm = 1.0 / (static_cast<double>(scores.size()) * bandwidth *
                               std::sqrt(2.0 * std::numbers::pi));
    ex.grid.resize(kKdeGridPoints);
    ex.density.resize(kKdeGridPoints);
    for (int g = 0; g < kKdeGridPoints; ++g) {
        ex.grid[g] = left + step * g;
        double sum = 0.0;
        for (double s : scores) {
            const double z = (ex.grid[g] - s) / bandwidth;
            sum += std::exp(-0.5 * z * z);
        }
        ex.density[g] = sum * norm;
    }

    // Collapse equal-valued runs, then compare each interior run with its neighbours.
    struct Run {
        int first, last;
        double value;
    };
    std::vector<Run> runs;
    for (int g = 0; g < kKdeGridPoints; ++g) {
        if (!runs.empty() && runs.back().value == ex.density[g])
            runs.back().last = g;
        else
            runs.push_back({g, g, ex.density[g]});
    }
    for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
        const int mid = (runs[r].first + runs[r].last) / 2;
        if (runs[r].value > runs[r - 1].value && runs[r].value > runs[r + 1].value)
            ex.maxima.push_back(mid);
        else if (runs[r].value < runs[r - 1].value && runs[r].value < runs[r + 1].value)
            ex.minima.push_back(mid);
    }
    return ex;
}

ThresholdOutcome kde_threshold(std::span<const double> scores) {
    if (scores.size() < 2) return {everything(scores.size()), ThresholdFlag::no_bandwidth};
    const auto h0 = silverman_bandwidth(scores);
    if (!h0) return {everything(scores.size()), ThresholdFlag::no_bandwidth};
    double h = *h0;
    for (int attempt = 0; attempt <= kKdeMaxShrinks; ++attempt, h *= kKdeShrink) {
        const KdeExtrema ex = kde_extrema(scores, h);
        if (ex.maxima.size() < 2) continue;
        const int peak = *std::max_element(ex.maxima.begin(), ex.maxima.end(), [&](int a, int b) {
            return ex.density[a] < ex.density[b];
        });
        const auto boundary = std::find_if(ex.minima.begin(), ex.minima.end(),
                                           [&](int m) { return m > peak; });
        if (boundary == ex.minima.end()) continue;
        return {above(scores, ex.grid[*boundary]), ThresholdFlag::ok};
    }
    return {everything(scores.size()), ThresholdFlag::no_threshold};
}

ThresholdOutcome best_probe_threshold(const AggregateResult& agg, const ProbeSet& probes, bool sparse) {
    const auto scores = agg.oriented_scores();
    const int n = agg.universe();
    std::vector<std::uint8_t> is_probe(static_cast<std::size_t>(n), 0);
    for (int id : probes.probes)
        if (id >= 0 && id < n) is_probe[id] = 1;

    auto chosen_at_least_once = [&](int f) {
        return agg.selection_count.empty() ? scores[f] > 0.0 : agg.selection_count[f] > 0;
    };
    bool any_probe_selected = false;
    double best = -std::numeric_limits<double>::infinity();
    for (int id : probes.probes) {
        if (id < 0 || id >= n) continue;
        any_probe_selected = any_probe_selected || chosen_at_least_once(id);
        best = std::max(best, scores[id]);
    }

    ThresholdOutcome out;
    if (probes.empty() || (sparse && !any_probe_selected)) {
        out.flag = ThresholdFlag::probe_fallback;
        for (int f = 0; f < n; ++f)
            if (!is_probe[f] && chosen_at_least_once(f)) out.subset.push_back(f);
        return out;
    }
    for (int f = 0; f < n; ++f)
        if (!is_probe[f] && scores[f] > best) out.subset.push_back(f);
    return out;
}

ThresholdOutcome apply_threshold(const ThresholdKind& kind, const AggregateResult& agg,
                                 const ProbeSet& probes, bool sparse) {
    const int n = agg.universe();
    std::vector<std::uint8_t> is_probe(static_cast<std::size_t>(n), 0);
    for (int id : probes.probes)
        if (id >= 0 && id < n) is_probe[id] = 1;
    std::vector<int> originals;
    for (int f = 0; f < n; ++f)
        if (!is_probe[f]) originals.push_back(f);
    const auto oriented = agg.oriented_scores();
    std::vector<double> values;
    values.reserve(originals.size());
    for (int f : originals) values.push_back(oriented[f]);

    auto lift = [&](ThresholdOutcome local) {
        for (auto& id : local.subset) id = originals[id];
        return local;
    };

    switch (kind.type) {
        case ThresholdType::fixed:
            return lift({apply_fixed_threshold(rank_scores(values), kind.fraction), ThresholdFlag::ok});
        case ThresholdType::quantile75: return lift(quantile75(values));
        case ThresholdType::kde: return lift(kde_threshold(values));
        case ThresholdType::best_probe: return best_probe_threshold(agg, probes, sparse);
        case ThresholdType::intrinsic: {
            if (!agg.selected) throw ValidationError(to_string(agg.kind) + " has no intrinsic selection");
            ThresholdOutcome out;
            for (int f : *agg.selected)
                if (!is_probe[f]) out.subset.push_back(f);
            return out;
        }
        case ThresholdType::none: return {originals, ThresholdFlag::ok};
    }
    throw ValidationError("unknown threshold");
}

}  // namespace censel
