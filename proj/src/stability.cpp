#include "censel/stability.hpp"

#include <cmath>

#include "censel/common.hpp"

namespace censel {

namespace {

struct Counts {
    std::vector<long long> per_feature;
    long long total = 0;
    int m = 0;
};

Counts count(const SubsetSystem& sys) {
    if (sys.subsets.size() < 2) throw ValidationError("stability needs at least two subsets");
    Counts c;
    c.m = static_cast<int>(sys.subsets.size());
    c.per_feature.assign(static_cast<std::size_t>(sys.universe), 0);
    for (const auto& s : sys.subsets) {
        for (int f : s) {
            if (f < 0 || f >= sys.universe) throw ValidationError("subset element outside the universe");
            ++c.per_feature[f];
            ++c.total;
        }
    }
    for (long long fc : c.per_feature)
        if (fc > c.m) throw ValidationError("subset lists a feature more than once");
    return c;
}

// sum_f F_f (F_f - 1) for the given counts.
double pair_mass(const std::vector<long long>& counts) {
    double s = 0.0;
    for (long long f : counts) s += static_cast<double>(f) * static_cast<double>(f - 1);
    return s;
}

}  // namespace

Consistency weighted_consistency(const SubsetSystem& sys) {
    const Counts c = count(sys);
    if (c.total == 0) return {0.0, true};
    return {pair_mass(c.per_feature) / (static_cast<double>(c.total) * (c.m - 1)), false};
}

namespace {

struct PairMassBounds {
    double least = 0.0;
    double most = 0.0;
};

PairMassBounds pair_mass_bounds(int universe, long long m, long long total) {
    // Most concentrated: floor(D/m) features in every subset plus the remainder.
    const long long full = total / m, rest = total % m;
    const double most = static_cast<double>(full) * static_cast<double>(m * (m - 1)) +
                        static_cast<double>(rest) * static_cast<double>(rest - 1);
    // Most spread: counts differ by at most one across all N features.
    const long long base = total / universe, extra = total % universe;
    const double least = static_cast<double>(universe - extra) * static_cast<double>(base * (base - 1)) +
                         static_cast<double>(extra) * static_cast<double>((base + 1) * base);
    return {least, most};
}

}  // namespace

ConsistencyBounds weighted_consistency_bounds(int universe, int subsets, long long total) {
    if (subsets < 2) throw ValidationError("stability needs at least two subsets");
    if (total <= 0) return {0.0, 0.0};
    if (total > static_cast<long long>(universe) * subsets)
        throw ValidationError("total selection exceeds N * m");
    const double denom = static_cast<double>(total) * (subsets - 1);
    const auto b = pair_mass_bounds(universe, subsets, total);
    return {b.least / denom, b.most / denom};
}

Consistency relative_weighted_consistency(const SubsetSystem& sys) {
    const Counts c = count(sys);
    if (c.total == 0) return {0.0, true};
    const auto b = pair_mass_bounds(sys.universe, c.m, c.total);
    if (b.most == b.least) {
        bool identical = true;
        for (long long f : c.per_feature) identical = identical && (f == 0 || f == c.m);
        return {identical ? 1.0 : 0.0, false};
    }
    // Pair masses are integers, so only the final division rounds.
    return {(pair_mass(c.per_feature) - b.least) / (b.most - b.least), false};
}

double euclidean_score(double mean_cindex, double cw_rel) {
    return std::hypot(mean_cindex, cw_rel);
}

}  // namespace censel
