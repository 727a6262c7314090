#pragma once

#include <vector>

namespace censel {

/// m feature subsets drawn from a universe of `universe` features.
struct SubsetSystem {
    std::vector<std::vector<int>> subsets;
    int universe = 0;
};

struct Consistency {
    double value = 0.0;
    bool all_empty = false;  // D = 0; value reported as 0
};

/// CW = sum_f (F_f / D) * (F_f - 1) / (m - 1), F_f = subsets containing f,
/// D = sum of subset sizes.
Consistency weighted_consistency(const SubsetSystem& sys);

/// Extremes of CW over every system sharing (N, m, D).
struct ConsistencyBounds {
    double min = 0.0;
    double max = 0.0;
};
ConsistencyBounds weighted_consistency_bounds(int universe, int subsets, long long total);

/// (CW - CW_min) / (CW_max - CW_min). When the bounds coincide the value is 1
/// for a system of identical subsets and 0 otherwise.
Consistency relative_weighted_consistency(const SubsetSystem& sys);

/// Distance from the origin in the (C-index, stability) plane.
double euclidean_score(double mean_cindex, double cw_rel);

}  // namespace censel
