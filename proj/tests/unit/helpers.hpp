#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "censel/aggregate.hpp"
#include "censel/coxnet.hpp"
#include "censel/data.hpp"

namespace censel::fixtures {

inline Dataset make_dataset(const Eigen::MatrixXd& x, const std::vector<double>& times,
                            const std::vector<bool>& events) {
    std::vector<FeatureMeta> meta;
    for (Eigen::Index j = 0; j < x.cols(); ++j) meta.push_back({"f" + std::to_string(j)});
    std::vector<SurvivalOutcome> y;
    for (std::size_t i = 0; i < times.size(); ++i) y.push_back({times[i], events[i]});
    return Dataset(x, std::move(meta), std::move(y));
}

/// Gaussian features with integer-valued times, so tied times are common.
inline Dataset random_instance(std::mt19937_64& rng, int n, int p, int time_levels = 0,
                               double event_prob = 0.7) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.1, 10.0);
    std::bernoulli_distribution event(event_prob);
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = normal(rng);
    std::vector<double> times(n);
    std::vector<bool> events(n);
    for (int i = 0; i < n; ++i) {
        times[i] = time_levels > 0 ? 1.0 + static_cast<double>(rng() % time_levels) : unif(rng);
        events[i] = event(rng);
    }
    events[0] = true;
    return make_dataset(x, times, events);
}

/// Harrell's C by direct enumeration of ordered pairs.
inline double brute_force_cindex(const std::vector<double>& risk, const std::vector<SurvivalOutcome>& y,
                                 double* comparable_out = nullptr) {
    double comparable = 0, score = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (!(y[i].time < y[j].time) || !y[i].event) continue;
            comparable += 1;
            if (risk[i] > risk[j])
                score += 1;
            else if (risk[i] == risk[j])
                score += 0.5;
        }
    if (comparable_out) *comparable_out = comparable;
    return comparable > 0 ? score / comparable : -1.0;
}

inline SynthConfig planted(int n, int p, std::vector<PlantedEffect> effects, double censoring,
                           std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.relevant = std::move(effects);
    cfg.target_censoring = censoring;
    cfg.seed = seed;
    return cfg;
}


/// Largest violation of the elastic-net optimality conditions.
inline double kkt_residual(const Dataset& ds, const CoxModel& m, double lambda, double alpha) {
    const Eigen::VectorXd g = plik_gradient(m.beta, ds) / static_cast<double>(ds.rows());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m.beta.size(); ++j) {
        const double b = m.beta[j];
        const double r = b != 0.0 ? std::abs(g[j] + lambda * (1 - alpha) * b + lambda * alpha * (b > 0 ? 1 : -1))
                                  : std::max(0.0, std::abs(g[j]) - lambda * alpha);
        worst = std::max(worst, r);
    }
    return worst;
}

inline SelectionResult sparse(std::vector<double> scores) {
    SelectionResult r;
    r.sparse = true;
    r.scores = std::move(scores);
    for (std::size_t j = 0; j < r.scores.size(); ++j)
        if (r.scores[j] > 0.0) r.selected.push_back(static_cast<int>(j));
    return r;
}

// Sparse selection with scores on a dyadic grid so sums are exact.
inline SelectionResult random_sparse(std::mt19937_64& rng, int universe) {
    std::vector<double> scores(static_cast<std::size_t>(universe), 0.0);
    const int picked = static_cast<int>(rng() % (universe + 1));
    std::vector<int> ids(static_cast<std::size_t>(universe));
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int i = 0; i < picked; ++i) scores[ids[i]] = 0.25 * static_cast<double>(1 + rng() % 8);
    return sparse(scores);
}

inline std::vector<RankedList> ranked(const std::vector<SelectionResult>& results) {
    std::vector<RankedList> out;
    for (const auto& r : results) out.push_back(RankedList::from(r));
    return out;
}

inline std::vector<int> brute_force_top_k(const std::vector<SelectionResult>& results, int k) {
    const std::size_t n = results.front().scores.size();
    std::vector<double> total(n, 0.0);
    for (const auto& r : results)
        for (std::size_t j = 0; j < n; ++j) total[j] += r.scores[j];
    std::vector<double> positive;
    for (double t : total)
        if (t > 0.0) positive.push_back(t);
    std::sort(positive.rbegin(), positive.rend());
    if (positive.empty()) return {};
    const double kth = positive[std::min<std::size_t>(static_cast<std::size_t>(k), positive.size()) - 1];
    std::vector<int> out;
    for (std::size_t j = 0; j < n; ++j)
        if (total[j] > 0.0 && total[j] >= kth) out.push_back(static_cast<int>(j));
    return out;
}

// For each feature, the first depth at which more than quorum * B lists have
// shown it; features are emitted by that depth, then by id.
inline std::vector<int> medrank_oracle(const std::vector<RankedList>& lists, int k, double quorum) {
    const int n = lists.front().universe;
    std::size_t depth_max = 0;
    for (const auto& l : lists) depth_max = std::max(depth_max, l.size());
    std::vector<std::pair<std::size_t, int>> crossing;
    for (int f = 0; f < n; ++f) {
        for (std::size_t d = 1; d <= depth_max; ++d) {
            int seen = 0;
            for (const auto& l : lists)
                for (std::size_t i = 0; i < std::min(d, l.size()); ++i) seen += l.ids[i] == f;
            if (seen > quorum * static_cast<double>(lists.size())) {
                crossing.emplace_back(d, f);
                break;
            }
        }
    }
    std::sort(crossing.begin(), crossing.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < crossing.size() && i < static_cast<std::size_t>(std::min(k, n)); ++i)
        out.push_back(crossing[i].second);
    return out;
}

}  // namespace censel::fixtures
