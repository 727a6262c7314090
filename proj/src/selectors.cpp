#include "censel/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace censel {

std::string to_string(SelectorKind kind) {
    switch (kind) {
        case SelectorKind::uni: return "UNI";
        case SelectorKind::lasso: return "LASSO";
        case SelectorKind::enet: return "ENET";
        case SelectorKind::cboost: return "CBOOST";
    }
    return "?";
}

SelectorKind selector_from_string(const std::string& name) {
    if (name == "UNI") return SelectorKind::uni;
    if (name == "LASSO") return SelectorKind::lasso;
    if (name == "ENET") return SelectorKind::enet;
    if (name == "CBOOST") return SelectorKind::cboost;
    throw ValidationError("unknown selector '" + name + "'");
}

double choose_lambda_cv(const Dataset& ds, double alpha, std::uint64_t seed,
                        const SelectorOptions& options) {
    const double top = lambda_max(ds, alpha);
    if (!(top > 0.0)) return 0.0;
    const auto grid = lambda_grid(top, options.lambda_ratio, options.lambda_points);
    const int n = static_cast<int>(ds.rows());
    if (n < options.cv_folds) return grid[grid.size() / 2];

    const FoldPlan plan = make_folds(n, options.cv_folds, 1, seed);
    std::vector<double> sum(grid.size(), 0.0);
    std::vector<int> used(grid.size(), 0);
    for (int f = 0; f < options.cv_folds; ++f) {
        const Dataset train = ds.select_rows(plan.train(0, f, n));
        const Dataset test = ds.select_rows(plan.test(0, f));
        if (train.events() == 0) continue;
        std::vector<CoxModel> path;
        try {
            path = fit_elastic_net_path(train, grid, alpha, options.fit);
        } catch (const FitError&) {
            continue;
        }
        for (std::size_t l = 0; l < grid.size(); ++l) {
            const Eigen::VectorXd risk = test.x() * path[l].beta;
            const auto c = concordance_counts(as_span(risk), test.outcomes());
            if (c.comparable == 0) break;
            sum[l] += (c.concordant + 0.5 * c.tied_risk) / c.comparable;
            ++used[l];
        }
    }
    std::size_t chosen = grid.size() / 2;
    double best = -1.0;
    for (std::size_t l = 0; l < grid.size(); ++l) {
        if (used[l] == 0) continue;
        const double mean = sum[l] / used[l];
        if (mean > best) {
            best = mean;
            chosen = l;
        }
    }
    return grid[chosen];
}

namespace {

SelectionResult from_coefficients(const Eigen::VectorXd& beta) {
    SelectionResult res;
    res.sparse = true;
    res.scores.resize(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        res.scores[j] = std::abs(beta[j]);
        if (res.scores[j] > 0.0) res.selected.push_back(static_cast<int>(j));
    }
    return res;
}

SelectionResult run_penalized(const Dataset& ds, double alpha, std::uint64_t seed,
                              const SelectorOptions& options) {
    const double chosen = choose_lambda_cv(ds, alpha, seed, options);
    if (chosen == 0.0) return from_coefficients(Eigen::VectorXd::Zero(ds.cols()));
    const double top = lambda_max(ds, alpha);
    auto grid = lambda_grid(top, options.lambda_ratio, options.lambda_points);
    grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double l) { return l < chosen; }),
               grid.end());
    const auto path = fit_elastic_net_path(ds, grid, alpha, options.fit);
    return from_coefficients(path.back().beta);
}

}  // namespace

SelectionResult run_selector(SelectorKind kind, const Dataset& ds, std::uint64_t seed,
                             const SelectorOptions& options) {
    switch (kind) {
        case SelectorKind::uni: {
            SelectionResult res;
            res.sparse = false;
            res.scores.assign(static_cast<std::size_t>(ds.cols()), 0.5);
            res.selected.resize(static_cast<std::size_t>(ds.cols()));
            std::iota(res.selected.begin(), res.selected.end(), 0);
            const CoxProblem problem(ds.outcomes());
            for (Eigen::Index j = 0; j < ds.cols(); ++j) {
                const double beta = fit_univariate(problem, ds.x().col(j));
                if (beta == 0.0) continue;
                const Eigen::VectorXd risk = beta * ds.x().col(j);
                const auto c = concordance_counts(as_span(risk), ds.outcomes());
                if (c.comparable > 0) res.scores[j] = (c.concordant + 0.5 * c.tied_risk) / c.comparable;
            }
            return res;
        }
        case SelectorKind::lasso: return run_penalized(ds, 1.0, seed, options);
        case SelectorKind::enet: return run_penalized(ds, options.enet_alpha, seed, options);
        case SelectorKind::cboost: return from_coefficients(componentwise_boost(ds, options.boost).beta);
    }
    throw ValidationError("unknown selector kind");
}

Ranking rank_scores(const std::vector<double>& scores) {
    const std::size_t p = scores.size();
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    Ranking out{std::vector<double>(p, 0.0)};
    for (std::size_t i = 0; i < p;) {
        std::size_t end = i;
        while (end < p && scores[order[end]] == scores[order[i]]) ++end;
        // positions i+1 .. end share their average
        const double mid = 0.5 * static_cast<double>(i + 1 + end);
        for (std::size_t k = i; k < end; ++k) out.rank[order[k]] = mid;
        i = end;
    }
    return out;
}

Ranking rank_features(const SelectionResult& res) { return rank_scores(res.scores); }

std::vector<int> apply_fixed_threshold(const Ranking& ranking, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0, 1]");
    const std::size_t p = ranking.rank.size();
    if (p == 0) return {};
    const auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(p) - 1e-9));
    std::vector<double> sorted = ranking.rank;
    std::sort(sorted.begin(), sorted.end());
    const double cutoff = sorted[std::clamp<std::size_t>(keep, 1, p) - 1];
    std::vector<int> out;
    for (std::size_t j = 0; j < p; ++j)
        if (ranking.rank[j] <= cutoff) out.push_back(static_cast<int>(j));
    return out;
}

}  // namespace censel
