#include "censel/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace censel {

std::string to_string(AggregatorKind kind) {
    switch (kind) {
        case AggregatorKind::mr: return "MR";
        case AggregatorKind::mw: return "MW";
        case AggregatorKind::rra: return "RRA";
        case AggregatorKind::ta: return "TA";
        case AggregatorKind::ma: return "MA";
    }
    return "?";
}

AggregatorKind aggregator_from_string(const std::string& name) {
    if (name == "MR") return AggregatorKind::mr;
    if (name == "MW") return AggregatorKind::mw;
    if (name == "RRA") return AggregatorKind::rra;
    if (name == "TA") return AggregatorKind::ta;
    if (name == "MA") return AggregatorKind::ma;
    throw ValidationError("unknown aggregator '" + name + "'");
}

RankedList RankedList::from(const SelectionResult& res) {
    RankedList list;
    list.universe = static_cast<int>(res.scores.size());
    for (std::size_t j = 0; j < res.scores.size(); ++j)
        if (!res.sparse || res.scores[j] > 0.0) list.ids.push_back(static_cast<int>(j));
    std::stable_sort(list.ids.begin(), list.ids.end(),
                     [&](int a, int b) { return res.scores[a] > res.scores[b]; });
    for (int id : list.ids) list.scores.push_back(res.scores[id]);
    return list;
}

std::vector<double> AggregateResult::oriented_scores() const {
    if (higher_is_better) return score;
    std::vector<double> out(score.size());
    std::transform(score.begin(), score.end(), out.begin(), [](double s) { return -s; });
    return out;
}

namespace {

std::vector<int> order_by(const std::vector<double>& score, bool ascending) {
    std::vector<int> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ascending ? score[a] < score[b] : score[a] > score[b];
    });
    return order;
}

std::size_t common_universe(const std::vector<Ranking>& lists) {
    if (lists.empty()) throw ValidationError("no lists to aggregate");
    const std::size_t n = lists.front().rank.size();
    for (const auto& l : lists)
        if (l.rank.size() != n) throw ValidationError("ranked lists cover different universes");
    return n;
}

std::vector<double> binomial_row(int total) {
    std::vector<double> row(static_cast<std::size_t>(total) + 1, 1.0);
    for (int l = 1; l < total; ++l) row[l] = row[l - 1] * (total - l + 1) / l;
    return row;
}

}  // namespace

AggregateResult mean_rank(const std::vector<Ranking>& lists) {
    const std::size_t n = common_universe(lists);
    AggregateResult out;
    out.kind = AggregatorKind::mr;
    out.higher_is_better = false;
    out.score.assign(n, 0.0);
    for (const auto& l : lists)
        for (std::size_t j = 0; j < n; ++j) out.score[j] += l.rank[j];
    for (auto& s : out.score) s /= static_cast<double>(lists.size());
    out.order = order_by(out.score, true);
    return out;
}

AggregateResult mean_weight(const std::vector<SelectionResult>& lists) {
    if (lists.empty()) throw ValidationError("no lists to aggregate");
    const std::size_t n = lists.front().scores.size();
    AggregateResult out;
    out.kind = AggregatorKind::mw;
    out.higher_is_better = true;
    out.score.assign(n, 0.0);
    for (const auto& l : lists) {
        if (l.scores.size() != n) throw ValidationError("score lists cover different universes");
        for (std::size_t j = 0; j < n; ++j) out.score[j] += l.scores[j];
    }
    for (auto& s : out.score) s /= static_cast<double>(lists.size());
    out.order = order_by(out.score, false);
    return out;
}

double beta_order_tail(int k, int total, double x) {
    if (k < 1 || k > total) throw ValidationError("order statistic index out of range");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const auto choose = binomial_row(total);
    double sum = 0.0;
    // Smallest terms first.
    for (int l = total; l >= k; --l) sum += choose[l] * std::pow(x, l) * std::pow(1.0 - x, total - l);
    return std::min(1.0, sum);
}

double rra_rho(std::vector<double> normalized_ranks) {
    if (normalized_ranks.empty()) throw ValidationError("RRA needs at least one list");
    std::sort(normalized_ranks.begin(), normalized_ranks.end());
    const int total = static_cast<int>(normalized_ranks.size());
    double rho = 1.0;
    for (int k = 1; k <= total; ++k) rho = std::min(rho, beta_order_tail(k, total, normalized_ranks[k - 1]));
    return rho;
}

AggregateResult rra(const std::vector<Ranking>& lists, double alpha, std::optional<double> correction) {
    if (lists.empty()) throw ValidationError("RRA needs at least one list");
    const std::size_t n = common_universe(lists);
    const double factor = correction.value_or(static_cast<double>(lists.size()));
    AggregateResult out;
    out.kind = AggregatorKind::rra;
    out.higher_is_better = false;
    out.score.assign(n, 1.0);
    std::vector<double> ranks(lists.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t b = 0; b < lists.size(); ++b) ranks[b] = lists[b].rank[j] / static_cast<double>(n);
        out.score[j] = std::min(1.0, rra_rho(ranks) * factor);
    }
    out.p_values = out.score;
    out.order = order_by(out.score, true);
    std::vector<int> selected;
    for (std::size_t j = 0; j < n; ++j)
        if (out.score[j] < alpha) selected.push_back(static_cast<int>(j));
    out.selected = std::move(selected);
    return out;
}

AggregateResult threshold_algorithm(const std::vector<RankedList>& lists, int k) {
    if (lists.empty()) throw ValidationError("threshold algorithm needs at least one list");
    const int n = lists.front().universe;
    for (const auto& l : lists)
        if (l.universe != n) throw ValidationError("ranked lists cover different universes");
    if (k < 1) throw ValidationError("k must be positive");
    k = std::min(k, n);

    // Random-access tables.
    std::vector<std::vector<double>> lookup(lists.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::size_t depth_max = 0;
    for (std::size_t l = 0; l < lists.size(); ++l) {
        for (std::size_t d = 0; d < lists[l].size(); ++d) lookup[l][lists[l].ids[d]] = lists[l].scores[d];
        depth_max = std::max(depth_max, lists[l].size());
    }

    AggregateResult out;
    out.kind = AggregatorKind::ta;
    out.higher_is_better = true;
    out.score.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    std::priority_queue<double, std::vector<double>, std::greater<>> best;  // k largest totals

    auto access = [&](std::size_t d) {
        double tau = 0.0;
        for (std::size_t l = 0; l < lists.size(); ++l) {
            if (d >= lists[l].size()) continue;
            const int f = lists[l].ids[d];
            tau += lists[l].scores[d];
            if (seen[f]) continue;
            seen[f] = 1;
            double total = 0.0;
            for (const auto& table : lookup) total += table[f];
            out.score[f] = total;
            best.push(total);
            if (best.size() > static_cast<std::size_t>(k)) best.pop();
        }
        return tau;
    };

    std::size_t d = 0;
    bool stopped = false;
    double kth = 0.0;
    out.stop_depth = static_cast<int>(depth_max);
    for (; d < depth_max; ++d) {
        const double tau = access(d);
        if (best.size() == static_cast<std::size_t>(k) && best.top() >= tau) {
            kth = best.top();
            out.stop_depth = static_cast<int>(d + 1);
            stopped = true;
            // Unseen features can still tie the k-th total while tau == kth.
            for (std::size_t e = d + 1; e < depth_max && kth == tau; ++e) {
                double next_tau = 0.0;
                for (const auto& l : lists)
                    if (e < l.size()) next_tau += l.scores[e];
                if (next_tau < kth) break;
                access(e);
            }
            break;
        }
    }
    if (!stopped) kth = best.size() == static_cast<std::size_t>(k) ? best.top() : 0.0;

    std::vector<int> selected;
    for (int f = 0; f < n; ++f)
        if (seen[f] && out.score[f] > 0.0 && out.score[f] >= kth) selected.push_back(f);
    out.selected = std::move(selected);
    out.order = order_by(out.score, false);
    return out;
}

AggregateResult medrank(const std::vector<RankedList>& lists, int k, double quorum) {
    if (lists.empty()) throw ValidationError("MedRank needs at least one list");
    if (!(quorum > 0.0 && quorum < 1.0)) throw ValidationError("quorum must lie in (0, 1)");
    const int n = lists.front().universe;
    for (const auto& l : lists)
        if (l.universe != n) throw ValidationError("ranked lists cover different universes");
    if (k < 1) throw ValidationError("k must be positive");
    k = std::min(k, n);
    const double needed = quorum * static_cast<double>(lists.size());

    std::size_t depth_max = 0;
    for (const auto& l : lists) depth_max = std::max(depth_max, l.size());

    AggregateResult out;
    out.kind = AggregatorKind::ma;
    out.higher_is_better = false;
    const double never = static_cast<double>(depth_max) + 1.0;
    out.score.assign(static_cast<std::size_t>(n), never);
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> crossed(static_cast<std::size_t>(n), 0);
    std::vector<int> emitted;
    out.stop_depth = static_cast<int>(depth_max);
    for (std::size_t d = 0; d < depth_max && emitted.size() < static_cast<std::size_t>(k); ++d) {
        std::vector<int> crossing;
        for (const auto& l : lists) {
            if (d >= l.size()) continue;
            const int f = l.ids[d];
            if (!crossed[f] && ++count[f] > needed) {
                crossed[f] = 1;
                crossing.push_back(f);
            }
        }
        std::sort(crossing.begin(), crossing.end());
        for (int f : crossing) {
            if (emitted.size() == static_cast<std::size_t>(k)) break;
            emitted.push_back(f);
            out.score[f] = static_cast<double>(d + 1);
        }
        if (emitted.size() == static_cast<std::size_t>(k)) out.stop_depth = static_cast<int>(d + 1);
    }
    out.order = emitted;
    std::vector<int> rest;
    for (int f = 0; f < n; ++f)
        if (out.score[f] == never) rest.push_back(f);
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) { return count[a] > count[b]; });
    out.order.insert(out.order.end(), rest.begin(), rest.end());
    std::sort(emitted.begin(), emitted.end());
    out.selected = std::move(emitted);
    return out;
}

AggregateResult aggregate(AggregatorKind kind, const EnsembleRun& run, const AggregateOptions& options) {
    if (run.results.empty()) throw ValidationError("empty ensemble run");
    AggregateResult out;
    switch (kind) {
        case AggregatorKind::mr:
        case AggregatorKind::rra: {
            std::vector<Ranking> ranks;
            ranks.reserve(run.results.size());
            for (const auto& r : run.results) ranks.push_back(rank_features(r));
            out = kind == AggregatorKind::mr ? mean_rank(ranks) : rra(ranks, options.rra_alpha);
            break;
        }
        case AggregatorKind::mw: out = mean_weight(run.results); break;
        case AggregatorKind::ta:
        case AggregatorKind::ma: {
            std::vector<RankedList> lists;
            lists.reserve(run.results.size());
            for (const auto& r : run.results) lists.push_back(RankedList::from(r));
            const int k = mean_subset_length(run);
            out = kind == AggregatorKind::ta ? threshold_algorithm(lists, k)
                                             : medrank(lists, k, options.medrank_quorum);
            break;
        }
    }
    out.selection_count.assign(static_cast<std::size_t>(run.universe), 0);
    for (const auto& r : run.results)
        for (std::size_t j = 0; j < r.scores.size(); ++j)
            if (r.scores[j] > 0.0) ++out.selection_count[j];
    return out;
}

}  // namespace censel
