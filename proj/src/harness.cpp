#include "censel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <variant>

#include "censel/ensemble.hpp"
#include "censel/stability.hpp"

namespace censel {

std::string CellId::aggregator_label() const {
    return aggregator ? to_string(*aggregator) : std::string("individual");
}

std::string CellId::label() const {
    return to_string(selector) + "/" + aggregator_label() + "/" + threshold.label();
}

void validate_cell(const CellId& cell) {
    const auto t = cell.threshold.type;
    if (cell.individual()) {
        if (is_sparse(cell.selector)) {
            if (t != ThresholdType::none)
                throw ValidationError(cell.label() + ": sparse individual selectors take no threshold");
        } else if (t != ThresholdType::fixed && t != ThresholdType::kde) {
            throw ValidationError(cell.label() + ": individual filters use fixed or KDE thresholds");
        }
        return;
    }
    if (has_intrinsic_threshold(*cell.aggregator) != (t == ThresholdType::intrinsic))
        throw ValidationError(cell.label() + ": RRA, TA and MedRank pair only with the intrinsic threshold");
    if (t == ThresholdType::none) throw ValidationError(cell.label() + ": ensemble cells need a threshold");
}

std::vector<CellId> enumerate_cells(const ExperimentConfig& cfg) {
    std::vector<CellId> cells;
    for (auto sel : cfg.selectors) {
        for (auto agg : cfg.aggregators) {
            if (has_intrinsic_threshold(agg)) {
                cells.push_back({sel, agg, ThresholdKind::of(ThresholdType::intrinsic)});
                continue;
            }
            for (const auto& t : cfg.thresholds) {
                if (t.type == ThresholdType::intrinsic || t.type == ThresholdType::none) continue;
                cells.push_back({sel, agg, t});
            }
        }
        if (!cfg.include_individual) continue;
        if (is_sparse(sel)) {
            cells.push_back({sel, std::nullopt, ThresholdKind::of(ThresholdType::none)});
        } else {
            for (const auto& t : cfg.thresholds)
                if (t.type == ThresholdType::fixed || t.type == ThresholdType::kde)
                    cells.push_back({sel, std::nullopt, t});
        }
    }
    return cells;
}

namespace {

std::uint64_t ensemble_seed(std::uint64_t seed, SelectorKind sel, int fold) {
    return derive_seed(seed, 0xE1, static_cast<std::uint64_t>(sel), static_cast<std::uint64_t>(fold));
}

std::uint64_t individual_seed(std::uint64_t seed, SelectorKind sel, int fold) {
    return derive_seed(seed, 0xE2, static_cast<std::uint64_t>(sel), static_cast<std::uint64_t>(fold));
}

std::uint64_t ridge_seed(std::uint64_t seed, int fold) {
    return derive_seed(seed, 0xE3, static_cast<std::uint64_t>(fold));
}

void check_config(const ExperimentConfig& cfg) {
    if (cfg.replicates < 1) throw ValidationError("B must be at least 1");
    if (cfg.k_folds < 2) throw ValidationError("k_folds must be at least 2");
    if (cfg.repeats < 1) throw ValidationError("repeats must be at least 1");
    if (!(cfg.aggregate.rra_alpha > 0.0 && cfg.aggregate.rra_alpha <= 1.0))
        throw ValidationError("rra_alpha must lie in (0, 1]");
    if (!(cfg.aggregate.medrank_quorum > 0.0 && cfg.aggregate.medrank_quorum < 1.0))
        throw ValidationError("medrank_quorum must lie in (0, 1)");
}

FoldRecord ensemble_fold(const CellId& cell, const PreparedFold& prep, const EnsembleRun& run,
                         const ExperimentConfig& cfg, int fold) {
    const AggregateResult agg = aggregate(*cell.aggregator, run, cfg.aggregate);
    const ProbeSet probes = run.probes.value_or(ProbeSet{});
    const ThresholdOutcome out = apply_threshold(cell.threshold, agg, probes, is_sparse(cell.selector));
    FoldRecord rec;
    rec.subset = out.subset;
    rec.flag = to_string(out.flag);
    rec.cindex = evaluate_subset(prep, rec.subset, ridge_seed(cfg.seed, fold));
    return rec;
}

FoldRecord individual_fold(const CellId& cell, const PreparedFold& prep, const SelectionResult& sel,
                           const ExperimentConfig& cfg, int fold) {
    FoldRecord rec;
    rec.flag = to_string(ThresholdFlag::ok);
    if (sel.sparse) {
        rec.subset = sel.selected;
    } else if (cell.threshold.type == ThresholdType::fixed) {
        rec.subset = apply_fixed_threshold(rank_features(sel), cell.threshold.fraction);
    } else {
        const auto out = kde_threshold(sel.scores);
        rec.subset = out.subset;
        rec.flag = to_string(out.flag);
    }
    rec.cindex = evaluate_subset(prep, rec.subset, ridge_seed(cfg.seed, fold));
    return rec;
}

FoldRecord failed_fold(const std::string& why) {
    FoldRecord rec;
    rec.failed = true;
    rec.flag = "failed";
    rec.error = why;
    return rec;
}

}  // namespace

PreparedFold prepare_fold(const Dataset& ds, const FoldPlan& plan, int fold) {
    const int n = static_cast<int>(ds.rows());
    const int repeat = fold / plan.k, part = fold % plan.k;
    const Dataset raw_train = ds.select_rows(plan.train(repeat, part, n));
    const Dataset raw_test = ds.select_rows(plan.test(repeat, part));
    auto [train, test] = impute_simple(raw_train, raw_test);
    const Normalizer norm = fit_normalizer(train);
    return {apply_normalizer(norm, train), apply_normalizer(norm, test)};
}

double evaluate_subset(const PreparedFold& fold, const std::vector<int>& subset, std::uint64_t seed) {
    if (subset.empty()) return 0.5;
    const Dataset train = fold.train.select_columns(subset);
    const Dataset test = fold.test.select_columns(subset);
    const CoxModel model = fit_ridge_evaluator(train, ridge_lambda_grid(train), seed);
    const Eigen::VectorXd risk = model.linear_predictor(test.x());
    return concordance_index(as_span(risk), test.outcomes());
}

void finalize_result(ModelResult& result, int universe) {
    SubsetSystem sys{{}, universe};
    double sum = 0.0;
    result.n_failed_folds = 0;
    for (const auto& f : result.folds) {
        if (f.failed) {
            ++result.n_failed_folds;
            continue;
        }
        sum += f.cindex;
        sys.subsets.push_back(f.subset);
    }
    const int ok = static_cast<int>(sys.subsets.size());
    result.mean_cindex = ok > 0 ? sum / ok : 0.0;
    result.cw_rel = 0.0;
    result.all_empty = true;
    for (const auto& s : sys.subsets) result.all_empty = result.all_empty && s.empty();
    if (ok >= 2) {
        const auto c = relative_weighted_consistency(sys);
        result.cw_rel = c.value;
    }
    result.distance = euclidean_score(result.mean_cindex, result.cw_rel);
    result.failed = ok == 0 || 5 * result.n_failed_folds > static_cast<int>(result.folds.size());
}

ModelResult run_cell(const CellId& cell, const Dataset& ds, const FoldPlan& plan,
                     const ExperimentConfig& cfg) {
    check_config(cfg);
    validate_cell(cell);
    ModelResult result;
    result.cell = cell;
    const bool probes = cell.threshold.type == ThresholdType::best_probe;
    for (int fold = 0; fold < plan.folds(); ++fold) {
        try {
            const PreparedFold prep = prepare_fold(ds, plan, fold);
            if (cell.individual()) {
                const auto sel = run_selector(cell.selector, prep.train,
                                              individual_seed(cfg.seed, cell.selector, fold), cfg.selector);
                result.folds.push_back(individual_fold(cell, prep, sel, cfg, fold));
            } else {
                const auto run = run_ensemble(cell.selector, prep.train, cfg.replicates, probes,
                                              ensemble_seed(cfg.seed, cell.selector, fold), cfg.selector);
                result.folds.push_back(ensemble_fold(cell, prep, run, cfg, fold));
            }
        } catch (const Error& e) {
            result.folds.push_back(failed_fold(e.what()));
        }
    }
    finalize_result(result, static_cast<int>(ds.original_columns().size()));
    return result;
}

std::vector<ModelResult> run_individual(SelectorKind kind, const Dataset& ds, const FoldPlan& plan,
                                        const std::vector<ThresholdKind>& thresholds,
                                        const ExperimentConfig& cfg) {
    ExperimentConfig one = cfg;
    one.selectors = {kind};
    one.aggregators.clear();
    one.thresholds = thresholds;
    one.include_individual = true;
    std::vector<ModelResult> out;
    for (const auto& cell : enumerate_cells(one)) out.push_back(run_cell(cell, ds, plan, cfg));
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds, std::size_t workers) {
    check_config(cfg);
    const auto cells = enumerate_cells(cfg);
    for (const auto& c : cells) validate_cell(c);
    const FoldPlan plan = make_folds(static_cast<int>(ds.rows()), cfg.k_folds, cfg.repeats,
                                     derive_seed(cfg.seed, 0xF0));
    const int folds = plan.folds();

    std::vector<std::variant<std::string, PreparedFold>> prepared(static_cast<std::size_t>(folds));
    parallel_for(prepared.size(), workers, [&](std::size_t f) {
        try {
            prepared[f] = prepare_fold(ds, plan, static_cast<int>(f));
        } catch (const Error& e) {
            prepared[f] = std::string(e.what());
        }
    });

    // Shared selector work: one ensemble per (selector, fold, probes) and one
    // individual run per (selector, fold).
    struct Job {
        SelectorKind selector;
        int fold;
        int mode;  // 0 plain ensemble, 1 ensemble with probes, 2 individual
        bool operator<(const Job& o) const {
            return std::tie(selector, fold, mode) < std::tie(o.selector, o.fold, o.mode);
        }
    };
    auto mode_of = [](const CellId& c) {
        if (c.individual()) return 2;
        return c.threshold.type == ThresholdType::best_probe ? 1 : 0;
    };
    std::map<Job, std::size_t> job_index;
    std::vector<Job> jobs;
    for (const auto& c : cells)
        for (int f = 0; f < folds; ++f) {
            Job j{c.selector, f, mode_of(c)};
            if (job_index.emplace(j, jobs.size()).second) jobs.push_back(j);
        }

    using JobResult = std::variant<std::string, EnsembleRun, SelectionResult>;
    std::vector<JobResult> job_results(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const Job& j = jobs[i];
        const auto* prep = std::get_if<PreparedFold>(&prepared[j.fold]);
        if (!prep) {
            job_results[i] = std::get<std::string>(prepared[j.fold]);
            return;
        }
        try {
            if (j.mode == 2)
                job_results[i] = run_selector(j.selector, prep->train,
                                              individual_seed(cfg.seed, j.selector, j.fold), cfg.selector);
            else
                job_results[i] = run_ensemble(j.selector, prep->train, cfg.replicates, j.mode == 1,
                                              ensemble_seed(cfg.seed, j.selector, j.fold), cfg.selector);
        } catch (const Error& e) {
            job_results[i] = std::string(e.what());
        }
    });

    ExperimentResult out;
    for (int j : ds.original_columns()) out.feature_names.push_back(ds.meta()[j].name);
    out.results.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.results[c].cell = cells[c];
        out.results[c].folds.resize(static_cast<std::size_t>(folds));
    }
    parallel_for(cells.size() * static_cast<std::size_t>(folds), workers, [&](std::size_t task) {
        const std::size_t c = task / static_cast<std::size_t>(folds);
        const int f = static_cast<int>(task % static_cast<std::size_t>(folds));
        const CellId& cell = cells[c];
        FoldRecord& rec = out.results[c].folds[f];
        const JobResult& job = job_results[job_index.at(Job{cell.selector, f, mode_of(cell)})];
        if (const auto* err = std::get_if<std::string>(&job)) {
            rec = failed_fold(*err);
            return;
        }
        const auto& prep = std::get<PreparedFold>(prepared[f]);
        try {
            if (cell.individual())
                rec = individual_fold(cell, prep, std::get<SelectionResult>(job), cfg, f);
            else
                rec = ensemble_fold(cell, prep, std::get<EnsembleRun>(job), cfg, f);
        } catch (const Error& e) {
            rec = failed_fold(e.what());
        }
    });
    const int universe = static_cast<int>(out.feature_names.size());
    for (auto& r : out.results) finalize_result(r, universe);
    return out;
}

std::vector<ThresholdRow> rank_thresholds(const std::vector<ModelResult>& results) {
    std::map<std::string, ThresholdRow> rows;
    for (const auto& r : results) {
        if (r.failed || r.cell.individual()) continue;
        auto& row = rows[r.cell.threshold.label()];
        row.threshold = r.cell.threshold.label();
        row.mean_distance += r.distance;
        ++row.cells;
    }
    std::vector<ThresholdRow> out;
    for (auto& [label, row] : rows) {
        row.mean_distance /= row.cells;
        out.push_back(row);
    }
    std::stable_sort(out.begin(), out.end(), [](const ThresholdRow& a, const ThresholdRow& b) {
        return a.mean_distance > b.mean_distance;
    });
    return out;
}

std::vector<int> majority_features(const ModelResult& result) {
    std::map<int, int> counts;
    int ok = 0;
    for (const auto& f : result.folds) {
        if (f.failed) continue;
        ++ok;
        for (int id : f.subset) ++counts[id];
    }
    std::vector<int> out;
    for (const auto& [id, c] : counts)
        if (2 * c > ok) out.push_back(id);
    return out;
}

ConsensusReport consensus_features(const ExperimentResult& experiment, int top_t, double freq) {
    if (top_t < 1) throw ValidationError("top_t must be at least 1");
    if (!(freq > 0.0 && freq <= 1.0)) throw ValidationError("freq must lie in (0, 1]");
    std::vector<const ModelResult*> ranked;
    for (const auto& r : experiment.results)
        if (!r.failed) ranked.push_back(&r);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ModelResult* a, const ModelResult* b) { return a->distance > b->distance; });
    ConsensusReport report;
    report.top_t = top_t;
    report.freq = freq;
    report.truncated = static_cast<int>(ranked.size()) < top_t;
    ranked.resize(std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(top_t)));
    const int used = static_cast<int>(ranked.size());
    if (used == 0) return report;

    std::map<int, std::vector<bool>> membership;
    for (int m = 0; m < used; ++m) {
        report.models.push_back(ranked[m]->cell.label());
        for (int id : majority_features(*ranked[m])) {
            auto& row = membership[id];
            row.resize(static_cast<std::size_t>(used), false);
            row[m] = true;
        }
    }
    const auto needed = static_cast<long long>(std::ceil(freq * used - 1e-9));
    for (const auto& [id, row] : membership) {
        const auto hits = std::count(row.begin(), row.end(), true);
        if (hits < needed) continue;
        report.features.push_back(id);
        report.names.push_back(id < static_cast<int>(experiment.feature_names.size())
                                   ? experiment.feature_names[id]
                                   : std::to_string(id));
        report.indicators.push_back(row);
    }
    return report;
}

}  // namespace censel
