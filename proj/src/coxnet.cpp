#include "censel/coxnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace censel {

Eigen::VectorXd CoxModel::linear_predictor(const Eigen::MatrixXd& x) const {
    if (beta.size() == 0) return Eigen::VectorXd::Zero(x.rows());
    return x * beta;
}

// ---------------------------------------------------------------------------
// CoxProblem

CoxProblem::CoxProblem(std::span<const SurvivalOutcome> outcomes) {
    const int n = static_cast<int>(outcomes.size());
    order_.resize(static_cast<std::size_t>(n));
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return outcomes[a].time < outcomes[b].time; });
    event_.resize(static_cast<std::size_t>(n));
    group_of_.resize(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n;) {
        int end = pos;
        int deaths = 0;
        while (end < n && outcomes[order_[end]].time == outcomes[order_[pos]].time) {
            deaths += outcomes[order_[end]].event ? 1 : 0;
            group_of_[end] = static_cast<int>(groups_.size());
            ++end;
        }
        groups_.push_back({pos, end, deaths});
        events_ += deaths;
        pos = end;
    }
    for (int i = 0; i < n; ++i) event_[i] = outcomes[i].event ? 1 : 0;
    if (events_ == 0) throw ValidationError("no events");
}

void CoxProblem::exp_shifted(const Eigen::VectorXd& eta, std::vector<double>& e,
                             double& shift) const {
    shift = eta.size() ? eta.maxCoeff() : 0.0;
    if (!std::isfinite(shift)) shift = 0.0;
    e.resize(order_.size());
    for (std::size_t pos = 0; pos < order_.size(); ++pos) e[pos] = std::exp(eta[order_[pos]] - shift);
}

double CoxProblem::loss(const Eigen::VectorXd& eta) const {
    std::vector<double> e;
    double shift;
    exp_shifted(eta, e, shift);
    double risk = 0.0, total = 0.0;
    for (auto g = groups_.rbegin(); g != groups_.rend(); ++g) {
        for (int pos = g->start; pos < g->end; ++pos) risk += e[pos];
        if (g->deaths == 0) continue;
        total += g->deaths * (std::log(risk) + shift);
        for (int pos = g->start; pos < g->end; ++pos)
            if (event_[order_[pos]]) total -= eta[order_[pos]];
    }
    return total;
}

double CoxProblem::working(const Eigen::VectorXd& eta, Eigen::VectorXd& u,
                           Eigen::VectorXd& w) const {
    std::vector<double> e;
    double shift;
    exp_shifted(eta, e, shift);
    std::vector<double> risk(groups_.size());
    double acc = 0.0, total = 0.0;
    for (std::size_t g = groups_.size(); g-- > 0;) {
        for (int pos = groups_[g].start; pos < groups_[g].end; ++pos) acc += e[pos];
        risk[g] = acc;
    }
    u.resize(static_cast<Eigen::Index>(order_.size()));
    w.resize(static_cast<Eigen::Index>(order_.size()));
    double a = 0.0, b = 0.0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto& grp = groups_[g];
        if (grp.deaths > 0) {
            a += grp.deaths / risk[g];
            b += grp.deaths / (risk[g] * risk[g]);
            total += grp.deaths * (std::log(risk[g]) + shift);
        }
        for (int pos = grp.start; pos < grp.end; ++pos) {
            const int row = order_[pos];
            u[row] = (event_[row] ? 1.0 : 0.0) - e[pos] * a;
            w[row] = std::max(0.0, e[pos] * a - e[pos] * e[pos] * b);
            if (event_[row]) total -= eta[row];
        }
    }
    return total;
}

void CoxProblem::directional(const Eigen::VectorXd& eta, const Eigen::Ref<const Eigen::VectorXd>& x,
                             double& score, double& info) const {
    std::vector<double> e;
    double shift;
    exp_shifted(eta, e, shift);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    score = 0.0;
    info = 0.0;
    for (auto g = groups_.rbegin(); g != groups_.rend(); ++g) {
        double xe = 0.0;
        for (int pos = g->start; pos < g->end; ++pos) {
            const double xi = x[order_[pos]];
            s0 += e[pos];
            s1 += xi * e[pos];
            s2 += xi * xi * e[pos];
            if (event_[order_[pos]]) xe += xi;
        }
        if (g->deaths == 0) continue;
        const double mean = s1 / s0;
        score += xe - g->deaths * mean;
        info += g->deaths * std::max(0.0, s2 / s0 - mean * mean);
    }
}

void CoxProblem::directional_all(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x,
                                 Eigen::VectorXd& score, Eigen::VectorXd& info) const {
    std::vector<double> e;
    double shift;
    exp_shifted(eta, e, shift);
    const Eigen::Index p = x.cols();
    double s0 = 0.0;
    Eigen::ArrayXd s1 = Eigen::ArrayXd::Zero(p), s2 = Eigen::ArrayXd::Zero(p), xe(p);
    score.setZero(p);
    info.setZero(p);
    for (auto g = groups_.rbegin(); g != groups_.rend(); ++g) {
        xe.setZero();
        for (int pos = g->start; pos < g->end; ++pos) {
            const int row = order_[pos];
            const auto xi = x.row(row).transpose().array();
            s0 += e[pos];
            s1 += e[pos] * xi;
            s2 += e[pos] * xi.square();
            if (event_[row]) xe += xi;
        }
        if (g->deaths == 0) continue;
        const Eigen::ArrayXd mean = s1 / s0;
        score.array() += xe - g->deaths * mean;
        info.array() += g->deaths * (s2 / s0 - mean.square()).max(0.0);
    }
}

double CoxProblem::newton_terms(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x,
                                Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    // hess = X' diag(e * A) X - sum_g (d_g / S_g^2) s1_g s1_g', with s1_g the
    // e-weighted column sums over risk set g and A the running sum of d_g / S_g.
    std::vector<double> e;
    double shift;
    exp_shifted(eta, e, shift);
    const Eigen::Index p = x.cols();
    const auto n = static_cast<Eigen::Index>(order_.size());
    int event_groups = 0;
    for (const auto& g : groups_) event_groups += g.deaths > 0 ? 1 : 0;

    std::vector<double> risk(groups_.size());
    double acc = 0.0;
    for (std::size_t g = groups_.size(); g-- > 0;) {
        for (int pos = groups_[g].start; pos < groups_[g].end; ++pos) acc += e[pos];
        risk[g] = acc;
    }
    Eigen::MatrixXd m(event_groups, p);
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    grad.setZero(p);
    double total = 0.0;
    int k = event_groups;
    for (std::size_t g = groups_.size(); g-- > 0;) {
        for (int pos = groups_[g].start; pos < groups_[g].end; ++pos) {
            const int row = order_[pos];
            s1.noalias() += e[pos] * x.row(row).transpose();
            if (event_[row]) {
                grad.noalias() -= x.row(row).transpose();
                total -= eta[row];
            }
        }
        const int d = groups_[g].deaths;
        if (d == 0) continue;
        total += d * (std::log(risk[g]) + shift);
        grad.noalias() += (d / risk[g]) * s1;
        m.row(--k) = (std::sqrt(static_cast<double>(d)) / risk[g]) * s1.transpose();
    }

    Eigen::VectorXd weight(n);
    double a = 0.0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (groups_[g].deaths > 0) a += groups_[g].deaths / risk[g];
        for (int pos = groups_[g].start; pos < groups_[g].end; ++pos) weight[order_[pos]] = e[pos] * a;
    }
    const Eigen::MatrixXd wx = x.array().colwise() * weight.array();
    hess.noalias() = x.transpose() * wx;
    hess.noalias() -= m.transpose() * m;
    return total;
}

// ---------------------------------------------------------------------------
// Likelihood and gradient

double neg_log_partial_likelihood(const Eigen::VectorXd& beta, const Dataset& ds) {
    if (beta.size() != ds.cols()) throw ValidationError("beta length does not match column count");
    CoxProblem problem(ds.outcomes());
    return problem.loss(ds.x() * beta);
}

Eigen::VectorXd plik_gradient(const Eigen::VectorXd& beta, const Dataset& ds) {
    if (beta.size() != ds.cols()) throw ValidationError("beta length does not match column count");
    CoxProblem problem(ds.outcomes());
    Eigen::VectorXd u, w;
    problem.working(ds.x() * beta, u, w);
    return -(ds.x().transpose() * u);
}

double lambda_max(const Dataset& ds, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("lambda_max is unbounded for alpha = 0");
    const Eigen::VectorXd g = plik_gradient(Eigen::VectorXd::Zero(ds.cols()), ds);
    const double top = ds.cols() ? g.cwiseAbs().maxCoeff() : 0.0;
    return top / (static_cast<double>(ds.rows()) * alpha);
}

std::vector<double> lambda_grid(double top, double ratio, int points) {
    if (points < 1) throw ValidationError("lambda grid needs at least one point");
    if (!(top > 0.0) || !(ratio > 0.0)) throw ValidationError("lambda grid bounds must be positive");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid[i] = top * std::pow(ratio, f);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Elastic net by coordinate descent on the quadratic approximation

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double penalty(const Eigen::VectorXd& beta, double lambda, double alpha) {
    if (lambda == 0.0) return 0.0;
    return lambda * (alpha * beta.lpNorm<1>() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

// Proximal Newton on a working set: the exact Hessian restricted to nonzero
// and KKT-violating columns, with the penalized quadratic solved by cyclic
// coordinate descent and soft-thresholding.
CoxModel fit_from(const CoxProblem& problem, const Eigen::MatrixXd& x, double lambda, double alpha,
                  const FitOptions& opts, Eigen::VectorXd beta) {
    const Eigen::Index n = x.rows(), p = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);

    CoxModel model;
    model.lambda = lambda;
    model.alpha = alpha;
    if (p == 0) {
        model.converged = true;
        model.beta = std::move(beta);
        return model;
    }

    Eigen::VectorXd eta = x * beta;
    double objective = problem.loss(eta) * inv_n + penalty(beta, lambda, alpha);
    Eigen::VectorXd u, w, grad, unused;
    Eigen::MatrixXd hess, xw;
    std::vector<Eigen::Index> working;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        model.iterations = iter;
        problem.working(eta, u, w);
        grad.noalias() = -inv_n * (x.transpose() * u);
        double kkt = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double r = beta[j] != 0.0
                                 ? std::abs(grad[j] + l2 * beta[j] + std::copysign(l1, beta[j]))
                                 : std::abs(grad[j]) - l1;
            kkt = std::max(kkt, r);
        }
        if (kkt <= opts.tol) {
            model.converged = true;
            break;
        }
        const double inner_tol = std::max(0.1 * opts.tol, 1e-2 * kkt);
        working.clear();
        for (Eigen::Index j = 0; j < p; ++j)
            if (beta[j] != 0.0 || std::abs(grad[j]) > l1) working.push_back(j);
        if (working.empty()) {
            model.converged = true;
            break;
        }
        const auto m = static_cast<Eigen::Index>(working.size());
        xw.resize(n, m);
        for (Eigen::Index k = 0; k < m; ++k) xw.col(k) = x.col(working[k]);
        problem.newton_terms(eta, xw, unused, hess);
        hess *= inv_n;

        // q tracks the gradient of the quadratic model at the trial point.
        Eigen::VectorXd trial(m), q(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            trial[k] = beta[working[k]];
            q[k] = grad[working[k]];
        }
        // Solves the quadratic exactly on the current sign pattern; kept only
        // when the signs survive and the zero coordinates stay within l1.
        auto settle = [&]() {
            std::vector<Eigen::Index> on;
            for (Eigen::Index k = 0; k < m; ++k)
                if (trial[k] != 0.0) on.push_back(k);
            const auto a = static_cast<Eigen::Index>(on.size());
            Eigen::MatrixXd h(a, a);
            Eigen::VectorXd rhs(a);
            for (Eigen::Index i = 0; i < a; ++i) {
                for (Eigen::Index j = 0; j < a; ++j) h(i, j) = hess(on[i], on[j]);
                h(i, i) += l2;
                const double b = trial[on[i]];
                rhs[i] = -(q[on[i]] + l2 * b + std::copysign(l1, b));
            }
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(a);
            if (a > 0) {
                Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
                if (ldlt.info() != Eigen::Success) return false;
                delta = ldlt.solve(rhs);
                if (!delta.allFinite()) return false;
            }
            Eigen::VectorXd next_q = q;
            for (Eigen::Index i = 0; i < a; ++i) {
                const double b = trial[on[i]] + delta[i];
                if (b == 0.0 || std::signbit(b) != std::signbit(trial[on[i]])) return false;
                next_q.noalias() += delta[i] * hess.col(on[i]);
            }
            for (Eigen::Index k = 0; k < m; ++k)
                if (trial[k] == 0.0 && std::abs(next_q[k]) > l1 + inner_tol) return false;
            for (Eigen::Index i = 0; i < a; ++i) trial[on[i]] += delta[i];
            q = std::move(next_q);
            return true;
        };
        int next_settle = 4, settle_gap = 5;
        for (int sweep = 0; sweep < 100000; ++sweep) {
            if (sweep == next_settle) {
                if (settle()) break;
                next_settle += settle_gap;
                settle_gap *= 2;
            }
            double largest = 0.0;
            for (Eigen::Index k = 0; k < m; ++k) {
                const double curv = hess(k, k) + l2;
                const double old = trial[k];
                double next = 0.0;
                if (curv > 0.0) next = soft_threshold(curv * old - (q[k] + l2 * old), l1) / curv;
                if (next == old) continue;
                const double step = next - old;
                q.noalias() += step * hess.col(k);
                trial[k] = next;
                largest = std::max(largest, curv * std::abs(step));
            }
            if (largest <= inner_tol) break;
        }

        Eigen::VectorXd direction = Eigen::VectorXd::Zero(p);
        for (Eigen::Index k = 0; k < m; ++k) direction[working[k]] = trial[k] - beta[working[k]];

        double t = 1.0;
        bool finite_seen = false, accepted = false;
        Eigen::VectorXd candidate, cand_eta;
        double cand_obj = 0.0;
        for (int h = 0; h <= 30; ++h, t *= 0.5) {
            candidate = beta + t * direction;
            cand_eta = x * candidate;
            cand_obj = problem.loss(cand_eta) * inv_n + penalty(candidate, lambda, alpha);
            if (!std::isfinite(cand_obj)) continue;
            finite_seen = true;
            if (cand_obj <= objective + 1e-13 * (1.0 + std::abs(objective))) {
                accepted = true;
                break;
            }
        }
        if (!finite_seen) throw FitError("diverged");
        if (!accepted) {
            model.converged = true;
            break;
        }
        beta = candidate;
        eta = cand_eta;
        objective = cand_obj;
    }
    model.beta = std::move(beta);
    return model;
}

// alpha = 0: damped Newton on the exact Hessian.
CoxModel fit_ridge_newton(const CoxProblem& problem, const Eigen::MatrixXd& x, double lambda,
                          const FitOptions& opts, Eigen::VectorXd beta) {
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    CoxModel model;
    model.lambda = lambda;
    model.alpha = 0.0;
    Eigen::VectorXd eta = x * beta, grad;
    Eigen::MatrixXd hess;
    double objective = problem.loss(eta) * inv_n + penalty(beta, lambda, 0.0);
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        model.iterations = iter;
        problem.newton_terms(eta, x, grad, hess);
        grad = grad * inv_n + lambda * beta;
        if (grad.cwiseAbs().maxCoeff() <= opts.tol) {
            model.converged = true;
            break;
        }
        hess *= inv_n;
        hess.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd direction = -ldlt.solve(grad);
        if (ldlt.info() != Eigen::Success || !direction.allFinite() || grad.dot(direction) > 0.0)
            direction = -grad;

        double t = 1.0;
        bool finite_seen = false, accepted = false;
        Eigen::VectorXd candidate, cand_eta;
        double cand_obj = 0.0;
        for (int h = 0; h <= 30; ++h, t *= 0.5) {
            candidate = beta + t * direction;
            cand_eta = x * candidate;
            cand_obj = problem.loss(cand_eta) * inv_n + penalty(candidate, lambda, 0.0);
            if (!std::isfinite(cand_obj)) continue;
            finite_seen = true;
            if (cand_obj <= objective + 1e-13 * (1.0 + std::abs(objective))) {
                accepted = true;
                break;
            }
        }
        if (!finite_seen) throw FitError("diverged");
        if (!accepted) {
            model.converged = true;
            break;
        }
        beta = candidate;
        eta = cand_eta;
        objective = cand_obj;
    }
    model.beta = std::move(beta);
    return model;
}

CoxModel fit_any(const CoxProblem& problem, const Eigen::MatrixXd& x, double lambda, double alpha,
                 const FitOptions& opts, Eigen::VectorXd beta) {
    if (alpha == 0.0 && x.cols() > 0 && x.cols() <= 256)
        return fit_ridge_newton(problem, x, lambda, opts, std::move(beta));
    return fit_from(problem, x, lambda, alpha, opts, std::move(beta));
}

void check_fit_args(double lambda, double alpha, const FitOptions& opts) {
    if (!(lambda >= 0.0)) throw ValidationError("lambda must be non-negative");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
}

}  // namespace

CoxModel fit_elastic_net(const Dataset& ds, double lambda, double alpha, const FitOptions& opts) {
    check_fit_args(lambda, alpha, opts);
    CoxProblem problem(ds.outcomes());
    return fit_any(problem, ds.x(), lambda, alpha, opts, Eigen::VectorXd::Zero(ds.cols()));
}

std::vector<CoxModel> fit_elastic_net_path(const Dataset& ds, std::span<const double> lambdas,
                                           double alpha, const FitOptions& opts) {
    CoxProblem problem(ds.outcomes());
    std::vector<CoxModel> path;
    path.reserve(lambdas.size());
    Eigen::VectorXd start = Eigen::VectorXd::Zero(ds.cols());
    const Eigen::MatrixXd& x = ds.x();
    for (double lambda : lambdas) {
        check_fit_args(lambda, alpha, opts);
        path.push_back(fit_any(problem, x, lambda, alpha, opts, start));
        start = path.back().beta;
    }
    return path;
}

// ---------------------------------------------------------------------------
// Ridge evaluator

std::vector<double> ridge_lambda_grid(const Dataset& ds) {
    double top = ds.cols() ? lambda_max(ds, 1.0) : 0.0;
    if (!(top > 0.0)) top = 1.0;
    return lambda_grid(10.0 * top, 1e-4, 20);
}

CoxModel fit_ridge_evaluator(const Dataset& ds, std::span<const double> lambdas,
                             std::uint64_t seed, const FitOptions& opts) {
    if (ds.events() == 0) throw ValidationError("no events");
    if (ds.cols() == 0) {
        CoxModel null_model;
        null_model.alpha = 0.0;
        null_model.converged = true;
        return null_model;
    }
    if (lambdas.empty()) throw ValidationError("empty lambda grid");
    std::vector<double> grid(lambdas.begin(), lambdas.end());
    std::sort(grid.begin(), grid.end(), std::greater<>());

    std::size_t chosen = grid.size() / 2;
    if (ds.rows() >= 3) {
        const FoldPlan plan = make_folds(static_cast<int>(ds.rows()), 3, 1, seed);
        std::vector<double> sum(grid.size(), 0.0);
        std::vector<int> used(grid.size(), 0);
        for (int f = 0; f < 3; ++f) {
            const auto train_rows = plan.train(0, f, static_cast<int>(ds.rows()));
            const Dataset train = ds.select_rows(train_rows);
            const Dataset test = ds.select_rows(plan.test(0, f));
            if (train.events() == 0) continue;
            std::vector<CoxModel> path;
            try {
                path = fit_elastic_net_path(train, grid, 0.0, opts);
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
        double best = -1.0;
        for (std::size_t l = 0; l < grid.size(); ++l) {
            if (used[l] == 0) continue;
            const double mean = sum[l] / used[l];
            if (mean > best) {
                best = mean;
                chosen = l;
            }
        }
    }
    const auto path = fit_elastic_net_path(ds, std::span(grid).first(chosen + 1), 0.0, opts);
    return path.back();
}

// ---------------------------------------------------------------------------
// Componentwise likelihood boosting

CoxModel componentwise_boost(const Dataset& ds, const BoostConfig& cfg) {
    if (cfg.steps < 0) throw ValidationError("boosting steps must be non-negative");
    CoxProblem problem(ds.outcomes());
    const double pen = cfg.penalty.value_or(9.0 * problem.events());
    if (!(pen >= 0.0)) throw ValidationError("boosting penalty must be non-negative");

    const Eigen::Index p = ds.cols();
    CoxModel model;
    model.beta = Eigen::VectorXd::Zero(p);
    model.lambda = pen;
    model.alpha = 0.0;
    model.converged = true;
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(ds.rows());
    Eigen::VectorXd scores, infos;
    double current = problem.loss(eta);

    for (int step = 0; step < cfg.steps; ++step) {
        Eigen::Index best = -1;
        double best_stat = 0.0, best_update = 0.0;
        problem.directional_all(eta, ds.x(), scores, infos);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double score = scores[j];
            const double denom = infos[j] + pen;
            if (!(denom > 0.0)) continue;
            const double stat = score * score / denom;
            if (stat > best_stat) {
                best_stat = stat;
                best = j;
                best_update = score / denom;
            }
        }
        if (best < 0 || best_stat <= 1e-14 * (1.0 + std::abs(current))) break;
        const Eigen::VectorXd next_eta = eta + best_update * ds.x().col(best);
        const double next = problem.loss(next_eta);
        if (!(next <= current)) break;
        model.beta[best] += best_update;
        eta = next_eta;
        current = next;
        model.iterations = step + 1;
    }
    return model;
}

double fit_univariate(const CoxProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& x) {
    double beta = 0.0;
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(x.size());
    double current = problem.loss(eta);
    for (int iter = 0; iter < 50; ++iter) {
        double score, info;
        problem.directional(eta, x, score, info);
        if (!(info > 0.0)) break;
        double step = score / info;
        bool moved = false;
        for (int h = 0; h < 30; ++h, step *= 0.5) {
            const Eigen::VectorXd trial = (beta + step) * x;
            const double value = problem.loss(trial);
            if (std::isfinite(value) && value <= current) {
                beta += step;
                eta = trial;
                current = value;
                moved = true;
                break;
            }
        }
        if (!moved || std::abs(step) <= 1e-9 * (1.0 + std::abs(beta))) break;
    }
    return beta;
}

}  // namespace censel
