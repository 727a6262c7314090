#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "censel/data.hpp"

namespace censel {

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Fitted Cox model without intercept; risk ordering is given by X * beta.
struct CoxModel {
    Eigen::VectorXd beta;
    double lambda = 0.0;
    double alpha = 1.0;
    bool converged = false;
    int iterations = 0;

    Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x) const;
};

struct FitOptions {
    double tol = 1e-7;
    int max_iter = 1000;
};

struct BoostConfig {
    int steps = 100;
    // Ridge penalty on each componentwise update. Unset means 9 x (number of
    // events), which shrinks a unit-information update to about a tenth.
    std::optional<double> penalty;
};

/// Breslow partial likelihood bookkeeping for one set of outcomes: rows sorted
/// by time with tied times grouped into one risk set.
class CoxProblem {
public:
    explicit CoxProblem(std::span<const SurvivalOutcome> outcomes);

    std::size_t size() const { return order_.size(); }
    int events() const { return events_; }

    /// Negative log partial likelihood at linear predictor `eta`.
    double loss(const Eigen::VectorXd& eta) const;

    /// Working quantities at `eta`: u = -d loss / d eta and w = diagonal of
    /// d2 loss / d eta2. Returns the loss.
    double working(const Eigen::VectorXd& eta, Eigen::VectorXd& u, Eigen::VectorXd& w) const;

    /// Score and information of the loss along a single column at `eta`:
    /// score = -d loss / d t, info = d2 loss / d t2 for eta + t * x.
    void directional(const Eigen::VectorXd& eta, const Eigen::Ref<const Eigen::VectorXd>& x,
                     double& score, double& info) const;

    /// `directional` for every column of `x` at once.
    void directional_all(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x, Eigen::VectorXd& score,
                         Eigen::VectorXd& info) const;

    /// Gradient and full Hessian of the loss with respect to beta for
    /// eta = x * beta. Returns the loss.
    double newton_terms(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x, Eigen::VectorXd& grad,
                        Eigen::MatrixXd& hess) const;

private:
    struct Group {
        int start;  // first sorted position with this time
        int end;    // one past the last
        int deaths;
    };
    void exp_shifted(const Eigen::VectorXd& eta, std::vector<double>& e, double& shift) const;

    std::vector<int> order_;       // row ids, ascending time
    std::vector<int> group_of_;    // sorted position -> group
    std::vector<Group> groups_;
    std::vector<std::uint8_t> event_;  // by row id
    int events_ = 0;
};

double neg_log_partial_likelihood(const Eigen::VectorXd& beta, const Dataset& ds);
Eigen::VectorXd plik_gradient(const Eigen::VectorXd& beta, const Dataset& ds);

/// Smallest lambda at which the elastic-net solution is identically zero.
double lambda_max(const Dataset& ds, double alpha);

/// Log-spaced grid from `top` down to `top * ratio`, descending.
std::vector<double> lambda_grid(double top, double ratio, int points);

/// Minimizes loss(beta) / n + lambda * (alpha * |beta|_1 + (1 - alpha) * |beta|^2 / 2).
CoxModel fit_elastic_net(const Dataset& ds, double lambda, double alpha,
                         const FitOptions& opts = {});

/// Warm-started fits along a descending lambda sequence.
std::vector<CoxModel> fit_elastic_net_path(const Dataset& ds, std::span<const double> lambdas,
                                           double alpha, const FitOptions& opts = {});

/// Default lambda grid for the ridge evaluator: 20 log-spaced points from ten
/// times the lasso lambda_max down to 1e-3 of it.
std::vector<double> ridge_lambda_grid(const Dataset& ds);

/// Ridge Cox model with lambda picked by 3-fold CV on the C-index. An empty
/// column set yields the null model (constant risk).
CoxModel fit_ridge_evaluator(const Dataset& ds, std::span<const double> lambdas,
                             std::uint64_t seed, const FitOptions& opts = {1e-6, 1000});

/// Componentwise likelihood boosting. Importance of feature j is |beta_j|.
CoxModel componentwise_boost(const Dataset& ds, const BoostConfig& cfg = {});

/// Maximum partial-likelihood coefficient of a single column.
double fit_univariate(const CoxProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ConcordanceCounts {
    double comparable = 0;
    double concordant = 0;
    double tied_risk = 0;
};

/// Harrell's pair counts: (i, j) is comparable when the earlier time is an
/// event and the times differ; higher risk on the earlier time is concordant.
ConcordanceCounts concordance_counts(std::span<const double> risk,
                                     std::span<const SurvivalOutcome> outcomes);

/// (concordant + 0.5 * tied_risk) / comparable. Throws when nothing is comparable.
double concordance_index(std::span<const double> risk, std::span<const SurvivalOutcome> outcomes);

}  // namespace censel
