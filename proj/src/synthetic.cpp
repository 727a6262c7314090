#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <random>

#include <json.hpp>

#include "censel/data.hpp"

namespace censel {

namespace {

double censoring_at(const std::vector<double>& event_time,
                    const std::vector<double>& unit_censor, double rate) {
    std::size_t censored = 0;
    for (std::size_t i = 0; i < event_time.size(); ++i)
        if (unit_censor[i] / rate < event_time[i]) ++censored;
    return static_cast<double>(censored) / static_cast<double>(event_time.size());
}

}  // namespace

SyntheticData generate_synthetic(const SynthConfig& cfg) {
    if (cfg.n < 2) throw ValidationError("synthetic n must be at least 2");
    if (cfg.p < 1) throw ValidationError("synthetic p must be at least 1");
    if (!(cfg.target_censoring >= 0.0 && cfg.target_censoring < 1.0))
        throw ValidationError("target_censoring must lie in [0, 1)");
    if (!(cfg.correlation >= 0.0 && cfg.correlation < 1.0))
        throw ValidationError("correlation must lie in [0, 1)");
    if (cfg.relevant.size() > static_cast<std::size_t>(cfg.p))
        throw ValidationError("more planted effects than features");

    std::vector<double> beta(static_cast<std::size_t>(cfg.p), 0.0);
    for (const auto& e : cfg.relevant) {
        if (e.feature < 0 || e.feature >= cfg.p)
            throw ValidationError("planted feature index out of range");
        beta[e.feature] = e.beta;
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss;
    std::exponential_distribution<double> expo(1.0);

    const double shared = std::sqrt(cfg.correlation);
    const double own = std::sqrt(1.0 - cfg.correlation);
    Eigen::MatrixXd x(cfg.n, cfg.p);
    for (int i = 0; i < cfg.n; ++i) {
        const double common = gauss(rng);
        for (int j = 0; j < cfg.p; ++j) x(i, j) = shared * common + own * gauss(rng);
    }

    std::vector<double> event_time(static_cast<std::size_t>(cfg.n));
    std::vector<double> unit_censor(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        double eta = 0.0;
        for (int j = 0; j < cfg.p; ++j) eta += beta[j] * x(i, j);
        event_time[i] = expo(rng) / std::exp(eta);
        unit_censor[i] = expo(rng);
    }

    // Censoring grows monotonically with the censoring hazard; bisect on its log.
    double rate = 0.0;
    if (cfg.target_censoring > 0.0) {
        double lo = -40.0, hi = 40.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double c = censoring_at(event_time, unit_censor, std::exp(mid));
            if (std::abs(c - cfg.target_censoring) <= 0.5 / cfg.n) {
                lo = hi = mid;
                break;
            }
            (c < cfg.target_censoring ? lo : hi) = mid;
        }
        rate = std::exp(0.5 * (lo + hi));
    }

    std::vector<SurvivalOutcome> y(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        const double censor = rate > 0.0 ? unit_censor[i] / rate : INFINITY;
        const double t = std::min(event_time[i], censor);
        y[i].time = std::max(t, std::numeric_limits<double>::min());
        y[i].event = event_time[i] <= censor;
    }

    std::vector<FeatureMeta> meta(static_cast<std::size_t>(cfg.p));
    for (int j = 0; j < cfg.p; ++j) meta[j].name = "x" + std::to_string(j);

    SyntheticData out{Dataset(std::move(x), std::move(meta), std::move(y)), {}, 0.0};
    for (int j = 0; j < cfg.p; ++j)
        if (beta[j] != 0.0) out.relevant.push_back(j);
    out.realized_censoring = out.data.censoring_rate();
    return out;
}

void write_ground_truth(const SyntheticData& synth, const SynthConfig& cfg,
                        const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["relevant"] = nlohmann::json::array();
    doc["beta"] = nlohmann::json::object();
    for (const auto& e : cfg.relevant) {
        if (e.beta == 0.0) continue;
        const auto& name = synth.data.meta()[e.feature].name;
        doc["beta"][name] = e.beta;
    }
    for (int j : synth.relevant) doc["relevant"].push_back(synth.data.meta()[j].name);
    doc["n"] = cfg.n;
    doc["p"] = cfg.p;
    doc["seed"] = cfg.seed;
    doc["target_censoring"] = cfg.target_censoring;
    doc["realized_censoring"] = synth.realized_censoring;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace censel
