#include "gaitlab/auth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gaitlab/errors.hpp"
#include "matjson.hpp"

namespace gaitlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool knows(const MgBayesModel& m, int id) {
    return std::binary_search(m.classes.begin(), m.classes.end(), id);
}

}  // namespace

Recognizer recognizer_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                          double retention, CovarianceMode mode) {
    Recognizer r;
    r.cda = cda_fit(X, y, retention);
    r.bayes = mgbayes_fit(cda_transform(r.cda, X), y, mode);
    return r;
}

int recognizer_predict(const Recognizer& r, const Eigen::VectorXd& x) {
    return mgbayes_predict(r.bayes, cda_transform(r.cda, x.transpose()).row(0));
}

double recognizer_log_posterior(const Recognizer& r, const Eigen::VectorXd& x, int id) {
    const auto it = std::lower_bound(r.bayes.classes.begin(), r.bayes.classes.end(), id);
    if (it == r.bayes.classes.end() || *it != id) return -kInf;
    const Eigen::VectorXd logp =
        mgbayes_log_posterior(r.bayes, cda_transform(r.cda, x.transpose()).row(0));
    return logp(static_cast<Eigen::Index>(it - r.bayes.classes.begin()));
}

double recognizer_ccr(const Recognizer& r, const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (static_cast<std::size_t>(X.rows()) != y.size() || y.empty())
        throw GaitError("recognizer_ccr: one label per probe required");
    int hits = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        hits += recognizer_predict(r, X.row(i)) == y[static_cast<std::size_t>(i)];
    return static_cast<double>(hits) / static_cast<double>(X.rows());
}

AuthDecision auth_threshold_nn(const Claim& c, const Eigen::MatrixXd& gallery,
                               const std::vector<int>& gallery_ids, double theta_d) {
    if (static_cast<std::size_t>(gallery.rows()) != gallery_ids.size() || gallery_ids.empty())
        throw GaitError("auth_threshold_nn: one id per gallery row required");
    if (theta_d < 0.0) throw GaitError("auth_threshold_nn: negative distance threshold");
    if (gallery.cols() != c.feature.size())
        throw GaitError("auth_threshold_nn: feature dimension mismatch");

    AuthDecision d;
    d.paradigm = AuthParadigm::ThresholdNn;
    d.score = kInf;
    for (Eigen::Index i = 0; i < gallery.rows(); ++i) {
        if (gallery_ids[static_cast<std::size_t>(i)] != c.claimed) continue;
        d.score = std::min(d.score, (gallery.row(i).transpose() - c.feature).norm());
    }
    d.unknown_id = std::isinf(d.score);
    d.accept = d.score < theta_d;
    return d;
}

AuthDecision auth_msm(const Claim& c, const Recognizer& r) {
    AuthDecision d;
    d.paradigm = AuthParadigm::Msm;
    d.unknown_id = !knows(r.bayes, c.claimed);
    d.accept = recognizer_predict(r, c.feature) == c.claimed;
    d.score = d.accept ? 1.0 : 0.0;
    return d;
}

AuthDecision auth_msm_2p(const Claim& c, const Recognizer& r1, const Recognizer& r2) {
    const AuthDecision a = auth_msm(c, r1);
    const AuthDecision b = auth_msm(c, r2);
    AuthDecision d;
    d.paradigm = AuthParadigm::Msm;
    d.unknown_id = a.unknown_id && b.unknown_id;
    d.accept = a.accept || b.accept;
    d.score = d.accept ? 1.0 : 0.0;
    return d;
}

AuthDecision auth_bt(const Claim& c, const Recognizer& r, double theta_p) {
    if (!(theta_p > 0.0 && theta_p < 1.0))
        throw GaitError("auth_bt: threshold probability must lie strictly inside (0, 1)");
    AuthDecision d;
    d.paradigm = AuthParadigm::Bayes;
    d.unknown_id = !knows(r.bayes, c.claimed);
    d.score = recognizer_log_posterior(r, c.feature, c.claimed);
    d.accept = d.score > std::log(theta_p);
    return d;
}

AuthDecision auth_bt_2p(const Claim& c, const Recognizer& r1, double theta_p,
                        const Recognizer& r2, double theta_q) {
    const AuthDecision a = auth_bt(c, r1, theta_p);
    const AuthDecision b = auth_bt(c, r2, theta_q);
    AuthDecision d;
    d.paradigm = AuthParadigm::Bayes;
    d.unknown_id = a.unknown_id && b.unknown_id;
    d.accept = a.accept || b.accept;
    d.score = std::max(a.score, b.score);
    return d;
}

ErrorRates compute_error_rates(const std::vector<AuthDecision>& decisions,
                               const std::vector<Claim>& claims) {
    if (decisions.size() != claims.size() || claims.empty())
        throw GaitError("compute_error_rates: one decision per claim required");

    int genuine = 0, rejected_genuine = 0;
    int t1 = 0, accepted_t1 = 0;
    int t2 = 0, accepted_t2 = 0;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        const bool accept = decisions[i].accept;
        switch (claims[i].truth) {
            case ClaimTruth::Genuine:
                ++genuine;
                rejected_genuine += !accept;
                break;
            case ClaimTruth::Type1:
                ++t1;
                accepted_t1 += accept;
                break;
            case ClaimTruth::Type2:
                ++t2;
                accepted_t2 += accept;
                break;
        }
    }
    if (genuine == 0 || t1 + t2 == 0)
        throw GaitError("compute_error_rates: need genuine and impostor claims");

    ErrorRates r;
    r.frr = static_cast<double>(rejected_genuine) / genuine;
    if (t1) r.far_type1 = static_cast<double>(accepted_t1) / t1;
    if (t2) r.far_type2 = static_cast<double>(accepted_t2) / t2;
    if (t1 && t2)
        r.far_mean = (*r.far_type1 + *r.far_type2) / 2.0;
    else
        r.far_mean = t1 ? *r.far_type1 : *r.far_type2;
    r.aer = (*r.frr + *r.far_mean) / 2.0;
    return r;
}

ErrorRates roc_and_eer(const std::vector<double>& scores,
                       const std::vector<ClaimTruth>& truths, AuthParadigm paradigm) {
    if (paradigm == AuthParadigm::Msm)
        throw GaitError("roc_and_eer: the match-bit paradigm has no threshold to sweep");
    if (scores.size() != truths.size() || scores.empty())
        throw GaitError("roc_and_eer: one truth per score required");

    // fold both acceptance directions into accept-below-threshold
    std::vector<double> dist(scores);
    if (paradigm == AuthParadigm::Bayes)
        for (double& s : dist) s = -s;

    std::vector<double> gen, imp;
    for (std::size_t i = 0; i < dist.size(); ++i)
        (truths[i] == ClaimTruth::Genuine ? gen : imp).push_back(dist[i]);
    if (gen.empty() || imp.empty())
        throw GaitError("roc_and_eer: need genuine and impostor claims");
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> grid(dist);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> thresholds;
    thresholds.push_back(grid.front() - 1.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        thresholds.push_back(std::midpoint(grid[i - 1], grid[i]));
    thresholds.push_back(grid.back() + 1.0);

    const auto below = [](const std::vector<double>& v, double t) {
        return static_cast<double>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
    };

    ErrorRates r;
    std::vector<std::pair<double, double>> curve;  // (far, frr), far ascending
    for (double t : thresholds) {
        const double far = below(imp, t) / static_cast<double>(imp.size());
        const double frr = 1.0 - below(gen, t) / static_cast<double>(gen.size());
        curve.emplace_back(far, frr);
        r.roc.push_back({far, 1.0 - frr});
    }

    for (std::size_t k = 0; k < curve.size(); ++k) {
        const auto [far, frr] = curve[k];
        if (far < frr) continue;
        if (far == frr || k == 0) {
            r.eer = far;
            break;
        }
        const auto [far0, frr0] = curve[k - 1];
        const double t = (frr0 - far0) / ((far - far0) - (frr - frr0));
        r.eer = far0 + t * (far - far0);
        break;
    }
    return r;
}

TheoreticalMsm theoretical_msm_rates(double ccr, int n) {
    if (!(ccr >= 0.0 && ccr <= 1.0))
        throw GaitError("theoretical_msm_rates: ccr outside [0, 1]");
    if (n < 1) throw GaitError("theoretical_msm_rates: empty population");
    TheoreticalMsm t;
    t.frr = 1.0 - ccr;
    t.far = 1.0 / n;
    t.aer = (t.frr + t.far) / 2.0;
    t.far_type2 = t.frr / n;
    return t;
}

nlohmann::json Recognizer::to_json() const {
    return {{"format", 1}, {"kind", "recognizer"}, {"cda", cda.to_json()}, {"bayes", bayes.to_json()}};
}

Recognizer Recognizer::from_json(const nlohmann::json& j) {
    require_format(j, "recognizer");
    Recognizer r;
    r.cda = CdaModel::from_json(j.at("cda"));
    r.bayes = MgBayesModel::from_json(j.at("bayes"));
    return r;
}

}  // namespace gaitlab
