#include "gaitlab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

#include "gaitlab/errors.hpp"
#include "matjson.hpp"

namespace gaitlab {

namespace {

constexpr double kShrink = 1e-4;

Eigen::MatrixXd shrink_if_singular(Eigen::MatrixXd sigma, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        std::cerr << "warning: " << what << ": singular covariance, shrinking toward diagonal\n";
        sigma = (1.0 - kShrink) * sigma +
                kShrink * Eigen::MatrixXd(sigma.diagonal().asDiagonal());
    }
    return sigma;
}

// Cholesky with a deterministic ridge escalation for evaluation only; the
// stored covariance stays as fitted.
Eigen::LLT<Eigen::MatrixXd> chol_for_eval(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return llt;
    const double scale = std::max(1.0, sigma.diagonal().mean());
    double ridge = 1e-10 * scale;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    for (int i = 0; i < 24; ++i, ridge *= 10.0) {
        llt.compute(sigma + ridge * eye);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw DegenerateData("covariance cannot be factorized even with ridge");
}

double log_density(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& centered) {
    const Eigen::VectorXd half = llt.matrixL().solve(centered);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < centered.size(); ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const double d = static_cast<double>(centered.size());
    return -0.5 * (d * std::log(2.0 * M_PI) + logdet + half.squaredNorm());
}

}  // namespace

MgBayesModel mgbayes_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                         CovarianceMode mode) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw GaitError("mgbayes_fit: one label per sample required");

    std::map<int, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < X.rows(); ++i) groups[y[static_cast<std::size_t>(i)]].push_back(i);
    if (groups.empty()) throw GaitError("mgbayes_fit: no samples");
    const std::size_t min_per_class = mode == CovarianceMode::PerClass ? 2 : 1;
    for (const auto& [label, rows] : groups)
        if (rows.size() < min_per_class)
            throw GaitError("mgbayes_fit: class " + std::to_string(label) + " too small for mode");

    const Eigen::Index d = X.cols();
    const auto n_classes = static_cast<Eigen::Index>(groups.size());

    MgBayesModel model;
    model.mode = mode;
    model.means.resize(n_classes, d);
    model.priors.resize(n_classes);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
    Eigen::Index k = 0;
    for (const auto& [label, rows] : groups) {
        model.classes.push_back(label);
        Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
        for (Eigen::Index r : rows) m += X.row(r).transpose();
        m /= static_cast<double>(rows.size());
        model.means.row(k) = m.transpose();
        model.priors(k) = static_cast<double>(rows.size()) / static_cast<double>(X.rows());

        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index r : rows) {
            const Eigen::VectorXd dlt = X.row(r).transpose() - m;
            scatter.noalias() += dlt * dlt.transpose();
        }
        if (mode == CovarianceMode::PerClass)
            model.class_sigmas.push_back(shrink_if_singular(
                scatter / static_cast<double>(rows.size()), "mgbayes_fit"));
        else
            pooled += scatter;
        ++k;
    }
    if (mode == CovarianceMode::Shared)
        model.shared_sigma =
            shrink_if_singular(pooled / static_cast<double>(X.rows()), "mgbayes_fit");
    return model;
}

static Eigen::VectorXd class_log_scores(const MgBayesModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.means.cols())
        throw GaitError("mgbayes_posterior: feature dimension mismatch");

    const auto n_classes = static_cast<Eigen::Index>(model.classes.size());
    Eigen::VectorXd logp(n_classes);

    Eigen::LLT<Eigen::MatrixXd> shared;
    if (model.mode == CovarianceMode::Shared) shared = chol_for_eval(model.shared_sigma);

    for (Eigen::Index k = 0; k < n_classes; ++k) {
        const Eigen::VectorXd centered = x - model.means.row(k).transpose();
        Eigen::LLT<Eigen::MatrixXd> own;
        const Eigen::LLT<Eigen::MatrixXd>* llt = &shared;
        if (model.mode == CovarianceMode::PerClass) {
            own = chol_for_eval(model.class_sigmas[static_cast<std::size_t>(k)]);
            llt = &own;
        }
        logp(k) = std::log(model.priors(k)) + log_density(*llt, centered);
    }
    return logp;
}

Eigen::VectorXd mgbayes_posterior(const MgBayesModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd logp = class_log_scores(model, x);
    const double hi = logp.maxCoeff();
    Eigen::VectorXd post = (logp.array() - hi).exp();
    return post / post.sum();
}

Eigen::VectorXd mgbayes_log_posterior(const MgBayesModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd logp = class_log_scores(model, x);
    const double hi = logp.maxCoeff();
    const double lse = hi + std::log((logp.array() - hi).exp().sum());
    return logp.array() - lse;
}

int mgbayes_predict(const MgBayesModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd post = mgbayes_posterior(model, x);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < post.size(); ++k)
        if (post(k) > post(best)) best = k;
    return model.classes[static_cast<std::size_t>(best)];
}

KnnModel knn_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, int k) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw GaitError("knn_fit: one label per sample required");
    if (k < 1 || k > X.rows()) throw GaitError("knn_fit: k out of range");
    return KnnModel{X, y, k};
}

int knn_predict(const KnnModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.gallery.cols())
        throw GaitError("knn_predict: feature dimension mismatch");

    const Eigen::Index n = model.gallery.rows();
    std::vector<std::pair<double, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        order.emplace_back((model.gallery.row(i).transpose() - x).squaredNorm(), i);
    // stable sort keeps insertion order among equal distances
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::map<int, int> counts;
    for (int i = 0; i < model.k; ++i)
        ++counts[model.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)].second)]];
    int best = counts.begin()->first;
    for (const auto& [label, c] : counts)
        if (c > counts[best]) best = label;
    return best;
}

int majority_vote(const std::vector<int>& labels, const std::vector<double>& confidences) {
    if (labels.empty()) throw GaitError("majority_vote: empty vote list");
    if (!confidences.empty() && confidences.size() != labels.size())
        throw GaitError("majority_vote: one confidence per vote required");

    std::map<int, int> counts;
    std::map<int, double> conf_sum;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++counts[labels[i]];
        if (!confidences.empty()) conf_sum[labels[i]] += confidences[i];
    }

    int best = labels[0];
    bool first = true;
    for (const auto& [label, c] : counts) {
        if (first) {
            best = label;
            first = false;
            continue;
        }
        if (c > counts[best]) {
            best = label;
        } else if (c == counts[best] && !confidences.empty()) {
            const double mean_new = conf_sum[label] / c;
            const double mean_best = conf_sum[best] / counts[best];
            if (mean_new > mean_best) best = label;
        }
        // equal count without a confidence edge keeps the lower label
    }
    return best;
}

nlohmann::json MgBayesModel::to_json() const {
    nlohmann::json sigmas = nlohmann::json::array();
    for (const auto& s : class_sigmas) sigmas.push_back(mat_to_json(s));
    return {{"format", 1},
            {"kind", "mgbayes"},
            {"classes", classes},
            {"means", mat_to_json(means)},
            {"priors", vec_to_json(priors)},
            {"mode", mode == CovarianceMode::Shared ? "shared" : "per_class"},
            {"shared_sigma", mat_to_json(shared_sigma)},
            {"class_sigmas", std::move(sigmas)}};
}

MgBayesModel MgBayesModel::from_json(const nlohmann::json& j) {
    require_format(j, "mgbayes");
    MgBayesModel m;
    m.classes = j.at("classes").get<std::vector<int>>();
    m.means = mat_from_json(j.at("means"));
    m.priors = vec_from_json(j.at("priors"));
    m.mode = j.at("mode").get<std::string>() == "shared" ? CovarianceMode::Shared
                                                         : CovarianceMode::PerClass;
    m.shared_sigma = mat_from_json(j.at("shared_sigma"));
    for (const auto& s : j.at("class_sigmas")) m.class_sigmas.push_back(mat_from_json(s));
    return m;
}

nlohmann::json KnnModel::to_json() const {
    return {{"format", 1},
            {"kind", "knn"},
            {"gallery", mat_to_json(gallery)},
            {"labels", labels},
            {"k", k}};
}

KnnModel KnnModel::from_json(const nlohmann::json& j) {
    require_format(j, "knn");
    KnnModel m;
    m.gallery = mat_from_json(j.at("gallery"));
    m.labels = j.at("labels").get<std::vector<int>>();
    m.k = j.at("k").get<int>();
    return m;
}

}  // namespace gaitlab
