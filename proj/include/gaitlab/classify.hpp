#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

namespace gaitlab {

enum class CovarianceMode { Shared, PerClass };

// Gaussian class-conditional model. Shared mode pools the residual covariance
// across classes; per-class mode keeps one covariance per class.
struct MgBayesModel {
    std::vector<int> classes;  // sorted unique labels
    Eigen::MatrixXd means;     // classes x dim
    Eigen::VectorXd priors;    // empirical class frequencies
    CovarianceMode mode = CovarianceMode::Shared;
    Eigen::MatrixXd shared_sigma;
    std::vector<Eigen::MatrixXd> class_sigmas;

    nlohmann::json to_json() const;
    static MgBayesModel from_json(const nlohmann::json& j);
};

struct KnnModel {
    Eigen::MatrixXd gallery;
    std::vector<int> labels;
    int k = 1;

    nlohmann::json to_json() const;
    static KnnModel from_json(const nlohmann::json& j);
};

MgBayesModel mgbayes_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                         CovarianceMode mode = CovarianceMode::Shared);

// Posterior over model.classes, normalized in log space; sums to 1.
Eigen::VectorXd mgbayes_posterior(const MgBayesModel& model, const Eigen::VectorXd& x);

// log of the same posterior, kept in log space so that probabilities
// underflowing a double stay ordered.
Eigen::VectorXd mgbayes_log_posterior(const MgBayesModel& model, const Eigen::VectorXd& x);

// Argmax of the posterior; ties go to the lowest class label.
int mgbayes_predict(const MgBayesModel& model, const Eigen::VectorXd& x);

KnnModel knn_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, int k = 1);
int knn_predict(const KnnModel& model, const Eigen::VectorXd& x);

// Most frequent label. Frequency ties prefer the label with the higher mean
// confidence when confidences are given (one per vote), else the lower label.
int majority_vote(const std::vector<int>& labels,
                  const std::vector<double>& confidences = {});

}  // namespace gaitlab
