#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

namespace gaitlab {

// Principal-component projection. Rows of `components` are the directions,
// sorted by descending explained variance, each row unit-norm with its first
// nonzero entry positive.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;       // retained x dim
    Eigen::VectorXd explained_ratio;  // all singular directions, descending
    int retained = 0;

    nlohmann::json to_json() const;
    static PcaModel from_json(const nlohmann::json& j);
};

// Fisher discriminant projection plus the statistics downstream classifiers
// read off the projected gallery.
struct LdaModel {
    Eigen::MatrixXd projection;   // out_dim x dim, rows are directions
    std::vector<int> classes;     // sorted unique labels
    Eigen::MatrixXd class_means;  // classes x out_dim, projected
    Eigen::MatrixXd sigma;        // covariance of the whole projected set

    nlohmann::json to_json() const;
    static LdaModel from_json(const nlohmann::json& j);
};

struct CdaModel {
    PcaModel pca;
    LdaModel lda;

    nlohmann::json to_json() const;
    static CdaModel from_json(const nlohmann::json& j);
};

// Rows of X are samples. retention in (0,1]: keeps the smallest component
// count whose cumulative variance ratio reaches it; 1.0 keeps the full rank.
PcaModel pca_fit(const Eigen::MatrixXd& X, double retention);
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X);

// y holds one integer label per row of X. Projects onto at most
// (classes - 1) directions; a singular within-class scatter is shrunk toward
// its diagonal with a warning.
LdaModel lda_fit(const Eigen::MatrixXd& X, const std::vector<int>& y);
Eigen::MatrixXd lda_transform(const LdaModel& model, const Eigen::MatrixXd& X);

CdaModel cda_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, double retention);
Eigen::MatrixXd cda_transform(const CdaModel& model, const Eigen::MatrixXd& X);

}  // namespace gaitlab
