#include "gaitlab/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "gaitlab/errors.hpp"
#include "matjson.hpp"

namespace gaitlab {

namespace {

// First nonzero entry positive, so refits reproduce the same matrix.
void fix_row_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c)) > 1e-12) {
                if (m(r, c) < 0) m.row(r) = -m.row(r);
                break;
            }
}

}  // namespace

PcaModel pca_fit(const Eigen::MatrixXd& X, double retention) {
    if (X.rows() < 2) throw GaitError("pca_fit: need at least 2 samples");
    if (!(retention > 0.0) || retention > 1.0)
        throw GaitError("pca_fit: retention must be in (0, 1]");

    PcaModel model;
    model.mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();

    // Economy SVD. With far more columns than rows the right singular vectors
    // come cheaper through the n x n Gram matrix of the centered data.
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
    if (X.cols() > 4 * X.rows()) {
        const Eigen::MatrixXd gram = centered * centered.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw DegenerateData("pca_fit: eigensolver failed");
        const Eigen::Index m = gram.rows();
        s.resize(m);
        v.resize(X.cols(), m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double lambda = std::max(0.0, es.eigenvalues()(m - 1 - i));
            s(i) = std::sqrt(lambda);
            v.col(i) = s(i) > 0 ? Eigen::VectorXd(centered.transpose() *
                                                  es.eigenvectors().col(m - 1 - i) / s(i))
                                : Eigen::VectorXd::Zero(X.cols());
        }
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
        s = svd.singularValues();
        v = svd.matrixV();
    }

    const double tol =
        std::max(X.rows(), X.cols()) * std::numeric_limits<double>::epsilon() * s(0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    if (rank == 0)
        throw DegenerateData("pca_fit: input has no variance (all samples identical)");

    const Eigen::VectorXd var = s.array().square();
    const double total = var.sum();
    model.explained_ratio = var / total;

    Eigen::Index keep;
    if (retention >= 1.0) {
        keep = rank;
    } else {
        keep = 1;
        double cum = model.explained_ratio(0);
        while (keep < rank && cum < retention) {
            cum += model.explained_ratio(keep);
            ++keep;
        }
    }

    model.components = v.leftCols(keep).transpose();
    fix_row_signs(model.components);
    model.retained = static_cast<int>(keep);
    return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.mean.size())
        throw GaitError("pca_transform: feature dimension mismatch");
    return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

LdaModel lda_fit(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw GaitError("lda_fit: one label per sample required");

    std::map<int, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < X.rows(); ++i) groups[y[static_cast<std::size_t>(i)]].push_back(i);
    if (groups.size() < 2) throw GaitError("lda_fit: need at least 2 classes");
    for (const auto& [label, rows] : groups)
        if (rows.size() < 2)
            throw GaitError("lda_fit: class " + std::to_string(label) + " has fewer than 2 samples");

    const Eigen::Index d = X.cols();
    const Eigen::Index n = X.rows();
    const auto n_classes = static_cast<Eigen::Index>(groups.size());
    const Eigen::VectorXd grand_mean = X.colwise().mean();

    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d);
    LdaModel model;
    Eigen::MatrixXd mu(n_classes, d);
    Eigen::Index k = 0;
    for (const auto& [label, rows] : groups) {
        model.classes.push_back(label);
        Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
        for (Eigen::Index r : rows) m += X.row(r).transpose();
        m /= static_cast<double>(rows.size());
        mu.row(k) = m.transpose();
        for (Eigen::Index r : rows) {
            const Eigen::VectorXd dlt = X.row(r).transpose() - m;
            sw.noalias() += dlt * dlt.transpose();
        }
        const Eigen::VectorXd between = m - grand_mean;
        sb.noalias() += static_cast<double>(rows.size()) * between * between.transpose();
        ++k;
    }

    Eigen::LLT<Eigen::MatrixXd> llt(sw);
    if (llt.info() != Eigen::Success) {
        std::cerr << "warning: lda_fit: singular within-class scatter, shrinking toward diagonal\n";
        const double lambda = 1e-4;
        sw = (1.0 - lambda) * sw + lambda * Eigen::MatrixXd(sw.diagonal().asDiagonal());
        llt.compute(sw);
    }
    if (llt.info() != Eigen::Success) {
        // Zero-variance feature dimensions (constant columns) leave zero
        // diagonal entries that diagonal shrinkage cannot repair; an absolute
        // ridge scaled to the data always can.
        double ridge = 1e-10 * std::max(1.0, sw.trace() / static_cast<double>(d));
        for (int attempt = 0; attempt < 24 && llt.info() != Eigen::Success; ++attempt) {
            llt.compute(sw + ridge * Eigen::MatrixXd::Identity(d, d));
            ridge *= 10.0;
        }
        if (llt.info() != Eigen::Success)
            throw DegenerateData("lda_fit: within-class scatter not positive definite after shrinkage");
    }

    // Whiten the between-class scatter: eigenvectors of L^-1 Sb L^-T map back
    // through L^-T to Fisher directions.
    const Eigen::MatrixXd yw = llt.matrixL().solve(sb);
    const Eigen::MatrixXd zw = llt.matrixL().solve(yw.transpose());
    const Eigen::MatrixXd sym = 0.5 * (zw + zw.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw DegenerateData("lda_fit: eigensolver failed");

    const Eigen::VectorXd evals = es.eigenvalues();  // ascending
    const double top = evals(evals.size() - 1);
    if (!(top > 0)) throw DegenerateData("lda_fit: class means are indistinguishable");
    const double tol = top * 1e-9;
    Eigen::Index usable = 0;
    while (usable < evals.size() && evals(evals.size() - 1 - usable) > tol) ++usable;
    const Eigen::Index out_dim = std::min<Eigen::Index>(usable, n_classes - 1);

    model.projection.resize(out_dim, d);
    for (Eigen::Index i = 0; i < out_dim; ++i) {
        const Eigen::VectorXd q = es.eigenvectors().col(evals.size() - 1 - i);
        Eigen::VectorXd w = llt.matrixU().solve(q);
        model.projection.row(i) = (w / w.norm()).transpose();
    }
    fix_row_signs(model.projection);

    model.class_means = mu * model.projection.transpose();
    const Eigen::MatrixXd projected = X * model.projection.transpose();
    const Eigen::MatrixXd pc = projected.rowwise() - projected.colwise().mean();
    model.sigma = pc.transpose() * pc / static_cast<double>(n - 1);
    return model;
}

Eigen::MatrixXd lda_transform(const LdaModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.projection.cols())
        throw GaitError("lda_transform: feature dimension mismatch");
    return X * model.projection.transpose();
}

CdaModel cda_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, double retention) {
    CdaModel model;
    model.pca = pca_fit(X, retention);
    model.lda = lda_fit(pca_transform(model.pca, X), y);
    return model;
}

Eigen::MatrixXd cda_transform(const CdaModel& model, const Eigen::MatrixXd& X) {
    return lda_transform(model.lda, pca_transform(model.pca, X));
}

nlohmann::json PcaModel::to_json() const {
    return {{"format", 1},
            {"kind", "pca"},
            {"mean", vec_to_json(mean)},
            {"components", mat_to_json(components)},
            {"explained_ratio", vec_to_json(explained_ratio)},
            {"retained", retained}};
}

PcaModel PcaModel::from_json(const nlohmann::json& j) {
    require_format(j, "pca");
    PcaModel m;
    m.mean = vec_from_json(j.at("mean"));
    m.components = mat_from_json(j.at("components"));
    m.explained_ratio = vec_from_json(j.at("explained_ratio"));
    m.retained = j.at("retained").get<int>();
    return m;
}

nlohmann::json LdaModel::to_json() const {
    return {{"format", 1},
            {"kind", "lda"},
            {"projection", mat_to_json(projection)},
            {"classes", classes},
            {"class_means", mat_to_json(class_means)},
            {"sigma", mat_to_json(sigma)}};
}

LdaModel LdaModel::from_json(const nlohmann::json& j) {
    require_format(j, "lda");
    LdaModel m;
    m.projection = mat_from_json(j.at("projection"));
    m.classes = j.at("classes").get<std::vector<int>>();
    m.class_means = mat_from_json(j.at("class_means"));
    m.sigma = mat_from_json(j.at("sigma"));
    return m;
}

nlohmann::json CdaModel::to_json() const {
    return {{"format", 1}, {"kind", "cda"}, {"pca", pca.to_json()}, {"lda", lda.to_json()}};
}

CdaModel CdaModel::from_json(const nlohmann::json& j) {
    require_format(j, "cda");
    CdaModel m;
    m.pca = PcaModel::from_json(j.at("pca"));
    m.lda = LdaModel::from_json(j.at("lda"));
    return m;
}

}  // namespace gaitlab
