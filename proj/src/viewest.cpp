#include "gaitlab/viewest.hpp"

#include <algorithm>
#include <cmath>

#include "gaitlab/errors.hpp"
#include "gaitlab/image.hpp"
#include "matjson.hpp"

namespace gaitlab {

namespace {

struct Point {
    int x = 0, y = 0;
};

// Topmost and bottommost foreground pixels; ties broken toward the left.
// Row scans, so the first hit in a row is already the leftmost.
std::optional<std::pair<Point, Point>> extreme_points(const BinaryImage& img) {
    std::optional<Point> top, bottom;
    for (int y = 0; y < img.height && !top; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) {
                top = Point{x, y};
                break;
            }
    if (!top) return std::nullopt;
    for (int y = img.height - 1; y >= 0 && !bottom; --y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) {
                bottom = Point{x, y};
                break;
            }
    return std::make_pair(*top, *bottom);
}

double slope(const Point& a, const Point& b) {
    const int dx = b.x - a.x, dy = b.y - a.y;
    if (dx == 0) return dy == 0 ? 0.0 : std::copysign(kSlopeCap, dy);
    return static_cast<double>(dy) / dx;
}

}  // namespace

std::vector<int> view_angles() {
    std::vector<int> v;
    for (int a = 0; a <= 180; a += 18) v.push_back(a);
    return v;
}

std::vector<int> trainable_angles() {
    std::vector<int> v;
    for (int a = 18; a <= 162; a += 18) v.push_back(a);
    return v;
}

SlopePair slope_features(const GaitSequence& seq) {
    if (seq.frames.size() < 2)
        throw GaitError("slope_features: need at least two frames");
    const auto first = extreme_points(seq.frames.front());
    const auto last = extreme_points(seq.frames.back());
    if (!first || !last)
        throw GaitError("slope_features: terminal frame without foreground");
    return {slope(first->first, last->first), slope(first->second, last->second)};
}

std::optional<int> coronal_check(const GaitSequence& seq, double min_iou) {
    if (seq.frames.size() < 2)
        throw GaitError("coronal_check: need at least two frames");
    const Box a = foreground_box(seq.frames.front());
    const Box b = foreground_box(seq.frames.back());
    if (box_iou(a, b) < min_iou) return std::nullopt;
    return b.area() > a.area() ? 0 : 180;
}

ViewModel view_fit(const std::vector<SlopePair>& feats, const std::vector<int>& angles) {
    if (feats.empty() || feats.size() != angles.size())
        throw GaitError("view_fit: need one angle per slope pair");
    const std::vector<int> wanted = trainable_angles();
    for (int a : angles)
        if (!std::binary_search(wanted.begin(), wanted.end(), a))
            throw GaitError("view_fit: angle " + std::to_string(a) +
                            " is not in the trainable set");
    for (int a : wanted)
        if (std::find(angles.begin(), angles.end(), a) == angles.end())
            throw GaitError("view_fit: no training sample for angle " + std::to_string(a));

    Eigen::MatrixXd X(static_cast<Eigen::Index>(feats.size()), 2);
    for (std::size_t i = 0; i < feats.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = feats[i].mP;
        X(static_cast<Eigen::Index>(i), 1) = feats[i].mQ;
    }
    ViewModel m;
    m.lda = lda_fit(X, angles);
    m.bayes = mgbayes_fit(lda_transform(m.lda, X), angles);
    return m;
}

int view_classify(const ViewModel& model, const SlopePair& feat) {
    if (model.bayes.classes != trainable_angles())
        throw GaitError("view_classify: model does not cover the trainable angles");
    Eigen::MatrixXd x(1, 2);
    x << feat.mP, feat.mQ;
    return mgbayes_predict(model.bayes, lda_transform(model.lda, x).row(0));
}

int view_predict(const ViewModel& model, const GaitSequence& seq) {
    if (const auto coronal = coronal_check(seq, model.min_iou)) return *coronal;
    return view_classify(model, slope_features(seq));
}

nlohmann::json ViewModel::to_json() const {
    return {{"format", 1},
            {"kind", "view"},
            {"lda", lda.to_json()},
            {"bayes", bayes.to_json()},
            {"min_iou", min_iou}};
}

ViewModel ViewModel::from_json(const nlohmann::json& j) {
    require_format(j, "view");
    ViewModel m;
    m.lda = LdaModel::from_json(j.at("lda"));
    m.bayes = MgBayesModel::from_json(j.at("bayes"));
    m.min_iou = j.at("min_iou").get<double>();
    return m;
}

}  // namespace gaitlab
