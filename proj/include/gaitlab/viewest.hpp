#pragma once

#include <json.hpp>
#include <optional>
#include <vector>

#include "gaitlab/classify.hpp"
#include "gaitlab/dataset.hpp"
#include "gaitlab/subspace.hpp"

namespace gaitlab {

// Slopes of the two lines joining the topmost and the bottommost silhouette
// points of a sequence's first and last frames. Computed on the raw camera
// frames: size normalization would erase the height drift that carries the
// view signal.
struct SlopePair {
    double mP = 0.0;  // through the top points
    double mQ = 0.0;  // through the bottom points
};

// Vertical displacement with no horizontal displacement caps the slope here
// instead of going infinite.
inline constexpr double kSlopeCap = 1e6;

// The eleven camera angles the estimator can ever report, in degrees. 0
// approaches the camera, 180 walks away; everything between is classified
// from the slope pair.
std::vector<int> view_angles();        // 0, 18, ..., 180
std::vector<int> trainable_angles();   // 18, ..., 162

// Point extraction ties (flat head, level feet) go to the leftmost pixel.
// Throws GaitError when the sequence is shorter than two frames or either
// terminal frame holds no foreground.
SlopePair slope_features(const GaitSequence& seq);

// A walk along the optical axis barely moves in the image, so the first and
// last silhouettes land on top of each other: bounding-box IoU at least
// `min_iou` reports 0 when the box grew (approaching) and 180 otherwise.
// Any sideways walk returns nothing and is left to the classifier.
std::optional<int> coronal_check(const GaitSequence& seq, double min_iou = 0.5);

// Discriminant-Bayes view classifier over slope pairs. Must be trained on
// every angle in trainable_angles(); the coronal pair never reaches it.
struct ViewModel {
    LdaModel lda;
    MgBayesModel bayes;  // classes are the angles in degrees
    double min_iou = 0.5;

    nlohmann::json to_json() const;
    static ViewModel from_json(const nlohmann::json& j);
};

// One angle label per slope pair; every trainable angle needs at least one
// sample, anything outside that set is fatal.
ViewModel view_fit(const std::vector<SlopePair>& feats, const std::vector<int>& angles);

// Classifies a bare slope pair, bypassing the coronal branch. Fatal on a
// model that lacks part of the trainable angle set.
int view_classify(const ViewModel& model, const SlopePair& feat);

// coronal_check first, slope classification otherwise.
int view_predict(const ViewModel& model, const GaitSequence& seq);

}  // namespace gaitlab
