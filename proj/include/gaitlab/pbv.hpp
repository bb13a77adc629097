#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "gaitlab/classify.hpp"
#include "gaitlab/dataset.hpp"
#include "gaitlab/features.hpp"
#include "gaitlab/subspace.hpp"

namespace gaitlab {

enum class Gender { Male, Female };

const char* gender_name(Gender g);      // "male" / "female"
Gender gender_from_name(const std::string& name);

enum class PbvFeature { Efd, Rcs };

// Gender classifier voting over per-frame predictions. Per-frame features go
// through LDA directly (no PCA step), then a Gaussian Bayes model on the
// projected space. Frames are used as given; run them through silhouette
// normalization first if they come straight from disk.
struct PbvModel {
    PbvFeature feature = PbvFeature::Rcs;
    int harmonics = kDefaultHarmonics;  // EFD mode only
    LdaModel lda;
    MgBayesModel bayes;
    int skipped_frames = 0;  // degenerate contours dropped during training

    nlohmann::json to_json() const;
    static PbvModel from_json(const nlohmann::json& j);
};

// Every frame of every sequence becomes one labeled training sample. Needs
// at least one sequence per gender. EFD mode skips frames whose contour is
// degenerate and records how many.
PbvModel pbv_train(const std::vector<GaitSequence>& sequences,
                   const std::vector<Gender>& genders, PbvFeature feature,
                   int harmonics = kDefaultHarmonics);

// Majority vote over per-frame predictions; frequency ties go to the gender
// with the higher mean posterior. Throws when every frame is degenerate.
Gender pbv_predict(const GaitSequence& sequence, const PbvModel& model);

struct PartialRow {
    double fraction = 0.0;
    int frames_used = 0;
    bool correct = false;
};

// Predicts on the first ceil(f * cycle) frames of the detected gait cycle for
// each requested fraction. Falls back to the whole sequence when no full
// cycle can be delimited.
std::vector<PartialRow> pbv_partial_eval(const PbvModel& model, const GaitSequence& sequence,
                                         Gender truth, const std::vector<double>& fractions);

}  // namespace gaitlab
