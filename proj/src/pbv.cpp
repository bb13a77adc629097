#include "gaitlab/pbv.hpp"

#include <cmath>
#include <optional>

#include "gaitlab/errors.hpp"
#include "gaitlab/preprocess.hpp"
#include "matjson.hpp"

namespace gaitlab {

namespace {

// Per-frame feature row, or nothing for a degenerate contour in EFD mode.
std::optional<Eigen::VectorXd> frame_feature(const BinaryImage& frame, PbvFeature kind,
                                             int harmonics) {
    if (kind == PbvFeature::Rcs) return rcs_features(frame);
    try {
        return efd_coefficients(trace_contour(frame), harmonics).flatten();
    } catch (const DegenerateContour&) {
        return std::nullopt;
    }
}

int gender_label(Gender g) { return g == Gender::Male ? 0 : 1; }
Gender gender_from_label(int label) { return label == 0 ? Gender::Male : Gender::Female; }

}  // namespace

const char* gender_name(Gender g) { return g == Gender::Male ? "male" : "female"; }

Gender gender_from_name(const std::string& name) {
    if (name == "male") return Gender::Male;
    if (name == "female") return Gender::Female;
    throw GaitError("unknown gender label: " + name);
}

PbvModel pbv_train(const std::vector<GaitSequence>& sequences,
                   const std::vector<Gender>& genders, PbvFeature feature, int harmonics) {
    if (sequences.size() != genders.size())
        throw GaitError("pbv_train: one gender label per sequence required");
    bool have_male = false, have_female = false;
    for (Gender g : genders) (g == Gender::Male ? have_male : have_female) = true;
    if (!have_male || !have_female)
        throw GaitError("pbv_train: need at least one sequence per gender");
    if (feature == PbvFeature::Efd && harmonics < 1)
        throw GaitError("pbv_train: need at least one harmonic");

    std::vector<Eigen::VectorXd> rows;
    std::vector<int> labels;
    int skipped = 0;
    for (std::size_t i = 0; i < sequences.size(); ++i)
        for (const auto& frame : sequences[i].frames) {
            if (auto f = frame_feature(frame, feature, harmonics)) {
                rows.push_back(std::move(*f));
                labels.push_back(gender_label(genders[i]));
            } else {
                ++skipped;
            }
        }
    if (rows.empty()) throw DegenerateData("pbv_train: no usable frames");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), rows[0].size());
    for (Eigen::Index i = 0; i < X.rows(); ++i) X.row(i) = rows[static_cast<std::size_t>(i)];

    PbvModel model;
    model.feature = feature;
    model.harmonics = harmonics;
    model.skipped_frames = skipped;
    model.lda = lda_fit(X, labels);
    model.bayes = mgbayes_fit(lda_transform(model.lda, X), labels);
    return model;
}

Gender pbv_predict(const GaitSequence& sequence, const PbvModel& model) {
    if (sequence.frames.empty()) throw GaitError("pbv_predict: empty sequence");

    std::vector<int> votes;
    std::vector<double> confidences;
    for (const auto& frame : sequence.frames) {
        const auto f = frame_feature(frame, model.feature, model.harmonics);
        if (!f) continue;
        const Eigen::VectorXd z = lda_transform(model.lda, f->transpose()).row(0).transpose();
        const Eigen::VectorXd post = mgbayes_posterior(model.bayes, z);
        Eigen::Index best;
        post.maxCoeff(&best);
        votes.push_back(model.bayes.classes[static_cast<std::size_t>(best)]);
        confidences.push_back(post(best));
    }
    if (votes.empty()) throw DegenerateContour("pbv_predict: every frame was degenerate");
    return gender_from_label(majority_vote(votes, confidences));
}

std::vector<PartialRow> pbv_partial_eval(const PbvModel& model, const GaitSequence& sequence,
                                         Gender truth, const std::vector<double>& fractions) {
    // Prefer one detected cycle. Too few troughs or a capture shorter than
    // the smoothing window both mean no cycle can be delimited, so either
    // falls back to the whole sequence.
    std::size_t begin = 0, length = sequence.frames.size();
    try {
        const CycleRange cycle = detect_gait_cycle(smooth_signal(lower_limb_signal(sequence.frames)));
        begin = static_cast<std::size_t>(cycle.start);
        length = static_cast<std::size_t>(cycle.length());
    } catch (const GaitError&) {
    }

    std::vector<PartialRow> rows;
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0)
            throw GaitError("pbv_partial_eval: fractions must lie in (0, 1]");
        const auto used = std::min(
            length, static_cast<std::size_t>(std::ceil(f * static_cast<double>(length))));

        GaitSequence part;
        part.key = sequence.key;
        part.frames.assign(sequence.frames.begin() + static_cast<std::ptrdiff_t>(begin),
                           sequence.frames.begin() + static_cast<std::ptrdiff_t>(begin + used));
        rows.push_back({f, static_cast<int>(used), pbv_predict(part, model) == truth});
    }
    return rows;
}

nlohmann::json PbvModel::to_json() const {
    return {{"format", 1},
            {"kind", "pbv"},
            {"feature", feature == PbvFeature::Efd ? "efd" : "rcs"},
            {"harmonics", harmonics},
            {"skipped_frames", skipped_frames},
            {"lda", lda.to_json()},
            {"bayes", bayes.to_json()}};
}

PbvModel PbvModel::from_json(const nlohmann::json& j) {
    require_format(j, "pbv");
    PbvModel model;
    const std::string feature = j.at("feature").get<std::string>();
    if (feature == "efd")
        model.feature = PbvFeature::Efd;
    else if (feature == "rcs")
        model.feature = PbvFeature::Rcs;
    else
        throw IoError("pbv model: unknown feature kind " + feature);
    model.harmonics = j.at("harmonics").get<int>();
    model.skipped_frames = j.at("skipped_frames").get<int>();
    model.lda = LdaModel::from_json(j.at("lda"));
    model.bayes = MgBayesModel::from_json(j.at("bayes"));
    return model;
}

}  // namespace gaitlab
