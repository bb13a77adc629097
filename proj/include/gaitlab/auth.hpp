#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <optional>
#include <vector>

#include "gaitlab/classify.hpp"
#include "gaitlab/dataset.hpp"
#include "gaitlab/subspace.hpp"

namespace gaitlab {

// One authentication attempt. The feature lives in whatever space the
// verifier was given: raw template pixels for the recognizer paradigms
// (their subspace front end ignores masked-out dimensions), or an already
// projected vector for the plain distance threshold.
struct Claim {
    Eigen::VectorXd feature;
    int claimed = 0;
    ClaimTruth truth = ClaimTruth::Genuine;
};

enum class AuthParadigm { ThresholdNn, Msm, Bayes };

struct AuthDecision {
    bool accept = false;
    // distance to the claimed identity's nearest gallery sample (NN), the
    // match bit (MSM), or the log posterior of the claimed identity (BT)
    double score = 0.0;
    AuthParadigm paradigm = AuthParadigm::Msm;
    bool unknown_id = false;  // claimed identity absent from the model; always rejected
};

// Identification model behind MSM and BT: a discriminant subspace plus a
// Gaussian Bayes classifier over its output.
struct Recognizer {
    CdaModel cda;
    MgBayesModel bayes;

    nlohmann::json to_json() const;
    static Recognizer from_json(const nlohmann::json& j);
};

Recognizer recognizer_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                          double retention,
                          CovarianceMode mode = CovarianceMode::Shared);
int recognizer_predict(const Recognizer& r, const Eigen::VectorXd& x);
// log Pr(id | x); -inf when id is not a trained class
double recognizer_log_posterior(const Recognizer& r, const Eigen::VectorXd& x, int id);
// fraction of probes whose predicted identity matches the label
double recognizer_ccr(const Recognizer& r, const Eigen::MatrixXd& X, const std::vector<int>& y);

// Accept when the probe is within theta_d of the claimed identity's nearest
// gallery sample. Unknown claims are rejected, never an error: an attacker
// controls that field.
AuthDecision auth_threshold_nn(const Claim& c, const Eigen::MatrixXd& gallery,
                               const std::vector<int>& gallery_ids, double theta_d);

// Accept when the recognizer's predicted identity equals the claimed one.
// Threshold-free; its false-accept rate is pinned near 1/n by the size of
// the enrolled population alone.
AuthDecision auth_msm(const Claim& c, const Recognizer& r);
AuthDecision auth_msm_2p(const Claim& c, const Recognizer& r1, const Recognizer& r2);

// Accept when the posterior of the claimed identity exceeds theta_p,
// evaluated in log space. 0 < theta_p < 1.
AuthDecision auth_bt(const Claim& c, const Recognizer& r, double theta_p);
AuthDecision auth_bt_2p(const Claim& c, const Recognizer& r1, double theta_p,
                        const Recognizer& r2, double theta_q);

struct RocPoint {
    double far = 0.0;
    double sensitivity = 0.0;  // 1 - frr
};

// Rates are absent when their claim category is empty; a rate of zero always
// means zero observed errors over a nonempty category.
struct ErrorRates {
    std::optional<double> frr;
    std::optional<double> far_type1;
    std::optional<double> far_type2;
    std::optional<double> far_mean;  // mean of the type rates present
    std::optional<double> aer;       // (frr + far_mean) / 2
    std::optional<double> eer;
    std::vector<RocPoint> roc;
};

// Tallies accept/reject against the claim truths. Needs at least one genuine
// and one impostor claim.
ErrorRates compute_error_rates(const std::vector<AuthDecision>& decisions,
                               const std::vector<Claim>& claims);

// Threshold sweep over the observed score midpoints. The paradigm fixes the
// acceptance direction: below the threshold for distances, above for
// posteriors; the match-bit paradigm has nothing to sweep and is rejected.
// Returns roc plus the linearly interpolated FAR/FRR crossing in eer.
ErrorRates roc_and_eer(const std::vector<double>& scores,
                       const std::vector<ClaimTruth>& truths, AuthParadigm paradigm);

// Closed-form MSM rates for a recognizer at correct-classification rate ccr
// over n enrolled subjects.
struct TheoreticalMsm {
    double frr = 0.0;        // 1 - ccr
    double far = 0.0;        // 1/n
    double aer = 0.0;        // (frr + far) / 2
    double far_type2 = 0.0;  // (1 - ccr) / n
};

TheoreticalMsm theoretical_msm_rates(double ccr, int n);

}  // namespace gaitlab
