#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaitlab/dataset.hpp"
#include "gaitlab/templates.hpp"

namespace gaitlab {

// Layout of a generated corpus. Every sequence is `frames` long; the leg
// swing closes twice per `period` frames, so the lower-limb pixel signal has
// that period.
struct SynthSpec {
    int subjects = 4;
    int normal_runs = 6;
    int bag_runs = 2;
    int coat_runs = 2;
    int frames = 65;
    int period = 20;
    std::vector<int> views = {90};
};

// Per-subject body shape. Identity lives in the head ellipse, stride length
// and swing phase; covariates never touch these.
struct SubjectTraits {
    double head_rx = 12;
    double head_ry = 15;
    double torso_w = 19;
    double stride = 34;
    double phase0 = 0;
};

struct SyntheticDataset {
    DatasetIndex index;  // paths empty until saved
    std::vector<GaitSequence> sequences;  // aligned with index.samples
};

SubjectTraits subject_traits(std::uint64_t seed, int subject);

// Gendered variant used by the gender-classification corpus: males get wider
// torsos and longer strides, females larger hair volume; ranges barely touch.
SubjectTraits gendered_traits(std::uint64_t seed, int subject, bool male);

// One rendered walk. The view angle is the walking direction against the
// optical axis: 0 approaches the camera, 90 crosses it, 180 walks away.
GaitSequence synth_sequence(const SubjectTraits& traits, const SynthSpec& spec,
                            std::uint64_t seed, const SampleKey& key);

SyntheticDataset generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed);

// Writes the PNG tree readable by load_dataset; returns the index with paths.
DatasetIndex save_dataset(const SyntheticDataset& data, const std::filesystem::path& root);

// Template corpus with a known-good segmentation. Each bit of the subject
// index is planted as a pattern strip, two strips per band: a wide deep strip
// plus a one-row anchor next to the band boundary, so separating all sixteen
// subjects needs both bands and the recovered boundaries cannot drift. The
// mid rows hold per-sample covariate noise across every column, in the
// gallery as much as in the probe groups, so no mask that keeps any of them
// can recognize anyone. All other pixels are zero.
struct PlantedSpec {
    int subjects = 16;           // bit patterns need [4, 16]
    int gallery_per_subject = 2;
    int probes_per_subject = 1;  // per group
    int head_end = 60;           // head band boundary: identity above, gap at 58..61
    int feet_start = 180;        // foot band boundary: identity below, gap at 178..181
};

struct PlantedCorpus {
    std::vector<GaitTemplate> gallery;
    std::vector<int> gallery_ids;
    std::vector<GaitTemplate> group_a, group_b, group_c;
    std::vector<int> ids_a, ids_b, ids_c;
};

PlantedCorpus planted_corpus(const PlantedSpec& spec, std::uint64_t seed);

}  // namespace gaitlab
