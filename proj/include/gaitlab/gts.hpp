#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <vector>

#include "gaitlab/image.hpp"
#include "gaitlab/templates.hpp"

namespace gaitlab {

// 28 bits laid out as [S_H:8][S_M:8][S_F:8][W_H][W_L][W_R][W_F];
// bits[0] is the most significant bit of S_H.
struct Chromosome {
    std::array<std::uint8_t, 28> bits{};

    bool operator==(const Chromosome&) const = default;
};

// Decoded mask geometry: rows [0,sH) are the head band H, rows [sF,240) the
// foot band F, and rows [sH,sF) split at column sM into left L and right R.
// The w bits say which regions the mask keeps.
struct MaskSpec {
    int sH = 0;
    int sF = kFrameSize;
    int sM = kFrameSize / 2;
    bool wH = true, wL = true, wR = true, wF = true;

    bool operator==(const MaskSpec&) const = default;

    nlohmann::json to_json() const;
    static MaskSpec from_json(const nlohmann::json& j);
};

// Decode ranges for the three 8-bit fields. H is an upper band and F a lower
// band, so their ranges meet at the frame midline by default.
struct DecodeBounds {
    int h_min = 0, h_max = kFrameSize / 2;
    int m_min = 0, m_max = kFrameSize;
    int f_min = kFrameSize / 2, f_max = kFrameSize;
};

// S = floor(min + (max-min) * d / 255) per field; w bits copied verbatim;
// sH clamped down to sF when custom bounds let them cross.
MaskSpec decode_chromosome(const Chromosome& c, const DecodeBounds& bounds = {});

// Smallest chromosome value that decodes back to the given spec. Decode of
// the result reproduces the spec exactly, making decode/encode idempotent.
Chromosome encode_spec(const MaskSpec& spec, const DecodeBounds& bounds = {});

BinaryImage render_mask(const MaskSpec& spec);

// Pixels the mask keeps, computable without rendering.
long mask_area(const MaskSpec& spec);

struct FitnessWeights {
    double a = 0.5;                 // Normal probes
    double b = 1.0 / 6.0;           // Bag probes
    double c = 1.0 / 3.0;           // Coat probes

    static FitnessWeights thesis() { return {0.5, 1.0 / 6.0, 1.0 / 3.0}; }
    static FitnessWeights equal() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }
};

// Gallery plus per-covariate probe groups used to score candidate masks.
struct GtsTuningSet {
    std::vector<GaitTemplate> gallery;
    std::vector<int> gallery_ids;
    std::vector<GaitTemplate> probes_a, probes_b, probes_c;  // Normal, Bag, Coat
    std::vector<int> ids_a, ids_b, ids_c;
    double retention = 0.99;  // PCA retention inside the masked recognizer
};

// The squared weighted recognition score.
double gts_score(double ccr_a, double ccr_b, double ccr_c, const FitnessWeights& w);

// Trains a subspace recognizer on the masked gallery and scores the masked
// probe groups. A mask that keeps no informative pixels scores 0.
double gts_fitness(const MaskSpec& mask, const GtsTuningSet& tuning, const FitnessWeights& w);
double gts_fitness(const Chromosome& c, const GtsTuningSet& tuning, const FitnessWeights& w,
                   const DecodeBounds& bounds = {});

struct GaParams {
    int population = 20;
    int generations = 15;
    double crossover = 0.6;  // probability of uniform crossover per pair
    double mutation = 0.03;  // per-bit flip probability
    int elitism = 1;
    std::uint64_t seed = 0;
};

struct GaResult {
    Chromosome best;
    MaskSpec best_mask;
    double best_fitness = 0.0;
    std::vector<double> trace;  // best fitness of each generation
    int evaluations = 0;        // individuals scored (cache lookups)
    int fitness_calls = 0;      // distinct masks actually evaluated
};

// Generational GA: roulette parent selection, uniform crossover, per-bit
// mutation, elites carried unmodified. Fitness values are cached by decoded
// mask; ties between equal-fitness masks prefer the smaller kept area, then
// the mask keeping fewer regions.
GaResult ga_optimize(const std::function<double(const MaskSpec&)>& fitness,
                     const GaParams& params, const DecodeBounds& bounds = {});
GaResult ga_optimize(const GtsTuningSet& tuning, const GaParams& params,
                     const FitnessWeights& weights, const DecodeBounds& bounds = {});

// Coordinate ascent: line-search sF over its whole bound range holding sH,
// then sH holding the new sF. Never decreases the fitness.
MaskSpec sequential_refine(const MaskSpec& spec,
                           const std::function<double(const MaskSpec&)>& fitness,
                           const DecodeBounds& bounds = {});
MaskSpec sequential_refine(const MaskSpec& spec, const GtsTuningSet& tuning,
                           const FitnessWeights& weights, const DecodeBounds& bounds = {});

}  // namespace gaitlab
