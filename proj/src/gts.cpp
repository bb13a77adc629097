#include "gaitlab/gts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gaitlab/classify.hpp"
#include "gaitlab/errors.hpp"
#include "gaitlab/rng.hpp"
#include "gaitlab/subspace.hpp"

namespace gaitlab {

namespace {

int field_value(const Chromosome& c, int base) {
    int d = 0;
    for (int i = 0; i < 8; ++i) d = (d << 1) | (c.bits[static_cast<std::size_t>(base + i)] & 1);
    return d;
}

int decode_field(int d, int lo, int hi) {
    return static_cast<int>(std::floor(lo + (hi - lo) * static_cast<double>(d) / 255.0));
}

void store_field(Chromosome& c, int base, int d) {
    for (int i = 0; i < 8; ++i)
        c.bits[static_cast<std::size_t>(base + i)] = static_cast<std::uint8_t>((d >> (7 - i)) & 1);
}

// Smallest d whose decode lands on the target row; every integer in [lo, hi]
// is reachable because the ranges never exceed 255 rows.
int encode_field(int target, int lo, int hi) {
    if (target < lo || target > hi)
        throw GaitError("encode_spec: value " + std::to_string(target) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    for (int d = 0; d < 256; ++d)
        if (decode_field(d, lo, hi) == target) return d;
    throw GaitError("encode_spec: unreachable value");  // not possible for sane bounds
}

std::tuple<int, int, int, int> mask_key(const MaskSpec& m) {
    return {m.sH, m.sF, m.sM, (m.wH << 3) | (m.wL << 2) | (m.wR << 1) | m.wF};
}

void check_weights(const FitnessWeights& w) {
    if (w.a < 0 || w.b < 0 || w.c < 0) throw GaitError("fitness weights must be non-negative");
}

int regions_kept(const MaskSpec& m) { return m.wH + m.wL + m.wR + m.wF; }

// fitness first, then smaller kept area, then fewer kept regions; the last
// step stops degenerate variants (a region emptied by the split coordinates)
// from shadowing the canonical bit pattern of an identical mask
bool prefer(double score_a, const MaskSpec& a, double score_b, const MaskSpec& b) {
    if (score_a != score_b) return score_a > score_b;
    const long area_a = mask_area(a), area_b = mask_area(b);
    if (area_a != area_b) return area_a < area_b;
    return regions_kept(a) < regions_kept(b);
}

void check_params(const GaParams& p) {
    if (p.population < 2) throw GaitError("ga_optimize: population must be at least 2");
    if (p.generations < 1) throw GaitError("ga_optimize: need at least one generation");
    if (p.crossover < 0 || p.crossover > 1 || p.mutation < 0 || p.mutation > 1)
        throw GaitError("ga_optimize: probabilities must lie in [0, 1]");
    if (p.elitism < 0 || p.elitism >= p.population)
        throw GaitError("ga_optimize: elitism must lie in [0, population)");
}

}  // namespace

MaskSpec decode_chromosome(const Chromosome& c, const DecodeBounds& b) {
    MaskSpec spec;
    spec.sH = decode_field(field_value(c, 0), b.h_min, b.h_max);
    spec.sM = decode_field(field_value(c, 8), b.m_min, b.m_max);
    spec.sF = decode_field(field_value(c, 16), b.f_min, b.f_max);
    spec.sH = std::min(spec.sH, spec.sF);
    spec.wH = c.bits[24];
    spec.wL = c.bits[25];
    spec.wR = c.bits[26];
    spec.wF = c.bits[27];
    return spec;
}

Chromosome encode_spec(const MaskSpec& spec, const DecodeBounds& b) {
    if (spec.sH > spec.sF) throw GaitError("encode_spec: sH must not exceed sF");
    Chromosome c;
    store_field(c, 0, encode_field(spec.sH, b.h_min, b.h_max));
    store_field(c, 8, encode_field(spec.sM, b.m_min, b.m_max));
    store_field(c, 16, encode_field(spec.sF, b.f_min, b.f_max));
    c.bits[24] = spec.wH;
    c.bits[25] = spec.wL;
    c.bits[26] = spec.wR;
    c.bits[27] = spec.wF;
    return c;
}

BinaryImage render_mask(const MaskSpec& spec) {
    if (spec.sH < 0 || spec.sH > spec.sF || spec.sF > kFrameSize || spec.sM < 0 ||
        spec.sM > kFrameSize)
        throw GaitError("render_mask: boundaries out of range");
    BinaryImage mask(kFrameSize, kFrameSize);
    for (int y = 0; y < kFrameSize; ++y) {
        const bool head = y < spec.sH, foot = y >= spec.sF;
        for (int x = 0; x < kFrameSize; ++x) {
            const bool keep = head ? spec.wH : foot ? spec.wF : (x < spec.sM ? spec.wL : spec.wR);
            mask.at(x, y) = keep;
        }
    }
    return mask;
}

long mask_area(const MaskSpec& spec) {
    const long mid = spec.sF - spec.sH;
    long area = 0;
    if (spec.wH) area += static_cast<long>(spec.sH) * kFrameSize;
    if (spec.wL) area += mid * spec.sM;
    if (spec.wR) area += mid * (kFrameSize - spec.sM);
    if (spec.wF) area += static_cast<long>(kFrameSize - spec.sF) * kFrameSize;
    return area;
}

double gts_score(double ccr_a, double ccr_b, double ccr_c, const FitnessWeights& w) {
    check_weights(w);
    const double s = w.a * ccr_a + w.b * ccr_b + w.c * ccr_c;
    return s * s;
}

double gts_fitness(const MaskSpec& mask, const GtsTuningSet& t, const FitnessWeights& w) {
    check_weights(w);
    if (t.gallery.empty() || t.gallery.size() != t.gallery_ids.size())
        throw GaitError("gts_fitness: gallery and ids must align");
    if (t.probes_a.empty() || t.probes_b.empty() || t.probes_c.empty())
        throw GaitError("gts_fitness: every covariate probe group must be non-empty");
    if (t.probes_a.size() != t.ids_a.size() || t.probes_b.size() != t.ids_b.size() ||
        t.probes_c.size() != t.ids_c.size())
        throw GaitError("gts_fitness: probes and ids must align");

    const std::size_t npix = t.gallery[0].values.size();
    for (const auto* group : {&t.gallery, &t.probes_a, &t.probes_b, &t.probes_c})
        for (const auto& tpl : *group)
            if (tpl.width != kFrameSize || tpl.height != kFrameSize ||
                tpl.values.size() != npix)
                throw GaitError("gts_fitness: templates must be standard frame sized");

    if (mask_area(mask) == 0) return 0.0;
    const BinaryImage m = render_mask(mask);

    // keep masked-in pixels that actually vary across the gallery
    std::vector<std::size_t> kept;
    for (std::size_t p = 0; p < npix; ++p) {
        if (!m.pixels[p]) continue;
        const double v0 = t.gallery[0].values[p];
        for (std::size_t r = 1; r < t.gallery.size(); ++r)
            if (t.gallery[r].values[p] != v0) {
                kept.push_back(p);
                break;
            }
    }
    if (kept.empty()) return 0.0;

    auto fill = [&](const std::vector<GaitTemplate>& tpls) {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(tpls.size()),
                          static_cast<Eigen::Index>(kept.size()));
        for (std::size_t r = 0; r < tpls.size(); ++r)
            for (std::size_t c = 0; c < kept.size(); ++c)
                X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    tpls[r].values[kept[c]];
        return X;
    };

    try {
        const Eigen::MatrixXd gallery = fill(t.gallery);
        const CdaModel cda = cda_fit(gallery, t.gallery_ids, t.retention);
        const MgBayesModel bayes = mgbayes_fit(cda_transform(cda, gallery), t.gallery_ids);

        auto ccr = [&](const std::vector<GaitTemplate>& probes, const std::vector<int>& ids) {
            const Eigen::MatrixXd Z = cda_transform(cda, fill(probes));
            int correct = 0;
            for (Eigen::Index i = 0; i < Z.rows(); ++i)
                correct += mgbayes_predict(bayes, Z.row(i).transpose()) ==
                           ids[static_cast<std::size_t>(i)];
            return static_cast<double>(correct) / static_cast<double>(probes.size());
        };
        return gts_score(ccr(t.probes_a, t.ids_a), ccr(t.probes_b, t.ids_b),
                         ccr(t.probes_c, t.ids_c), w);
    } catch (const DegenerateData&) {
        return 0.0;  // the mask kept nothing the recognizer can use
    }
}

double gts_fitness(const Chromosome& c, const GtsTuningSet& tuning, const FitnessWeights& w,
                   const DecodeBounds& bounds) {
    return gts_fitness(decode_chromosome(c, bounds), tuning, w);
}

GaResult ga_optimize(const std::function<double(const MaskSpec&)>& fitness,
                     const GaParams& params, const DecodeBounds& bounds) {
    check_params(params);
    Rng rng(params.seed);

    const auto pop_size = static_cast<std::size_t>(params.population);
    std::vector<Chromosome> pop(pop_size);
    for (auto& c : pop)
        for (auto& bit : c.bits) bit = rng.bernoulli(0.5);

    GaResult result;
    result.best_fitness = -1.0;
    std::map<std::tuple<int, int, int, int>, double> cache;

    auto evaluate = [&](const Chromosome& c) {
        const MaskSpec m = decode_chromosome(c, bounds);
        ++result.evaluations;
        auto it = cache.find(mask_key(m));
        if (it == cache.end()) {
            ++result.fitness_calls;
            it = cache.emplace(mask_key(m), fitness(m)).first;
        }
        return std::pair<double, MaskSpec>{it->second, m};
    };

    auto pick_parent = [&](const std::vector<double>& scores, double total) {
        if (total <= 0.0)
            return static_cast<std::size_t>(rng.uniform_int(0, params.population - 1));
        const double r = rng.uniform(0.0, total);
        double acc = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            acc += scores[i];
            if (r < acc) return i;
        }
        return scores.size() - 1;
    };

    for (int gen = 0; gen < params.generations; ++gen) {
        std::vector<double> scores(pop_size);
        std::vector<MaskSpec> masks(pop_size);
        double total = 0.0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            std::tie(scores[i], masks[i]) = evaluate(pop[i]);
            total += scores[i];
        }

        // rank by fitness, breaking ties toward the smaller, simpler mask
        std::vector<std::size_t> order(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return prefer(scores[a], masks[a], scores[b], masks[b]);
        });

        const std::size_t top = order[0];
        if (prefer(scores[top], masks[top], result.best_fitness, result.best_mask)) {
            result.best = pop[top];
            result.best_mask = masks[top];
            result.best_fitness = scores[top];
        }
        result.trace.push_back(scores[top]);

        if (gen + 1 == params.generations) break;

        std::vector<Chromosome> next;
        next.reserve(pop_size);
        for (int e = 0; e < params.elitism; ++e)
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);

        while (next.size() < pop_size) {
            Chromosome c1 = pop[pick_parent(scores, total)];
            Chromosome c2 = pop[pick_parent(scores, total)];
            if (rng.uniform() < params.crossover)
                for (std::size_t i = 0; i < c1.bits.size(); ++i)
                    if (rng.bernoulli(0.5)) std::swap(c1.bits[i], c2.bits[i]);
            for (auto& bit : c1.bits)
                if (rng.uniform() < params.mutation) bit ^= 1;
            for (auto& bit : c2.bits)
                if (rng.uniform() < params.mutation) bit ^= 1;
            next.push_back(c1);
            if (next.size() < pop_size) next.push_back(c2);
        }
        pop = std::move(next);
    }
    return result;
}

GaResult ga_optimize(const GtsTuningSet& tuning, const GaParams& params,
                     const FitnessWeights& weights, const DecodeBounds& bounds) {
    return ga_optimize([&](const MaskSpec& m) { return gts_fitness(m, tuning, weights); },
                       params, bounds);
}

MaskSpec sequential_refine(const MaskSpec& spec,
                           const std::function<double(const MaskSpec&)>& fitness,
                           const DecodeBounds& bounds) {
    std::map<std::tuple<int, int, int, int>, double> cache;
    auto score = [&](const MaskSpec& m) {
        auto it = cache.find(mask_key(m));
        if (it == cache.end()) it = cache.emplace(mask_key(m), fitness(m)).first;
        return it->second;
    };

    MaskSpec cur = spec;
    double best = score(cur);
    auto sweep = [&](bool over_f) {
        const int lo = over_f ? bounds.f_min : bounds.h_min;
        const int hi = over_f ? bounds.f_max : bounds.h_max;
        for (int v = lo; v <= hi; ++v) {
            MaskSpec cand = cur;
            (over_f ? cand.sF : cand.sH) = v;
            if (cand.sH > cand.sF) continue;
            const double s = score(cand);
            if (s > best || (s == best && mask_area(cand) < mask_area(cur))) {
                best = s;
                cur = cand;
            }
        }
    };
    sweep(true);   // sF with sH held
    sweep(false);  // then sH with the new sF
    return cur;
}

MaskSpec sequential_refine(const MaskSpec& spec, const GtsTuningSet& tuning,
                           const FitnessWeights& weights, const DecodeBounds& bounds) {
    return sequential_refine(
        spec, [&](const MaskSpec& m) { return gts_fitness(m, tuning, weights); }, bounds);
}

nlohmann::json MaskSpec::to_json() const {
    return {{"format", 1}, {"kind", "mask"}, {"s_h", sH}, {"s_f", sF}, {"s_m", sM},
            {"w_h", wH},   {"w_l", wL},      {"w_r", wR}, {"w_f", wF}};
}

MaskSpec MaskSpec::from_json(const nlohmann::json& j) {
    if (j.value("format", -1) != 1 || j.value("kind", "") != "mask")
        throw IoError("not a mask file");
    MaskSpec spec;
    spec.sH = j.at("s_h").get<int>();
    spec.sF = j.at("s_f").get<int>();
    spec.sM = j.at("s_m").get<int>();
    spec.wH = j.at("w_h").get<bool>();
    spec.wL = j.at("w_l").get<bool>();
    spec.wR = j.at("w_r").get<bool>();
    spec.wF = j.at("w_f").get<bool>();
    if (spec.sH < 0 || spec.sH > spec.sF || spec.sF > kFrameSize || spec.sM < 0 ||
        spec.sM > kFrameSize)
        throw IoError("mask boundaries out of range");
    return spec;
}

}  // namespace gaitlab
