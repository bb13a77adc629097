#include <doctest.h>

#include <cmath>
#include <set>

#include "gaitlab/errors.hpp"
#include "gaitlab/gts.hpp"
#include "gaitlab/rng.hpp"
#include "gaitlab/synthetic.hpp"

using namespace gaitlab;

namespace {

GtsTuningSet small_tuning(std::uint64_t seed) {
    const PlantedCorpus corpus = planted_corpus(PlantedSpec{}, seed);
    GtsTuningSet t;
    t.gallery = corpus.gallery;
    t.gallery_ids = corpus.gallery_ids;
    t.probes_a = corpus.group_a;
    t.ids_a = corpus.ids_a;
    t.probes_b = corpus.group_b;
    t.ids_b = corpus.ids_b;
    t.probes_c = corpus.group_c;
    t.ids_c = corpus.ids_c;
    return t;
}

Chromosome random_chromosome(Rng& rng) {
    Chromosome c;
    for (auto& bit : c.bits) bit = rng.bernoulli(0.5);
    return c;
}

}  // namespace

TEST_SUITE("gts") {
    TEST_CASE("chromosome decode hits the documented endpoints") {
        Chromosome zeros;
        const MaskSpec lo = decode_chromosome(zeros);
        CHECK(lo.sH == 0);
        CHECK(lo.sM == 0);
        CHECK(lo.sF == 120);
        CHECK(!lo.wH);
        CHECK(!lo.wL);
        CHECK(!lo.wR);
        CHECK(!lo.wF);

        Chromosome ones;
        ones.bits.fill(1);
        const MaskSpec hi = decode_chromosome(ones);
        CHECK(hi.sH == 120);
        CHECK(hi.sM == 240);
        CHECK(hi.sF == 240);
        CHECK(hi.wH);
        CHECK(hi.wL);
        CHECK(hi.wR);
        CHECK(hi.wF);

        // d = 128 on the middle split: floor(240 * 128 / 255) = 120
        Chromosome mid;
        mid.bits[8] = 1;
        CHECK(decode_chromosome(mid).sM == 120);
    }

    TEST_CASE("decode and encode are mutually consistent") {
        Rng rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const Chromosome c = random_chromosome(rng);
            const MaskSpec spec = decode_chromosome(c);
            const Chromosome c2 = encode_spec(spec);
            CHECK(decode_chromosome(c2) == spec);  // encode is a decode preimage
            CHECK(encode_spec(decode_chromosome(c2)) == c2);
        }

        // every legal integer boundary is representable
        for (int v = 0; v <= 120; ++v) {
            MaskSpec spec;
            spec.sH = v;
            CHECK(decode_chromosome(encode_spec(spec)).sH == v);
        }
        for (int v = 120; v <= 240; ++v) {
            MaskSpec spec;
            spec.sF = v;
            CHECK(decode_chromosome(encode_spec(spec)).sF == v);
        }

        MaskSpec crossed;
        crossed.sH = 100;
        crossed.sF = 240;
        crossed.sH = 100;
        crossed.sF = 99;  // head band may not reach below the foot band
        CHECK_THROWS_AS(encode_spec(crossed), GaitError);
    }

    TEST_CASE("rendered mask partitions the frame by region bits") {
        MaskSpec spec;
        spec.sH = 58;
        spec.sF = 182;
        spec.sM = 96;
        spec.wH = true;
        spec.wL = false;
        spec.wR = false;
        spec.wF = true;
        const BinaryImage m = render_mask(spec);
        long count = 0;
        for (std::uint8_t p : m.pixels) count += p;
        CHECK(count == mask_area(spec));
        CHECK(mask_area(spec) == 58L * 240 + 58L * 240);
        CHECK(m.at(10, 10) == 1);     // head band
        CHECK(m.at(10, 57) == 1);
        CHECK(m.at(10, 58) == 0);     // mid bands dropped
        CHECK(m.at(95, 120) == 0);
        CHECK(m.at(96, 120) == 0);
        CHECK(m.at(10, 181) == 0);
        CHECK(m.at(10, 182) == 1);    // foot band
        CHECK(m.at(239, 239) == 1);

        // with every bit set the mask keeps the whole frame regardless of splits
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            MaskSpec full;
            full.sH = rng.uniform_int(0, 120);
            full.sF = rng.uniform_int(120, 240);
            full.sM = rng.uniform_int(0, 240);
            CHECK(mask_area(full) == 240L * 240);

            // region areas add up however the bits fall
            MaskSpec parts = full;
            parts.wH = rng.bernoulli(0.5);
            parts.wL = rng.bernoulli(0.5);
            parts.wR = rng.bernoulli(0.5);
            parts.wF = rng.bernoulli(0.5);
            const BinaryImage pm = render_mask(parts);
            long pc = 0;
            for (std::uint8_t p : pm.pixels) pc += p;
            CHECK(pc == mask_area(parts));
        }

        MaskSpec bad;
        bad.sF = 241;
        CHECK_THROWS_AS(render_mask(bad), GaitError);
    }

    TEST_CASE("score squares the weighted hit rates") {
        CHECK(gts_score(1.0, 1.0, 1.0, FitnessWeights::thesis()) == doctest::Approx(1.0));
        CHECK(gts_score(0.0, 0.0, 0.0, FitnessWeights::thesis()) == 0.0);
        const double s = gts_score(0.98, 0.955, 0.93, FitnessWeights::thesis());
        CHECK(std::abs(s - 0.9200) < 1e-4);
        CHECK(gts_score(0.9, 0.6, 0.3, FitnessWeights::equal()) == doctest::Approx(0.36));

        FitnessWeights neg;
        neg.b = -0.1;
        CHECK_THROWS_AS(gts_score(1, 1, 1, neg), GaitError);
    }

    TEST_CASE("fitness rewards masks that drop the misleading strips") {
        const GtsTuningSet t = small_tuning(19);
        const FitnessWeights w = FitnessWeights::thesis();

        MaskSpec empty;
        empty.wH = empty.wL = empty.wR = empty.wF = false;
        CHECK(gts_fitness(empty, t, w) == 0.0);

        // a head band above the identity strip keeps only constant pixels
        MaskSpec blank;
        blank.sH = 15;
        blank.wL = blank.wR = blank.wF = false;
        CHECK(gts_fitness(blank, t, w) == 0.0);

        MaskSpec planted;  // matches the corpus construction
        planted.sH = 58;
        planted.sF = 182;
        planted.wL = planted.wR = false;
        const double masked = gts_fitness(planted, t, w);
        const double full = gts_fitness(MaskSpec{}, t, w);
        CHECK(masked > 0.9);
        CHECK(full < 0.5);  // the noise rows drown the identity strips
        CHECK(masked > full);

        GtsTuningSet broken = t;
        broken.probes_b.clear();
        broken.ids_b.clear();
        CHECK_THROWS_AS(gts_fitness(planted, broken, w), GaitError);
        GtsTuningSet skewed = t;
        skewed.gallery_ids.pop_back();
        CHECK_THROWS_AS(gts_fitness(planted, skewed, w), GaitError);
    }

    TEST_CASE("ga bookkeeping: budget, cache, trace, determinism") {
        GaParams params;
        params.population = 12;
        params.generations = 6;
        params.seed = 5;

        int calls = 0;
        auto fitness = [&](const MaskSpec& m) {
            ++calls;
            // smooth unimodal landscape over the two row splits
            const double h = static_cast<double>(m.sH - 40);
            const double f = static_cast<double>(m.sF - 200);
            return 1.0 / (1.0 + h * h + f * f);
        };
        const GaResult r1 = ga_optimize(fitness, params);
        CHECK(r1.evaluations == 12 * 6);
        CHECK(r1.fitness_calls == calls);
        CHECK(r1.fitness_calls <= r1.evaluations);
        REQUIRE(r1.trace.size() == 6);
        CHECK(r1.best_fitness ==
              *std::max_element(r1.trace.begin(), r1.trace.end()));

        // the best-ever mask decodes from the best-ever chromosome
        CHECK(decode_chromosome(r1.best) == r1.best_mask);

        calls = 0;
        const GaResult r2 = ga_optimize(fitness, params);
        CHECK(r2.best.bits == r1.best.bits);
        CHECK(r2.trace == r1.trace);

        params.seed = 6;
        const GaResult r3 = ga_optimize(fitness, params);
        CHECK(r3.trace.size() == 6);  // different seed still runs the full budget
        CHECK(r3.evaluations == 12 * 6);

        // a flat zero landscape exercises the uniform-selection fallback
        const GaResult flat = ga_optimize([](const MaskSpec&) { return 0.0; }, params);
        CHECK(flat.best_fitness == 0.0);
        REQUIRE(flat.trace.size() == 6);
        for (double v : flat.trace) CHECK(v == 0.0);

        GaParams bad = params;
        bad.population = 1;
        CHECK_THROWS_AS(ga_optimize(fitness, bad), GaitError);
        bad = params;
        bad.crossover = 1.5;
        CHECK_THROWS_AS(ga_optimize(fitness, bad), GaitError);
        bad = params;
        bad.elitism = params.population;
        CHECK_THROWS_AS(ga_optimize(fitness, bad), GaitError);
    }

    TEST_CASE("ga finds the planted segmentation") {
        const GtsTuningSet t = small_tuning(100);
        GaParams params;  // population 20, 15 generations
        params.seed = 0;
        const GaResult r = ga_optimize(t, params, FitnessWeights::thesis());

        CHECK(r.best_fitness > 0.9);
        CHECK(!r.best_mask.wL);
        CHECK(!r.best_mask.wR);
        CHECK(r.evaluations == 20 * 15);
        CHECK(r.fitness_calls <= r.evaluations);
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            CHECK(r.trace[i] >= r.trace[i - 1]);  // elitism keeps the best alive
    }

    TEST_CASE("sequential refine walks each split to its optimum") {
        // exact coordinate ascent on a separable concave landscape
        auto bowl = [](const MaskSpec& m) {
            const double h = static_cast<double>(m.sH - 40);
            const double f = static_cast<double>(m.sF - 200);
            return -(h * h) - (f * f);
        };
        MaskSpec start;
        start.sH = 10;
        start.sF = 130;
        const MaskSpec tuned = sequential_refine(start, bowl);
        CHECK(tuned.sH == 40);
        CHECK(tuned.sF == 200);
        CHECK(tuned.sM == start.sM);  // the column split is untouched
        CHECK(tuned.wH == start.wH);

        const MaskSpec stay = sequential_refine(tuned, bowl);
        CHECK(stay == tuned);

        // equal-fitness candidates fall back to the smaller kept area
        auto flat = [](const MaskSpec&) { return 1.0; };
        MaskSpec wide;
        wide.sH = 90;
        wide.sF = 150;
        const MaskSpec shrunk = sequential_refine(wide, flat);
        CHECK(mask_area(shrunk) <= mask_area(wide));
    }

    TEST_CASE("sequential refine recovers the planted band boundaries") {
        const GtsTuningSet t = small_tuning(19);
        MaskSpec start;  // coarse guess, as the GA would hand over
        start.sH = 40;
        start.sF = 210;
        start.wL = start.wR = false;
        const MaskSpec tuned = sequential_refine(start, t, FitnessWeights::thesis());
        // identity rows end at 58 and resume at 182; anything in the gap ties
        CHECK(std::abs(tuned.sH - 60) <= 8);
        CHECK(std::abs(tuned.sF - 180) <= 8);
        const double before = gts_fitness(start, t, FitnessWeights::thesis());
        const double after = gts_fitness(tuned, t, FitnessWeights::thesis());
        CHECK(after >= before);
        CHECK(after > 0.9);
    }

    TEST_CASE("mask specs round-trip through json") {
        MaskSpec spec;
        spec.sH = 33;
        spec.sF = 207;
        spec.sM = 111;
        spec.wL = false;
        const MaskSpec back = MaskSpec::from_json(spec.to_json());
        CHECK(back == spec);

        nlohmann::json wrong = spec.to_json();
        wrong["kind"] = "pca";
        CHECK_THROWS_AS(MaskSpec::from_json(wrong), IoError);
        nlohmann::json out_of_range = spec.to_json();
        out_of_range["s_f"] = 500;
        CHECK_THROWS_AS(MaskSpec::from_json(out_of_range), IoError);
    }
}
