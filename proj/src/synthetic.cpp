#include "gaitlab/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "gaitlab/errors.hpp"
#include "gaitlab/rng.hpp"

namespace fs = std::filesystem;

namespace gaitlab {

namespace {

void fill_ellipse(BinaryImage& img, double cx, double cy, double rx, double ry) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + rx)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + ry)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double u = (x - cx) / rx, v = (y - cy) / ry;
            if (u * u + v * v <= 1.0) img.at(x, y) = 1;
        }
}

// Vertical slab centered on cx spanning rows [y0, y1].
void fill_slab(BinaryImage& img, double cx, double half_w, double y0, double y1) {
    const int xa = std::max(0, static_cast<int>(std::floor(cx - half_w)));
    const int xb = std::min(img.width - 1, static_cast<int>(std::ceil(cx + half_w)));
    const int ya = std::max(0, static_cast<int>(std::floor(y0)));
    const int yb = std::min(img.height - 1, static_cast<int>(std::ceil(y1)));
    for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) img.at(x, y) = 1;
}

void thick_line(BinaryImage& img, double x0, double y0, double x1, double y1, double w) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2)));
    const double r = w / 2.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const double cx = x0 + t * (x1 - x0), cy = y0 + t * (y1 - y0);
        const int xa = std::max(0, static_cast<int>(std::floor(cx - r)));
        const int xb = std::min(img.width - 1, static_cast<int>(std::ceil(cx + r)));
        const int ya = std::max(0, static_cast<int>(std::floor(cy - r)));
        const int yb = std::min(img.height - 1, static_cast<int>(std::ceil(cy + r)));
        for (int y = ya; y <= yb; ++y)
            for (int x = xa; x <= xb; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = 1;
    }
}

void draw_walker(BinaryImage& img, const SubjectTraits& t, Covariate cov, double phi,
                 double cx, double feet_y, double scale, double lateral) {
    const double body = 190.0 * scale;
    const double hip_y = feet_y - 0.50 * body;
    const double neck_y = feet_y - 0.78 * body;
    const double head_cy = feet_y - 0.90 * body;

    fill_ellipse(img, cx, head_cy, t.head_rx * scale, t.head_ry * scale);
    thick_line(img, cx, head_cy, cx, neck_y + 2 * scale, 7 * scale);
    fill_slab(img, cx, 0.5 * t.torso_w * scale, neck_y, hip_y);

    if (cov == Covariate::Coat)
        fill_slab(img, cx, (0.5 * t.torso_w + 6.0) * scale, neck_y, hip_y + 0.06 * body);
    if (cov == Covariate::Bag)
        fill_ellipse(img, cx - (0.5 * t.torso_w + 7.0) * scale,
                     0.5 * (neck_y + hip_y) + 5.0 * scale, 6.5 * scale, 9.5 * scale);

    // only the image-plane projection of the stride spreads the legs, so a
    // walk along the optical axis shows them as one near-vertical column
    const double foot_dx = t.stride * scale * std::sin(phi) * lateral;
    thick_line(img, cx, hip_y, cx - foot_dx, feet_y, 7 * scale);
    thick_line(img, cx, hip_y, cx + foot_dx, feet_y, 7 * scale);
}

}  // namespace

SubjectTraits subject_traits(std::uint64_t seed, int subject) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(subject));
    SubjectTraits t;
    t.head_rx = rng.uniform(9.0, 15.0);
    t.head_ry = rng.uniform(11.0, 19.0);
    t.torso_w = rng.uniform(14.0, 24.0);
    t.stride = rng.uniform(26.0, 44.0);
    t.phase0 = rng.uniform(0.0, 2.0 * M_PI);
    return t;
}

SubjectTraits gendered_traits(std::uint64_t seed, int subject, bool male) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(subject)).split(male ? 11 : 22);
    SubjectTraits t;
    if (male) {
        t.head_rx = rng.uniform(9.0, 12.0);
        t.head_ry = rng.uniform(11.0, 14.0);
        t.torso_w = rng.uniform(20.0, 26.0);
        t.stride = rng.uniform(36.0, 46.0);
    } else {
        t.head_rx = rng.uniform(12.5, 16.0);
        t.head_ry = rng.uniform(14.5, 19.0);
        t.torso_w = rng.uniform(13.0, 18.0);
        t.stride = rng.uniform(24.0, 33.0);
    }
    t.phase0 = rng.uniform(0.0, 2.0 * M_PI);
    return t;
}

GaitSequence synth_sequence(const SubjectTraits& traits, const SynthSpec& spec,
                            std::uint64_t seed, const SampleKey& key) {
    if (spec.frames < 1) throw GaitError("synth_sequence: need at least one frame");
    if (spec.period < 2) throw GaitError("synth_sequence: period must be at least 2 frames");

    // Run jitter is keyed by (subject, run) only, so covariates of the same
    // run share poses frame-for-frame.
    Rng jitter = Rng(seed)
                     .split(static_cast<std::uint64_t>(key.subject))
                     .split(5000 + static_cast<std::uint64_t>(key.run));
    const double dx_px = jitter.uniform(-8.0, 8.0);
    const double dphase = jitter.uniform(0.0, 2.0 * M_PI);
    const double dscale = jitter.uniform(0.96, 1.04);

    const double f = 500.0, z0 = 520.0, walk_v = 0.8, cam_h = 100.0;
    const double theta = key.view * M_PI / 180.0;
    const double x0 = dx_px * z0 / f;

    GaitSequence seq;
    seq.key = key;
    for (int t = 0; t < spec.frames; ++t) {
        const double z = z0 - walk_v * t * std::cos(theta);
        const double x = x0 + walk_v * t * std::sin(theta);
        const double scale = dscale * z0 / z;
        const double cx = kFrameSize / 2.0 + f * x / z;
        const double feet_y = kFrameSize / 2.0 + f * cam_h / z;  // feet stay on the ground plane
        const double phi = M_PI * t / spec.period + traits.phase0 + dphase;

        BinaryImage frame(kFrameSize, kFrameSize);
        draw_walker(frame, traits, key.covariate, phi, cx, feet_y, scale, std::sin(theta));
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

SyntheticDataset generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.subjects < 1) throw GaitError("generate_synthetic_dataset: zero subjects");
    if (spec.views.empty()) throw GaitError("generate_synthetic_dataset: no views");
    for (int v : spec.views)
        if (v % 18 != 0 || v < 0 || v > 180)
            throw GaitError("generate_synthetic_dataset: view must be a multiple of 18 in [0,180]");

    std::vector<int> views = spec.views;  // index stays sorted by key
    std::sort(views.begin(), views.end());
    views.erase(std::unique(views.begin(), views.end()), views.end());

    SyntheticDataset out;
    const std::vector<std::pair<Covariate, int>> blocks = {
        {Covariate::Normal, spec.normal_runs},
        {Covariate::Bag, spec.bag_runs},
        {Covariate::Coat, spec.coat_runs}};

    for (int sid = 1; sid <= spec.subjects; ++sid) {
        const SubjectTraits traits = subject_traits(seed, sid);
        for (const auto& [cov, n_runs] : blocks)
            for (int run = 1; run <= n_runs; ++run)
                for (int view : views) {
                    const SampleKey key{sid, cov, run, view};
                    out.index.samples.push_back({key, {}});
                    out.sequences.push_back(synth_sequence(traits, spec, seed, key));
                }
    }
    return out;
}

DatasetIndex save_dataset(const SyntheticDataset& data, const fs::path& root) {
    DatasetIndex index = data.index;
    for (std::size_t i = 0; i < data.sequences.size(); ++i) {
        const auto& seq = data.sequences[i];
        const fs::path dir = root / to_string(seq.key);
        fs::create_directories(dir);
        for (std::size_t t = 0; t < seq.frames.size(); ++t) {
            std::string name = std::to_string(t);
            name.insert(0, 4 - name.size(), '0');
            write_png((dir / (name + ".png")).string(), to_gray(seq.frames[t]));
        }
        index.samples[i].path = dir;
    }
    return index;
}

PlantedCorpus planted_corpus(const PlantedSpec& spec, std::uint64_t seed) {
    if (spec.subjects < 4 || spec.subjects > 16)
        throw GaitError("planted_corpus: subjects must lie in [4, 16]");
    if (!(40 < spec.head_end && spec.head_end + 12 < spec.feet_start &&
          spec.feet_start + 40 < kFrameSize))
        throw GaitError("planted_corpus: bands out of range");

    struct Strip {
        int x0, x1, y0, y1;
    };
    // Identity is spread over four strips, one per bit of the subject index,
    // so every strip must be kept to tell all sixteen subjects apart. Each
    // band gets a deep strip (partial masks still earn partial credit) and a
    // one-row anchor hugging the boundary, which pins the recovered boundary:
    // losing the anchor row merges half the subjects, while the constant gap
    // rows between anchor and boundary only shrink the kept area. The
    // covariate rows span every column; the decode bounds keep sH <= 120 <= sF,
    // so a non-empty left or right region always overlaps them and can never
    // smuggle in clean identity pixels.
    const Strip head_deep{40, 48, spec.head_end - 36, spec.head_end - 3};
    const Strip head_anchor{40, 48, spec.head_end - 3, spec.head_end - 2};
    const Strip feet_anchor{100, 108, spec.feet_start + 2, spec.feet_start + 3};
    const Strip feet_deep{100, 108, spec.feet_start + 3, spec.feet_start + 36};
    const Strip mid{0, kFrameSize, spec.head_end + 6, spec.feet_start - 6};

    auto pattern = [&](std::uint64_t stream, const Strip& st) {
        Rng prng = Rng(seed).split(stream);
        std::vector<double> pat(static_cast<std::size_t>((st.x1 - st.x0) * (st.y1 - st.y0)));
        for (auto& v : pat) v = prng.uniform(0.15, 1.0);
        return pat;
    };
    const Strip slots[4] = {head_deep, head_anchor, feet_anchor, feet_deep};
    std::vector<double> slot_pat[4][2];
    for (int k = 0; k < 4; ++k)
        for (int b = 0; b < 2; ++b)
            slot_pat[k][b] = pattern(100 + 2 * static_cast<std::uint64_t>(k) + b, slots[k]);

    Rng rng = Rng(seed).split(777);
    auto make_sample = [&](int subject) {
        GaitTemplate tpl;
        tpl.kind = TemplateKind::GEI;
        tpl.width = kFrameSize;
        tpl.height = kFrameSize;
        tpl.values.assign(static_cast<std::size_t>(kFrameSize) * kFrameSize, 0.0);

        auto stamp = [&](const Strip& st, const std::vector<double>& pat) {
            std::size_t i = 0;
            for (int y = st.y0; y < st.y1; ++y)
                for (int x = st.x0; x < st.x1; ++x, ++i)
                    tpl.at(x, y) = std::clamp(pat[i] + rng.normal(0.0, 0.02), 0.0, 1.0);
        };
        // head carries the high bits, feet the low bits
        for (int k = 0; k < 4; ++k) stamp(slots[k], slot_pat[k][(subject >> (3 - k)) & 1]);

        // mid rows: fresh covariate noise in every sample, gallery included,
        // so they are never informative and any mask keeping them goes blind
        for (int y = mid.y0; y < mid.y1; ++y)
            for (int x = mid.x0; x < mid.x1; ++x) tpl.at(x, y) = rng.uniform(0.0, 1.0);
        return tpl;
    };

    PlantedCorpus corpus;
    for (int s = 0; s < spec.subjects; ++s) {
        for (int g = 0; g < spec.gallery_per_subject; ++g) {
            corpus.gallery.push_back(make_sample(s));
            corpus.gallery_ids.push_back(s);
        }
        for (int p = 0; p < spec.probes_per_subject; ++p) {
            corpus.group_a.push_back(make_sample(s));
            corpus.ids_a.push_back(s);
            corpus.group_b.push_back(make_sample(s));
            corpus.ids_b.push_back(s);
            corpus.group_c.push_back(make_sample(s));
            corpus.ids_c.push_back(s);
        }
    }
    return corpus;
}

}  // namespace gaitlab
