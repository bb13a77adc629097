#include "gaitlab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "gaitlab/errors.hpp"
#include "gaitlab/rng.hpp"

namespace fs = std::filesystem;

namespace gaitlab {

namespace {

// Fixed-width, digits-only field such as "023" or "0041".
std::optional<int> parse_fixed(const std::string& s, std::size_t width) {
    if (s.size() != width) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string two(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

}  // namespace

const char* covariate_code(Covariate c) {
    switch (c) {
        case Covariate::Normal: return "nm";
        case Covariate::Bag: return "bg";
        case Covariate::Coat: return "cl";
    }
    return "nm";
}

std::optional<Covariate> covariate_from_code(const std::string& code) {
    if (code == "nm") return Covariate::Normal;
    if (code == "bg") return Covariate::Bag;
    if (code == "cl") return Covariate::Coat;
    return std::nullopt;
}

std::string to_string(const SampleKey& key) {
    std::string sid = std::to_string(key.subject);
    while (sid.size() < 3) sid.insert(sid.begin(), '0');
    std::string angle = std::to_string(key.view);
    while (angle.size() < 3) angle.insert(angle.begin(), '0');
    return sid + "/" + covariate_code(key.covariate) + "-" + two(key.run) + "/" + angle;
}

std::set<int> DatasetIndex::subjects() const {
    std::set<int> out;
    for (const auto& s : samples) out.insert(s.key.subject);
    return out;
}

DatasetIndex load_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError("dataset root not found: " + root.string());

    DatasetIndex index;
    auto complain = [&](const fs::path& p, const std::string& why) {
        index.warnings.push_back(p.string() + ": " + why);
    };

    for (const auto& subj_dir : sorted_entries(root)) {
        const auto sid = parse_fixed(subj_dir.filename().string(), 3);
        if (!fs::is_directory(subj_dir) || !sid) {
            complain(subj_dir, "expected a 3-digit subject directory");
            continue;
        }
        for (const auto& run_dir : sorted_entries(subj_dir)) {
            const std::string name = run_dir.filename().string();
            const auto dash = name.find('-');
            const auto cov = dash == std::string::npos
                                 ? std::nullopt
                                 : covariate_from_code(name.substr(0, dash));
            const auto run = dash == std::string::npos
                                 ? std::nullopt
                                 : parse_fixed(name.substr(dash + 1), 2);
            if (!fs::is_directory(run_dir) || !cov || !run) {
                complain(run_dir, "expected <nm|bg|cl>-<run> directory");
                continue;
            }
            for (const auto& angle_dir : sorted_entries(run_dir)) {
                const auto angle = parse_fixed(angle_dir.filename().string(), 3);
                if (!fs::is_directory(angle_dir) || !angle || *angle % 18 != 0 || *angle > 180) {
                    complain(angle_dir, "expected a 3-digit view angle, multiple of 18");
                    continue;
                }
                int frames = 0;
                for (const auto& f : sorted_entries(angle_dir)) {
                    if (fs::is_regular_file(f) && f.extension() == ".png" &&
                        parse_fixed(f.stem().string(), 4))
                        ++frames;
                    else
                        complain(f, "expected a 4-digit .png frame");
                }
                if (frames == 0) {
                    complain(angle_dir, "no frames");
                    continue;
                }
                index.samples.push_back({{*sid, *cov, *run, *angle}, angle_dir});
            }
        }
    }
    std::sort(index.samples.begin(), index.samples.end(),
              [](const SampleRecord& a, const SampleRecord& b) { return a.key < b.key; });
    return index;
}

GaitSequence load_sequence(const SampleRecord& record) {
    std::vector<std::pair<int, fs::path>> files;
    for (const auto& f : sorted_entries(record.path)) {
        if (!fs::is_regular_file(f) || f.extension() != ".png") continue;
        if (const auto n = parse_fixed(f.stem().string(), 4)) files.emplace_back(*n, f);
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no frames in " + record.path.string());

    GaitSequence seq;
    seq.key = record.key;
    for (const auto& [n, path] : files) {
        BinaryImage frame = binarize(read_png(path));
        if (!seq.frames.empty() && (frame.width != seq.frames[0].width ||
                                    frame.height != seq.frames[0].height))
            throw IoError("frame size mismatch in " + record.path.string());
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

void save_index(const DatasetIndex& index, const fs::path& file) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : index.samples)
        samples.push_back({{"subject", s.key.subject},
                           {"covariate", covariate_code(s.key.covariate)},
                           {"run", s.key.run},
                           {"view", s.key.view},
                           {"path", s.path.string()}});
    const nlohmann::json j = {
        {"format", 1}, {"kind", "index"}, {"samples", samples}, {"warnings", index.warnings}};
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    out << j.dump(1) << "\n";
}

DatasetIndex load_index(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": " + e.what());
    }
    if (j.value("format", -1) != 1 || j.value("kind", "") != "index")
        throw IoError("not an index file: " + file.string());

    DatasetIndex index;
    for (const auto& s : j.at("samples")) {
        const auto cov = covariate_from_code(s.at("covariate").get<std::string>());
        if (!cov) throw IoError("bad covariate code in " + file.string());
        index.samples.push_back({{s.at("subject").get<int>(), *cov, s.at("run").get<int>(),
                                  s.at("view").get<int>()},
                                 fs::path(s.at("path").get<std::string>())});
    }
    index.warnings = j.at("warnings").get<std::vector<std::string>>();
    return index;
}

GalleryProbeSplit split_gallery_probe(const DatasetIndex& index, int n_authorized,
                                      std::uint64_t seed) {
    if (n_authorized < 1) throw GaitError("split: need at least one authorized subject");

    // distinct Normal runs per subject
    std::map<int, std::set<int>> normal_runs;
    for (const auto& s : index.samples)
        if (s.key.covariate == Covariate::Normal) normal_runs[s.key.subject].insert(s.key.run);

    std::vector<int> eligible;
    for (const auto& [sid, runs] : normal_runs)
        if (runs.size() >= 4) eligible.push_back(sid);
    if (static_cast<int>(eligible.size()) < n_authorized)
        throw GaitError("split: only " + std::to_string(eligible.size()) +
                        " subjects have 4 Normal runs, need " + std::to_string(n_authorized));

    Rng rng(seed);
    Rng pick = rng.split(1);
    pick.shuffle(eligible);

    GalleryProbeSplit split;
    split.authorized.assign(eligible.begin(), eligible.begin() + n_authorized);
    std::sort(split.authorized.begin(), split.authorized.end());
    const std::set<int> d1(split.authorized.begin(), split.authorized.end());
    for (int sid : index.subjects())
        if (!d1.count(sid)) split.outsiders.push_back(sid);

    // gallery keys: first four Normal runs of each authorized subject
    std::set<SampleKey> gallery_keys;
    for (int sid : split.authorized) {
        const auto& runs = normal_runs.at(sid);
        auto it = runs.begin();
        for (int i = 0; i < 4; ++i, ++it)
            for (const auto& s : index.samples)
                if (s.key.subject == sid && s.key.covariate == Covariate::Normal &&
                    s.key.run == *it)
                    gallery_keys.insert(s.key);
    }
    for (const auto& s : index.samples)
        (gallery_keys.count(s.key) ? split.gallery : split.probes).push_back(s.key);

    // genuine: every authorized probe under its own id
    std::map<int, std::vector<SampleKey>> outsider_probes;
    for (const auto& k : split.probes) {
        if (d1.count(k.subject))
            split.claims.push_back({k, k.subject, ClaimTruth::Genuine});
        else
            outsider_probes[k.subject].push_back(k);
    }

    // type-1: one claim per authorized id, outsiders round-robin
    std::vector<int> forged_ids = split.authorized;
    Rng forge = rng.split(2);
    forge.shuffle(forged_ids);
    std::vector<int> members;
    for (const auto& [sid, probes] : outsider_probes) members.push_back(sid);
    if (!members.empty()) {
        for (std::size_t k = 0; k < forged_ids.size(); ++k) {
            const auto& mine = outsider_probes.at(members[k % members.size()]);
            const auto& probe = mine[(k / members.size()) % mine.size()];
            split.claims.push_back({probe, forged_ids[k], ClaimTruth::Type1});
        }
    }

    // type-2: authorized Normal probes under a fixed-point-free relabeling
    if (split.authorized.size() >= 2) {
        std::vector<int> deranged = split.authorized;
        Rng derange = rng.split(3);
        for (std::size_t i = deranged.size() - 1; i >= 1; --i) {
            const auto j = derange.uniform_int(0, static_cast<std::int64_t>(i) - 1);
            std::swap(deranged[i], deranged[static_cast<std::size_t>(j)]);
        }
        std::map<int, int> sigma;
        for (std::size_t i = 0; i < deranged.size(); ++i)
            sigma[split.authorized[i]] = deranged[i];
        for (const auto& k : split.probes)
            if (d1.count(k.subject) && k.covariate == Covariate::Normal)
                split.claims.push_back({k, sigma.at(k.subject), ClaimTruth::Type2});
    }
    return split;
}

}  // namespace gaitlab
