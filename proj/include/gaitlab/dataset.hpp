#pragma once

#include <compare>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaitlab/image.hpp"

namespace gaitlab {

enum class Covariate { Normal, Bag, Coat };

// Directory codes: nm / bg / cl.
const char* covariate_code(Covariate c);
std::optional<Covariate> covariate_from_code(const std::string& code);

struct SampleKey {
    int subject = 0;
    Covariate covariate = Covariate::Normal;
    int run = 0;
    int view = 0;  // degrees, multiple of 18 in [0, 180]

    auto operator<=>(const SampleKey&) const = default;
};

std::string to_string(const SampleKey& key);  // "023/nm-01/090"

struct SampleRecord {
    SampleKey key;
    std::filesystem::path path;  // directory holding the frame PNGs
};

struct DatasetIndex {
    std::vector<SampleRecord> samples;  // sorted by key
    std::vector<std::string> warnings;  // malformed entries, reported not dropped

    std::set<int> subjects() const;
};

struct GaitSequence {
    SampleKey key;
    std::vector<BinaryImage> frames;  // temporal order
};

// Genuine: the subject claims their own identity. Type1: an outsider the
// system has never seen claims a registered identity. Type2: a registered
// member claims another member's identity.
enum class ClaimTruth { Genuine, Type1, Type2 };

// An authentication attempt described at the dataset level, before any
// features are computed: which probe sample, presented under which identity.
struct ClaimSpec {
    SampleKey probe;
    int claimed = 0;
    ClaimTruth truth = ClaimTruth::Genuine;
};

struct GalleryProbeSplit {
    std::vector<SampleKey> gallery;
    std::vector<SampleKey> probes;
    std::vector<int> authorized;  // D1, sorted
    std::vector<int> outsiders;   // D2, sorted
    std::vector<ClaimSpec> claims;  // genuine, then type-1, then type-2
};

// Walks <root>/<sid>/<cov>-<run>/<angle>/ and indexes every directory that
// contains frames. Malformed names end up in warnings.
DatasetIndex load_dataset(const std::filesystem::path& root);

// Reads the PNG frames of one sample, binarized at 128.
GaitSequence load_sequence(const SampleRecord& record);

void save_index(const DatasetIndex& index, const std::filesystem::path& file);
DatasetIndex load_index(const std::filesystem::path& file);

// Gallery: first four Normal runs of each authorized subject. Probes: every
// other sample. Claims cover genuine attempts (authorized probes under their
// own id), type-1 (outsiders round-robin over authorized ids, one claim per
// authorized id) and type-2 (authorized Normal probes under a deranged id).
GalleryProbeSplit split_gallery_probe(const DatasetIndex& index, int n_authorized,
                                      std::uint64_t seed);

}  // namespace gaitlab
