// nomabf - fairness beamforming toolkit for two-user MISO-NOMA downlinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nomabf/beamformer.hpp"
#include "nomabf/channel.hpp"
#include "nomabf/optimizer.hpp"

namespace nomabf {

/// One training/evaluation sample. Serialized as one JSON object per line
/// with fields: nt, seed, h1_re, h1_im, h2_re, h2_im, d1_m, d2_m, features,
/// label (7-array, amplitudes then angles), psi_co, version. The label keys
/// are absent until the record has been labeled.
struct DatasetRecord {
    int nt = 0;
    std::uint64_t seed = 0;
    std::vector<double> h1_re, h1_im, h2_re, h2_im;
    double d1_m = 0.0, d2_m = 0.0;
    std::array<double, 7> features{};
    std::optional<BeamParams> label;
    std::optional<double> psi_co;
    int version = 1;

    Scenario scenario() const;
    bool labeled() const { return label.has_value(); }
};

struct DatasetConfig {
    std::pair<double, double> d1_range_m{600.0, 650.0};
    std::pair<double, double> d2_range_m{350.0, 400.0};
    double xi = 1e6;
};

/// Records are deterministic per (seed, nt, index); no labels yet.
std::vector<DatasetRecord> generate_dataset(const std::vector<int>& nt_list,
                                            int count_per_nt, const LinkBudget& budget,
                                            std::uint64_t seed,
                                            const DatasetConfig& cfg = {});

struct LabelSummary {
    int labeled = 0;
    int skipped = 0;  // already labeled
    int failed = 0;   // solver threw; record left unlabeled
};

/// Labels every unlabeled record with the multi-start solver output.
/// Per-record solver streams are derived from the record seed, so resuming
/// or reordering does not change labels.
LabelSummary label_dataset(std::vector<DatasetRecord>& records, const ModulationSpec& mods,
                           const LinkBudget& budget, const CoConfig& cfg);

void write_jsonl(const std::vector<DatasetRecord>& records, const std::string& path);
std::vector<DatasetRecord> read_jsonl(const std::string& path);

struct Codebook {
    int k = 0;
    std::vector<std::array<double, 7>> centroids;
    double distortion = 0.0;  // mean squared distance to the nearest centroid
};

/// Lloyd iterations with sequential D^2-sampling seeding (the first centroids
/// of a larger k reproduce those of a smaller k on the same stream). Empty
/// clusters are reseeded to the farthest point.
Codebook kmeans_fit(const std::vector<std::array<double, 7>>& features, int k,
                    std::uint64_t seed, int max_iters = 100);

/// Nearest centroid by Euclidean distance; ties break to the lowest index.
std::array<double, 7> quantize_features(const std::array<double, 7>& features,
                                        const Codebook& codebook);

}  // namespace nomabf
