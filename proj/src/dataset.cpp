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

#include "nomabf/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "nomabf/rng.hpp"

namespace nomabf {

namespace {

std::vector<double> reals(const cvec& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

std::vector<double> imags(const cvec& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].imag();
    return out;
}

double sqdist(const std::array<double, 7>& a, const std::array<double, 7>& b) {
    double s = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

Scenario DatasetRecord::scenario() const {
    Scenario s;
    s.nt = nt;
    s.seed = seed;
    s.d1_m = d1_m;
    s.d2_m = d2_m;
    s.beta1 = std::pow(10.0, -path_loss_db(d1_m / 1000.0) / 10.0);
    s.beta2 = std::pow(10.0, -path_loss_db(d2_m / 1000.0) / 10.0);
    s.h1.resize(h1_re.size());
    s.h2.resize(h2_re.size());
    for (std::size_t i = 0; i < h1_re.size(); ++i) s.h1[i] = {h1_re[i], h1_im[i]};
    for (std::size_t i = 0; i < h2_re.size(); ++i) s.h2[i] = {h2_re[i], h2_im[i]};
    return s;
}

std::vector<DatasetRecord> generate_dataset(const std::vector<int>& nt_list,
                                            int count_per_nt, const LinkBudget& budget,
                                            std::uint64_t seed, const DatasetConfig& cfg) {
    if (count_per_nt < 1) throw std::domain_error("generate_dataset: count must be positive");
    std::vector<DatasetRecord> records;
    records.reserve(nt_list.size() * static_cast<std::size_t>(count_per_nt));
    for (int nt : nt_list) {
        for (int idx = 0; idx < count_per_nt; ++idx) {
            const std::uint64_t rec_seed =
                stream_seed(seed, static_cast<std::uint64_t>(nt), static_cast<std::uint64_t>(idx));
            const Scenario sc =
                sample_scenario(nt, cfg.d1_range_m, cfg.d2_range_m, budget, rec_seed);
            const OrthonormalBasis basis = build_basis(sc);
            const BasisProjections proj = project_channels(sc, basis);

            DatasetRecord r;
            r.nt = nt;
            r.seed = rec_seed;
            r.h1_re = reals(sc.h1);
            r.h1_im = imags(sc.h1);
            r.h2_re = reals(sc.h2);
            r.h2_im = imags(sc.h2);
            r.d1_m = sc.d1_m;
            r.d2_m = sc.d2_m;
            r.features = extract_features(proj, cfg.xi).v;
            records.push_back(std::move(r));
        }
    }
    return records;
}

LabelSummary label_dataset(std::vector<DatasetRecord>& records, const ModulationSpec& mods,
                           const LinkBudget& budget, const CoConfig& cfg) {
    LabelSummary summary;
    const double n0_eff = budget.effective_noise_watt();
    for (DatasetRecord& r : records) {
        if (r.labeled()) {
            ++summary.skipped;
            continue;
        }
        try {
            const Scenario sc = r.scenario();
            const BasisProjections proj = project_channels(sc, build_basis(sc));
            CoConfig rec_cfg = cfg;
            rec_cfg.seed = stream_seed(cfg.seed, r.seed);
            const CoSolution sol = co_solve(proj, mods, n0_eff, rec_cfg);
            r.label = sol.params;
            r.psi_co = sol.psi_value;
            ++summary.labeled;
        } catch (const std::exception&) {
            ++summary.failed;  // record stays unlabeled and visible
        }
    }
    return summary;
}

void write_jsonl(const std::vector<DatasetRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_jsonl: cannot open " + path);
    for (const DatasetRecord& r : records) {
        nlohmann::json j = {
            {"nt", r.nt},       {"seed", r.seed},   {"h1_re", r.h1_re}, {"h1_im", r.h1_im},
            {"h2_re", r.h2_re}, {"h2_im", r.h2_im}, {"d1_m", r.d1_m},   {"d2_m", r.d2_m},
            {"features", r.features}, {"version", r.version}};
        if (r.label) j["label"] = r.label->as_array();
        if (r.psi_co) j["psi_co"] = *r.psi_co;
        out << j.dump() << '\n';
    }
}

std::vector<DatasetRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_jsonl: cannot open " + path);
    std::vector<DatasetRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        DatasetRecord r;
        r.nt = j.at("nt").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.h1_re = j.at("h1_re").get<std::vector<double>>();
        r.h1_im = j.at("h1_im").get<std::vector<double>>();
        r.h2_re = j.at("h2_re").get<std::vector<double>>();
        r.h2_im = j.at("h2_im").get<std::vector<double>>();
        r.d1_m = j.at("d1_m").get<double>();
        r.d2_m = j.at("d2_m").get<double>();
        r.features = j.at("features").get<std::array<double, 7>>();
        r.version = j.at("version").get<int>();
        if (j.contains("label")) {
            r.label = BeamParams::from_array(j.at("label").get<std::array<double, 7>>());
        }
        if (j.contains("psi_co")) r.psi_co = j.at("psi_co").get<double>();
        records.push_back(std::move(r));
    }
    return records;
}

Codebook kmeans_fit(const std::vector<std::array<double, 7>>& features, int k,
                    std::uint64_t seed, int max_iters) {
    const std::size_t n = features.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("kmeans_fit: k must be in [1, sample count]");
    }

    Codebook cb;
    cb.k = k;
    cb.centroids.reserve(k);

    // D^2-weighted sequential seeding; the choice stream depends only on the
    // picks made so far, so the first centroids agree across different k.
    Rng rng = Rng::stream(seed, 0x7e11);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    cb.centroids.push_back(features[rng.below(n)]);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sqdist(features[i], cb.centroids.back()));
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);  // all points coincide with a centroid
        }
        cb.centroids.push_back(features[pick]);
    }

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sqdist(features[i], cb.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sqdist(features[i], cb.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                moved = true;
            }
        }
        if (!moved) break;

        std::vector<std::array<double, 7>> sums(k, std::array<double, 7>{});
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (int d = 0; d < 7; ++d) sums[assign[i]][d] += features[i][d];
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed to the globally farthest point from its own centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sqdist(features[i], cb.centroids[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                cb.centroids[c] = features[far];
                continue;
            }
            for (int d = 0; d < 7; ++d) cb.centroids[c][d] = sums[c][d] / counts[c];
        }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) best_d = std::min(best_d, sqdist(features[i], cb.centroids[c]));
        total += best_d;
    }
    cb.distortion = total / static_cast<double>(n);
    return cb;
}

std::array<double, 7> quantize_features(const std::array<double, 7>& features,
                                        const Codebook& codebook) {
    if (codebook.centroids.empty()) throw std::invalid_argument("quantize_features: empty codebook");
    int best = 0;
    double best_d = sqdist(features, codebook.centroids[0]);
    for (int c = 1; c < codebook.k; ++c) {
        const double d = sqdist(features, codebook.centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return codebook.centroids[best];
}

}  // namespace nomabf
