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

#include <cstdint>
#include <string>
#include <vector>

#include "nomabf/dataset.hpp"
#include "nomabf/learner.hpp"
#include "nomabf/linksim.hpp"

namespace nomabf {

enum class Technique { NN, CO, ZFBF, MRT, MRT1_ZFBF2, ZFBF1_MRT2 };

std::string technique_name(Technique t);
Technique technique_from_name(const std::string& name);

/// MRT-containing techniques have no closed form; they are always simulated.
bool technique_is_simulated(Technique t);

enum class EvalMode { Analytic, MonteCarlo };

struct EvalRow {
    Technique technique = Technique::ZFBF;
    int nt = 0;
    int scenario_id = 0;
    double psi = 0.0;
    EvalMode mode = EvalMode::Analytic;
    std::uint64_t mc_symbols = 0;  // 0 in analytic mode
};

struct TimingRow {
    Technique technique = Technique::NN;
    int nt = 0;
    double mean_seconds = 0.0;
    int instances = 0;
};

struct EvalOptions {
    std::uint64_t mc_symbols = 1'000'000;
    std::uint64_t seed = 0;  // Monte Carlo substreams derive from this
    CoConfig co;             // used when a record carries no stored solution
};

/// Per scenario x technique max-BER values. Closed forms for NN/CO/ZFBF,
/// symbol simulation for the MRT-containing benchmarks.
std::vector<EvalRow> run_eval(const std::vector<DatasetRecord>& records,
                              const MlpModel* model, const ModulationSpec& mods,
                              const LinkBudget& budget,
                              const std::vector<Technique>& techniques,
                              const EvalOptions& opts);

/// Mean wall time per instance for prediction (features + forward + repair)
/// vs the multi-start solver, per antenna count.
std::vector<TimingRow> run_timing(const std::vector<DatasetRecord>& records,
                                  const MlpModel& model, const ModulationSpec& mods,
                                  const LinkBudget& budget, const CoConfig& co_cfg);

struct EcdfRow {
    Technique technique = Technique::ZFBF;
    std::string nt_label;  // "2".."5" or "all" for the merged curve
    double psi = 0.0;
    double fraction = 0.0;  // i/n at the i-th order statistic
};

/// Exact empirical CDF per (technique, nt) plus a merged-nt curve per
/// technique. Throws on empty input.
std::vector<EcdfRow> compute_ecdf(const std::vector<EvalRow>& rows);

/// Smallest value whose empirical fraction reaches p. `sorted` ascending.
double ecdf_percentile(const std::vector<double>& sorted, double p);

void write_eval_csv(const std::vector<EvalRow>& rows, const std::string& path);
std::vector<EvalRow> read_eval_csv(const std::string& path);
void write_ecdf_csv(const std::vector<EcdfRow>& rows, const std::string& path);
void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path);

/// Shortest round-trip decimal representation (stable across runs).
std::string format_double(double v);

}  // namespace nomabf
