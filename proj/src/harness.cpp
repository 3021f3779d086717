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

#include "nomabf/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nomabf/ber.hpp"

namespace nomabf {

namespace {

struct TechniqueEntry {
    Technique tech;
    const char* name;
};

constexpr TechniqueEntry kTechniques[] = {
    {Technique::NN, "NN"},
    {Technique::CO, "CO"},
    {Technique::ZFBF, "ZFBF"},
    {Technique::MRT, "MRT"},
    {Technique::MRT1_ZFBF2, "MRT1_ZFBF2"},
    {Technique::ZFBF1_MRT2, "ZFBF1_MRT2"},
};

void require_mode_discipline(const EvalRow& row) {
    if (technique_is_simulated(row.technique) && row.mode == EvalMode::Analytic) {
        throw std::logic_error("eval: " + technique_name(row.technique) +
                               " has no closed form and must not be emitted as analytic");
    }
}

double simulate_psi(const cvec& w1, const cvec& w2, const Scenario& sc,
                    const ModulationSpec& mods, double n0_eff, std::uint64_t symbols,
                    std::uint64_t seed) {
    const SimResult r = simulate_ber_pair(w1, w2, sc, mods, n0_eff, symbols, seed);
    return psi(r.ber1, r.ber2);
}

/// Closed-form max BER for a benchmark beamformer pair given through its
/// vectors. Valid only when the strong user's s1 coefficient is aligned (or
/// zero); asserted via the recovered alignment flag.
double analytic_vector_psi(const BeamPair& pair, const Scenario& sc,
                           const OrthonormalBasis& basis, const BasisProjections& proj,
                           const ModulationSpec& mods, double n0_eff) {
    const RecoveredParams rec = params_from_vectors(pair.w1, pair.w2, basis, proj);
    if (!rec.alignment_flag) {
        throw std::logic_error("eval: benchmark pair violates the alignment premise");
    }
    const double pe1 = ber_user1(rec.params, proj, mods, n0_eff);
    const double pe2 = ber_user2_gains(std::abs(inner(sc.h2, pair.w1)),
                                       std::abs(inner(sc.h2, pair.w2)), mods, n0_eff);
    return psi(pe1, pe2);
}

}  // namespace

std::string technique_name(Technique t) {
    for (const auto& e : kTechniques) {
        if (e.tech == t) return e.name;
    }
    throw std::logic_error("technique_name: unknown technique");
}

Technique technique_from_name(const std::string& name) {
    for (const auto& e : kTechniques) {
        if (name == e.name) return e.tech;
    }
    throw std::invalid_argument("unknown technique: " + name);
}

bool technique_is_simulated(Technique t) {
    return t == Technique::MRT || t == Technique::MRT1_ZFBF2 || t == Technique::ZFBF1_MRT2;
}

std::vector<EvalRow> run_eval(const std::vector<DatasetRecord>& records,
                              const MlpModel* model, const ModulationSpec& mods,
                              const LinkBudget& budget,
                              const std::vector<Technique>& techniques,
                              const EvalOptions& opts) {
    const double n0_eff = budget.effective_noise_watt();
    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);
    const RepairConfig repair_cfg;

    for (Technique t : techniques) {
        if (t == Technique::NN && model == nullptr) {
            throw std::invalid_argument("run_eval: NN requested without a model");
        }
    }

    std::vector<EvalRow> rows;
    rows.reserve(records.size() * techniques.size());
    for (std::size_t id = 0; id < records.size(); ++id) {
        const DatasetRecord& record = records[id];
        const Scenario sc = record.scenario();
        const OrthonormalBasis basis = build_basis(sc);
        const BasisProjections proj = project_channels(sc, basis);

        for (Technique tech : techniques) {
            EvalRow row;
            row.technique = tech;
            row.nt = record.nt;
            row.scenario_id = static_cast<int>(id);

            switch (tech) {
                case Technique::NN: {
                    const FeatureVector f = extract_features(proj, model->xi);
                    const BeamParams p = predict_params(*model, f, proj, ctx, repair_cfg);
                    row.psi = ber_pair(p, proj, mods, n0_eff).psi;
                    row.mode = EvalMode::Analytic;
                    break;
                }
                case Technique::CO: {
                    if (record.psi_co) {
                        row.psi = *record.psi_co;
                    } else {
                        CoConfig cfg = opts.co;
                        cfg.seed = stream_seed(opts.co.seed, record.seed);
                        row.psi = co_solve(proj, mods, n0_eff, cfg).psi_value;
                    }
                    row.mode = EvalMode::Analytic;
                    break;
                }
                case Technique::ZFBF: {
                    const BeamPair pair = zfbf_pair(sc.h1, sc.h2);
                    row.psi = analytic_vector_psi(pair, sc, basis, proj, mods, n0_eff);
                    row.mode = EvalMode::Analytic;
                    break;
                }
                case Technique::MRT:
                case Technique::MRT1_ZFBF2:
                case Technique::ZFBF1_MRT2: {
                    const BeamPair mrt = mrt_pair(sc.h1, sc.h2);
                    BeamPair pair = mrt;
                    if (tech == Technique::MRT1_ZFBF2) pair.w2 = zfbf_pair(sc.h1, sc.h2).w2;
                    if (tech == Technique::ZFBF1_MRT2) pair.w1 = zfbf_pair(sc.h1, sc.h2).w1;
                    const std::uint64_t sim_seed =
                        stream_seed(opts.seed, record.seed, static_cast<std::uint64_t>(tech));
                    row.psi = simulate_psi(pair.w1, pair.w2, sc, mods, n0_eff,
                                           opts.mc_symbols, sim_seed);
                    row.mode = EvalMode::MonteCarlo;
                    row.mc_symbols = opts.mc_symbols;
                    break;
                }
            }
            require_mode_discipline(row);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<TimingRow> run_timing(const std::vector<DatasetRecord>& records,
                                  const MlpModel& model, const ModulationSpec& mods,
                                  const LinkBudget& budget, const CoConfig& co_cfg) {
    using clock = std::chrono::steady_clock;
    const double n0_eff = budget.effective_noise_watt();
    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);
    const RepairConfig repair_cfg;

    std::map<int, std::vector<const DatasetRecord*>> by_nt;
    for (const DatasetRecord& r : records) by_nt[r.nt].push_back(&r);

    // Touch every path once so first-call effects stay out of the averages.
    volatile double sink = 0.0;
    if (!records.empty()) {
        const Scenario sc = records.front().scenario();
        const OrthonormalBasis basis = build_basis(sc);
        const BasisProjections proj = project_channels(sc, basis);
        sink = sink + predict_params(model, extract_features(proj, model.xi), proj, ctx, repair_cfg).rho1;
        CoConfig warm = co_cfg;
        warm.n_starts = 1;
        sink = sink + co_solve(proj, mods, n0_eff, warm).psi_value;
    }

    std::vector<TimingRow> rows;
    for (const auto& [nt, group] : by_nt) {
        TimingRow nn_row{Technique::NN, nt, 0.0, static_cast<int>(group.size())};
        TimingRow co_row{Technique::CO, nt, 0.0, static_cast<int>(group.size())};

        // Inference is microseconds-scale; several passes over the group keep
        // the mean stable against scheduler noise.
        const int passes = std::max<int>(1, static_cast<int>(400 / group.size()) + 1);
        auto t0 = clock::now();
        for (int pass = 0; pass < passes; ++pass) {
            for (const DatasetRecord* r : group) {
                const Scenario sc = r->scenario();
                const OrthonormalBasis basis = build_basis(sc);
                const BasisProjections proj = project_channels(sc, basis);
                const FeatureVector f = extract_features(proj, model.xi);
                sink = sink + predict_params(model, f, proj, ctx, repair_cfg).rho1;
            }
        }
        auto t1 = clock::now();
        nn_row.mean_seconds = std::chrono::duration<double>(t1 - t0).count() /
                              static_cast<double>(group.size()) / static_cast<double>(passes);

        t0 = clock::now();
        for (const DatasetRecord* r : group) {
            const Scenario sc = r->scenario();
            const OrthonormalBasis basis = build_basis(sc);
            const BasisProjections proj = project_channels(sc, basis);
            CoConfig cfg = co_cfg;
            cfg.seed = stream_seed(co_cfg.seed, r->seed);
            sink = sink + co_solve(proj, mods, n0_eff, cfg).psi_value;
        }
        t1 = clock::now();
        co_row.mean_seconds =
            std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(group.size());

        rows.push_back(nn_row);
        rows.push_back(co_row);
    }
    (void)sink;
    return rows;
}

std::vector<EcdfRow> compute_ecdf(const std::vector<EvalRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("compute_ecdf: no rows");

    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const EvalRow& r : rows) {
        const std::string tech = technique_name(r.technique);
        groups[{tech, std::to_string(r.nt)}].push_back(r.psi);
        groups[{tech, "all"}].push_back(r.psi);
    }

    std::vector<EcdfRow> out;
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        const double n = static_cast<double>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            EcdfRow row;
            row.technique = technique_from_name(key.first);
            row.nt_label = key.second;
            row.psi = values[i];
            row.fraction = static_cast<double>(i + 1) / n;
            out.push_back(row);
        }
    }
    return out;
}

double ecdf_percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("ecdf_percentile: empty sample");
    if (!(p > 0.0) || p > 1.0) throw std::domain_error("ecdf_percentile: p must be in (0, 1]");
    const auto n = static_cast<double>(sorted.size());
    auto idx = static_cast<std::size_t>(std::ceil(p * n));
    if (idx == 0) idx = 1;
    return sorted[idx - 1];
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_eval_csv(const std::vector<EvalRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_eval_csv: cannot open " + path);
    out << "technique,nt,scenario_id,psi,mode,mc_symbols\n";
    for (const EvalRow& r : rows) {
        require_mode_discipline(r);
        out << technique_name(r.technique) << ',' << r.nt << ',' << r.scenario_id << ','
            << format_double(r.psi) << ','
            << (r.mode == EvalMode::Analytic ? "analytic" : "monte_carlo") << ','
            << r.mc_symbols << '\n';
    }
}

std::vector<EvalRow> read_eval_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_eval_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "technique,nt,scenario_id,psi,mode,mc_symbols") {
        throw std::runtime_error("read_eval_csv: missing or unexpected header");
    }
    std::vector<EvalRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tech, nt, id, psi_s, mode, symbols;
        std::getline(ss, tech, ',');
        std::getline(ss, nt, ',');
        std::getline(ss, id, ',');
        std::getline(ss, psi_s, ',');
        std::getline(ss, mode, ',');
        std::getline(ss, symbols, ',');
        EvalRow r;
        r.technique = technique_from_name(tech);
        r.nt = std::stoi(nt);
        r.scenario_id = std::stoi(id);
        r.psi = std::stod(psi_s);
        r.mode = mode == "analytic" ? EvalMode::Analytic : EvalMode::MonteCarlo;
        r.mc_symbols = std::stoull(symbols);
        rows.push_back(r);
    }
    return rows;
}

void write_ecdf_csv(const std::vector<EcdfRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ecdf_csv: cannot open " + path);
    out << "technique,nt,psi_sorted,cumulative_fraction\n";
    for (const EcdfRow& r : rows) {
        out << technique_name(r.technique) << ',' << r.nt_label << ',' << format_double(r.psi)
            << ',' << format_double(r.fraction) << '\n';
    }
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_timing_csv: cannot open " + path);
    out << "technique,nt,mean_seconds,instances\n";
    for (const TimingRow& r : rows) {
        out << technique_name(r.technique) << ',' << r.nt << ',' << format_double(r.mean_seconds)
            << ',' << r.instances << '\n';
    }
}

}  // namespace nomabf
