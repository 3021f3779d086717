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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nomabf/harness.hpp"

namespace {

using nlohmann::json;
using namespace nomabf;

struct CommonOpts {
    std::string nt_list = "2,3,4,5";
    int count = 100;
    std::uint64_t seed = 0;
    int starts = 20;
    int epochs = 200;
    std::uint64_t symbols = 1'000'000;
    std::string out;
    std::string model;
    std::string data;
    std::string in;
    std::string techniques = "NN,CO,ZFBF,MRT,MRT1_ZFBF2,ZFBF1_MRT2";
    int order = 4;
    // Scenario geometry and link budget; all overridable from the config file.
    double d1_min = 600.0, d1_max = 650.0;
    double d2_min = 350.0, d2_max = 400.0;
    double xi = 1e6;
    double bandwidth_hz = 10.0e6;
    double noise_density_dbm_hz = -174.0;
    double tx_power_watt = 0.1;
    double carrier_freq_hz = 2.0e9;
};

/// One flat JSON file can preload any option; explicit flags still win
/// because the file is applied before parsing.
void apply_config(const std::string& path, CommonOpts& o) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    in >> j;
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("nt", o.nt_list);
    get("count", o.count);
    get("seed", o.seed);
    get("starts", o.starts);
    get("epochs", o.epochs);
    get("symbols", o.symbols);
    get("out", o.out);
    get("model", o.model);
    get("data", o.data);
    get("in", o.in);
    get("techniques", o.techniques);
    get("order", o.order);
    get("d1_min", o.d1_min);
    get("d1_max", o.d1_max);
    get("d2_min", o.d2_min);
    get("d2_max", o.d2_max);
    get("xi", o.xi);
    get("bandwidth_hz", o.bandwidth_hz);
    get("noise_density_dbm_hz", o.noise_density_dbm_hz);
    get("tx_power_watt", o.tx_power_watt);
    get("carrier_freq_hz", o.carrier_freq_hz);
}

LinkBudget budget_of(const CommonOpts& o) {
    LinkBudget b;
    b.bandwidth_hz = o.bandwidth_hz;
    b.noise_density_dbm_hz = o.noise_density_dbm_hz;
    b.tx_power_watt = o.tx_power_watt;
    b.carrier_freq_hz = o.carrier_freq_hz;
    return b;
}

DatasetConfig dataset_config_of(const CommonOpts& o) {
    DatasetConfig c;
    c.d1_range_m = {o.d1_min, o.d1_max};
    c.d2_range_m = {o.d2_min, o.d2_max};
    c.xi = o.xi;
    return c;
}

std::vector<int> parse_nt_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::runtime_error("empty antenna list");
    return out;
}

std::vector<Technique> parse_techniques(const std::string& s) {
    std::vector<Technique> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(technique_from_name(tok));
    }
    if (out.empty()) throw std::runtime_error("empty technique list");
    return out;
}

std::string require_out(const CommonOpts& o, const char* fallback) {
    return o.out.empty() ? fallback : o.out;
}

int cmd_gen(const CommonOpts& o) {
    const auto records = generate_dataset(parse_nt_list(o.nt_list), o.count, budget_of(o),
                                          o.seed, dataset_config_of(o));
    const std::string out = require_out(o, "dataset.jsonl");
    write_jsonl(records, out);
    std::cout << "wrote " << records.size() << " records to " << out << "\n";
    return 0;
}

int cmd_label(const CommonOpts& o) {
    auto records = read_jsonl(o.data);
    CoConfig cfg;
    cfg.n_starts = o.starts;
    cfg.seed = o.seed;
    const LabelSummary s =
        label_dataset(records, ModulationSpec::make(o.order, o.order), budget_of(o), cfg);
    const std::string out = require_out(o, "labeled.jsonl");
    write_jsonl(records, out);
    std::cout << "labeled " << s.labeled << ", skipped " << s.skipped << ", failed "
              << s.failed << " -> " << out << "\n";
    return s.failed == 0 ? 0 : 2;
}

int cmd_train(const CommonOpts& o) {
    const auto records = read_jsonl(o.data);
    std::vector<std::array<double, 7>> x, y;
    for (const auto& r : records) {
        if (!r.labeled()) continue;
        x.push_back(r.features);
        y.push_back(r.label->as_array());
    }
    if (x.empty()) throw std::runtime_error("no labeled records in " + o.data);
    MlpModel model = mlp_init(MlpArch{}, o.seed);
    model.xi = o.xi;
    TrainConfig cfg;
    cfg.max_epochs = o.epochs;
    cfg.lr_decay = 0.99;
    cfg.seed = o.seed;
    const TrainReport rep = mlp_train(model, x, y, cfg);
    const std::string out = o.model.empty() ? "model.json" : o.model;
    save_model(model, out);
    std::cout << "trained on " << x.size() << " samples for " << rep.train_loss.size()
              << " epochs (best validation MAE "
              << (rep.val_loss.empty() ? rep.train_loss.back() : rep.best_val_loss)
              << ") -> " << out << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& o) {
    const auto records = read_jsonl(o.data);
    const auto techs = parse_techniques(o.techniques);
    MlpModel model;
    bool have_model = false;
    for (Technique t : techs) {
        if (t == Technique::NN && !have_model) {
            model = load_model(o.model);
            have_model = true;
        }
    }
    EvalOptions opts;
    opts.mc_symbols = o.symbols;
    opts.seed = o.seed;
    opts.co.n_starts = o.starts;
    opts.co.seed = o.seed;
    const auto rows = run_eval(records, have_model ? &model : nullptr,
                               ModulationSpec::make(o.order, o.order), budget_of(o), techs,
                               opts);
    const std::string out = require_out(o, "eval.csv");
    write_eval_csv(rows, out);
    std::cout << "wrote " << rows.size() << " evaluation rows to " << out << "\n";
    return 0;
}

int cmd_ecdf(const CommonOpts& o) {
    const auto rows = read_eval_csv(o.in);
    const std::string out = require_out(o, "ecdf.csv");
    write_ecdf_csv(compute_ecdf(rows), out);
    std::cout << "wrote ECDF for " << rows.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_timing(const CommonOpts& o) {
    const auto records = generate_dataset(parse_nt_list(o.nt_list), o.count, budget_of(o),
                                          o.seed, dataset_config_of(o));
    const MlpModel model = load_model(o.model);
    CoConfig cfg;
    cfg.n_starts = o.starts;
    cfg.seed = o.seed;
    const auto rows =
        run_timing(records, model, ModulationSpec::make(o.order, o.order), budget_of(o), cfg);
    for (const auto& r : rows) {
        std::cout << technique_name(r.technique) << " nt=" << r.nt << ": "
                  << format_double(r.mean_seconds * 1e6) << " us/instance over "
                  << r.instances << " instances\n";
    }
    if (!o.out.empty()) {
        write_timing_csv(rows, o.out);
        std::cout << "wrote timing rows to " << o.out << "\n";
    }
    return 0;
}

/// Closed-form vs symbol-simulation agreement on random aligned feasible
/// operating points (where the expressions are exact).
int cmd_validate(const CommonOpts& o) {
    const LinkBudget budget = budget_of(o);
    const ModulationSpec mods = ModulationSpec::make(o.order, o.order);
    const ConstraintContext ctx = ConstraintContext::from_modulation(mods);
    const DatasetConfig geom = dataset_config_of(o);
    const double n0 = budget.effective_noise_watt();
    const auto nts = parse_nt_list(o.nt_list);

    int failures = 0;
    int produced = 0;
    Rng rng = Rng::stream(o.seed, 0xa117);
    const std::uint64_t max_attempts = 200ull * static_cast<std::uint64_t>(o.count);
    for (std::uint64_t attempt = 0; produced < o.count && attempt < max_attempts; ++attempt) {
        const int nt = nts[attempt % nts.size()];
        const Scenario sc = sample_scenario(nt, geom.d1_range_m, geom.d2_range_m, budget,
                                            stream_seed(o.seed, 0xce, attempt));
        const OrthonormalBasis basis = build_basis(sc);
        const BasisProjections proj = project_channels(sc, basis);
        const BeamParams p = aligned_random_params(proj, rng);
        if (!check_constraints(p, proj, ctx).all_ok()) continue;
        const BerPair analytic = ber_pair(p, proj, mods, n0);
        if (analytic.pe1 < 1e-3 || analytic.pe2 < 1e-3) continue;

        const BeamPair pair = assemble_beamformers(p, basis, proj);
        const SimResult sim = simulate_ber_pair(pair.w1, pair.w2, sc, mods, n0, o.symbols,
                                                stream_seed(o.seed, 0x51, attempt));
        const double bits = static_cast<double>(o.symbols) * mods.bits1;
        const double tol1 = 5.0 * standard_error(analytic.pe1, bits);
        const double tol2 = 5.0 * standard_error(analytic.pe2, bits);
        const bool ok1 = std::abs(sim.ber1 - analytic.pe1) <= tol1;
        const bool ok2 = std::abs(sim.ber2 - analytic.pe2) <= tol2;
        std::printf("[%s] nt=%d  pe1 %.6g vs %.6g (tol %.2g)  pe2 %.6g vs %.6g (tol %.2g)\n",
                    ok1 && ok2 ? "ok" : "FAIL", nt, analytic.pe1, sim.ber1, tol1,
                    analytic.pe2, sim.ber2, tol2);
        if (!(ok1 && ok2)) ++failures;
        ++produced;
    }
    if (produced < o.count) {
        std::cerr << "validate: only found " << produced << " eligible operating points\n";
        return 2;
    }
    std::printf("validate: %d/%d instances within 5 standard errors\n", produced - failures,
                produced);
    return failures == 0 ? 0 : 2;
}

int cmd_graymap(const CommonOpts& o) {
    const GrayMap map = GrayMap::make(o.order);
    std::printf("# %d-QAM, first %d bits select I, last %d select Q (reflected Gray)\n",
                map.order, map.bits / 2, map.bits / 2);
    std::printf("bits,word,i_level,q_level,re,im\n");
    const double scale = std::sqrt(map.energy);
    for (std::uint32_t w = 0; w < map.symbols.size(); ++w) {
        std::string bits;
        for (int b = map.bits - 1; b >= 0; --b) bits += ((w >> b) & 1u) ? '1' : '0';
        const cplx s = map.symbols[w];
        std::printf("%s,%u,%+.0f,%+.0f,%s,%s\n", bits.c_str(), w, s.real() * scale,
                    s.imag() * scale, format_double(s.real()).c_str(),
                    format_double(s.imag()).c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-user MISO-NOMA fairness beamforming toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string config_path;

    // Apply the config file before flag parsing so explicit flags override it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    try {
        if (!config_path.empty()) apply_config(config_path, o);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file preloading any option");
        sub->add_option("--nt", o.nt_list, "comma-separated antenna counts");
        sub->add_option("--count", o.count, "instances per antenna count");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--starts", o.starts, "solver restarts per instance");
        sub->add_option("--epochs", o.epochs, "training epoch cap");
        sub->add_option("--symbols", o.symbols, "Monte Carlo symbols per instance");
        sub->add_option("--out", o.out, "output path");
        sub->add_option("--model", o.model, "model file path");
        sub->add_option("--order", o.order, "QAM order for both users");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate channel realizations (JSONL)");
    add_common(gen);
    CLI::App* label = app.add_subcommand("label", "attach solver labels to a dataset");
    add_common(label);
    label->add_option("--data", o.data, "input dataset (JSONL)")->required();
    CLI::App* train = app.add_subcommand("train", "fit the parameter regressor");
    add_common(train);
    train->add_option("--data", o.data, "labeled dataset (JSONL)")->required();
    CLI::App* eval = app.add_subcommand("eval", "per-scenario max-BER of each technique");
    add_common(eval);
    eval->add_option("--data", o.data, "test dataset (JSONL)")->required();
    eval->add_option("--techniques", o.techniques, "comma-separated technique list");
    CLI::App* ecdf = app.add_subcommand("ecdf", "empirical CDF from an eval CSV");
    add_common(ecdf);
    ecdf->add_option("--in", o.in, "eval CSV")->required();
    CLI::App* timing = app.add_subcommand("timing", "wall-time comparison NN vs solver");
    add_common(timing);
    timing->get_option("--model")->required();
    CLI::App* validate =
        app.add_subcommand("validate", "closed-form vs Monte Carlo agreement suite");
    add_common(validate);
    CLI::App* graymap = app.add_subcommand("graymap", "print the bit-to-symbol table");
    add_common(graymap);

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(o);
        if (label->parsed()) return cmd_label(o);
        if (train->parsed()) return cmd_train(o);
        if (eval->parsed()) return cmd_eval(o);
        if (ecdf->parsed()) return cmd_ecdf(o);
        if (timing->parsed()) return cmd_timing(o);
        if (validate->parsed()) return cmd_validate(o);
        if (graymap->parsed()) return cmd_graymap(o);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
