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

#include "nomabf/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nomabf/rng.hpp"

namespace nomabf {

namespace {

void layer_forward(const DenseLayer& layer, const double* in, double* out) {
    for (int o = 0; o < layer.out; ++o) {
        double acc = layer.b[o];
        const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) acc += row[i] * in[i];
        out[o] = layer.relu && acc < 0.0 ? 0.0 : acc;
    }
}

DenseLayer make_layer(int in, int out, bool relu) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.relu = relu;
    l.w.assign(static_cast<std::size_t>(in) * out, 0.0);
    l.b.assign(out, 0.0);
    return l;
}

MlpModel make_skeleton(const MlpArch& arch) {
    MlpModel m;
    m.arch = arch;
    m.shared1 = make_layer(arch.input, arch.hidden1, true);
    m.shared2 = make_layer(arch.hidden1, arch.hidden2, true);
    m.branch_a = make_layer(arch.hidden2, arch.branch, true);
    m.branch_b = make_layer(arch.hidden2, arch.branch, true);
    m.head_a = make_layer(arch.branch, 4, false);
    m.head_b = make_layer(arch.branch, 3, false);
    return m;
}

/// Per-layer buffers used by backpropagation.
struct Activations {
    std::vector<double> a1, a2, aa, ab;  // post-activation
    std::array<double, 7> out{};
};

void forward_tracked(const MlpModel& m, const std::array<double, 7>& x, Activations& act) {
    act.a1.resize(m.arch.hidden1);
    act.a2.resize(m.arch.hidden2);
    act.aa.resize(m.arch.branch);
    act.ab.resize(m.arch.branch);
    layer_forward(m.shared1, x.data(), act.a1.data());
    layer_forward(m.shared2, act.a1.data(), act.a2.data());
    layer_forward(m.branch_a, act.a2.data(), act.aa.data());
    layer_forward(m.branch_b, act.a2.data(), act.ab.data());
    layer_forward(m.head_a, act.aa.data(), act.out.data());
    layer_forward(m.head_b, act.ab.data(), act.out.data() + 4);
}

struct LayerGrad {
    std::vector<double> w, b;
    void reset(const DenseLayer& l) {
        w.assign(l.w.size(), 0.0);
        b.assign(l.b.size(), 0.0);
    }
};

/// d_out -> accumulates layer gradients and returns d_in. `post` must be the
/// layer's post-activation output (used for the rectifier subgradient).
void backward_layer(const DenseLayer& layer, const double* in, const double* post,
                    std::vector<double>& d_out, LayerGrad& grad, std::vector<double>* d_in) {
    if (layer.relu) {
        for (int o = 0; o < layer.out; ++o) {
            if (post[o] <= 0.0) d_out[o] = 0.0;
        }
    }
    if (d_in) {
        d_in->assign(layer.in, 0.0);
    }
    for (int o = 0; o < layer.out; ++o) {
        const double g = d_out[o];
        if (g == 0.0) continue;
        grad.b[o] += g;
        double* wrow = grad.w.data() + static_cast<std::size_t>(o) * layer.in;
        const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            wrow[i] += g * in[i];
            if (d_in) (*d_in)[i] += row[i] * g;
        }
    }
}

double sample_loss(const std::array<double, 7>& out, const std::array<double, 7>& label) {
    double la = 0.0, lb = 0.0;
    for (int i = 0; i < 4; ++i) la += std::abs(out[i] - label[i]);
    for (int i = 4; i < 7; ++i) lb += std::abs(out[i] - label[i]);
    return la / 4.0 + lb / 3.0;
}

struct BackpropScratch {
    Activations act;
    std::vector<double> d_head = std::vector<double>(7);
    std::vector<double> d_aa, d_ab, d_a2a, d_a2b, d_a2, d_a1;
};

/// Forward + subgradient accumulation for one sample, weighted by `weight`
/// (1/batch for batch means). Returns the sample loss.
double accumulate_sample(const MlpModel& model, const std::array<double, 7>& x,
                         const std::array<double, 7>& label, double weight,
                         std::array<LayerGrad, 6>& grads, BackpropScratch& s) {
    forward_tracked(model, x, s.act);
    const double loss = sample_loss(s.act.out, label);

    for (int o = 0; o < 7; ++o) {
        const double err = s.act.out[o] - label[o];
        const double scale = (o < 4 ? 0.25 : 1.0 / 3.0) * weight;
        s.d_head[o] = err > 0.0 ? scale : (err < 0.0 ? -scale : 0.0);
    }
    std::vector<double> d_ha(s.d_head.begin(), s.d_head.begin() + 4);
    std::vector<double> d_hb(s.d_head.begin() + 4, s.d_head.end());
    backward_layer(model.head_a, s.act.aa.data(), s.act.out.data(), d_ha, grads[3], &s.d_aa);
    backward_layer(model.head_b, s.act.ab.data(), s.act.out.data() + 4, d_hb, grads[5], &s.d_ab);
    backward_layer(model.branch_a, s.act.a2.data(), s.act.aa.data(), s.d_aa, grads[2], &s.d_a2a);
    backward_layer(model.branch_b, s.act.a2.data(), s.act.ab.data(), s.d_ab, grads[4], &s.d_a2b);
    s.d_a2.assign(model.arch.hidden2, 0.0);
    for (int k = 0; k < model.arch.hidden2; ++k) s.d_a2[k] = s.d_a2a[k] + s.d_a2b[k];
    backward_layer(model.shared2, s.act.a1.data(), s.act.a2.data(), s.d_a2, grads[1], &s.d_a1);
    backward_layer(model.shared1, x.data(), s.act.a1.data(), s.d_a1, grads[0], nullptr);
    return loss;
}

struct AdamState {
    std::vector<double> mw, vw, mb, vb;
    void reset(const DenseLayer& l) {
        mw.assign(l.w.size(), 0.0);
        vw.assign(l.w.size(), 0.0);
        mb.assign(l.b.size(), 0.0);
        vb.assign(l.b.size(), 0.0);
    }
};

/// Adam with Nesterov momentum: the update direction blends the bias-corrected
/// first moment with the bias-corrected current gradient.
void nadam_update(DenseLayer& layer, const LayerGrad& grad, AdamState& st,
                  const TrainConfig& cfg, double lr, double bc1, double bc2) {
    auto step = [&](std::vector<double>& w, const std::vector<double>& g,
                    std::vector<double>& mv, std::vector<double>& vv) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            mv[i] = cfg.beta1 * mv[i] + (1.0 - cfg.beta1) * g[i];
            vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = mv[i] / bc1;
            const double g_hat = g[i] / bc1;
            const double v_hat = vv[i] / bc2;
            w[i] -= lr * (cfg.beta1 * m_hat + (1.0 - cfg.beta1) * g_hat) /
                    (std::sqrt(v_hat) + cfg.epsilon);
        }
    };
    step(layer.w, grad.w, st.mw, st.vw);
    step(layer.b, grad.b, st.mb, st.vb);
}

nlohmann::json layer_to_json(const DenseLayer& l, const char* name) {
    return {{"name", name}, {"in", l.in},  {"out", l.out},
            {"relu", l.relu}, {"w", l.w}, {"b", l.b}};
}

void layer_from_json(const nlohmann::json& j, DenseLayer& l) {
    l.in = j.at("in").get<int>();
    l.out = j.at("out").get<int>();
    l.relu = j.at("relu").get<bool>();
    l.w = j.at("w").get<std::vector<double>>();
    l.b = j.at("b").get<std::vector<double>>();
    if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
        l.b.size() != static_cast<std::size_t>(l.out)) {
        throw std::invalid_argument("model file: layer size mismatch");
    }
}

}  // namespace

std::array<double, 7> MlpModel::forward(const std::array<double, 7>& features) const {
    for (double f : features) {
        if (!std::isfinite(f)) throw std::domain_error("mlp forward: non-finite feature");
    }
    thread_local Activations act;  // inference is allocation-free after warmup
    forward_tracked(*this, features, act);
    return act.out;
}

void MlpModel::validate() const {
    const bool chain_ok = shared1.in == arch.input && shared1.out == arch.hidden1 &&
                          shared2.in == arch.hidden1 && shared2.out == arch.hidden2 &&
                          branch_a.in == arch.hidden2 && branch_a.out == arch.branch &&
                          branch_b.in == arch.hidden2 && branch_b.out == arch.branch &&
                          head_a.in == arch.branch && head_b.in == arch.branch;
    const bool heads_ok = head_a.out == 4 && head_b.out == 3 && !head_a.relu && !head_b.relu;
    const bool relu_ok = shared1.relu && shared2.relu && branch_a.relu && branch_b.relu;
    if (!chain_ok || !heads_ok || !relu_ok) {
        throw std::invalid_argument("MlpModel: architecture violates the 7 -> hidden -> (4|3) contract");
    }
    for (const DenseLayer* l : layers()) {
        for (double v : l->w) {
            if (!std::isfinite(v)) throw std::invalid_argument("MlpModel: non-finite weight");
        }
    }
}

MlpModel mlp_init(const MlpArch& arch, std::uint64_t seed) {
    MlpModel m = make_skeleton(arch);
    int idx = 0;
    for (DenseLayer* l : m.layers()) {
        Rng rng = Rng::stream(seed, 0x317, static_cast<std::uint64_t>(idx++));
        const double limit = std::sqrt(3.0 / l->in);
        for (double& w : l->w) w = rng.uniform(-limit, limit);
    }
    m.validate();
    return m;
}

MlpModel mlp_init_zero(const MlpArch& arch) { return make_skeleton(arch); }

std::string TrainConfig::digest() const {
    std::ostringstream os;
    os << "lr=" << learning_rate << ";decay=" << lr_decay << ";batch=" << batch_size
       << ";epochs=" << max_epochs
       << ";patience=" << patience << ";val=" << validation_fraction << ";seed=" << seed;
    return os.str();
}

TrainReport mlp_train(MlpModel& model, const std::vector<std::array<double, 7>>& features,
                      const std::vector<std::array<double, 7>>& labels,
                      const TrainConfig& cfg) {
    if (features.empty() || features.size() != labels.size()) {
        throw std::invalid_argument("mlp_train: empty or mismatched dataset");
    }
    model.validate();
    model.train_digest = cfg.digest();

    const std::size_t n = features.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    {
        Rng rng = Rng::stream(cfg.seed, 0x5317);  // train/validation split stream
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[rng.below(i + 1)]);
        }
    }
    const std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * n));
    const std::size_t n_train = n - n_val;
    if (n_train == 0) throw std::invalid_argument("mlp_train: validation split leaves no training data");
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> val_idx(order.begin() + n_train, order.end());

    auto model_layers = model.layers();
    std::array<LayerGrad, 6> grads;
    std::array<AdamState, 6> adam;
    for (int i = 0; i < 6; ++i) adam[i].reset(*model_layers[i]);

    BackpropScratch scratch;

    auto eval_loss = [&](const std::vector<std::size_t>& idx) {
        double total = 0.0;
        for (std::size_t i : idx) {
            forward_tracked(model, features[i], scratch.act);
            total += sample_loss(scratch.act.out, labels[i]);
        }
        return idx.empty() ? 0.0 : total / static_cast<double>(idx.size());
    };

    TrainReport report;
    report.best_val_loss = std::numeric_limits<double>::infinity();
    MlpModel best_snapshot = model;
    long t = 0;
    int stale = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double lr_epoch =
            cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(epoch));
        Rng rng = Rng::stream(cfg.seed, 0xe90c, static_cast<std::uint64_t>(epoch));
        for (std::size_t i = n_train - 1; i > 0; --i) {
            std::swap(train_idx[i], train_idx[rng.below(i + 1)]);
        }

        double epoch_loss = 0.0;
        for (std::size_t base = 0; base < n_train; base += cfg.batch_size) {
            const std::size_t batch_n = std::min<std::size_t>(cfg.batch_size, n_train - base);
            for (int i = 0; i < 6; ++i) grads[i].reset(*model_layers[i]);

            const double inv = 1.0 / static_cast<double>(batch_n);
            for (std::size_t s = 0; s < batch_n; ++s) {
                const std::size_t i = train_idx[base + s];
                epoch_loss += accumulate_sample(model, features[i], labels[i], inv, grads, scratch);
            }

            ++t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            for (int i = 0; i < 6; ++i) {
                nadam_update(*model_layers[i], grads[i], adam[i], cfg, lr_epoch, bc1, bc2);
            }
        }
        report.train_loss.push_back(epoch_loss / static_cast<double>(n_train));

        if (!val_idx.empty()) {
            const double vl = eval_loss(val_idx);
            report.val_loss.push_back(vl);
            if (vl < report.best_val_loss) {
                report.best_val_loss = vl;
                report.best_epoch = epoch;
                best_snapshot = model;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                break;
            }
        }
    }

    if (!val_idx.empty() && report.best_epoch >= 0) {
        const std::string digest = model.train_digest;
        model = best_snapshot;
        model.train_digest = digest;
    }
    return report;
}

double mlp_loss(const MlpModel& model, const std::vector<std::array<double, 7>>& features,
                const std::vector<std::array<double, 7>>& labels, ModelGradients* grads) {
    if (features.empty() || features.size() != labels.size()) {
        throw std::invalid_argument("mlp_loss: empty or mismatched batch");
    }
    BackpropScratch scratch;
    double total = 0.0;
    const double inv = 1.0 / static_cast<double>(features.size());
    if (grads == nullptr) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            forward_tracked(model, features[i], scratch.act);
            total += sample_loss(scratch.act.out, labels[i]);
        }
        return total * inv;
    }
    std::array<LayerGrad, 6> acc;
    auto layers = model.layers();
    for (int i = 0; i < 6; ++i) acc[i].reset(*layers[i]);
    for (std::size_t i = 0; i < features.size(); ++i) {
        total += accumulate_sample(model, features[i], labels[i], inv, acc, scratch);
    }
    for (int i = 0; i < 6; ++i) {
        grads->w[i] = std::move(acc[i].w);
        grads->b[i] = std::move(acc[i].b);
    }
    return total * inv;
}

BeamParams predict_params(const MlpModel& model, const FeatureVector& features,
                          const BasisProjections& proj, const ConstraintContext& ctx,
                          const RepairConfig& repair_cfg) {
    const std::array<double, 7> raw = model.forward(features.v);
    return repair_params(BeamParams::from_array(raw), proj, ctx, repair_cfg);
}

void save_model(const MlpModel& model, const std::string& path) {
    model.validate();
    nlohmann::json j = {
        {"format", "nomabf-mlp"},
        {"version", 1},
        {"arch",
         {{"input", model.arch.input},
          {"hidden1", model.arch.hidden1},
          {"hidden2", model.arch.hidden2},
          {"branch", model.arch.branch}}},
        {"xi", model.xi},
        {"train_digest", model.train_digest},
        {"layers",
         {layer_to_json(model.shared1, "shared1"), layer_to_json(model.shared2, "shared2"),
          layer_to_json(model.branch_a, "branch_a"), layer_to_json(model.head_a, "head_a"),
          layer_to_json(model.branch_b, "branch_b"), layer_to_json(model.head_b, "head_b")}}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << j.dump() << '\n';
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.at("format").get<std::string>() != "nomabf-mlp" || j.at("version").get<int>() != 1) {
        throw std::runtime_error("load_model: unrecognized model format/version");
    }
    MlpModel m;
    m.arch.input = j.at("arch").at("input").get<int>();
    m.arch.hidden1 = j.at("arch").at("hidden1").get<int>();
    m.arch.hidden2 = j.at("arch").at("hidden2").get<int>();
    m.arch.branch = j.at("arch").at("branch").get<int>();
    m.xi = j.at("xi").get<double>();
    m.train_digest = j.at("train_digest").get<std::string>();
    const auto& layers = j.at("layers");
    if (layers.size() != 6) throw std::runtime_error("load_model: expected six layers");
    layer_from_json(layers[0], m.shared1);
    layer_from_json(layers[1], m.shared2);
    layer_from_json(layers[2], m.branch_a);
    layer_from_json(layers[3], m.head_a);
    layer_from_json(layers[4], m.branch_b);
    layer_from_json(layers[5], m.head_b);
    m.validate();
    return m;
}

}  // namespace nomabf
