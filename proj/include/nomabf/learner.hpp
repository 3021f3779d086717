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
#include <string>
#include <vector>

#include "nomabf/beamformer.hpp"
#include "nomabf/channel.hpp"

namespace nomabf {

struct MlpArch {
    int input = 7;
    int hidden1 = 128;
    int hidden2 = 64;
    int branch = 32;  // width of each of the two pre-head layers
};

struct DenseLayer {
    int in = 0;
    int out = 0;
    bool relu = false;
    std::vector<double> w;  // row-major [out][in]
    std::vector<double> b;
};

/// Fully connected regressor mapping the 7 channel features to the 7
/// beamforming parameters. Two shared hidden layers feed two rectifier
/// branches, each ending in a linear head: 4 amplitudes and 3 angles.
struct MlpModel {
    MlpArch arch;
    DenseLayer shared1, shared2;
    DenseLayer branch_a, branch_b;
    DenseLayer head_a, head_b;
    double xi = 1e6;  // feature scale the model was trained with
    std::string train_digest;

    std::array<double, 7> forward(const std::array<double, 7>& features) const;

    std::array<DenseLayer*, 6> layers() {
        return {&shared1, &shared2, &branch_a, &head_a, &branch_b, &head_b};
    }
    std::array<const DenseLayer*, 6> layers() const {
        return {&shared1, &shared2, &branch_a, &head_a, &branch_b, &head_b};
    }

    /// Throws std::invalid_argument when the dimension chain, activation
    /// tags, or head widths are off.
    void validate() const;
};

/// Fan-in scaled uniform initialization, deterministic per seed.
MlpModel mlp_init(const MlpArch& arch, std::uint64_t seed);

/// All-zero weights; forward output is identically zero. Test hook.
MlpModel mlp_init_zero(const MlpArch& arch);

struct TrainConfig {
    double learning_rate = 1e-3;
    double lr_decay = 1.0;             // per-epoch multiplier; 1 keeps the rate fixed
    int batch_size = 64;
    int max_epochs = 200;
    int patience = 10;                 // epochs without validation improvement
    double validation_fraction = 0.1;  // 0 disables early stopping
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    std::string digest() const;
};

struct TrainReport {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_loss;    // empty when validation is disabled
    int best_epoch = -1;
    double best_val_loss = 0.0;
};

/// Minimizes the sum of the two per-head mean absolute errors with
/// Nesterov-momentum Adam. Stops at max_epochs or when the validation loss
/// has not improved for `patience` epochs; the best checkpoint is restored.
TrainReport mlp_train(MlpModel& model, const std::vector<std::array<double, 7>>& features,
                      const std::vector<std::array<double, 7>>& labels,
                      const TrainConfig& cfg);

/// Per-layer parameter gradients, ordered like MlpModel::layers().
struct ModelGradients {
    std::array<std::vector<double>, 6> w;
    std::array<std::vector<double>, 6> b;
};

/// Batch loss (sum of per-head MAEs, averaged over the batch); fills `grads`
/// with the corresponding subgradients when non-null. Shared by the trainer
/// and the finite-difference checks.
double mlp_loss(const MlpModel& model, const std::vector<std::array<double, 7>>& features,
                const std::vector<std::array<double, 7>>& labels, ModelGradients* grads);

/// Forward pass followed by the feasibility repair; always returns
/// constraint-satisfying parameters.
BeamParams predict_params(const MlpModel& model, const FeatureVector& features,
                          const BasisProjections& proj, const ConstraintContext& ctx,
                          const RepairConfig& repair_cfg);

/// Versioned JSON round trip; loading reproduces forward outputs bit-exactly.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace nomabf
