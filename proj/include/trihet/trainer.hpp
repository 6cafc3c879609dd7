#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trihet/autodiff.hpp"
#include "trihet/features.hpp"
#include "trihet/model.hpp"
#include "trihet/split.hpp"

namespace trihet {

/// Gradients shaped like ModelParams (blocks in ModelParams::blocks() order).
struct ParamGrads {
  std::vector<Matrix> blocks;
  double s_cn = 0.0;
  double s_hi = 0.0;
};

/// One recorded forward pass over labelled pairs: encoder, decoder and the
/// summed BCE loss. Gradients come from backward(), which may run once and
/// only while the parameters are unchanged since recording.
class ForwardPass {
 public:
  static ForwardPass record(const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                            std::span<const NodePair> pairs, std::span<const int> labels, double dropout = 0.0,
                            Rng* dropout_rng = nullptr);

  double loss() const { return tape_.value(loss_)(0, 0); }
  std::span<const double> logits() const { return tape_.value(vars_.logits).values(); }
  const ModelVars& vars() const { return vars_; }

  friend ParamGrads backward(ForwardPass& pass, const ModelParams& params);

 private:
  ad::Tape tape_;
  ModelVars vars_;
  ad::Var loss_;
  std::uint64_t params_version_ = 0;
};

ParamGrads backward(ForwardPass& pass, const ModelParams& params);

struct AdamConfig {
  double main_lr = 0.01;
  double scalar_lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  double m_cn = 0.0, v_cn = 0.0, m_hi = 0.0, v_hi = 0.0;
  std::uint64_t step = 0;

  static OptimizerState for_params(const ModelParams& params, const AdamConfig& config);
};

/// One Adam update. Layer/decoder blocks use main_lr, the structure scalars
/// scalar_lr; frozen scalars are left untouched. Throws on a non-finite
/// gradient before modifying anything.
void adam_step(OptimizerState& state, ModelParams& params, const ParamGrads& grads);

enum class AblationMode { gcn, gcn_cn, gcn_hi, trihet };
std::string_view to_string(AblationMode m);
AblationMode parse_ablation(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t patience = 500;
  double dropout = 0.1;
  double main_lr = 0.01;
  double scalar_lr = 0.001;
  std::size_t hidden = 128;
  std::size_t layers = 2;
  Activation activation = Activation::relu;
  std::uint64_t seed = 42;
  AblationMode mode = AblationMode::trihet;
  // Overrides applied after the mode's defaults.
  std::optional<double> s_cn_init;
  std::optional<double> s_hi_init;
  std::optional<bool> train_s_cn;
  std::optional<bool> train_s_hi;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_auc = 0.0;
  double val_ap = 0.0;
  double s_cn = 0.0;
  double s_hi = 0.0;
};

struct TrainResult {
  ModelParams best;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_auc = 0.0;
  bool diverged = false;
  std::string diagnostics;
};

/// Initial parameters for `cfg` (seeded init, then the mode's scalar rules).
ModelParams initial_params(std::size_t input_dim, const TrainConfig& cfg);

/// Full-batch training with per-epoch negative resampling, keeping the
/// snapshot with the best validation AUC and stopping after `patience` epochs
/// without improvement.
TrainResult train(const LinkSplit& split, const FeatureMatrix& features, const TrainConfig& cfg);

struct PairMetrics {
  double auc = 0.0;
  double ap = 0.0;
};

/// Scores positives and negatives with the decoder logits (no dropout).
PairMetrics evaluate_pairs(const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                           std::span<const NodePair> pos, std::span<const NodePair> neg);

/// CSV `epoch,loss,val_auc,val_ap,s_cn,s_hi`.
void save_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path);

struct GradcheckReport {
  std::size_t instances = 0;
  std::size_t entries_checked = 0;
  double max_rel_error = 0.0;
  std::vector<double> per_instance;
  bool scalar_grads_nonzero = false;
};

/// Compares every analytic gradient against central differences on random
/// tiny instances (dropout off, rectifier inputs and clamp exponents kept
/// away from their kinks). Error metric: |a - fd| / max(1, |a|).
GradcheckReport gradcheck(std::size_t instances, std::size_t max_nodes, std::uint64_t seed,
                          std::size_t max_hidden = 4, double step = 1e-5);

}  // namespace trihet
