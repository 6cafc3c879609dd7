#include "trihet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "trihet/metrics.hpp"

namespace trihet {

ForwardPass ForwardPass::record(const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                                std::span<const NodePair> pairs, std::span<const int> labels, double dropout,
                                Rng* dropout_rng) {
  if (pairs.size() != labels.size()) throw std::invalid_argument("pairs and labels differ in length");
  ForwardPass pass;
  pass.params_version_ = params.version;
  const bool training = dropout > 0.0;
  pass.vars_ = record_encoder(pass.tape_, op, input, params, dropout, training, dropout_rng);
  record_decoder(pass.tape_, pass.vars_, params, pairs);
  pass.loss_ = ad::sigmoid_bce(pass.tape_, pass.vars_.logits, labels);
  return pass;
}

ParamGrads backward(ForwardPass& pass, const ModelParams& params) {
  if (pass.tape_.consumed()) throw std::logic_error("stale tape: this forward pass was already differentiated");
  if (pass.params_version_ != params.version) {
    throw std::logic_error("stale tape: parameters changed since the forward pass was recorded");
  }
  pass.tape_.backward(pass.loss_);
  ParamGrads g;
  for (ad::Var v : pass.vars_.blocks) g.blocks.push_back(pass.tape_.grad(v));
  g.s_cn = pass.tape_.grad(pass.vars_.s_cn)(0, 0);
  g.s_hi = pass.tape_.grad(pass.vars_.s_hi)(0, 0);
  return g;
}

OptimizerState OptimizerState::for_params(const ModelParams& params, const AdamConfig& config) {
  OptimizerState s;
  s.config = config;
  for (const Matrix* b : params.blocks()) {
    s.m.emplace_back(b->rows(), b->cols());
    s.v.emplace_back(b->rows(), b->cols());
  }
  return s;
}

void adam_step(OptimizerState& state, ModelParams& params, const ParamGrads& grads) {
  auto blocks = params.blocks();
  if (grads.blocks.size() != blocks.size() || state.m.size() != blocks.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient block count mismatch");
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!grads.blocks[b].same_shape(*blocks[b])) throw std::invalid_argument("adam_step: gradient shape mismatch");
    for (double g : grads.blocks[b].values()) {
      if (!std::isfinite(g)) throw std::runtime_error(fmt::format("non-finite gradient in parameter block {}", b));
    }
  }
  if (!std::isfinite(grads.s_cn) || !std::isfinite(grads.s_hi)) {
    throw std::runtime_error("non-finite gradient for a structure scalar");
  }

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  auto update = [&](double& p, double& m, double& v, double g, double lr) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + c.eps);
  };
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto p = blocks[b]->values();
    auto m = state.m[b].values();
    auto v = state.v[b].values();
    auto g = grads.blocks[b].values();
    for (std::size_t i = 0; i < p.size(); ++i) update(p[i], m[i], v[i], g[i], c.main_lr);
  }
  if (params.scalars.train_cn) update(params.scalars.s_cn, state.m_cn, state.v_cn, grads.s_cn, c.scalar_lr);
  if (params.scalars.train_hi) update(params.scalars.s_hi, state.m_hi, state.v_hi, grads.s_hi, c.scalar_lr);
  ++params.version;
}

std::string_view to_string(AblationMode m) {
  switch (m) {
    case AblationMode::gcn: return "gcn";
    case AblationMode::gcn_cn: return "gcn_cn";
    case AblationMode::gcn_hi: return "gcn_hi";
    case AblationMode::trihet: return "trihet";
  }
  return "?";
}

AblationMode parse_ablation(std::string_view name) {
  for (auto m : {AblationMode::gcn, AblationMode::gcn_cn, AblationMode::gcn_hi, AblationMode::trihet}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (patience > epochs) throw std::invalid_argument("patience must not exceed epochs");
  if (!(main_lr > 0.0) || !(scalar_lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (hidden < 1 || layers < 1) throw std::invalid_argument("hidden width and layer count must be >= 1");
}

ModelParams initial_params(std::size_t input_dim, const TrainConfig& cfg) {
  ModelShape shape{input_dim, cfg.hidden, cfg.layers, cfg.activation};
  auto rng = Rng::substream(cfg.seed, Stream::model_init, 0);
  auto params = ModelParams::glorot(shape, rng);
  auto& s = params.scalars;
  const bool use_cn = cfg.mode == AblationMode::trihet || cfg.mode == AblationMode::gcn_cn;
  const bool use_hi = cfg.mode == AblationMode::trihet || cfg.mode == AblationMode::gcn_hi;
  if (!use_cn) s.s_cn = 0.0;
  if (!use_hi) s.s_hi = 0.0;
  s.train_cn = use_cn;
  s.train_hi = use_hi;
  if (cfg.s_cn_init) s.s_cn = *cfg.s_cn_init;
  if (cfg.s_hi_init) s.s_hi = *cfg.s_hi_init;
  if (cfg.train_s_cn) s.train_cn = *cfg.train_s_cn;
  if (cfg.train_s_hi) s.train_hi = *cfg.train_s_hi;
  return params;
}

PairMetrics evaluate_pairs(const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                           std::span<const NodePair> pos, std::span<const NodePair> neg) {
  const auto emb = gcn_forward(op, input, params);
  std::vector<NodePair> pairs(pos.begin(), pos.end());
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  const auto scores = pair_logits(emb, pairs, params);
  const auto labels = stacked_labels(pos.size(), neg.size());
  return {auc(scores, labels), average_precision(scores, labels)};
}

TrainResult train(const LinkSplit& split, const FeatureMatrix& features, const TrainConfig& cfg) {
  cfg.validate();
  if (features.values.rows() != split.full_graph.num_nodes()) {
    throw std::invalid_argument("feature rows do not match the graph's node count");
  }
  const auto op = build_phi_static(split.train_graph);
  const auto input = FeatureInput::from_dense(features.values);
  auto params = initial_params(features.values.cols(), cfg);
  auto state = OptimizerState::for_params(params, {cfg.main_lr, cfg.scalar_lr});

  TrainResult result;
  result.best = params;
  result.best_val_auc = -1.0;

  std::vector<NodePair> pairs;
  std::vector<int> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto negatives = sample_training_negatives(split, epoch);
    pairs.assign(split.train_pos.begin(), split.train_pos.end());
    pairs.insert(pairs.end(), negatives.begin(), negatives.end());
    labels = stacked_labels(split.train_pos.size(), negatives.size());

    auto drop_rng = Rng::substream(cfg.seed, Stream::dropout, epoch);
    auto pass = ForwardPass::record(op, input, params, pairs, labels, cfg.dropout, &drop_rng);
    const double loss = pass.loss();
    if (!std::isfinite(loss)) {
      result.diverged = true;
      result.diagnostics = fmt::format("non-finite loss at epoch {}", epoch);
      break;
    }
    try {
      adam_step(state, params, backward(pass, params));
    } catch (const std::runtime_error& e) {
      result.diverged = true;
      result.diagnostics = fmt::format("epoch {}: {}", epoch, e.what());
      break;
    }

    const auto val = evaluate_pairs(op, input, params, split.val_pos, split.val_neg);
    result.history.push_back({epoch, loss, val.auc, val.ap, params.scalars.s_cn, params.scalars.s_hi});
    if (val.auc > result.best_val_auc) {
      result.best_val_auc = val.auc;
      result.best_epoch = epoch;
      result.best = params;
    }
    if (epoch - result.best_epoch >= cfg.patience) break;
  }
  return result;
}

void save_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,loss,val_auc,val_ap,s_cn,s_hi\n";
  for (const auto& r : history) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.epoch, r.loss, r.val_auc, r.val_ap, r.s_cn,
                       r.s_hi);
  }
}

namespace {

struct TinyInstance {
  Graph graph;
  PhiOperator op;
  FeatureInput input;
  ModelParams params;
  std::vector<NodePair> pairs;
  std::vector<int> labels;
};

TinyInstance make_instance(Rng& rng, std::size_t max_nodes, std::size_t max_hidden) {
  for (;;) {
    TinyInstance inst;
    const std::size_t n = 4 + rng.below(max_nodes - 3);
    std::vector<NodePair> edges;
    for (node_t i = 0; i < n; ++i) {
      for (node_t j = i + 1; j < n; ++j) {
        if (rng.uniform() < 0.5) edges.push_back({i, j});
      }
    }
    inst.graph = Graph::from_edges(n, edges);
    inst.op = build_phi_static(inst.graph);
    if (inst.op.cn_max == 0.0 || inst.op.hi_max == 0.0) continue;

    const std::size_t d_in = 2 + rng.below(3);
    Matrix x(n, d_in);
    for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
    inst.input = FeatureInput::from_dense(x);

    ModelShape shape{d_in, 2 + rng.below(std::max<std::size_t>(max_hidden, 2) - 1), 2, Activation::relu};
    inst.params = ModelParams::glorot(shape, rng);
    for (Matrix* b : {&inst.params.enc_b[0], &inst.params.enc_b[1], &inst.params.dec_b1, &inst.params.dec_b2}) {
      for (double& v : b->values()) v = rng.uniform(-0.5, 0.5);
    }
    inst.params.scalars = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), true, true};

    bool has_pos = false;
    bool has_neg = false;
    for (node_t i = 0; i < n; ++i) {
      for (node_t j = i + 1; j < n; ++j) {
        inst.pairs.push_back({i, j});
        const bool e = inst.graph.has_edge(i, j);
        inst.labels.push_back(e ? 1 : 0);
        (e ? has_pos : has_neg) = true;
      }
    }
    if (!has_pos || !has_neg) continue;

    const auto probe = ForwardPass::record(inst.op, inst.input, inst.params, inst.pairs, inst.labels);
    if (probe.vars().relu_margin < 1e-3 || probe.vars().max_exponent >= 9.0) continue;
    return inst;
  }
}

double loss_at(const TinyInstance& inst, const ModelParams& p) {
  return ForwardPass::record(inst.op, inst.input, p, inst.pairs, inst.labels).loss();
}

}  // namespace

GradcheckReport gradcheck(std::size_t instances, std::size_t max_nodes, std::uint64_t seed, std::size_t max_hidden,
                          double step) {
  if (max_nodes < 4 || max_nodes > 10) throw std::invalid_argument("gradcheck instance size must lie in [4, 10]");
  GradcheckReport report;
  Rng rng(seed);
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = make_instance(rng, max_nodes, max_hidden);
    auto pass = ForwardPass::record(inst.op, inst.input, inst.params, inst.pairs, inst.labels);
    const auto grads = backward(pass, inst.params);

    double worst = 0.0;
    auto compare = [&](double analytic, double numeric) {
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
      ++report.entries_checked;
    };
    const auto n_blocks = inst.params.blocks().size();
    for (std::size_t b = 0; b < n_blocks; ++b) {
      for (std::size_t i = 0; i < grads.blocks[b].size(); ++i) {
        ModelParams plus = inst.params;
        ModelParams minus = inst.params;
        plus.blocks()[b]->values()[i] += step;
        minus.blocks()[b]->values()[i] -= step;
        compare(grads.blocks[b].values()[i], (loss_at(inst, plus) - loss_at(inst, minus)) / (2.0 * step));
      }
    }
    for (double StructureScalars::*field : {&StructureScalars::s_cn, &StructureScalars::s_hi}) {
      ModelParams plus = inst.params;
      ModelParams minus = inst.params;
      plus.scalars.*field += step;
      minus.scalars.*field -= step;
      const double analytic = field == &StructureScalars::s_cn ? grads.s_cn : grads.s_hi;
      if (std::abs(analytic) > 1e-8) report.scalar_grads_nonzero = true;
      compare(analytic, (loss_at(inst, plus) - loss_at(inst, minus)) / (2.0 * step));
    }
    report.per_instance.push_back(worst);
    report.max_rel_error = std::max(report.max_rel_error, worst);
    ++report.instances;
  }
  return report;
}

}  // namespace trihet
