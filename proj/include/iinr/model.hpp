#pragma once

// Iterative INR: a Backbone INR extended with two light MLPs. FeedbackNet
// reads the current estimate, the coordinates, and the time index t; FuseNet
// merges the feedback features with the backbone features; the combined
// output either gates the backbone multiplicatively,
//     out = FuseNet(concat(f, b)) .* b,
// or blends with it, out = b*t + z*(1-t) (adaptive fusion).
//
// Training draws t ~ U(0,1) and n ~ N(0,I) each step, forms the noisy
// interpolated state
//     g_t = (1-t)*target + t*Z + eps*t*n,
// and regresses the model output at (g_t, x, t) onto the target with MSE.
//
// Reconstruction starts from Z at t=1 and walks t down in 1/steps
// increments,
//     g_{t-d} = (d/t) * model(g_t, x, t) + (1 - d/t) * g_t,
// evaluating the backbone once and only the two light modules per step.

#include "iinr/adam.hpp"
#include "iinr/latent.hpp"
#include "iinr/mlp.hpp"
#include "iinr/record.hpp"
#include "iinr/tasks.hpp"
#include "iinr/tensor.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace iinr {

enum class FusionMode { Multiplicative, Adaptive };

inline const char* fusion_mode_name(FusionMode m) {
  return m == FusionMode::Multiplicative ? "multiplicative" : "adaptive";
}

// Ablation switches applied at evaluation time: a removed FuseNet makes the
// output the raw backbone features; a removed FeedbackNet feeds zeros into
// FuseNet.
struct ModuleToggles {
  bool feedback = true;
  bool fuse = true;
};

// The backbone carries the INR family (possibly complex); the two light
// modules are always real-valued MLPs. Sharing the backbone's high-frequency
// activation with the modules makes the feedback path oscillate in its state
// input and the gate degenerates to noise, so the modules default to ReLU.
template <class T>
struct IinrModel {
  Mlp<T> backbone;   // coords -> channels
  RealMlp feedback;  // concat(state, coords, t) -> feedback_dim
  RealMlp fuse;      // concat(feedback, backbone) -> channels
  FusionMode fusion = FusionMode::Multiplicative;
  double epsilon = 0.1;
  LatentField latent;

  index_t coord_dim() const { return backbone.spec.in_dim; }
  index_t channels() const { return backbone.spec.out_dim; }
  index_t feedback_dim() const { return feedback.spec.out_dim; }

  template <class F>
  void for_each_param(F&& f) {
    backbone.for_each_param(f);
    feedback.for_each_param(f);
    fuse.for_each_param(f);
  }

  void reset_stats() const {
    backbone.stats.reset();
    feedback.stats.reset();
    fuse.stats.reset();
  }
};

using RealIinr = IinrModel<double>;
using ComplexIinr = IinrModel<cdouble>;

template <class T>
index_t parameter_count(const IinrModel<T>& m) {
  return parameter_count(m.backbone.spec) + parameter_count(m.feedback.spec) +
         parameter_count(m.fuse.spec);
}

// FLOPs per coordinate for one refinement step (everything but the backbone).
template <class T>
index_t flops_per_refinement_step(const IinrModel<T>& m) {
  const index_t combine = m.channels() * (m.fusion == FusionMode::Multiplicative ? 1 : 3);
  return flops_per_sample(m.feedback.spec) + flops_per_sample(m.fuse.spec) + combine;
}

struct IinrModelConfig {
  MlpSpec backbone;  // in_dim = coordinate dim, out_dim = channels
  index_t feedback_width = 30;
  index_t fuse_width = 100;
  Activation module_activation = Activation::relu();
  FusionMode fusion = FusionMode::Multiplicative;
  double epsilon = 0.1;
  LatentMode latent_mode = LatentMode::GaussianNoise;
  std::vector<index_t> latent_dims;  // base grid for Z
};

template <class T>
IinrModel<T> make_iinr_model(const IinrModelConfig& cfg, Rng rng) {
  cfg.backbone.validate();
  if (cfg.feedback_width < 1 || cfg.fuse_width < 1)
    throw std::invalid_argument("make_iinr_model: module widths must be >= 1");
  const index_t coord_dim = cfg.backbone.in_dim;
  const index_t channels = cfg.backbone.out_dim;

  IinrModel<T> model;
  model.fusion = cfg.fusion;
  model.epsilon = cfg.epsilon;
  model.backbone = init_mlp<T>(cfg.backbone, rng.fork(1));

  MlpSpec fspec;
  fspec.in_dim = channels + coord_dim + 1;  // +1 carries t
  fspec.out_dim = cfg.feedback_width;
  fspec.hidden_width = cfg.feedback_width;
  fspec.hidden_layers = 0;
  fspec.activation = cfg.module_activation;
  model.feedback = init_mlp<double>(fspec, rng.fork(2));

  MlpSpec zspec;
  zspec.in_dim = cfg.feedback_width + channels;
  zspec.out_dim = channels;
  zspec.hidden_width = cfg.fuse_width;
  zspec.hidden_layers = 0;
  zspec.activation = cfg.module_activation;
  model.fuse = init_mlp<double>(zspec, rng.fork(3));
  // Identity-gate start for multiplicative fusion: the model begins as the
  // plain backbone and the modules learn corrections on top, instead of
  // fighting the zf ~ 0 saddle of the product.
  if (cfg.fusion == FusionMode::Multiplicative)
    std::fill(model.fuse.layers.back().bias.begin(), model.fuse.layers.back().bias.end(), 1.0);

  model.latent = LatentField::make(cfg.latent_mode, rng.fork(4).seed(), cfg.latent_dims, channels);
  return model;
}

// Forward degradation g_t = (1-t)*target + t*z. Exact at both endpoints.
inline Mat degrade(const Mat& target, const Mat& z, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("degrade: t must be in [0,1]");
  require_shape(target.same_shape(z), "degrade");
  Mat out(target.rows, target.cols);
  const double omt = 1.0 - t;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = omt * target.data[i] + t * z.data[i];
  return out;
}

// Noisy training state g_t = (1-t)*target + t*z + eps*t*n.
inline Mat make_training_state(const Mat& target, const Mat& z, double t, const Mat& n,
                               double epsilon) {
  require_shape(target.same_shape(n), "make_training_state noise shape");
  Mat out = degrade(target, z, t);
  const double scale = epsilon * t;
  if (scale != 0.0)
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += scale * n.data[i];
  return out;
}

inline Mat fusion_combine(FusionMode mode, const Mat& fuse_out, const Mat& backbone_out,
                          double t) {
  require_shape(fuse_out.same_shape(backbone_out), "fusion_combine");
  Mat out(fuse_out.rows, fuse_out.cols);
  if (mode == FusionMode::Multiplicative) {
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] = fuse_out.data[i] * backbone_out.data[i];
  } else {
    const double omt = 1.0 - t;
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] = backbone_out.data[i] * t + fuse_out.data[i] * omt;
  }
  return out;
}

namespace detail {

inline Mat constant_column(index_t rows, double v) { return Mat(rows, 1, v); }

// Module pass given precomputed backbone features.
template <class T>
Mat forward_from_backbone(const IinrModel<T>& model, const Mat& backbone_out, const Mat& coords,
                          const Mat& state, double t, const ModuleToggles& toggles) {
  if (!toggles.fuse) return backbone_out;
  Mat f;
  if (toggles.feedback) {
    const Mat tcol = constant_column(coords.rows, t);
    f = model.feedback.forward(hconcat<double>({&state, &coords, &tcol}));
  } else {
    f = Mat(coords.rows, model.feedback_dim(), 0.0);
  }
  const Mat zf = model.fuse.forward(hconcat<double>({&f, &backbone_out}));
  return fusion_combine(model.fusion, zf, backbone_out, t);
}

}  // namespace detail

// Single model evaluation f(state, x, t); runs the backbone.
template <class T>
Mat model_forward(const IinrModel<T>& model, const Mat& coords, const Mat& state, double t,
                  const ModuleToggles& toggles = {}) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("model_forward: t must be in [0,1]");
  require_shape(coords.rows == state.rows, "model_forward: coords vs state rows");
  require_shape(coords.cols == model.coord_dim(), "model_forward: coordinate dim");
  require_shape(state.cols == model.channels(), "model_forward: state channels");
  const Mat b = model.backbone.forward(coords);
  return detail::forward_from_backbone(model, b, coords, state, t, toggles);
}

// One refinement update g <- a*est + (1-a)*g. Kept out-of-line so every
// caller (library and reference transcriptions alike) shares one compiled
// arithmetic sequence; a == 1 assigns exactly.
[[gnu::noinline]] inline void refine_state(Mat& g, const Mat& est, double a) {
  require_shape(g.same_shape(est), "refine_state");
  if (a == 1.0) {
    g = est;
    return;
  }
  const double oma = 1.0 - a;
  for (std::size_t i = 0; i < g.data.size(); ++i)
    g.data[i] = a * est.data[i] + oma * g.data[i];
}

// Iterative reconstruction from the latent state. The backbone runs exactly
// once; each step re-runs only FeedbackNet and FuseNet on the cached
// features.
template <class T>
Mat reconstruct(const IinrModel<T>& model, const Mat& coords, int steps,
                const ModuleToggles& toggles = {}) {
  if (steps < 1) throw std::domain_error("reconstruct: steps must be >= 1");
  require_shape(coords.cols == model.coord_dim(), "reconstruct: coordinate dim");
  Mat g = model.latent.sample(coords);
  const Mat b = model.backbone.forward(coords);
  const double delta = 1.0 / static_cast<double>(steps);
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(steps - k) / static_cast<double>(steps);
    const double a = delta / t;
    const Mat est = detail::forward_from_backbone(model, b, coords, g, t, toggles);
    refine_state(g, est, a);
  }
  return g;
}

struct TrainConfig {
  std::int64_t iterations = 2000;
  double lr = 1e-3;
  double lr_final = 1e-4;  // cosine decay target; set equal to lr for constant
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 0;  // 0 = final metrics only
  bool deterministic = true;
  int eval_steps = 2;  // reconstruction steps for metric evaluation
  std::int64_t batch_limit = 65536;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("TrainConfig: iterations must be >= 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("TrainConfig: epsilon must be >= 0");
  }

  double lr_at(std::int64_t iter) const {
    if (iterations <= 1) return lr;
    const double u = static_cast<double>(iter) / static_cast<double>(iterations - 1);
    return lr_final + (lr - lr_final) * 0.5 * (1.0 + std::cos(u * 3.14159265358979323846));
  }
};

// One caching forward plus full backward of the training objective
// ||f(state, x, t) - target||^2 (mean over entries). Returns the loss with
// parameter gradients accumulated into all three networks.
template <class T>
double iinr_forward_backward(IinrModel<T>& model, const Mat& coords, const Mat& state,
                             const Mat& target, double t) {
  const Mat b = model.backbone.forward_train(coords);
  const Mat tcol = detail::constant_column(coords.rows, t);
  const Mat f = model.feedback.forward_train(hconcat<double>({&state, &coords, &tcol}));
  const Mat zf = model.fuse.forward_train(hconcat<double>({&f, &b}));
  const Mat pred = fusion_combine(model.fusion, zf, b, t);

  const double inv = 1.0 / static_cast<double>(pred.data.size());
  Mat gpred(pred.rows, pred.cols);
  double loss = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    loss += d * d;
    gpred.data[i] = 2.0 * d * inv;
  }
  loss *= inv;
  if (!std::isfinite(loss)) return loss;

  Mat g_zf(gpred.rows, gpred.cols), g_b(gpred.rows, gpred.cols);
  if (model.fusion == FusionMode::Multiplicative) {
    for (std::size_t i = 0; i < gpred.data.size(); ++i) {
      g_zf.data[i] = gpred.data[i] * b.data[i];
      g_b.data[i] = gpred.data[i] * zf.data[i];
    }
  } else {
    const double omt = 1.0 - t;
    for (std::size_t i = 0; i < gpred.data.size(); ++i) {
      g_zf.data[i] = gpred.data[i] * omt;
      g_b.data[i] = gpred.data[i] * t;
    }
  }
  const Mat g_fuse_in = model.fuse.backward(g_zf);
  const Mat g_f = slice_cols(g_fuse_in, 0, model.feedback_dim());
  const Mat g_b_from_fuse = slice_cols(g_fuse_in, model.feedback_dim(), model.channels());
  model.feedback.backward(g_f);
  add_inplace(g_b, g_b_from_fuse);
  model.backbone.backward(g_b);
  return loss;
}

namespace detail {

inline Mat gather_rows(const Mat& m, const std::vector<index_t>& idx) {
  Mat out(static_cast<index_t>(idx.size()), m.cols);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (index_t c = 0; c < m.cols; ++c) out(static_cast<index_t>(r), c) = m(idx[r], c);
  return out;
}

inline double mse_loss_and_grad(const Mat& pred, const Mat& target, Mat& grad) {
  const double inv = 1.0 / static_cast<double>(pred.data.size());
  grad = Mat(pred.rows, pred.cols);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    acc += d * d;
    grad.data[i] = 2.0 * d * inv;
  }
  return acc * inv;
}

template <class ModelT>
MetricReport evaluate_checkpoint(const ModelT& model, const SignalTask& task, int steps) {
  if constexpr (std::is_same_v<ModelT, RealIinr> || std::is_same_v<ModelT, ComplexIinr>) {
    return evaluate_prediction(task, reconstruct(model, task.eval_coords, steps));
  } else {
    return evaluate_prediction(task, model.forward(task.eval_coords));
  }
}

}  // namespace detail

// Algorithm: sample t and n, synthesize the noisy state, regress onto the
// clean target, Adam-update all three networks jointly.
template <class T>
RunRecord train(IinrModel<T>& model, const SignalTask& task, const TrainConfig& cfg) {
  cfg.validate();
  require_shape(task.train_coords.rows == task.train_target.rows, "train: task rows");
  require_shape(task.train_coords.cols == model.coord_dim(), "train: coordinate dim");
  require_shape(task.train_target.cols == model.channels(), "train: channels");

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.seed = cfg.seed;
  rec.label = "iterative";
  rec.param_backbone = parameter_count(model.backbone.spec);
  rec.param_modules = parameter_count(model.feedback.spec) + parameter_count(model.fuse.spec);
  rec.param_total = rec.param_backbone + rec.param_modules;
  rec.flops_backbone = flops_per_sample(model.backbone.spec);
  rec.flops_per_step = flops_per_refinement_step(model);

  Rng rng = Rng(cfg.seed).fork(0xA1);
  const Mat z_full = model.latent.sample(task.train_coords);
  const bool batched = task.train_coords.rows > cfg.batch_limit;

  AdamState opt;
  rec.loss_trace.reserve(static_cast<std::size_t>(cfg.iterations));
  for (std::int64_t iter = 0; iter < cfg.iterations; ++iter) {
    opt.lr = cfg.lr_at(iter);
    const double t = rng.uniform();

    const Mat* coords = &task.train_coords;
    const Mat* target = &task.train_target;
    const Mat* z = &z_full;
    Mat bc, bt, bz;
    if (batched) {
      std::vector<index_t> idx(static_cast<std::size_t>(cfg.batch_limit));
      for (auto& v : idx)
        v = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(task.train_coords.rows));
      bc = detail::gather_rows(task.train_coords, idx);
      bt = detail::gather_rows(task.train_target, idx);
      bz = detail::gather_rows(z_full, idx);
      coords = &bc;
      target = &bt;
      z = &bz;
    }

    const Mat n = gaussian(rng, target->rows, target->cols);
    const Mat state = make_training_state(*target, *z, t, n, cfg.epsilon);

    const double loss = iinr_forward_backward(model, *coords, state, *target, t);
    rec.loss_trace.push_back(loss);
    if (!std::isfinite(loss)) {
      rec.failed = true;
      rec.failure = "non-finite loss at iteration " + std::to_string(iter);
      break;
    }

    adam_step(model, opt);

    if (cfg.eval_every > 0 && (iter + 1) % cfg.eval_every == 0) {
      CheckpointRow row;
      row.iteration = iter + 1;
      row.loss = loss;
      row.metrics = detail::evaluate_checkpoint(model, task, cfg.eval_steps);
      rec.checkpoints.push_back(row);
    }
  }

  if (!rec.failed)
    rec.finals.emplace_back(cfg.eval_steps, detail::evaluate_checkpoint(model, task, cfg.eval_steps));
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

// Plain single-shot INR fit, the baseline every comparison uses.
template <class T>
RunRecord train_baseline(Mlp<T>& model, const SignalTask& task, const TrainConfig& cfg) {
  cfg.validate();
  require_shape(task.train_coords.rows == task.train_target.rows, "train_baseline: task rows");
  require_shape(task.train_coords.cols == model.spec.in_dim, "train_baseline: coordinate dim");
  require_shape(task.train_target.cols == model.spec.out_dim, "train_baseline: channels");

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.seed = cfg.seed;
  rec.label = "baseline";
  rec.param_backbone = parameter_count(model.spec);
  rec.param_total = rec.param_backbone;
  rec.flops_backbone = flops_per_sample(model.spec);

  Rng rng = Rng(cfg.seed).fork(0xA1);
  const bool batched = task.train_coords.rows > cfg.batch_limit;

  AdamState opt;
  rec.loss_trace.reserve(static_cast<std::size_t>(cfg.iterations));
  for (std::int64_t iter = 0; iter < cfg.iterations; ++iter) {
    opt.lr = cfg.lr_at(iter);

    const Mat* coords = &task.train_coords;
    const Mat* target = &task.train_target;
    Mat bc, bt;
    if (batched) {
      std::vector<index_t> idx(static_cast<std::size_t>(cfg.batch_limit));
      for (auto& v : idx)
        v = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(task.train_coords.rows));
      bc = detail::gather_rows(task.train_coords, idx);
      bt = detail::gather_rows(task.train_target, idx);
      coords = &bc;
      target = &bt;
    }

    const Mat pred = model.forward_train(*coords);
    Mat gpred;
    const double loss = detail::mse_loss_and_grad(pred, *target, gpred);
    rec.loss_trace.push_back(loss);
    if (!std::isfinite(loss)) {
      rec.failed = true;
      rec.failure = "non-finite loss at iteration " + std::to_string(iter);
      break;
    }
    model.backward(gpred);
    adam_step(model, opt);

    if (cfg.eval_every > 0 && (iter + 1) % cfg.eval_every == 0) {
      CheckpointRow row;
      row.iteration = iter + 1;
      row.loss = loss;
      row.metrics = detail::evaluate_checkpoint(model, task, cfg.eval_steps);
      rec.checkpoints.push_back(row);
    }
  }

  if (!rec.failed)
    rec.finals.emplace_back(1, detail::evaluate_checkpoint(model, task, cfg.eval_steps));
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace iinr
