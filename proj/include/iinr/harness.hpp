#pragma once

// Experiment orchestration: configuration with per-task defaults, experiment
// runs (baseline and/or iterative), step sweeps, ablation sweeps, and CSV /
// JSON result persistence. Every run is reproducible from (config, seed);
// metrics.csv is written with round-trip float formatting so repeated
// deterministic runs are byte-identical.

#include "iinr/checkpoint.hpp"
#include "iinr/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace iinr {

struct ExperimentConfig {
  // task
  std::string task = "fit";  // fit | sr | denoise | occupancy
  std::string image;         // PNM path for image tasks
  int sr_scale = 2;
  double max_photons = 30.0;
  double readout = 2.0;
  std::string shape = "sphere";  // sphere | torus | box | voxel
  double sphere_radius = 0.5;
  double torus_major = 0.6;
  double torus_tube = 0.25;
  std::array<double, 3> box_half{0.5, 0.5, 0.5};
  std::string voxel_file;
  std::int64_t train_samples = 4096;
  std::int64_t eval_grid = 64;
  // backbone
  std::string backbone = "siren";  // siren | gauss | wire | relu
  double omega = 0.0;              // 0 = per-task default
  double sigma = 0.0;              // 0 = per-task default
  std::int64_t width = 0;          // 0 = per-task default
  std::int64_t hidden_layers = -1; // -1 = per-task default
  // iterative framework
  std::string model = "iterative";  // iterative | baseline | both
  int steps = 2;
  double epsilon = 0.1;
  std::string fusion = "multiplicative";  // multiplicative | adaptive
  std::string latent = "noise";           // noise | ones | zeros
  std::int64_t feedback_width = 0;  // 0 = per-task default
  std::int64_t fuse_width = 0;
  // optimization
  double lr = 1e-3;
  double lr_final = -1.0;       // -1 = lr * 0.1
  std::int64_t iterations = 0;  // 0 = per-task default
  std::int64_t eval_every = -1; // -1 = iterations / 4, 0 = final only
  // run control
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "runs";
  bool deterministic = true;

  void apply_defaults();
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

inline void ExperimentConfig::apply_defaults() {
  const bool occ = task == "occupancy";
  if (iterations == 0) iterations = occ ? 200 : 2000;
  if (width == 0) width = task == "fit" ? 300 : 256;
  if (hidden_layers < 0) hidden_layers = task == "fit" ? 3 : 2;
  if (feedback_width == 0) feedback_width = task == "fit" ? 30 : 16;
  if (fuse_width == 0) fuse_width = task == "fit" ? 100 : 32;
  if (lr_final < 0.0) lr_final = lr * 0.1;
  if (eval_every < 0) eval_every = iterations / 4;
  if (omega == 0.0 || sigma == 0.0) {
    struct Row { double siren_w, wire_w, wire_s, gauss_s; };
    Row row{};
    if (task == "fit") row = {52.0, 7.0, 13.0, 18.0};
    else if (task == "sr") row = {30.0, 4.0, 10.0, 11.0};
    else if (task == "denoise") row = {55.0, 10.0, 16.0, 18.0};
    else row = {55.0, 10.0, 20.0, 17.0};
    if (backbone == "siren" && omega == 0.0) omega = row.siren_w;
    if (backbone == "wire") {
      if (omega == 0.0) omega = row.wire_w;
      if (sigma == 0.0) sigma = row.wire_s;
    }
    if (backbone == "gauss" && sigma == 0.0) sigma = row.gauss_s;
  }
}

inline nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["task"] = task;
  j["image"] = image;
  j["sr_scale"] = sr_scale;
  j["max_photons"] = max_photons;
  j["readout"] = readout;
  j["shape"] = shape;
  j["sphere_radius"] = sphere_radius;
  j["torus_major"] = torus_major;
  j["torus_tube"] = torus_tube;
  j["box_half"] = box_half;
  j["voxel_file"] = voxel_file;
  j["train_samples"] = train_samples;
  j["eval_grid"] = eval_grid;
  j["backbone"] = backbone;
  j["omega"] = omega;
  j["sigma"] = sigma;
  j["width"] = width;
  j["hidden_layers"] = hidden_layers;
  j["model"] = model;
  j["steps"] = steps;
  j["epsilon"] = epsilon;
  j["fusion"] = fusion;
  j["latent"] = latent;
  j["feedback_width"] = feedback_width;
  j["fuse_width"] = fuse_width;
  j["lr"] = lr;
  j["lr_final"] = lr_final;
  j["iterations"] = iterations;
  j["eval_every"] = eval_every;
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  j["deterministic"] = deterministic;
  return j;
}

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.task = j.value("task", c.task);
  c.image = j.value("image", c.image);
  c.sr_scale = j.value("sr_scale", c.sr_scale);
  c.max_photons = j.value("max_photons", c.max_photons);
  c.readout = j.value("readout", c.readout);
  c.shape = j.value("shape", c.shape);
  c.sphere_radius = j.value("sphere_radius", c.sphere_radius);
  c.torus_major = j.value("torus_major", c.torus_major);
  c.torus_tube = j.value("torus_tube", c.torus_tube);
  c.box_half = j.value("box_half", c.box_half);
  c.voxel_file = j.value("voxel_file", c.voxel_file);
  c.train_samples = j.value("train_samples", c.train_samples);
  c.eval_grid = j.value("eval_grid", c.eval_grid);
  c.backbone = j.value("backbone", c.backbone);
  c.omega = j.value("omega", c.omega);
  c.sigma = j.value("sigma", c.sigma);
  c.width = j.value("width", c.width);
  c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
  c.model = j.value("model", c.model);
  c.steps = j.value("steps", c.steps);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.fusion = j.value("fusion", c.fusion);
  c.latent = j.value("latent", c.latent);
  c.feedback_width = j.value("feedback_width", c.feedback_width);
  c.fuse_width = j.value("fuse_width", c.fuse_width);
  c.lr = j.value("lr", c.lr);
  c.lr_final = j.value("lr_final", c.lr_final);
  c.iterations = j.value("iterations", c.iterations);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.seeds = j.value("seeds", c.seeds);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.deterministic = j.value("deterministic", c.deterministic);
  return c;
}

namespace harness_detail {

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

inline int thread_count() {
  const char* v = std::getenv("IINR_THREADS");
  if (v && *v) {
    const int n = std::atoi(v);
    if (n >= 1) return n;
  }
  return 1;
}

// Round-trip double formatting; NaN prints as an empty CSV field.
inline std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace harness_detail

// Fixed salts for the per-run random streams.
inline constexpr std::uint64_t kTaskSalt = 0x7A5C;
inline constexpr std::uint64_t kModelSalt = 0x31;

inline Activation backbone_activation(const ExperimentConfig& cfg) {
  if (cfg.backbone == "siren") return Activation::sine(cfg.omega);
  if (cfg.backbone == "gauss") return Activation::gauss(cfg.sigma);
  if (cfg.backbone == "wire") return Activation::gabor(cfg.omega, cfg.sigma);
  if (cfg.backbone == "relu") return Activation::relu();
  throw std::invalid_argument("unknown backbone '" + cfg.backbone + "'");
}

inline SignalTask build_task(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.task == "fit" || cfg.task == "sr" || cfg.task == "denoise") {
    if (cfg.image.empty()) throw std::invalid_argument(cfg.task + ": --image required");
    const ImageBuffer img = load_pnm(cfg.image);
    if (cfg.task == "fit") return make_fit_task(img);
    if (cfg.task == "sr") return make_sr_task(img, cfg.sr_scale);
    Rng rng = Rng(seed).fork(kTaskSalt);
    return make_denoise_task(img, rng, cfg.max_photons, cfg.readout);
  }
  if (cfg.task == "occupancy") {
    OccupancyShape shape;
    if (cfg.shape == "sphere") shape = OccupancyShape::sphere(cfg.sphere_radius);
    else if (cfg.shape == "torus") shape = OccupancyShape::torus(cfg.torus_major, cfg.torus_tube);
    else if (cfg.shape == "box")
      shape = OccupancyShape::box(cfg.box_half[0], cfg.box_half[1], cfg.box_half[2]);
    else if (cfg.shape == "voxel") shape = load_voxel_grid(cfg.voxel_file);
    else throw std::invalid_argument("unknown shape '" + cfg.shape + "'");
    Rng rng = Rng(seed).fork(kTaskSalt);
    return make_occupancy_task(shape, cfg.train_samples, cfg.eval_grid, rng);
  }
  throw std::invalid_argument("unknown task '" + cfg.task + "'");
}

inline MlpSpec backbone_spec(const ExperimentConfig& cfg, const SignalTask& task) {
  MlpSpec s;
  s.in_dim = task.coord_dim;
  s.out_dim = task.channels;
  s.hidden_width = cfg.width;
  s.hidden_layers = cfg.hidden_layers;
  s.activation = backbone_activation(cfg);
  return s;
}

inline IinrModelConfig iinr_model_config(const ExperimentConfig& cfg, const SignalTask& task) {
  IinrModelConfig mc;
  mc.backbone = backbone_spec(cfg, task);
  mc.feedback_width = cfg.feedback_width;
  mc.fuse_width = cfg.fuse_width;
  mc.fusion = cfg.fusion == "adaptive" ? FusionMode::Adaptive : FusionMode::Multiplicative;
  mc.epsilon = cfg.epsilon;
  mc.latent_mode = cfg.latent == "ones"
                       ? LatentMode::Ones
                       : (cfg.latent == "zeros" ? LatentMode::Zeros : LatentMode::GaussianNoise);
  mc.latent_dims = task.train_dims;
  return mc;
}

inline TrainConfig train_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.iterations = cfg.iterations;
  tc.lr = cfg.lr;
  tc.lr_final = cfg.lr_final;
  tc.epsilon = cfg.epsilon;
  tc.seed = seed;
  tc.eval_every = cfg.eval_every;
  tc.deterministic = cfg.deterministic;
  tc.eval_steps = cfg.steps;
  return tc;
}

namespace harness_detail {

inline void write_metrics_csv(const std::string& path, const RunRecord& rec) {
  std::ofstream out(path, std::ios::binary);
  out << "label,seed,steps,iteration,loss,mse,psnr,ssim,iou,"
         "param_total,param_backbone,param_modules,flops_backbone,flops_per_step\n";
  const auto row = [&](int steps, std::int64_t iteration, double loss, const MetricReport& m) {
    out << rec.label << "," << rec.seed << "," << steps << "," << iteration << "," << fmt(loss)
        << "," << fmt(m.mse) << "," << fmt(m.psnr) << "," << fmt(m.ssim) << "," << fmt(m.iou)
        << "," << rec.param_total << "," << rec.param_backbone << "," << rec.param_modules << ","
        << rec.flops_backbone << "," << rec.flops_per_step << "\n";
  };
  for (const auto& c : rec.checkpoints) row(-1, c.iteration, c.loss, c.metrics);
  for (const auto& [steps, m] : rec.finals)
    row(steps, rec.loss_trace.empty() ? 0 : static_cast<std::int64_t>(rec.loss_trace.size()),
        rec.loss_trace.empty() ? std::numeric_limits<double>::quiet_NaN() : rec.loss_trace.back(),
        m);
}

inline void write_record_json(const std::string& path, const RunRecord& rec) {
  std::ofstream out(path, std::ios::binary);
  out << to_json(rec).dump(2) << "\n";
}

// recon.pnm holds the clamped prediction; residual.pnm holds |pred - gt|
// quantized to bytes. Occupancy volumes are written as their middle z slice.
inline void write_images(const std::filesystem::path& dir, const SignalTask& task,
                         const Mat& pred) {
  const Mat p = clamped01(pred);
  if (task.kind == TaskKind::Occupancy) {
    const index_t n = task.eval_dims[0];
    const index_t z = n / 2;
    ImageBuffer slice(n, n, 1);
    ImageBuffer gt_slice(n, n, 1);
    for (index_t y = 0; y < n; ++y)
      for (index_t x = 0; x < n; ++x) {
        const index_t r = (z * n + y) * n + x;
        slice.at(y, x, 0) = p(r, 0);
        gt_slice.at(y, x, 0) = std::abs(p(r, 0) - task.eval_target(r, 0));
      }
    save_pnm((dir / "recon.pnm").string(), slice);
    save_pnm((dir / "residual.pnm").string(), gt_slice);
    return;
  }
  const index_t w = task.eval_dims[0], h = task.eval_dims[1];
  save_pnm((dir / "recon.pnm").string(), mat_to_image(p, h, w));
  Mat resid(p.rows, p.cols);
  const Mat gt = clamped01(task.eval_target);
  for (std::size_t i = 0; i < p.data.size(); ++i)
    resid.data[i] = std::abs(p.data[i] - gt.data[i]);
  save_pnm((dir / "residual.pnm").string(), mat_to_image(resid, h, w));
}

template <class T>
RunRecord run_one_typed(const ExperimentConfig& cfg, const SignalTask& task, std::uint64_t seed,
                        bool iterative, const std::filesystem::path& dir) {
  RunRecord rec;
  if (iterative) {
    auto model = make_iinr_model<T>(iinr_model_config(cfg, task), Rng(seed).fork(kModelSalt));
    rec = train(model, task, train_config(cfg, seed));
    if (!rec.failed) {
      const Mat pred = reconstruct(model, task.eval_coords, cfg.steps);
      write_images(dir, task, pred);
    }
    save_checkpoint((dir / "checkpoint.bin").string(), model);
  } else {
    auto model = init_mlp<T>(backbone_spec(cfg, task), Rng(seed).fork(kModelSalt).fork(1));
    rec = train_baseline(model, task, train_config(cfg, seed));
    if (!rec.failed) write_images(dir, task, model.forward(task.eval_coords));
    save_checkpoint((dir / "checkpoint.bin").string(), model);
  }
  return rec;
}

inline RunRecord run_one(const ExperimentConfig& cfg, std::uint64_t seed, bool iterative) {
  const std::string name = cfg.task + "_" + cfg.backbone + "_" +
                           (iterative ? "iterative" : "baseline") + "_seed" +
                           std::to_string(seed);
  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / name;
  std::filesystem::create_directories(dir);
  RunRecord rec;
  try {
    const SignalTask task = build_task(cfg, seed);
    if (cfg.backbone == "wire")
      rec = run_one_typed<cdouble>(cfg, task, seed, iterative, dir);
    else
      rec = run_one_typed<double>(cfg, task, seed, iterative, dir);
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  rec.seed = seed;
  rec.config = cfg.to_json();
  rec.label = iterative ? "iterative" : "baseline";
  write_record_json((dir / "record.json").string(), rec);
  write_metrics_csv((dir / "metrics.csv").string(), rec);
  return rec;
}

}  // namespace harness_detail

// Trains and evaluates per config; one run per (seed, model kind). Jobs are
// independent and may execute in parallel (IINR_THREADS).
inline std::vector<RunRecord> run_experiment(ExperimentConfig cfg) {
  cfg.apply_defaults();
  cfg.out_dir = harness_detail::env_or("IINR_OUT_DIR", cfg.out_dir);
  std::vector<std::pair<std::uint64_t, bool>> jobs;
  for (std::uint64_t seed : cfg.seeds) {
    if (cfg.model == "baseline" || cfg.model == "both") jobs.emplace_back(seed, false);
    if (cfg.model == "iterative" || cfg.model == "both") jobs.emplace_back(seed, true);
  }
  std::vector<RunRecord> records(jobs.size());
  const int threads = std::min<int>(harness_detail::thread_count(), static_cast<int>(jobs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      records[i] = harness_detail::run_one(cfg, jobs[i].first, jobs[i].second);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (int w = 0; w < threads; ++w)
      workers.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
          records[i] = harness_detail::run_one(cfg, jobs[i].first, jobs[i].second);
      }));
    for (auto& w : workers) w.get();
  }
  return records;
}

// Trains once per seed, then reconstructs at each step count
// (reconstruction-only sweep; all rows share the trained model).
inline std::vector<RunRecord> sweep_steps(ExperimentConfig cfg,
                                          std::vector<int> steps_list = {1, 2, 4, 8, 16}) {
  cfg.apply_defaults();
  cfg.out_dir = harness_detail::env_or("IINR_OUT_DIR", cfg.out_dir);
  std::vector<RunRecord> records;
  for (std::uint64_t seed : cfg.seeds) {
    const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) /
                                      (cfg.task + "_" + cfg.backbone + "_steps_seed" +
                                       std::to_string(seed));
    std::filesystem::create_directories(dir);
    RunRecord rec;
    try {
      const SignalTask task = build_task(cfg, seed);
      const auto run = [&](auto scalar_tag) {
        using T = decltype(scalar_tag);
        auto model = make_iinr_model<T>(iinr_model_config(cfg, task), Rng(seed).fork(kModelSalt));
        rec = train(model, task, train_config(cfg, seed));
        rec.finals.clear();
        if (!rec.failed)
          for (int s : steps_list)
            rec.finals.emplace_back(s,
                                    evaluate_prediction(task, reconstruct(model, task.eval_coords, s)));
        save_checkpoint((dir / "checkpoint.bin").string(), model);
      };
      if (cfg.backbone == "wire") run(cdouble{});
      else run(double{});
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.failure = e.what();
    }
    rec.seed = seed;
    rec.config = cfg.to_json();
    rec.label = "steps_sweep";
    harness_detail::write_record_json((dir / "record.json").string(), rec);
    harness_detail::write_metrics_csv((dir / "metrics.csv").string(), rec);
    records.push_back(std::move(rec));
  }
  return records;
}

enum class AblationAxis { LatentMode, FusionMode, ModuleRemoval, Depth };

inline AblationAxis ablation_axis_from_name(const std::string& name) {
  if (name == "latent") return AblationAxis::LatentMode;
  if (name == "fusion") return AblationAxis::FusionMode;
  if (name == "modules") return AblationAxis::ModuleRemoval;
  if (name == "depth") return AblationAxis::Depth;
  throw std::invalid_argument("unknown ablation axis '" + name + "'");
}

// Grid over one configuration axis. latent / fusion / depth retrain per
// value; the module-removal axis trains the full model once and disables
// modules at reconstruction time.
inline std::vector<RunRecord> sweep_ablation(ExperimentConfig cfg, AblationAxis axis) {
  cfg.apply_defaults();
  cfg.out_dir = harness_detail::env_or("IINR_OUT_DIR", cfg.out_dir);
  std::vector<RunRecord> records;

  if (axis == AblationAxis::ModuleRemoval) {
    for (std::uint64_t seed : cfg.seeds) {
      const SignalTask task = build_task(cfg, seed);
      const auto run = [&](auto scalar_tag) {
        using T = decltype(scalar_tag);
        auto model = make_iinr_model<T>(iinr_model_config(cfg, task), Rng(seed).fork(kModelSalt));
        RunRecord trained = train(model, task, train_config(cfg, seed));
        const struct { const char* name; ModuleToggles t; } variants[] = {
            {"modules=full", {true, true}},
            {"modules=no_feedback", {false, true}},
            {"modules=no_fuse", {true, false}},
            {"modules=none", {false, false}},
        };
        for (const auto& v : variants) {
          RunRecord rec = trained;
          rec.label = v.name;
          rec.finals.clear();
          if (!rec.failed)
            rec.finals.emplace_back(
                cfg.steps,
                evaluate_prediction(task, reconstruct(model, task.eval_coords, cfg.steps, v.t)));
          rec.seed = seed;
          rec.config = cfg.to_json();
          const std::filesystem::path dir =
              std::filesystem::path(cfg.out_dir) /
              (cfg.task + "_" + cfg.backbone + "_" + std::string(v.name) + "_seed" +
               std::to_string(seed));
          std::filesystem::create_directories(dir);
          harness_detail::write_record_json((dir / "record.json").string(), rec);
          harness_detail::write_metrics_csv((dir / "metrics.csv").string(), rec);
          records.push_back(std::move(rec));
        }
      };
      if (cfg.backbone == "wire") run(cdouble{});
      else run(double{});
    }
    return records;
  }

  std::vector<std::pair<std::string, ExperimentConfig>> grid;
  if (axis == AblationAxis::LatentMode) {
    for (const char* v : {"noise", "ones", "zeros"}) {
      ExperimentConfig c = cfg;
      c.latent = v;
      grid.emplace_back(std::string("latent=") + v, c);
    }
  } else if (axis == AblationAxis::FusionMode) {
    for (const char* v : {"multiplicative", "adaptive"}) {
      ExperimentConfig c = cfg;
      c.fusion = v;
      grid.emplace_back(std::string("fusion=") + v, c);
    }
  } else {
    for (std::int64_t depth : {3, 4, 5}) {
      ExperimentConfig c = cfg;
      c.hidden_layers = depth;
      grid.emplace_back("depth=" + std::to_string(depth), c);
    }
  }
  for (auto& [tag, sub] : grid) {
    ExperimentConfig c = sub;
    c.model = "iterative";
    c.out_dir = (std::filesystem::path(cfg.out_dir) / tag).string();
    auto rs = run_experiment(c);
    for (auto& r : rs) {
      r.label = tag;
      records.push_back(std::move(r));
    }
  }
  return records;
}

// Aggregated table: mean +- sample std of the final metrics across seeds,
// grouped by (task, backbone, label, steps). The std column is empty for a
// single seed.
inline std::string report(const std::vector<RunRecord>& records, const std::string& csv_path) {
  struct Key {
    std::string task, backbone, label;
    int steps;
    bool operator<(const Key& o) const {
      return std::tie(task, backbone, label, steps) < std::tie(o.task, o.backbone, o.label, o.steps);
    }
  };
  struct Acc {
    std::vector<double> psnr, ssim, iou;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    if (r.failed) continue;
    const std::string task = r.config.value("task", std::string("?"));
    const std::string backbone = r.config.value("backbone", std::string("?"));
    for (const auto& [steps, m] : r.finals) {
      auto& acc = groups[Key{task, backbone, r.label, steps}];
      if (std::isfinite(m.psnr)) acc.psnr.push_back(m.psnr);
      if (std::isfinite(m.ssim)) acc.ssim.push_back(m.ssim);
      if (std::isfinite(m.iou)) acc.iou.push_back(m.iou);
    }
  }
  const auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
  };

  std::ofstream csv(csv_path, std::ios::binary);
  csv << "task,backbone,label,steps,n,psnr_mean,psnr_std,ssim_mean,ssim_std,iou_mean,iou_std\n";
  std::string text = "task       backbone   label                steps  n  psnr            ssim            iou\n";
  for (const auto& [k, acc] : groups) {
    const auto [pm, ps] = mean_std(acc.psnr);
    const auto [sm, ss] = mean_std(acc.ssim);
    const auto [im, is] = mean_std(acc.iou);
    const std::size_t n = std::max({acc.psnr.size(), acc.ssim.size(), acc.iou.size()});
    csv << k.task << "," << k.backbone << "," << k.label << "," << k.steps << "," << n << ","
        << harness_detail::fmt(pm) << "," << harness_detail::fmt(ps) << ","
        << harness_detail::fmt(sm) << "," << harness_detail::fmt(ss) << ","
        << harness_detail::fmt(im) << "," << harness_detail::fmt(is) << "\n";
    char line[256];
    const auto cell = [](double m, double s) {
      if (!std::isfinite(m)) return std::string("-");
      char b[64];
      if (std::isfinite(s)) std::snprintf(b, sizeof(b), "%.3f+-%.3f", m, s);
      else std::snprintf(b, sizeof(b), "%.3f", m);
      return std::string(b);
    };
    std::snprintf(line, sizeof(line), "%-10s %-10s %-20s %5d %2zu  %-15s %-15s %-15s\n",
                  k.task.c_str(), k.backbone.c_str(), k.label.c_str(), k.steps, n,
                  cell(pm, ps).c_str(), cell(sm, ss).c_str(), cell(im, is).c_str());
    text += line;
  }
  return text;
}

// Loads every record.json under the given paths (files or directories).
inline std::vector<RunRecord> load_records(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      for (const auto& e : std::filesystem::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().filename() == "record.json")
          files.push_back(e.path().string());
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> records;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open " + f);
    records.push_back(run_record_from_json(nlohmann::json::parse(in)));
  }
  return records;
}

}  // namespace iinr
