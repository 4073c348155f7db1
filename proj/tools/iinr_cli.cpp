// Command-line driver: fit / sr / denoise / occupancy experiments, step
// sweeps, ablations, and result aggregation. Flags mirror ExperimentConfig;
// --config loads the same fields from a JSON document, with explicit flags
// taking precedence. IINR_OUT_DIR and IINR_THREADS env vars override the
// output directory and worker count.

#include "iinr/iinr.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CliState {
  iinr::ExperimentConfig cfg;
  std::string config_path;
  std::string seeds_csv;
  std::string steps_csv = "1,2,4,8,16";
  std::string axis = "latent";
};

std::vector<std::uint64_t> parse_u64_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoull(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (auto v : parse_u64_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

// Shared experiment flags; every flag records whether it was set so a
// --config file can fill the rest.
void add_common_flags(CLI::App* cmd, CliState& st) {
  auto& c = st.cfg;
  cmd->add_option("--config", st.config_path, "JSON config file with ExperimentConfig fields");
  cmd->add_option("--image", c.image, "input image (binary PNM, P5/P6)");
  cmd->add_option("--backbone", c.backbone, "siren | gauss | wire | relu");
  cmd->add_option("--omega", c.omega, "activation frequency (0 = task default)");
  cmd->add_option("--sigma", c.sigma, "activation spread (0 = task default)");
  cmd->add_option("--width", c.width, "backbone hidden width (0 = task default)");
  cmd->add_option("--layers", c.hidden_layers, "backbone hidden layers (-1 = task default)");
  cmd->add_option("--model", c.model, "iterative | baseline | both");
  cmd->add_option("--steps", c.steps, "reconstruction steps");
  cmd->add_option("--epsilon", c.epsilon, "training noise scale");
  cmd->add_option("--fusion", c.fusion, "multiplicative | adaptive");
  cmd->add_option("--latent", c.latent, "noise | ones | zeros");
  cmd->add_option("--feedback-width", c.feedback_width, "FeedbackNet width (0 = task default)");
  cmd->add_option("--fuse-width", c.fuse_width, "FuseNet width (0 = task default)");
  cmd->add_option("--lr", c.lr, "initial learning rate");
  cmd->add_option("--lr-final", c.lr_final, "final learning rate (-1 = lr/10)");
  cmd->add_option("--iterations", c.iterations, "training iterations (0 = task default)");
  cmd->add_option("--eval-every", c.eval_every, "checkpoint metric period (-1 = iters/4)");
  cmd->add_option("--seeds", st.seeds_csv, "comma-separated seed list (default 0)");
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_flag("!--no-deterministic", c.deterministic, "allow nondeterministic scheduling");
}

void finalize_config(CLI::App* cmd, CliState& st, const std::string& task) {
  if (!st.config_path.empty()) {
    std::ifstream in(st.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + st.config_path);
    iinr::ExperimentConfig file_cfg =
        iinr::ExperimentConfig::from_json(nlohmann::json::parse(in));
    // Explicit flags win over file values.
    iinr::ExperimentConfig flag_cfg = st.cfg;
    st.cfg = file_cfg;
    const auto keep = [&](const char* name, auto member) {
      if (cmd->count(name) > 0) st.cfg.*member = flag_cfg.*member;
    };
    keep("--image", &iinr::ExperimentConfig::image);
    keep("--backbone", &iinr::ExperimentConfig::backbone);
    keep("--omega", &iinr::ExperimentConfig::omega);
    keep("--sigma", &iinr::ExperimentConfig::sigma);
    keep("--width", &iinr::ExperimentConfig::width);
    keep("--layers", &iinr::ExperimentConfig::hidden_layers);
    keep("--model", &iinr::ExperimentConfig::model);
    keep("--steps", &iinr::ExperimentConfig::steps);
    keep("--epsilon", &iinr::ExperimentConfig::epsilon);
    keep("--fusion", &iinr::ExperimentConfig::fusion);
    keep("--latent", &iinr::ExperimentConfig::latent);
    keep("--feedback-width", &iinr::ExperimentConfig::feedback_width);
    keep("--fuse-width", &iinr::ExperimentConfig::fuse_width);
    keep("--lr", &iinr::ExperimentConfig::lr);
    keep("--lr-final", &iinr::ExperimentConfig::lr_final);
    keep("--iterations", &iinr::ExperimentConfig::iterations);
    keep("--eval-every", &iinr::ExperimentConfig::eval_every);
    keep("--out", &iinr::ExperimentConfig::out_dir);
  }
  if (!st.seeds_csv.empty()) st.cfg.seeds = parse_u64_list(st.seeds_csv);
  st.cfg.task = task;
}

void print_outcome(const std::vector<iinr::RunRecord>& records) {
  for (const auto& r : records) {
    if (r.failed) {
      std::printf("[failed] %s seed=%llu: %s\n", r.label.c_str(),
                  static_cast<unsigned long long>(r.seed), r.failure.c_str());
      continue;
    }
    for (const auto& [steps, m] : r.finals) {
      std::printf("%s seed=%llu steps=%d", r.label.c_str(),
                  static_cast<unsigned long long>(r.seed), steps);
      if (std::isfinite(m.psnr)) std::printf(" psnr=%.3f", m.psnr);
      if (std::isfinite(m.ssim)) std::printf(" ssim=%.4f", m.ssim);
      if (std::isfinite(m.iou)) std::printf(" iou=%.4f", m.iou);
      std::printf("\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative implicit neural representation trainer"};
  app.require_subcommand(1);

  CliState fit_st, sr_st, den_st, occ_st, sweep_st, ablate_st;

  auto* fit = app.add_subcommand("fit", "fit an image");
  add_common_flags(fit, fit_st);

  auto* sr = app.add_subcommand("sr", "super-resolution (train on downsampled input)");
  add_common_flags(sr, sr_st);
  sr->add_option("--scale", sr_st.cfg.sr_scale, "upscale factor: 2 or 4");

  auto* den = app.add_subcommand("denoise", "fit a Poisson+readout corrupted image");
  add_common_flags(den, den_st);
  den->add_option("--max-photons", den_st.cfg.max_photons, "peak mean photon count");
  den->add_option("--readout", den_st.cfg.readout, "readout noise stddev (photons)");

  auto* occ = app.add_subcommand("occupancy", "fit a 3D occupancy field");
  add_common_flags(occ, occ_st);
  occ->add_option("--shape", occ_st.cfg.shape, "sphere | torus | box | voxel");
  occ->add_option("--radius", occ_st.cfg.sphere_radius, "sphere radius / torus tube radius");
  occ->add_option("--torus-major", occ_st.cfg.torus_major, "torus center-line radius");
  occ->add_option("--box-half", occ_st.cfg.box_half, "box half extents (3 values)");
  occ->add_option("--voxel-file", occ_st.cfg.voxel_file, "VOX voxel-grid file");
  occ->add_option("--train-samples", occ_st.cfg.train_samples, "stratified training samples");
  occ->add_option("--eval-grid", occ_st.cfg.eval_grid, "evaluation grid resolution (n^3)");

  auto* sweep = app.add_subcommand("sweep-steps", "reconstruction-step sweep on a trained model");
  add_common_flags(sweep, sweep_st);
  sweep->add_option("--steps-list", sweep_st.steps_csv, "comma-separated step counts");
  std::string sweep_task = "fit";
  sweep->add_option("--task", sweep_task, "fit | sr | denoise | occupancy");

  auto* ablate = app.add_subcommand("ablate", "ablation sweep over one config axis");
  add_common_flags(ablate, ablate_st);
  ablate->add_option("--axis", ablate_st.axis, "latent | fusion | modules | depth");
  std::string ablate_task = "fit";
  ablate->add_option("--task", ablate_task, "fit | sr | denoise | occupancy");

  auto* rep = app.add_subcommand("report", "aggregate record.json files into a summary table");
  std::vector<std::string> report_paths;
  std::string report_out = "summary.csv";
  rep->add_option("paths", report_paths, "record.json files or directories")->required();
  rep->add_option("--out", report_out, "summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      finalize_config(fit, fit_st, "fit");
      print_outcome(iinr::run_experiment(fit_st.cfg));
    } else if (sr->parsed()) {
      finalize_config(sr, sr_st, "sr");
      print_outcome(iinr::run_experiment(sr_st.cfg));
    } else if (den->parsed()) {
      finalize_config(den, den_st, "denoise");
      print_outcome(iinr::run_experiment(den_st.cfg));
    } else if (occ->parsed()) {
      finalize_config(occ, occ_st, "occupancy");
      print_outcome(iinr::run_experiment(occ_st.cfg));
    } else if (sweep->parsed()) {
      finalize_config(sweep, sweep_st, sweep_task);
      print_outcome(iinr::sweep_steps(sweep_st.cfg, parse_int_list(sweep_st.steps_csv)));
    } else if (ablate->parsed()) {
      finalize_config(ablate, ablate_st, ablate_task);
      print_outcome(
          iinr::sweep_ablation(ablate_st.cfg, iinr::ablation_axis_from_name(ablate_st.axis)));
    } else if (rep->parsed()) {
      const auto records = iinr::load_records(report_paths);
      std::cout << iinr::report(records, report_out);
      std::cout << "wrote " << report_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
