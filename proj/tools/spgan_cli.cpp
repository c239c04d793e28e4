// Copyright 2026 The spgan-prior Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// spgan: prepare, train, generate, eval and ablate point-cloud GANs.

#include "spgan/spgan.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace spgan;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Config from --config (or defaults) with --seed and --out layered on top.
RunConfig resolve_config(const Globals& g, bool required) {
  RunConfig cfg;
  if (!g.config.empty()) {
    cfg = load_run_config(g.config);
  } else if (required) {
    throw ConfigError("--config is required for this command");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  return cfg;
}

fs::path output_dir(const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw ConfigError("no output directory: pass --out or set output_dir");
  return cfg.output_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

FeatureExtractor feature_extractor(const RunConfig& cfg) {
  if (cfg.feature_weights.empty()) return FeatureExtractor();
  return FeatureExtractor::from_checkpoint(load_checkpoint(cfg.feature_weights));
}

int cmd_prepare(const Globals& g, const std::string& input, std::optional<std::size_t> n_points) {
  RunConfig cfg = resolve_config(g, false);
  if (n_points) cfg.n_points = *n_points;
  if (cfg.n_points == 0) throw ConfigError("n_points must be >= 1");
  const fs::path out = output_dir(cfg);
  const auto report = prepare_dataset(input, out, cfg.n_points, cfg.seed);
  for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
  std::cout << "prepared " << report.written.size() << " clouds into " << out.string() << '\n';
  return report.written.empty() ? 2 : 0;
}

int cmd_train(const Globals& g) {
  const RunConfig cfg = resolve_config(g, true);
  cfg.validate();
  if (cfg.dataset_dir.empty()) throw ConfigError("config field 'dataset_dir' is required");
  const fs::path out = output_dir(cfg);
  const auto dataset = load_dataset(cfg.dataset_dir);
  fs::create_directories(out);
  write_text(out / "config.txt", cfg.serialize());
  std::ofstream log(out / "loss.csv", std::ios::trunc | std::ios::binary);
  const auto opts = cfg.train_options();
  const CheckpointPolicy policy{out / "checkpoints", cfg.checkpoint_every, cfg.serialize()};
  const TrainState state =
      train(initial_state(opts), dataset, opts, cfg.run_length(), policy, &log);
  std::cout << "trained " << state.step << " steps; checkpoint "
            << checkpoint_path(policy.dir, state.step).string() << '\n';
  return 0;
}

struct LoadedModel {
  ModelParams<float> params;
  SpherePrior sphere;
};

LoadedModel load_model(const std::string& dir, const std::optional<RunConfig>& cfg) {
  const Checkpoint ckpt = load_checkpoint(dir);
  LoadedModel m{params_from_checkpoint(ckpt), {}};
  const std::size_t n = std::stoul(ckpt.meta_value("n_points"));
  const std::uint64_t seed = std::stoull(ckpt.meta_value("seed"));
  if (cfg) {
    const NetShape want{cfg->latent_dim, cfg->hidden_width, cfg->vanilla};
    if (want.generator_input_width() != m.params.shape.generator_input_width() ||
        want.hidden != m.params.shape.hidden) {
      throw ConfigError("checkpoint generator input width " +
                        std::to_string(m.params.shape.generator_input_width()) + " (hidden " +
                        std::to_string(m.params.shape.hidden) + ") does not match config width " +
                        std::to_string(want.generator_input_width()) + " (hidden " +
                        std::to_string(want.hidden) + ")");
    }
    if (cfg->n_points != n) {
      throw ConfigError("checkpoint n_points " + std::to_string(n) +
                        " does not match config n_points " + std::to_string(cfg->n_points));
    }
  }
  m.sphere = training_sphere(seed, n);
  return m;
}

int cmd_generate(const Globals& g, const std::string& checkpoint, std::size_t count, bool xyz) {
  const RunConfig cfg = resolve_config(g, false);
  const fs::path out = output_dir(cfg);
  const auto model =
      load_model(checkpoint, g.config.empty() ? std::nullopt : std::optional<RunConfig>(cfg));
  const auto clouds =
      generate_samples(model.params, model.sphere, count, derive_seed(cfg.seed, streams::kEval));
  fs::create_directories(out);
  char stem[32];
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    std::snprintf(stem, sizeof stem, "sample_%04zu", i);
    write_cloud(clouds[i], out / (std::string(stem) + ".pcf"), CloudFormat::F32Binary);
    if (xyz) write_cloud(clouds[i], out / (std::string(stem) + ".xyz"), CloudFormat::XyzText);
    write_text(out / (std::string(stem) + ".svg"), render_projections_svg(clouds[i], stem));
  }
  std::cout << "generated " << clouds.size() << " clouds into " << out.string() << '\n';
  return 0;
}

int cmd_eval(const Globals& g, const std::string& checkpoint, const std::string& references,
             bool self) {
  const RunConfig cfg = resolve_config(g, false);
  cfg.validate();
  const fs::path out = output_dir(cfg);
  if (!self && checkpoint.empty()) throw ConfigError("eval needs --checkpoint or --self");
  const auto refs = load_dataset(references);
  const FeatureExtractor fx = feature_extractor(cfg);
  EvalOptions eval{cfg.eval_samples, cfg.grid_resolution, derive_seed(cfg.seed, streams::kEval)};
  EvalResult r;
  if (self) {
    r = evaluate_sets(refs, refs, eval, fx);
  } else {
    const auto model =
        load_model(checkpoint, g.config.empty() ? std::nullopt : std::optional<RunConfig>(cfg));
    r = evaluate_generator(model.params, model.sphere, refs, eval, fx);
  }
  fs::create_directories(out);
  char buf[256];
  std::string csv = "metric,value,unit,config_hash\n";
  std::snprintf(buf, sizeof buf, "fpd,%.9g,1e-3,%s\n", r.fpd_in_units(), cfg.hash().c_str());
  csv += buf;
  std::snprintf(buf, sizeof buf, "jsd,%.9g,nats,%s\n", r.jsd, cfg.hash().c_str());
  csv += buf;
  write_text(out / "metrics.csv", csv);
  std::printf("FPD: %.6f (x1e-3)\nJSD: %.6f\n", r.fpd_in_units(), r.jsd);
  return 0;
}

int cmd_ablate(const Globals& g, const std::string& matrix_path) {
  const std::string path = matrix_path.empty() ? g.config : matrix_path;
  if (path.empty()) throw ConfigError("ablate needs --matrix or --config");
  AblationMatrix matrix = parse_ablation_matrix(read_key_values(path));
  if (g.seed) matrix.base.seed = *g.seed;
  if (!g.out.empty()) matrix.base.output_dir = g.out;
  const fs::path out = output_dir(matrix.base);
  fs::create_directories(out);
  const auto outcome = run_ablation(matrix, out, &std::cerr);
  write_text(out / "table.csv", outcome.table.to_csv());
  write_text(out / "table.md", outcome.table.to_markdown());
  std::cout << outcome.table.to_markdown();
  for (const auto& f : outcome.failures) std::cerr << "failed: " << f << '\n';
  return outcome.failures.empty() ? 0 : 2;
}

int cmd_synth(const Globals& g, std::size_t count, std::size_t n_points) {
  const RunConfig cfg = resolve_config(g, false);
  const fs::path out = output_dir(cfg);
  fs::create_directories(out);
  const auto clouds = procedural_dataset(count, n_points, cfg.seed);
  char name[32];
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    std::snprintf(name, sizeof name, "shape_%04zu.xyz", i);
    write_cloud(clouds[i], out / name, CloudFormat::XyzText);
  }
  std::cout << "wrote " << clouds.size() << " clouds into " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sphere-prior point cloud GAN with k-means centroid priors"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "key = value run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", g.out, "output directory (overrides output_dir)");

  auto* prepare = app.add_subcommand("prepare", "subsample and normalize a directory of clouds");
  std::string input;
  std::optional<std::size_t> prep_n;
  prepare->add_option("--input", input, "directory of .xyz/.txt/.pcf clouds")->required();
  prepare->add_option("--n-points", prep_n, "points per cloud (default: config n_points)");

  auto* train_cmd = app.add_subcommand("train", "train from a config file");

  auto* generate = app.add_subcommand("generate", "sample clouds and SVG previews");
  std::string gen_ckpt;
  std::size_t count = 1;
  bool xyz = false;
  generate->add_option("--checkpoint", gen_ckpt, "checkpoint directory")->required();
  generate->add_option("--count", count, "number of clouds")->check(CLI::PositiveNumber);
  generate->add_flag("--xyz", xyz, "also write .xyz text files");

  auto* eval = app.add_subcommand("eval", "FPD and JSD against reference clouds");
  std::string eval_ckpt, references;
  bool self = false;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint directory");
  eval->add_option("--references", references, "directory of reference clouds")->required();
  eval->add_flag("--self", self, "compare the references with themselves");

  auto* ablate = app.add_subcommand("ablate", "train and evaluate a categories x K matrix");
  std::string matrix;
  ablate->add_option("--matrix", matrix, "matrix file (default: --config)");

  auto* synth = app.add_subcommand("synth", "write procedural blob and box clouds");
  std::size_t synth_count = 16, synth_n = 2048;
  synth->add_option("--count", synth_count, "number of clouds")->check(CLI::PositiveNumber);
  synth->add_option("--n-points", synth_n, "points per cloud")->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (prepare->parsed()) return cmd_prepare(g, input, prep_n);
    if (train_cmd->parsed()) return cmd_train(g);
    if (generate->parsed()) return cmd_generate(g, gen_ckpt, count, xyz);
    if (eval->parsed()) return cmd_eval(g, eval_ckpt, references, self);
    if (ablate->parsed()) return cmd_ablate(g, matrix);
    if (synth->parsed()) return cmd_synth(g, synth_count, synth_n);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
