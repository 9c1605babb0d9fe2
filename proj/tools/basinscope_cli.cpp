// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

// basinscope: train, poison, and probe the loss landscape of small MLPs.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/embed.hpp"
#include "basinscope/error.hpp"
#include "basinscope/experiments.hpp"
#include "basinscope/io.hpp"
#include "basinscope/landscape.hpp"
#include "basinscope/mlp.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/optim.hpp"
#include "basinscope/report.hpp"

namespace fs = std::filesystem;
using namespace basinscope;

namespace {

enum Exit { kOk = 0, kFlag = 2, kPrecondition = 3, kNumeric = 4, kNotFound = 5 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return kFlag;
    case ErrorKind::precondition: return kPrecondition;
    case ErrorKind::numeric: return kNumeric;
    case ErrorKind::not_found: return kNotFound;
    case ErrorKind::format: return kPrecondition;
  }
  return 1;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_double(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw invalid_argument("bad layer width in '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw precondition_failed("cannot create " + dir.string() + ": " + ec.message());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void print_kv(const std::string& key, const std::string& value) {
  std::cout << key << " = " << value << "\n";
}
void print_kv(const std::string& key, double value) { print_kv(key, format_double(value)); }

// Shared by every subcommand that needs data for a checkpoint: a manifest
// when given, else the default swiss roll under the checkpoint's seed.
struct DataSource {
  std::string run;

  void add(CLI::App* app) {
    app->add_option("--run", run, "Run manifest whose dataset to use");
  }
  DatasetSpec spec(std::uint64_t fallback_seed) const {
    if (!run.empty()) return load_manifest(run).dataset;
    return swissroll_dataset(fallback_seed);
  }
};

// ---------------------------------------------------------------------------

struct TrainOpts {
  std::string generator = "swissroll";
  std::size_t n_points = SwissRollSpec{}.n_points;
  double noise = -1.0;
  double turns = SwissRollSpec{}.turns;
  double gap = RingsSpec{}.gap();
  std::size_t n_per_ring = RingsSpec{}.n_per_ring;
  double train_fraction = 0.5;
  std::size_t n_poison = 200;
  std::string widths = "2,16,16,16,16,16,2";
  std::string activation = "tanh";
  std::string optimizer = "sgd";
  double lr = 0.05;
  double momentum = 0.9;
  std::size_t batch = 40;
  std::size_t epochs = 3000;
  std::size_t checkpoint_every = 10;
  double beta = 0.0;
  std::string out = "run";
  bool wall_clock = false;
};

int cmd_train(const TrainOpts& o, std::uint64_t seed) {
  DatasetSpec ds;
  ds.seed = seed;
  ds.train_fraction = o.train_fraction;
  ds.n_poison = o.n_poison;
  if (o.generator == "swissroll") {
    ds.generator = SwissRollSpec{o.n_points, o.noise < 0 ? SwissRollSpec{}.noise_sd : o.noise,
                                 o.turns};
  } else if (o.generator == "rings") {
    RingsSpec r = RingsSpec::with_gap(o.gap);
    r.n_per_ring = o.n_per_ring;
    if (o.noise >= 0) r.noise_sd = o.noise;
    ds.generator = r;
  } else {
    throw invalid_argument("unknown generator '" + o.generator + "'");
  }
  const MlpArch arch(parse_widths(o.widths), parse_activation(o.activation));
  TrainConfig cfg;
  cfg.objective = o.beta > 0 ? ObjectiveSpec::poisoned(o.beta) : ObjectiveSpec::clean();
  cfg.optimizer = parse_optimizer(o.optimizer);
  cfg.learning_rate = o.lr;
  cfg.momentum_coef = o.momentum;
  cfg.batch_size = o.batch;
  cfg.epochs = o.epochs;
  cfg.checkpoint_every = o.checkpoint_every;
  cfg.seed = seed;
  cfg.validate();

  TrainingData data = build_data(ds);
  if (o.beta == 0) data = without_poison(std::move(data));
  const TrainRun run = train(arch, data, cfg);

  const fs::path dir(o.out);
  ensure_dir(dir / "checkpoints");
  RunManifest m;
  m.experiment = "train";
  m.dataset = ds;
  m.arch = arch;
  m.config = cfg;
  for (const auto& cp : run.checkpoints) {
    char name[64];
    std::snprintf(name, sizeof name, "checkpoints/epoch_%06zu.bscp", cp.epoch);
    save_checkpoint(dir / name, {arch, seed, cp.params});
    char role[32];
    std::snprintf(role, sizeof role, "checkpoint.%06zu", cp.epoch);
    m.files[role] = name;
  }
  save_checkpoint(dir / "initial.bscp", {arch, seed, run.initial});
  save_checkpoint(dir / "final.bscp", {arch, seed, run.final_params});
  write_file(dir / "metrics.csv", metrics_csv(run.metrics));
  std::vector<const LabeledDataset*> parts{&data.train, &data.test};
  if (data.poison) parts.push_back(&*data.poison);
  write_file(dir / "dataset.csv", dataset_csv(parts));
  m.files["initial"] = "initial.bscp";
  m.files["final"] = "final.bscp";
  m.files["metrics"] = "metrics.csv";
  m.files["dataset"] = "dataset.csv";
  if (o.wall_clock) m.wall_clock = now_utc();
  save_manifest(dir / "manifest.txt", m);

  const EpochMetrics& last = run.metrics.back();
  print_kv("epochs", std::to_string(last.epoch));
  print_kv("train_loss", last.train_loss);
  print_kv("train_acc", last.train_acc);
  print_kv("test_acc", last.test_acc);
  print_kv("manifest", (dir / "manifest.txt").string());
  return kOk;
}

// ---------------------------------------------------------------------------

struct PoisonOpts {
  std::string start;
  double beta = 0.9;
  std::string optimizer = "sgd";
  double lr = 0.05;
  double momentum = 0.9;
  std::size_t batch = 40;
  std::size_t max_epochs = 3000;
  double min_train_acc = 0.995;
  double max_test_acc = 0.60;
  double max_train_loss = 0.1;
  std::string out = "bad.bscp";
  DataSource data;
};

int cmd_poison(const PoisonOpts& o, std::uint64_t seed) {
  const Checkpoint start = load_checkpoint(o.start);
  const TrainingData data = build_data(o.data.spec(start.seed));
  PoisonSearch search;
  search.beta = o.beta;
  search.optimizer = parse_optimizer(o.optimizer);
  search.learning_rate = o.lr;
  search.momentum_coef = o.momentum;
  search.batch_size = o.batch;
  search.stop = {o.min_train_acc, o.max_test_acc, o.max_epochs, o.max_train_loss};
  try {
    const BadMinimum bad = find_bad_minimum(start.arch, start.params, data, search, seed);
    ensure_parent(o.out);
    save_checkpoint(o.out, {start.arch, start.seed, bad.params});
    print_kv("epoch", std::to_string(bad.metrics.epoch));
    print_kv("train_loss", bad.metrics.train_loss);
    print_kv("train_acc", bad.metrics.train_acc);
    print_kv("test_acc", bad.metrics.test_acc);
    print_kv("distance_from_start", bad.distance_from_start);
    return kOk;
  } catch (const NotFoundError& e) {
    print_kv("best_epoch", std::to_string(e.best().epoch));
    print_kv("best_train_acc", e.best().train_acc);
    print_kv("best_test_acc", e.best().test_acc);
    throw;
  }
}

// ---------------------------------------------------------------------------

struct SliceOpts {
  std::string ckpt;
  std::string mode = "ray";
  std::string normalization = "filter";
  std::string range = "-1,1";
  std::size_t resolution = 51;
  std::string out = "slice.csv";
  DataSource data;
};

int cmd_slice(const SliceOpts& o, std::uint64_t seed, std::size_t workers) {
  const Checkpoint cp = load_checkpoint(o.ckpt);
  const TrainingData data = build_data(o.data.spec(cp.seed));
  const NetworkLoss surface(cp.arch, data.train.to_batch());
  const Normalization norm = parse_normalization(o.normalization);
  const std::vector<double> range = parse_list(o.range);
  if (range.size() != 2 || !(range[0] < range[1])) {
    throw invalid_argument("--range needs 'lo,hi' with lo < hi");
  }
  const Axis axis{range[0], range[1], o.resolution};
  if (o.resolution < 1) throw invalid_argument("--resolution must be >= 1");
  const Direction d1 = sample_direction(cp.params, cp.arch, seed, 0, norm);

  ensure_parent(o.out);
  if (o.mode == "ray") {
    std::vector<double> ts(o.resolution);
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = axis.at(i);
    const std::vector<double> losses = ray_profile(surface, cp.params, d1, ts);
    CsvWriter csv({"t", "loss"});
    for (std::size_t i = 0; i < ts.size(); ++i) {
      csv.cell(ts[i]).cell(losses[i]);
      csv.end_row();
    }
    csv.save(o.out);
  } else if (o.mode == "plane") {
    const Direction d2 = sample_direction(cp.params, cp.arch, seed, 1, norm);
    const Matrix grid = plane_slice(surface, cp.params, d1, d2, axis, axis, workers);
    CsvWriter csv({"t", "s", "loss"});
    for (std::size_t i = 0; i < grid.rows(); ++i) {
      for (std::size_t j = 0; j < grid.cols(); ++j) {
        csv.cell(axis.at(i)).cell(axis.at(j)).cell(grid(i, j));
        csv.end_row();
      }
    }
    csv.save(o.out);
  } else {
    throw invalid_argument("--mode must be ray or plane");
  }
  print_kv("center_loss", surface.loss(cp.params.span()));
  print_kv("out", o.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct VolumeOpts {
  std::string ckpt;
  double cutoff = 0.1;
  std::size_t directions = 3000;
  double tol = 1e-4;
  double max_radius = 1e3;
  std::string normalization = "filter";
  std::string out = "basin.csv";
  DataSource data;
};

void print_volume(const VolumeEstimate& v) {
  print_kv("n", std::to_string(v.n));
  print_kv("log10_volume", v.log10_volume);
  print_kv("log10_omega_n", v.log10_omega_n);
  print_kv("mean_radius", v.mean_radius);
  print_kv("min_radius", v.min_radius);
  print_kv("max_radius", v.max_radius);
  print_kv("num_directions", std::to_string(v.num_directions));
  print_kv("num_censored", std::to_string(v.num_censored));
  print_kv("conservative", v.conservative() ? "true" : "false");
}

int cmd_volume(const VolumeOpts& o, std::uint64_t seed, std::size_t workers) {
  const Checkpoint cp = load_checkpoint(o.ckpt);
  const TrainingData data = build_data(o.data.spec(cp.seed));
  const RadiusSearch search{o.cutoff, o.tol, o.max_radius};
  const DirectionSet dirs{o.directions, seed, parse_normalization(o.normalization)};
  const BasinReport basin = measure_basin(cp.arch, cp.params, data.train, dirs, search, workers);

  CsvWriter csv({"direction", "radius", "censored", "evaluations"});
  for (const BasinSample& s : basin.samples) {
    csv.cell(s.direction_index).cell(s.radius).cell(std::uint64_t{s.censored})
        .cell(static_cast<std::uint64_t>(s.evaluations));
    csv.end_row();
  }
  ensure_parent(o.out);
  csv.save(o.out);
  if (!basin.volume) throw precondition_failed(basin.volume_error);
  print_volume(*basin.volume);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepOpts {
  std::string betas = "0,0.2,0.4,0.6,0.8,0.9";
  std::size_t epochs = 3000;
  std::size_t directions = 3000;
  double cutoff = 0.1;
  double tol = 1e-4;
  std::string out = "sweep.csv";
};

int cmd_sweep(const SweepOpts& o, std::uint64_t seed, std::size_t workers) {
  const MlpArch arch = MlpArch::swissroll_default();
  const TrainingData data = build_data(swissroll_dataset(seed));
  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.seed = seed;
  const RadiusSearch search{o.cutoff, o.tol, 1e3};
  const DirectionSet dirs{o.directions, seed, Normalization::filter};
  const auto rows = beta_sweep(arch, data, cfg, parse_list(o.betas), dirs, search, workers);
  ensure_parent(o.out);
  write_file(o.out, sweep_csv(rows));
  for (const SweepRow& r : rows) {
    std::cout << "beta " << format_double(r.beta) << ": train_acc " << format_double(r.train_acc)
              << " test_acc " << format_double(r.test_acc) << " mean_radius "
              << format_double(r.mean_radius) << " log10_volume "
              << format_double(r.log10_volume);
    if (!r.note.empty()) std::cout << " (" << r.note << ")";
    std::cout << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct EmbedOpts {
  std::string run;
  std::size_t bad_per_iterate = 3;
  std::size_t iterate_stride = 10;
  double perplexity = 30.0;
  std::size_t pca = 50;
  std::size_t iterations = 1000;
  double beta = 0.9;
  std::size_t max_epochs = 3000;
  std::string out = "embedding.csv";
};

int cmd_embed(const EmbedOpts& o, std::uint64_t seed, std::size_t workers) {
  const RunManifest m = load_manifest(o.run);
  TrainRun run;
  run.config = m.config;
  for (const auto& [role, file] : m.files) {
    if (!role.starts_with("checkpoint.")) continue;
    const Checkpoint cp = load_checkpoint(resolve_file(o.run, file));
    if (!(cp.arch == m.arch)) throw precondition_failed("checkpoint " + file + " has another architecture");
    run.checkpoints.push_back({static_cast<std::size_t>(parse_uint(role.substr(11))), cp.params});
  }
  if (run.checkpoints.empty()) throw precondition_failed("manifest lists no checkpoints");
  DatasetSpec ds = m.dataset;
  const TrainingData data = build_data(ds);

  EmbeddingPlan plan;
  plan.bad_per_iterate = o.bad_per_iterate;
  plan.iterate_stride = o.iterate_stride;
  plan.search.beta = o.beta;
  plan.search.stop.max_epochs = o.max_epochs;
  plan.pca_components = o.pca;
  plan.tsne.perplexity = o.perplexity;
  plan.tsne.iterations = o.iterations;
  const EmbeddingOutcome out = embed_trajectory(m.arch, data, run, plan, seed, workers);
  ensure_parent(o.out);
  write_file(o.out, embedding_csv(out));
  print_kv("rows", std::to_string(out.rows.size()));
  print_kv("poison_searches", std::to_string(out.searches));
  print_kv("poison_searches_failed", std::to_string(out.searches_failed));
  print_kv("kl_final", out.tsne.kl_trace.empty() ? NAN : out.tsne.kl_trace.back());
  print_kv("kl_increases", std::to_string(out.tsne.kl_increases));
  return kOk;
}

// ---------------------------------------------------------------------------

Domain parse_domain(const std::string& text) {
  const std::vector<double> v = parse_list(text);
  if (v.size() != 4) throw invalid_argument("--domain needs 'xlo,xhi,ylo,yhi'");
  Domain d{v[0], v[1], v[2], v[3]};
  d.validate();
  return d;
}

struct BoundaryOpts {
  std::string ckpt;
  std::string domain = "-1.25,1.25,-1.25,1.25";
  std::size_t resolution = 200;
  std::string out = "boundary";
  DataSource data;
};

int cmd_boundary(const BoundaryOpts& o) {
  const Checkpoint cp = load_checkpoint(o.ckpt);
  const TrainingData data = build_data(o.data.spec(cp.seed));
  const Domain domain = parse_domain(o.domain);
  const ClassGrid grid = decision_boundary(cp.arch, cp.params, domain, o.resolution, o.resolution);
  const std::vector<const LabeledDataset*> overlay{&data.train};
  ensure_parent(o.out + ".csv");
  write_file(o.out + ".csv", grid_csv(grid));
  write_file(o.out + ".ppm", render_ppm(grid, overlay));
  const std::vector<int> predicted = predict(cp.arch, cp.params, data.train.points);
  const MarginEstimate margin = margin_estimate(grid, data.train.points, predicted);
  print_kv("class0_cells", std::to_string(grid.count(0)));
  print_kv("class1_cells", std::to_string(grid.count(1)));
  print_kv("margin", margin.margin);
  print_kv("cell_size", margin.cell_size);
  return kOk;
}

// ---------------------------------------------------------------------------

struct RingsOpts {
  double gap = 0.25;
  std::size_t epochs = 3000;
  std::size_t resolution = 200;
  std::string out = "rings";
};

int cmd_rings(const RingsOpts& o, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = o.epochs;
  const RingsOutcome r =
      rings_experiment(MlpArch::swissroll_default(), o.gap, seed, cfg, Domain{}, o.resolution);
  DatasetSpec ds;
  ds.generator = r.spec;
  ds.seed = seed;
  const TrainingData data = build_data(ds);
  const std::vector<const LabeledDataset*> overlay{&data.train};
  ensure_parent(o.out + ".csv");
  write_file(o.out + ".csv", grid_csv(r.grid));
  write_file(o.out + ".ppm", render_ppm(r.grid, overlay));
  std::string report;
  const auto line = [&](const std::string& k, const std::string& v) {
    report += k + " = " + v + "\n";
  };
  line("gap", format_double(o.gap));
  line("train_acc", format_double(r.train.accuracy));
  line("test_acc", format_double(r.test.accuracy));
  line("train_loss", format_double(r.train.loss));
  line("margin", format_double(r.margin.margin));
  line("cell_size", format_double(r.margin.cell_size));
  write_file(o.out + ".txt", report);
  std::cout << report;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"basinscope: good and bad minima of small networks, and the basins around them"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (0 = all cores); results do not depend on it");

  TrainOpts train_o;
  auto* train_cmd = app.add_subcommand("train", "Train a net; write checkpoints, metrics, manifest");
  train_cmd->add_option("--generator", train_o.generator)->check(CLI::IsMember({"swissroll", "rings"}))->capture_default_str();
  train_cmd->add_option("--n-points", train_o.n_points, "Swiss-roll points before the split")->capture_default_str();
  train_cmd->add_option("--noise", train_o.noise, "Coordinate noise sd (default per generator)");
  train_cmd->add_option("--turns", train_o.turns)->capture_default_str();
  train_cmd->add_option("--gap", train_o.gap, "Rings inner gap")->capture_default_str();
  train_cmd->add_option("--n-per-ring", train_o.n_per_ring)->capture_default_str();
  train_cmd->add_option("--train-fraction", train_o.train_fraction)->capture_default_str();
  train_cmd->add_option("--n-poison", train_o.n_poison)->capture_default_str();
  train_cmd->add_option("--widths", train_o.widths)->capture_default_str();
  train_cmd->add_option("--activation", train_o.activation)->check(CLI::IsMember({"tanh", "relu"}))->capture_default_str();
  train_cmd->add_option("--optimizer", train_o.optimizer)->check(CLI::IsMember({"sgd", "momentum", "adam"}))->capture_default_str();
  train_cmd->add_option("--lr", train_o.lr)->capture_default_str();
  train_cmd->add_option("--momentum", train_o.momentum)->capture_default_str();
  train_cmd->add_option("--batch", train_o.batch)->capture_default_str();
  train_cmd->add_option("--epochs", train_o.epochs)->capture_default_str();
  train_cmd->add_option("--checkpoint-every", train_o.checkpoint_every)->capture_default_str();
  train_cmd->add_option("--beta", train_o.beta, "Poison factor; 0 trains on the clean loss")->capture_default_str();
  train_cmd->add_option("--out", train_o.out, "Output directory")->capture_default_str();
  train_cmd->add_flag("--record-wall-clock", train_o.wall_clock, "Store the UTC time in the manifest");

  PoisonOpts poison_o;
  auto* poison_cmd = app.add_subcommand("poison", "Search for a bad minimum near a checkpoint");
  poison_cmd->add_option("--start", poison_o.start)->required();
  poison_cmd->add_option("--beta", poison_o.beta)->capture_default_str();
  poison_cmd->add_option("--optimizer", poison_o.optimizer)->check(CLI::IsMember({"sgd", "momentum", "adam"}))->capture_default_str();
  poison_cmd->add_option("--lr", poison_o.lr)->capture_default_str();
  poison_cmd->add_option("--momentum", poison_o.momentum)->capture_default_str();
  poison_cmd->add_option("--batch", poison_o.batch)->capture_default_str();
  poison_cmd->add_option("--max-epochs", poison_o.max_epochs)->capture_default_str();
  poison_cmd->add_option("--min-train-acc", poison_o.min_train_acc)->capture_default_str();
  poison_cmd->add_option("--max-test-acc", poison_o.max_test_acc)->capture_default_str();
  poison_cmd->add_option("--max-train-loss", poison_o.max_train_loss, "Clean train loss ceiling")->capture_default_str();
  poison_cmd->add_option("--out", poison_o.out)->capture_default_str();
  poison_o.data.add(poison_cmd);

  SliceOpts slice_o;
  auto* slice_cmd = app.add_subcommand("slice", "Loss along a random ray or plane");
  slice_cmd->add_option("--ckpt", slice_o.ckpt)->required();
  slice_cmd->add_option("--mode", slice_o.mode)->check(CLI::IsMember({"ray", "plane"}))->capture_default_str();
  slice_cmd->add_option("--normalization", slice_o.normalization)->check(CLI::IsMember({"euclidean", "filter"}))->capture_default_str();
  slice_cmd->add_option("--range", slice_o.range, "lo,hi")->capture_default_str();
  slice_cmd->add_option("--resolution", slice_o.resolution)->capture_default_str();
  slice_cmd->add_option("--out", slice_o.out)->capture_default_str();
  slice_o.data.add(slice_cmd);

  VolumeOpts volume_o;
  auto* volume_cmd = app.add_subcommand("volume", "Basin radii and log10 volume");
  volume_cmd->add_option("--ckpt", volume_o.ckpt)->required();
  volume_cmd->add_option("--cutoff", volume_o.cutoff)->capture_default_str();
  volume_cmd->add_option("--directions", volume_o.directions)->capture_default_str();
  volume_cmd->add_option("--tol", volume_o.tol)->capture_default_str();
  volume_cmd->add_option("--max-radius", volume_o.max_radius)->capture_default_str();
  volume_cmd->add_option("--normalization", volume_o.normalization)->check(CLI::IsMember({"euclidean", "filter"}))->capture_default_str();
  volume_cmd->add_option("--out", volume_o.out, "Basin samples CSV")->capture_default_str();
  volume_o.data.add(volume_cmd);

  SweepOpts sweep_o;
  auto* sweep_cmd = app.add_subcommand("sweep", "Test accuracy, radius and volume across poison factors");
  sweep_cmd->add_option("--betas", sweep_o.betas)->capture_default_str();
  sweep_cmd->add_option("--epochs", sweep_o.epochs)->capture_default_str();
  sweep_cmd->add_option("--directions", sweep_o.directions)->capture_default_str();
  sweep_cmd->add_option("--cutoff", sweep_o.cutoff)->capture_default_str();
  sweep_cmd->add_option("--tol", sweep_o.tol)->capture_default_str();
  sweep_cmd->add_option("--out", sweep_o.out)->capture_default_str();

  EmbedOpts embed_o;
  auto* embed_cmd = app.add_subcommand("embed", "t-SNE of SGD iterates and nearby bad minima");
  embed_cmd->add_option("--run", embed_o.run, "Manifest written by train")->required();
  embed_cmd->add_option("--bad-per-iterate", embed_o.bad_per_iterate)->capture_default_str();
  embed_cmd->add_option("--iterate-stride", embed_o.iterate_stride, "Search from every k-th checkpoint")->capture_default_str();
  embed_cmd->add_option("--perplexity", embed_o.perplexity)->capture_default_str();
  embed_cmd->add_option("--pca", embed_o.pca)->capture_default_str();
  embed_cmd->add_option("--iterations", embed_o.iterations)->capture_default_str();
  embed_cmd->add_option("--beta", embed_o.beta)->capture_default_str();
  embed_cmd->add_option("--max-epochs", embed_o.max_epochs, "Epoch budget per poison search")->capture_default_str();
  embed_cmd->add_option("--out", embed_o.out)->capture_default_str();

  BoundaryOpts boundary_o;
  auto* boundary_cmd = app.add_subcommand("boundary", "Decision-boundary grid, PPM image and margin");
  boundary_cmd->add_option("--ckpt", boundary_o.ckpt)->required();
  boundary_cmd->add_option("--domain", boundary_o.domain, "xlo,xhi,ylo,yhi")->capture_default_str();
  boundary_cmd->add_option("--resolution", boundary_o.resolution)->capture_default_str();
  boundary_cmd->add_option("--out", boundary_o.out, "Prefix for .csv and .ppm")->capture_default_str();
  boundary_o.data.add(boundary_cmd);

  RingsOpts rings_o;
  auto* rings_cmd = app.add_subcommand("rings", "Train on concentric rings with a given gap; report the margin");
  rings_cmd->add_option("--gap", rings_o.gap)->capture_default_str();
  rings_cmd->add_option("--epochs", rings_o.epochs)->capture_default_str();
  rings_cmd->add_option("--resolution", rings_o.resolution)->capture_default_str();
  rings_cmd->add_option("--out", rings_o.out, "Prefix for .csv, .ppm and .txt")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFlag;
  }

  try {
    if (*train_cmd) return cmd_train(train_o, seed);
    if (*poison_cmd) return cmd_poison(poison_o, seed);
    if (*slice_cmd) return cmd_slice(slice_o, seed, workers);
    if (*volume_cmd) return cmd_volume(volume_o, seed, workers);
    if (*sweep_cmd) return cmd_sweep(sweep_o, seed, workers);
    if (*embed_cmd) return cmd_embed(embed_o, seed, workers);
    if (*boundary_cmd) return cmd_boundary(boundary_o);
    if (*rings_cmd) return cmd_rings(rings_o, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kFlag;
}
