// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the ten acceptance criteria at full scale and prints one line per
// criterion. Exits non-zero if any criterion fails.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/embed.hpp"
#include "basinscope/experiments.hpp"
#include "basinscope/io.hpp"
#include "basinscope/landscape.hpp"
#include "basinscope/numerics.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/optim.hpp"
#include "support.hpp"

using namespace basinscope;
using namespace basinscope::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared swiss-roll runs: clean and poisoned training from the same init.

constexpr std::size_t kSeeds = 10;
constexpr double kBeta = 0.9;

struct SeedRuns {
  TrainingData data;
  TrainRun clean;
  TrainRun poisoned;
  Evaluation clean_train, clean_test;
  Evaluation poisoned_train, poisoned_test;
  double seconds = 0.0;
  bool good() const { return clean_train.accuracy == 1.0 && clean_test.accuracy >= 0.95; }
  bool bad() const { return poisoned_train.accuracy >= 0.99 && poisoned_test.accuracy <= 0.60; }
};

const std::vector<SeedRuns>& seed_runs() {
  static std::optional<std::vector<SeedRuns>> cache;
  if (cache) return *cache;
  const MlpArch arch = MlpArch::swissroll_default();
  std::vector<SeedRuns> out;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const auto t0 = Clock::now();
    SeedRuns r;
    r.data = build_data(swissroll_dataset(seed));
    TrainConfig cfg;
    cfg.seed = seed;
    const ParamVector init = init_params(arch, seed);
    r.clean = train_at_beta(arch, r.data, cfg, 0.0, init);
    r.poisoned = train_at_beta(arch, r.data, cfg, kBeta, init);
    r.clean_train = evaluate(arch, r.clean.final_params, r.data.train);
    r.clean_test = evaluate(arch, r.clean.final_params, r.data.test);
    r.poisoned_train = evaluate(arch, r.poisoned.final_params, r.data.train);
    r.poisoned_test = evaluate(arch, r.poisoned.final_params, r.data.test);
    r.seconds = seconds_since(t0);
    std::cout << "  seed " << seed << ": clean train/test " << fmt(r.clean_train.accuracy)
              << "/" << fmt(r.clean_test.accuracy) << ", poisoned train/test "
              << fmt(r.poisoned_train.accuracy) << "/" << fmt(r.poisoned_test.accuracy)
              << " (clean loss " << fmt(r.poisoned_train.loss) << "), " << fmt(r.seconds, 3)
              << " s\n";
    out.push_back(std::move(r));
  }
  cache = std::move(out);
  return *cache;
}

Verdict criterion1() {
  const auto& runs = seed_runs();
  std::size_t good = 0, bad = 0;
  double slowest = 0.0;
  for (const SeedRuns& r : runs) {
    good += r.good();
    bad += r.bad();
    slowest = std::max(slowest, r.seconds);
  }
  const bool pass = good >= 8 && bad >= 8 && slowest < 120.0;
  return {pass, "clean runs meeting train 1.00 / test >= 0.95: " + std::to_string(good) +
                    "/10; poisoned runs meeting train >= 0.99 / test <= 0.60: " +
                    std::to_string(bad) + "/10; slowest seed " + fmt(slowest, 3) + " s"};
}

// ---------------------------------------------------------------------------
// Basin measurements of the criterion-1 minimizers.

struct Measured {
  std::uint64_t seed;
  BasinReport report;
  double seconds;
};

struct BasinGroups {
  std::vector<Measured> good, bad;
  std::vector<std::string> unmeasurable;  // bad minimizers outside every basin
};

const BasinGroups& basin_groups() {
  static std::optional<BasinGroups> cache;
  if (cache) return *cache;
  const MlpArch arch = MlpArch::swissroll_default();
  const DirectionSet dirs{3000, 0, Normalization::filter};
  const RadiusSearch search;
  const auto measure = [&](std::uint64_t seed, const ParamVector& p, const LabeledDataset& train) {
    const auto t0 = Clock::now();
    BasinReport rep = measure_basin(arch, p, train, dirs, search, 0);
    return Measured{seed, std::move(rep), seconds_since(t0)};
  };
  BasinGroups g;
  const auto& runs = seed_runs();
  bool any_bad = false;
  for (std::uint64_t s = 0; s < runs.size(); ++s) {
    if (!runs[s].bad()) continue;
    any_bad = true;
    if (!(runs[s].poisoned_train.loss < search.cutoff)) {
      g.unmeasurable.push_back("seed " + std::to_string(s) + " clean loss " +
                               fmt(runs[s].poisoned_train.loss));
      continue;
    }
    g.bad.push_back(measure(s, runs[s].poisoned.final_params, runs[s].data.train));
  }
  // Without any bad minimizer there is nothing to compare against; one good
  // minimizer is still measured so the log shows the flat side.
  for (std::uint64_t s = 0; s < runs.size(); ++s) {
    if (!runs[s].good()) continue;
    g.good.push_back(measure(s, runs[s].clean.final_params, runs[s].data.train));
    if (!any_bad) break;
  }
  for (const Measured& m : g.good) {
    std::cout << "  good seed " << m.seed << ": mean radius " << fmt(m.report.sharpness.mean_radius)
              << ", log10 V " << (m.report.volume ? fmt(m.report.volume->log10_volume, 6) : "n/a")
              << ", " << fmt(m.seconds, 3) << " s\n";
  }
  for (const Measured& m : g.bad) {
    std::cout << "  bad seed " << m.seed << ": mean radius " << fmt(m.report.sharpness.mean_radius)
              << ", log10 V " << (m.report.volume ? fmt(m.report.volume->log10_volume, 6) : "n/a")
              << ", " << fmt(m.seconds, 3) << " s\n";
  }
  cache = std::move(g);
  return *cache;
}

std::string no_bad_reason(const BasinGroups& g) {
  if (!g.unmeasurable.empty()) {
    std::string s = "bad minimizers lie outside every basin at cutoff 0.1:";
    for (const auto& u : g.unmeasurable) s += " " + u + ";";
    return s;
  }
  return "criterion 1 produced no bad minimizer (see its line), so there is no group to compare";
}

Verdict criterion2() {
  const BasinGroups& g = basin_groups();
  if (g.bad.empty()) {
    std::string d = no_bad_reason(g);
    if (!g.good.empty()) d += "; good seed 0 mean radius " + fmt(g.good[0].report.sharpness.mean_radius);
    return {false, d};
  }
  double min_good = HUGE_VAL, max_bad = -HUGE_VAL, slowest = 0.0;
  for (const Measured& m : g.good) {
    min_good = std::min(min_good, m.report.sharpness.mean_radius);
    slowest = std::max(slowest, m.seconds);
  }
  for (const Measured& m : g.bad) {
    max_bad = std::max(max_bad, m.report.sharpness.mean_radius);
    slowest = std::max(slowest, m.seconds);
  }
  const bool pass = !g.good.empty() && min_good > max_bad && slowest < 300.0;
  return {pass, "min good mean radius " + fmt(min_good) + " vs max bad " + fmt(max_bad) +
                    " (" + std::to_string(g.good.size()) + " good, " + std::to_string(g.bad.size()) +
                    " bad); slowest " + fmt(slowest, 3) + " s"};
}

Verdict criterion3() {
  const BasinGroups& g = basin_groups();
  if (g.bad.empty()) {
    std::string d = no_bad_reason(g);
    if (!g.good.empty() && g.good[0].report.volume) {
      d += "; good seed 0 log10 V " + fmt(g.good[0].report.volume->log10_volume, 6);
    }
    return {false, d};
  }
  double min_good = HUGE_VAL, max_bad = -HUGE_VAL;
  for (const Measured& m : g.good) {
    if (!m.report.volume) return {false, "good seed " + std::to_string(m.seed) + ": " + m.report.volume_error};
    min_good = std::min(min_good, m.report.volume->log10_volume);
  }
  for (const Measured& m : g.bad) {
    if (!m.report.volume) return {false, "bad seed " + std::to_string(m.seed) + ": " + m.report.volume_error};
    max_bad = std::max(max_bad, m.report.volume->log10_volume);
  }
  return {min_good - max_bad > 50.0,
          "min good log10 V " + fmt(min_good, 6) + ", max bad " + fmt(max_bad, 6) +
              ", gap " + fmt(min_good - max_bad, 4)};
}

// ---------------------------------------------------------------------------

Verdict criterion4() {
  const MlpArch arch = MlpArch::swissroll_default();
  const std::vector<double> betas{0.0, 0.2, 0.4, 0.6, 0.8, 0.9};
  const TrainingData data = build_data(swissroll_dataset(0));
  const auto rows = beta_sweep(arch, data, TrainConfig{}, betas,
                               DirectionSet{3000, 0, Normalization::filter}, RadiusSearch{}, 0);
  std::vector<double> acc, vol, rad;
  std::string table;
  bool any_nan = false;
  for (const SweepRow& r : rows) {
    std::cout << "  beta " << fmt(r.beta) << ": test " << fmt(r.test_acc) << ", train loss "
              << fmt(r.train_loss) << ", mean radius " << fmt(r.mean_radius) << ", log10 V "
              << fmt(r.log10_volume, 6) << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
    acc.push_back(r.test_acc);
    vol.push_back(r.log10_volume);
    rad.push_back(r.mean_radius);
    if (std::isnan(r.log10_volume) || std::isnan(r.mean_radius)) {
      any_nan = true;
      table += " beta " + fmt(r.beta) + ";";
    }
  }
  if (any_nan) {
    return {false, "no basin measurement (endpoint clean loss not below cutoff 0.1) at" + table +
                       " so the rank correlations are undefined"};
  }
  const double rv = spearman(acc, vol), rr = spearman(acc, rad);
  return {rv >= 0.8 && rr >= 0.8,
          "spearman(test acc, log10 V) " + fmt(rv) + ", spearman(test acc, mean radius) " + fmt(rr)};
}

// ---------------------------------------------------------------------------

Verdict criterion5() {
  const QuadraticBowl ellipse({1.0, 10.0});
  const double closed = std::log10(std::numbers::pi * 0.1 / std::sqrt(10.0));
  RadiusSearch search;
  search.tol = 1e-8;
  const auto samples = sample_basin(ellipse, ParamVector(2, 0.0), nullptr,
                                    DirectionSet{20000, 0, Normalization::euclidean}, search);
  const double est = log_volume(samples, 2).log10_volume;

  const std::size_t n = 4000;
  const double ax = std::sqrt(0.1), ay = std::sqrt(0.01);
  const double hx = 2.0 * ax / n, hy = 2.0 * ay / n;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -ax + (i + 0.5) * hx;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = -ay + (j + 0.5) * hy;
      inside += x * x + 10.0 * y * y < 0.1;
    }
  }
  const double grid = std::log10(static_cast<double>(inside) * hx * hy);

  bool pass = std::abs(est - closed) <= 0.01 && std::abs(est - grid) <= 0.005;
  std::string d = "ellipse: estimate " + fmt(est, 6) + ", closed form " + fmt(closed, 6) +
                  ", grid " + fmt(grid, 6) + "; bowls:";
  for (std::size_t dim : {1u, 2u, 5u, 10u}) {
    const auto s = sample_basin(QuadraticBowl::isotropic(dim), ParamVector(dim, 0.0), nullptr,
                                DirectionSet{3000, 0, Normalization::euclidean}, search);
    const double e = log_volume(s, dim).log10_volume;
    const double c = (log_unit_ball_volume(dim) + 0.5 * dim * std::log(0.1)) / std::numbers::ln10;
    pass = pass && std::abs(e - c) <= 0.02;
    d += " n=" + std::to_string(dim) + " err " + fmt(e - c, 2);
  }
  return {pass, d};
}

// ---------------------------------------------------------------------------

Verdict criterion6() {
  Rng rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const MlpArch arch = random_arch(rng, 500);
    const ParamVector params = random_params(arch, rng, 0.7);
    const Batch train = random_batch(arch, 1 + rng.below(12), rng);
    const Batch poison = random_batch(arch, 1 + rng.below(6), rng);
    const double beta = rng.uniform();
    const bool poisoned = trial % 2 == 1;
    const LossGrad lg = poisoned
                            ? loss_grad(arch, params, train, poison, ObjectiveSpec::poisoned(beta))
                            : loss_grad(arch, params, train, ObjectiveSpec::clean());
    const auto fd = central_difference(
        [&](const ParamVector& p) {
          return poisoned ? poisoned_loss(arch, p, train, poison, beta) : cross_entropy(arch, p, train);
        },
        params, 1e-5);
    for (std::size_t i = 0; i < fd.size(); ++i) worst = std::max(worst, relative_error(lg.grad[i], fd[i]));
  }
  return {worst < 1e-4, "max relative error " + fmt(worst, 3) + " over 100 nets"};
}

// ---------------------------------------------------------------------------

Verdict criterion7() {
  Rng rng(7);
  std::size_t exact = 0;
  double worst_affine = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const MlpArch arch = random_arch(rng, 400);
    const ParamVector params = random_params(arch, rng, 1.5);
    const Batch train = random_batch(arch, 1 + rng.below(30), rng);
    const Batch poison = random_batch(arch, 1 + rng.below(30), rng);
    const double ce = cross_entropy(arch, params, train);
    const double pl = poisoned_loss(arch, params, train, poison, 0.0);
    exact += std::memcmp(&ce, &pl, sizeof ce) == 0;
    const double v1 = poisoned_loss(arch, params, train, poison, 1.0);
    for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double v = poisoned_loss(arch, params, train, poison, beta);
      const double err = std::abs(v - ((1.0 - beta) * ce + beta * v1)) / std::max(1.0, std::abs(v));
      worst_affine = std::max(worst_affine, err);
    }
  }
  return {exact == 1000 && worst_affine <= 1e-12,
          "bit-exact at beta 0: " + std::to_string(exact) + "/1000; worst affine deviation " +
              fmt(worst_affine, 3)};
}

// ---------------------------------------------------------------------------

Verdict criterion8() {
  Rng rng(8);
  Matrix x(200, 10);
  for (double& v : x.flat()) v = rng.normal();
  const ConditionalAffinities aff = conditional_affinities(x, 30.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    double h = 0.0;
    for (double p : aff.p.row(i)) {
      if (p > 0.0) h -= p * std::log(p);
    }
    worst = std::max(worst, std::abs(h - std::log(30.0)));
  }

  // Two clusters 10 apart; recovery is scored by nearest-centroid
  // assignment in the embedding, maximized over the label swap.
  const std::size_t half = 100;
  Matrix c(2 * half, 10);
  for (std::size_t i = 0; i < 2 * half; ++i) {
    for (std::size_t k = 0; k < 10; ++k) c(i, k) = rng.normal() + (i < half && k == 0 ? 10.0 : 0.0);
  }
  TsneConfig cfg;
  cfg.seed = 8;
  const TsneResult r = tsne_embed(c, cfg);
  double ca[2] = {0, 0}, cb[2] = {0, 0};
  for (std::size_t i = 0; i < 2 * half; ++i) {
    for (std::size_t k = 0; k < 2; ++k) (i < half ? ca : cb)[k] += r.embedding(i, k) / half;
  }
  std::size_t right = 0;
  for (std::size_t i = 0; i < 2 * half; ++i) {
    const double da = std::hypot(r.embedding(i, 0) - ca[0], r.embedding(i, 1) - ca[1]);
    const double db = std::hypot(r.embedding(i, 0) - cb[0], r.embedding(i, 1) - cb[1]);
    right += (da < db) == (i < half);
  }
  const double recovery = static_cast<double>(right) / (2.0 * half);
  return {worst <= 1e-4 && recovery >= 0.95,
          "max |H - log 30| " + fmt(worst, 3) + " at N=200; two-cluster recovery " + fmt(recovery) +
              "; KL increases " + std::to_string(r.kl_increases) + "/" +
              std::to_string(r.kl_trace.size())};
}

// ---------------------------------------------------------------------------

Verdict criterion9() {
  const MlpArch arch = MlpArch::swissroll_default();
  std::size_t wide_ok = 0, ordered = 0;
  std::string margins;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RingsOutcome wide = rings_experiment(arch, 0.25, seed, TrainConfig{}, Domain{}, 200);
    const RingsOutcome pinched = rings_experiment(arch, 0.03, seed, TrainConfig{}, Domain{}, 200);
    wide_ok += wide.test.accuracy >= 0.98;
    ordered += pinched.margin.margin < wide.margin.margin;
    std::cout << "  seed " << seed << ": wide test " << fmt(wide.test.accuracy) << " margin "
              << fmt(wide.margin.margin) << "; pinched test " << fmt(pinched.test.accuracy)
              << " margin " << fmt(pinched.margin.margin) << "\n";
  }
  return {wide_ok >= 8 && ordered == 10,
          "wide test >= 0.98 in " + std::to_string(wide_ok) + "/10 seeds; pinched margin < wide margin in " +
              std::to_string(ordered) + "/10 seeds"};
}

// ---------------------------------------------------------------------------
// CLI determinism: every subcommand runs twice in fresh directories with the
// same relative arguments, and every output byte must match.

int run_in(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" BASINSCOPE_CLI "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Verdict criterion10() {
  const fs::path root = fs::temp_directory_path() / "basinscope_acceptance_cli";
  fs::remove_all(root);
  const std::string fixture = BASINSCOPE_FIXTURES "/swissroll_good_seed0.bscp";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"train", "train --epochs 60 --checkpoint-every 5 --out run"},
      {"poison", "poison --start run/final.bscp --run run/manifest.txt --max-epochs 3 "
                 "--min-train-acc 0 --max-test-acc 1 --max-train-loss 1e9 --out bad.bscp"},
      {"slice-ray", "slice --ckpt '" + fixture + "' --mode ray --resolution 21 --out ray.csv"},
      {"slice-plane", "slice --ckpt '" + fixture + "' --mode plane --resolution 9 --out plane.csv"},
      {"volume", "volume --ckpt '" + fixture + "' --directions 40 --out basin.csv"},
      {"sweep", "sweep --betas 0,0.5 --epochs 30 --directions 10 --cutoff 1 --out sweep.csv"},
      {"embed", "embed --run run/manifest.txt --bad-per-iterate 1 --iterate-stride 4 "
                "--perplexity 3 --iterations 300 --max-epochs 2 --out embedding.csv"},
      {"boundary", "boundary --ckpt '" + fixture + "' --resolution 60 --out boundary"},
      {"rings", "rings --gap 0.25 --epochs 20 --resolution 60 --out rings"},
  };

  std::vector<std::string> failures;
  std::map<std::string, std::string> previous[2];
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / ("pass" + std::to_string(pass));
    fs::create_directories(dir);
    for (const auto& [name, args] : commands) {
      const int code = run_in(dir, args);
      if (code != 0) {
        failures.push_back(name + " exited " + std::to_string(code) + ": " +
                           read_file(dir / "stderr.txt"));
      }
      // Keep each command's console output beside its files.
      fs::rename(dir / "stdout.txt", dir / (name + ".stdout"));
      fs::rename(dir / "stderr.txt", dir / (name + ".stderr"));
    }
    previous[pass] = snapshot(dir);
  }
  std::size_t compared = 0;
  for (const auto& [file, bytes] : previous[0]) {
    auto it = previous[1].find(file);
    if (it == previous[1].end()) {
      failures.push_back(file + " missing on rerun");
    } else if (it->second != bytes) {
      failures.push_back(file + " differs on rerun");
    }
    ++compared;
  }
  if (previous[1].size() != previous[0].size()) failures.push_back("file sets differ on rerun");

  // A basin search capped below every radius must fail and say why.
  {
    const fs::path dir = root / "censored";
    fs::create_directories(dir);
    const int code = run_in(dir, "volume --ckpt '" + fixture + "' --directions 10 --max-radius 1e-3");
    const std::string err = read_file(dir / "stderr.txt");
    if (code == 0 || err.find("censored") == std::string::npos) {
      failures.push_back("fully censored volume run exited " + std::to_string(code) + " with '" + err + "'");
    }
  }

  // Checkpoint round trip and every corruption class.
  const Checkpoint cp = load_checkpoint(fixture);
  const auto bytes = encode_checkpoint(cp);
  if (!(decode_checkpoint(bytes) == cp) || encode_checkpoint(decode_checkpoint(bytes)) != bytes) {
    failures.push_back("checkpoint round trip is not exact");
  }
  const auto expect_fault = [&](std::vector<std::uint8_t> b, CheckpointFault want, const char* what) {
    try {
      decode_checkpoint(b);
      failures.push_back(std::string(what) + " was accepted");
    } catch (const CheckpointError& e) {
      if (e.fault() != want) failures.push_back(std::string(what) + " reported " + std::string(to_string(e.fault())));
    }
  };
  {
    auto b = bytes;
    b[1] = 'Z';
    expect_fault(b, CheckpointFault::bad_magic, "bad magic");
  }
  {
    auto b = bytes;
    b[4] = 7;
    expect_fault(b, CheckpointFault::version_mismatch, "version change");
  }
  {
    auto b = bytes;
    b.resize(b.size() - 9);
    expect_fault(b, CheckpointFault::truncated, "truncation");
  }
  {
    auto b = bytes;
    b.insert(b.end(), 8, 0);
    expect_fault(b, CheckpointFault::length_mismatch, "trailing bytes");
  }
  {
    auto b = bytes;
    b[b.size() / 2] ^= 0x40;
    expect_fault(b, CheckpointFault::crc_mismatch, "payload bit flip");
  }

  if (!failures.empty()) {
    std::string d;
    for (const auto& f : failures) d += f + "; ";
    return {false, d};
  }
  return {true, std::to_string(commands.size()) + " subcommand runs byte-identical across " +
                    std::to_string(compared) + " files; censored volume rejected; checkpoint round trip "
                    "and 5 corruption classes detected"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  if (chosen.empty()) {
    for (int i = 1; i <= 10; ++i) chosen.insert(i);
  }

  int failed = 0;
  std::vector<std::string> lines;
  for (int k : chosen) {
    if (k < 1 || k > 10) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    std::cout << "criterion " << k << " running\n" << std::flush;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[k - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const std::string line = "criterion " + std::to_string(k) + ": " + (v.pass ? "PASS" : "FAIL") +
                             " - " + v.detail + " [" + fmt(seconds_since(t0), 3) + " s]";
    std::cout << line << "\n" << std::flush;
    lines.push_back(line);
    failed += !v.pass;
  }
  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  return failed == 0 ? 0 : 1;
}
