// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/experiments.hpp"

#include <cmath>
#include <limits>

#include "basinscope/io.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/parallel.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

TrainingData without_poison(TrainingData data) {
  data.poison.reset();
  return data;
}

DatasetSpec swissroll_dataset(std::uint64_t seed) {
  DatasetSpec spec;
  spec.seed = seed;
  return spec;
}

BasinReport measure_basin(const MlpArch& arch, const ParamVector& center,
                          const LabeledDataset& train, const DirectionSet& directions,
                          const RadiusSearch& search, std::size_t workers) {
  const NetworkLoss surface(arch, train.to_batch());
  BasinReport report;
  report.samples = sample_basin(surface, center, &arch, directions, search, workers);
  report.sharpness = sharpness_summary(report.samples);
  try {
    report.volume = log_volume(report.samples, arch.param_count());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::precondition) throw;
    report.volume_error = e.what();
  }
  return report;
}

TrainRun train_at_beta(const MlpArch& arch, const TrainingData& data,
                       TrainConfig config, double beta, const ParamVector& init) {
  if (beta == 0.0) {
    config.objective = ObjectiveSpec::clean();
    return train(arch, without_poison(data), config, init);
  }
  config.objective = ObjectiveSpec::poisoned(beta);
  return train(arch, data, config, init);
}

std::vector<SweepRow> beta_sweep(const MlpArch& arch, const TrainingData& data,
                                 const TrainConfig& config,
                                 const std::vector<double>& betas,
                                 const DirectionSet& directions,
                                 const RadiusSearch& search, std::size_t workers) {
  if (betas.empty()) throw invalid_argument("sweep needs at least one beta");
  const ParamVector init = init_params(arch, config.seed);
  std::vector<TrainRun> runs(betas.size());
  parallel_for(betas.size(), workers, [&](std::size_t i) {
    runs[i] = train_at_beta(arch, data, config, betas[i], init);
  });

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const EpochMetrics& last = runs[i].metrics.back();
    SweepRow row{betas[i], last.train_acc, last.test_acc, last.train_loss,
                 nan, nan, 0, ""};
    if (!(last.train_loss < search.cutoff)) {
      row.note = "endpoint train loss " + format_double(last.train_loss) +
                 " is not below the cutoff";
    } else {
      const BasinReport basin =
          measure_basin(arch, runs[i].final_params, data.train, directions, search, workers);
      row.mean_radius = basin.sharpness.mean_radius;
      row.num_censored = static_cast<std::size_t>(
          std::lround(basin.sharpness.censoring_rate * static_cast<double>(basin.samples.size())));
      if (basin.volume) {
        row.log10_volume = basin.volume->log10_volume;
      } else {
        row.note = basin.volume_error;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  CsvWriter csv({"beta", "test_acc", "mean_radius", "log10_volume"});
  for (const SweepRow& r : rows) {
    csv.cell(r.beta).cell(r.test_acc).cell(r.mean_radius).cell(r.log10_volume);
    csv.end_row();
  }
  return csv.text();
}

RingsOutcome rings_experiment(const MlpArch& arch, double gap, std::uint64_t seed,
                              const TrainConfig& config, const Domain& domain,
                              std::size_t resolution) {
  DatasetSpec spec;
  spec.generator = RingsSpec::with_gap(gap);
  spec.seed = seed;
  const TrainingData data = without_poison(build_data(spec));
  TrainConfig clean = config;
  clean.objective = ObjectiveSpec::clean();
  clean.seed = seed;

  RingsOutcome out;
  out.spec = std::get<RingsSpec>(spec.generator);
  out.run = train(arch, data, clean);
  out.train = evaluate(arch, out.run.final_params, data.train);
  out.test = evaluate(arch, out.run.final_params, data.test);
  out.grid = decision_boundary(arch, out.run.final_params, domain, resolution, resolution);
  const std::vector<int> predicted = predict(arch, out.run.final_params, data.train.points);
  out.margin = margin_estimate(out.grid, data.train.points, predicted);
  return out;
}

EmbeddingOutcome embed_trajectory(const MlpArch& arch, const TrainingData& data,
                                  const TrainRun& run, const EmbeddingPlan& plan,
                                  std::uint64_t seed, std::size_t workers) {
  if (run.checkpoints.empty()) throw invalid_argument("run has no checkpoints");
  if (plan.iterate_stride < 1) throw invalid_argument("iterate stride must be >= 1");

  EmbeddingOutcome out;
  for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
    const bool last = i + 1 == run.checkpoints.size();
    out.rows.push_back({last ? RowTag::final : RowTag::sgd_iterate,
                        run.checkpoints[i].epoch, run.checkpoints[i].params});
  }

  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < run.checkpoints.size(); i += plan.iterate_stride) {
    starts.push_back(i);
  }
  const std::size_t jobs = starts.size() * plan.bad_per_iterate;
  std::vector<std::optional<BadMinimum>> found(jobs);
  parallel_for(jobs, workers, [&](std::size_t j) {
    const std::size_t it = starts[j / plan.bad_per_iterate];
    const std::size_t k = j % plan.bad_per_iterate;
    const std::uint64_t search_seed =
        derive_seed(derive_seed(seed, run.checkpoints[it].epoch), k);
    try {
      found[j] = find_bad_minimum(arch, run.checkpoints[it].params, data, plan.search,
                                  search_seed);
    } catch (const NotFoundError&) {
    }
  });
  out.searches = jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    if (!found[j]) {
      ++out.searches_failed;
      continue;
    }
    const std::size_t it = starts[j / plan.bad_per_iterate];
    out.rows.push_back({RowTag::bad_minimum, run.checkpoints[it].epoch, found[j]->params});
  }

  const PcaResult pca = pca_project(stack_rows(out.rows), plan.pca_components);
  out.explained = pca.explained;
  TsneConfig tsne = plan.tsne;
  tsne.seed = derive_seed(seed, 0x7453);
  out.tsne = tsne_embed(pca.projected, tsne);
  out.coordinates = out.tsne.embedding;
  return out;
}

std::string embedding_csv(const EmbeddingOutcome& outcome) {
  CsvWriter csv({"tag", "source_epoch", "x", "y"});
  for (std::size_t i = 0; i < outcome.rows.size(); ++i) {
    csv.cell(to_string(outcome.rows[i].tag))
        .cell(static_cast<std::uint64_t>(outcome.rows[i].source_epoch))
        .cell(outcome.coordinates(i, 0))
        .cell(outcome.coordinates.cols() > 1 ? outcome.coordinates(i, 1) : 0.0);
    csv.end_row();
  }
  return csv.text();
}

}  // namespace basinscope
