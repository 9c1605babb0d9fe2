// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace basinscope {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adam: return "adam";
  }
  return "?";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "momentum") return OptimizerKind::momentum;
  if (name == "adam") return OptimizerKind::adam;
  throw invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  objective.validate();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw invalid_argument("learning rate must be positive");
  }
  if (!(momentum_coef >= 0.0 && momentum_coef < 1.0)) {
    throw invalid_argument("momentum coefficient must lie in [0, 1)");
  }
  if (batch_size == 0) throw invalid_argument("batch size must be >= 1");
  if (epochs == 0) throw invalid_argument("epochs must be >= 1");
  if (checkpoint_every == 0) throw invalid_argument("checkpoint_every must be >= 1");
}

OptimizerState OptimizerState::create(OptimizerKind kind, std::size_t size) {
  OptimizerState state;
  state.kind = kind;
  if (kind != OptimizerKind::sgd) state.first.assign(size, 0.0);
  if (kind == OptimizerKind::adam) state.second.assign(size, 0.0);
  return state;
}

namespace {

[[noreturn]] void non_finite_update(std::size_t i) {
  throw numeric_failure("non-finite parameter update at coordinate " +
                        std::to_string(i));
}

}  // namespace

void step(OptimizerState& state, ParamVector& params, const ParamVector& grad,
          const TrainConfig& config) {
  if (grad.size() != params.size()) {
    throw invalid_argument("gradient and parameters differ in length");
  }
  const double lr = config.learning_rate;
  const std::size_t n = params.size();
  ++state.steps;
  switch (state.kind) {
    case OptimizerKind::sgd:
      for (std::size_t i = 0; i < n; ++i) {
        const double next = params[i] - lr * grad[i];
        if (!std::isfinite(next)) non_finite_update(i);
        params[i] = next;
      }
      break;
    case OptimizerKind::momentum: {
      const double mu = config.momentum_coef;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = mu * state.first[i] - lr * grad[i];
        const double next = params[i] + v;
        if (!std::isfinite(next)) non_finite_update(i);
        state.first[i] = v;
        params[i] = next;
      }
      break;
    }
    case OptimizerKind::adam: {
      const double t = static_cast<double>(state.steps);
      const double c1 = 1.0 - std::pow(kAdamBeta1, t);
      const double c2 = 1.0 - std::pow(kAdamBeta2, t);
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        const double m = kAdamBeta1 * state.first[i] + (1.0 - kAdamBeta1) * g;
        const double v = kAdamBeta2 * state.second[i] + (1.0 - kAdamBeta2) * g * g;
        const double next = params[i] - lr * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
        if (!std::isfinite(next)) non_finite_update(i);
        state.first[i] = m;
        state.second[i] = v;
        params[i] = next;
      }
      break;
    }
  }
}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& what,
                                 TrainRun partial)
    : Error(ErrorKind::numeric,
            "training diverged at epoch " + std::to_string(epoch) + ": " + what),
      epoch_(epoch),
      partial_(std::move(partial)) {}

Evaluation evaluate(const MlpArch& arch, const ParamVector& params,
                    const LabeledDataset& ds) {
  const Batch batch = ds.to_batch();
  batch.validate(arch);
  const Matrix probs = forward(arch, params, batch.inputs);
  std::size_t correct = 0;
  for (std::size_t s = 0; s < probs.rows(); ++s) {
    if (argmax_class(probs.row(s)) == batch.labels[s]) ++correct;
  }
  const double n = static_cast<double>(batch.size());
  return {sum_nll(probs, batch.labels) / n, static_cast<double>(correct) / n};
}

Trainer::Trainer(const MlpArch& arch, const TrainingData& data, TrainConfig config,
                 ParamVector initial)
    : arch_(arch),
      data_(data),
      config_(config),
      params_(std::move(initial)),
      state_(OptimizerState::create(config.optimizer, arch.param_count())),
      rng_(derive_seed(config.seed, 0x7472616eULL)) {
  config_.validate();
  check_params(arch_, params_);
  data_.train.validate();
  data_.test.validate();
  if (config_.batch_size > data_.train.size()) {
    throw invalid_argument("batch size exceeds the train set size");
  }

  const bool poisoned = config_.objective.kind == ObjectiveKind::poisoned;
  if (poisoned != data_.poison.has_value()) {
    throw invalid_argument(poisoned ? "poisoned objective needs a poison set"
                                    : "poison set given for a clean objective");
  }
  const double beta = config_.objective.poison_weight();
  if (beta > 0.0) {
    const auto b = static_cast<double>(config_.batch_size);
    auto n_p = static_cast<std::size_t>(std::llround(beta * b));
    n_p = std::clamp<std::size_t>(n_p, 1, config_.batch_size);
    if (beta < 1.0 && n_p == config_.batch_size && config_.batch_size > 1) --n_p;
    poison_per_batch_ = n_p;
    data_.poison->validate();
  }

  clean_order_.resize(data_.train.size());
  std::iota(clean_order_.begin(), clean_order_.end(), std::size_t{0});
  clean_cursor_ = clean_order_.size();  // forces a shuffle on first draw
  if (data_.poison) {
    poison_order_.resize(data_.poison->size());
    std::iota(poison_order_.begin(), poison_order_.end(), std::size_t{0});
    poison_cursor_ = poison_order_.size();
  }
}

std::size_t Trainer::next_index(std::vector<std::size_t>& order,
                                std::size_t& cursor) {
  if (cursor == order.size()) {
    shuffle(order, rng_);
    cursor = 0;
  }
  return order[cursor++];
}

Batch Trainer::gather(const LabeledDataset& ds,
                      std::span<const std::size_t> idx) const {
  Batch batch{Matrix(idx.size(), ds.points.cols()), std::vector<int>(idx.size())};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t c = 0; c < ds.points.cols(); ++c) {
      batch.inputs(k, c) = ds.points(idx[k], c);
    }
    batch.labels[k] = ds.labels[idx[k]];
  }
  return batch;
}

EpochMetrics Trainer::run_epoch() {
  const std::size_t n_train = data_.train.size();
  const std::size_t b = config_.batch_size;
  const std::size_t steps = (n_train + b - 1) / b;
  const double beta = config_.objective.poison_weight();

  if (beta == 0.0) {
    // One shuffled pass; the last batch may be short.
    shuffle(clean_order_, rng_);
    for (std::size_t k = 0; k < steps; ++k) {
      const std::size_t begin = k * b;
      const std::size_t end = std::min(n_train, begin + b);
      const Batch batch = gather(
          data_.train, std::span<const std::size_t>(clean_order_).subspan(begin, end - begin));
      LossGrad lg = data_.poison
                        ? loss_grad(arch_, params_, batch, Batch{}, config_.objective)
                        : loss_grad(arch_, params_, batch, config_.objective);
      if (!std::isfinite(lg.loss)) throw numeric_failure("minibatch loss is not finite");
      step(state_, params_, lg.grad, config_);
    }
  } else {
    const std::size_t n_p = poison_per_batch_;
    const std::size_t n_c = b - n_p;
    std::vector<std::size_t> clean_idx(n_c), poison_idx(n_p);
    for (std::size_t k = 0; k < steps; ++k) {
      for (auto& i : clean_idx) i = next_index(clean_order_, clean_cursor_);
      for (auto& i : poison_idx) i = next_index(poison_order_, poison_cursor_);
      const Batch clean = gather(data_.train, clean_idx);
      const Batch poison = gather(*data_.poison, poison_idx);
      LossGrad lg = loss_grad(arch_, params_, clean, poison, config_.objective);
      if (!std::isfinite(lg.loss)) throw numeric_failure("minibatch loss is not finite");
      step(state_, params_, lg.grad, config_);
    }
  }

  ++epoch_;
  const Evaluation tr = evaluate(arch_, params_, data_.train);
  const Evaluation te = evaluate(arch_, params_, data_.test);
  if (!std::isfinite(tr.loss)) throw numeric_failure("train loss is not finite");
  return {epoch_, tr.loss, tr.accuracy, te.accuracy};
}

TrainRun train(const MlpArch& arch, const TrainingData& data,
               const TrainConfig& config, std::optional<ParamVector> initial) {
  config.validate();
  TrainRun run;
  run.config = config;
  run.initial = initial ? std::move(*initial) : init_params(arch, config.seed);
  run.final_params = run.initial;

  Trainer trainer(arch, data, config, run.initial);
  run.metrics.reserve(config.epochs);
  for (std::size_t e = 1; e <= config.epochs; ++e) {
    try {
      run.metrics.push_back(trainer.run_epoch());
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::numeric) throw;
      throw DivergenceError(e, err.what(), std::move(run));
    }
    run.final_params = trainer.params();
    if (e % config.checkpoint_every == 0 || e == config.epochs) {
      run.checkpoints.push_back({e, trainer.params()});
    }
  }
  return run;
}

namespace {

double shortfall(const EpochMetrics& m, const StopSpec& stop) {
  return std::max(0.0, stop.min_train_acc - m.train_acc) +
         std::max(0.0, m.test_acc - stop.max_test_acc);
}

}  // namespace

BadMinimum find_bad_minimum(const MlpArch& arch, const ParamVector& start,
                            const TrainingData& data, const PoisonSearch& search,
                            std::uint64_t seed) {
  if (!data.poison) throw invalid_argument("poison search needs a poison set");
  if (search.stop.max_epochs == 0) throw invalid_argument("epoch budget must be >= 1");

  TrainConfig config;
  config.objective = ObjectiveSpec::poisoned(search.beta);
  config.optimizer = search.optimizer;
  config.learning_rate = search.learning_rate;
  config.momentum_coef = search.momentum_coef;
  config.batch_size = search.batch_size;
  config.epochs = search.stop.max_epochs;
  config.seed = seed;

  Trainer trainer(arch, data, config, start);
  EpochMetrics best;
  double best_gap = HUGE_VAL;
  for (std::size_t e = 1; e <= search.stop.max_epochs; ++e) {
    const EpochMetrics m = trainer.run_epoch();
    const bool hit = m.train_acc >= search.stop.min_train_acc &&
                     m.test_acc <= search.stop.max_test_acc &&
                     m.train_loss <= search.stop.max_train_loss;
    if (hit) {
      return {trainer.params(), m, distance(start, trainer.params())};
    }
    const double gap = shortfall(m, search.stop);
    if (gap < best_gap) {
      best_gap = gap;
      best = m;
    }
  }
  throw NotFoundError(
      "no bad minimum within " + std::to_string(search.stop.max_epochs) +
          " epochs (best: epoch " + std::to_string(best.epoch) + ", train acc " +
          std::to_string(best.train_acc) + ", test acc " +
          std::to_string(best.test_acc) + ")",
      best);
}

}  // namespace basinscope
