// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "basinscope/error.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw invalid_argument("unknown activation '" + std::string(name) + "'");
}

MlpArch::MlpArch(std::vector<std::size_t> widths, Activation activation)
    : widths_(std::move(widths)), activation_(activation) {
  if (widths_.size() < 2) {
    throw invalid_argument("an MLP needs at least two layer widths");
  }
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (widths_[i] == 0) {
      throw invalid_argument("layer width " + std::to_string(i) + " is zero");
    }
  }
  if (activation_ != Activation::tanh && activation_ != Activation::relu) {
    throw invalid_argument("unknown activation id");
  }
  offsets_.reserve(widths_.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(offset);
    offset += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  offsets_.push_back(offset);
}

MlpArch MlpArch::swissroll_default() {
  return MlpArch({2, 16, 16, 16, 16, 16, 2}, Activation::tanh);
}

std::string MlpArch::describe() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) out << ',';
    out << widths_[i];
  }
  out << ' ' << to_string(activation_);
  return out.str();
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double distance(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) {
    throw invalid_argument("distance between vectors of different length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

void check_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw numeric_failure(std::string(what) + " entry " + std::to_string(i) +
                            " is not finite");
    }
  }
}

void check_params(const MlpArch& arch, const ParamVector& params) {
  if (params.size() != arch.param_count()) {
    throw invalid_argument("parameter vector has " +
                           std::to_string(params.size()) + " entries, arch " +
                           arch.describe() + " needs " +
                           std::to_string(arch.param_count()));
  }
  check_finite(params.span(), "parameter");
}

void Batch::validate(const MlpArch& arch) const {
  if (labels.empty()) throw precondition_failed("batch is empty");
  if (inputs.rows() != labels.size()) {
    throw invalid_argument("batch has " + std::to_string(inputs.rows()) +
                           " inputs but " + std::to_string(labels.size()) +
                           " labels");
  }
  if (inputs.cols() != arch.input_dim()) {
    throw invalid_argument("batch inputs have " + std::to_string(inputs.cols()) +
                           " columns, arch expects " +
                           std::to_string(arch.input_dim()));
  }
  const int classes = static_cast<int>(arch.class_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw invalid_argument("label " + std::to_string(i) + " out of range");
    }
  }
}

ParamVector init_params(const MlpArch& arch, std::uint64_t seed) {
  ParamVector params(arch.param_count(), 0.0);
  Rng rng(seed);
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    const double fan_sum = static_cast<double>(arch.fan_in(l) + arch.fan_out(l));
    const double limit = std::sqrt(6.0 / fan_sum);
    const std::size_t begin = arch.weight_offset(l);
    const std::size_t end = arch.bias_offset(l);
    for (std::size_t i = begin; i < end; ++i) params[i] = rng.uniform(-limit, limit);
  }
  return params;
}

namespace {

// Activations are stored feature-major (width x batch) so the inner loops run
// over samples. Each output is still accumulated over its inputs in index
// order, which makes a sample's result independent of the batch it is in.
struct Trace {
  std::size_t batch = 0;
  std::vector<std::vector<double>> acts;  // acts[0] = inputs, acts[L] = logits
  Matrix probs;                           // batch x classes, row-major
};

void dense_layer(const MlpArch& arch, const ParamVector& params, std::size_t l,
                 std::span<const double> in, std::vector<double>& out,
                 std::size_t batch) {
  const std::size_t fi = arch.fan_in(l);
  const std::size_t fo = arch.fan_out(l);
  const double* w = params.data() + arch.weight_offset(l);
  const double* b = params.data() + arch.bias_offset(l);
  out.assign(fo * batch, 0.0);
  for (std::size_t o = 0; o < fo; ++o) {
    double* z = out.data() + o * batch;
    for (std::size_t i = 0; i < fi; ++i) {
      const double wi = w[o * fi + i];
      const double* a = in.data() + i * batch;
      for (std::size_t s = 0; s < batch; ++s) z[s] += wi * a[s];
    }
    const double bo = b[o];
    for (std::size_t s = 0; s < batch; ++s) z[s] += bo;
  }
}

void activate(Activation act, std::vector<double>& z) {
  switch (act) {
    case Activation::tanh:
      for (double& v : z) v = std::tanh(v);
      break;
    case Activation::relu:
      for (double& v : z) v = v > 0.0 ? v : 0.0;
      break;
  }
}

Trace run_forward(const MlpArch& arch, const ParamVector& params,
                  const Matrix& inputs) {
  check_params(arch, params);
  if (inputs.cols() != arch.input_dim()) {
    throw invalid_argument("inputs have " + std::to_string(inputs.cols()) +
                           " columns, arch expects " +
                           std::to_string(arch.input_dim()));
  }
  check_finite(inputs.flat(), "input");

  Trace trace;
  const std::size_t batch = inputs.rows();
  trace.batch = batch;
  trace.acts.resize(arch.layer_count() + 1);

  auto& x = trace.acts[0];
  x.resize(inputs.cols() * batch);
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t f = 0; f < inputs.cols(); ++f) x[f * batch + s] = inputs(s, f);
  }

  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    dense_layer(arch, params, l, trace.acts[l], trace.acts[l + 1], batch);
    if (l + 1 < arch.layer_count()) activate(arch.activation(), trace.acts[l + 1]);
  }

  const std::size_t classes = arch.class_count();
  const auto& logits = trace.acts.back();
  trace.probs = Matrix(batch, classes);
  std::vector<double> e(classes);
  for (std::size_t s = 0; s < batch; ++s) {
    double m = logits[s];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, logits[c * batch + s]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      e[c] = std::exp(logits[c * batch + s] - m);
      sum += e[c];
    }
    for (std::size_t c = 0; c < classes; ++c) trace.probs(s, c) = e[c] / sum;
  }
  return trace;
}

// Adds the gradient of `weight * sum_s loss_s` to `grad`, where the logit
// sensitivities of each sample are given in `delta` (classes x batch).
void backward(const MlpArch& arch, const ParamVector& params, const Trace& trace,
              std::vector<double> delta, ParamVector& grad) {
  const std::size_t batch = trace.batch;
  for (std::size_t l = arch.layer_count(); l-- > 0;) {
    const std::size_t fi = arch.fan_in(l);
    const std::size_t fo = arch.fan_out(l);
    const auto& a = trace.acts[l];
    double* gw = grad.data() + arch.weight_offset(l);
    double* gb = grad.data() + arch.bias_offset(l);
    for (std::size_t o = 0; o < fo; ++o) {
      const double* d = delta.data() + o * batch;
      for (std::size_t i = 0; i < fi; ++i) {
        const double* ai = a.data() + i * batch;
        double acc = 0.0;
        for (std::size_t s = 0; s < batch; ++s) acc += d[s] * ai[s];
        gw[o * fi + i] += acc;
      }
      double acc = 0.0;
      for (std::size_t s = 0; s < batch; ++s) acc += d[s];
      gb[o] += acc;
    }
    if (l == 0) break;

    const double* w = params.data() + arch.weight_offset(l);
    std::vector<double> prev(fi * batch, 0.0);
    for (std::size_t o = 0; o < fo; ++o) {
      const double* d = delta.data() + o * batch;
      for (std::size_t i = 0; i < fi; ++i) {
        const double wi = w[o * fi + i];
        double* p = prev.data() + i * batch;
        for (std::size_t s = 0; s < batch; ++s) p[s] += wi * d[s];
      }
    }
    switch (arch.activation()) {
      case Activation::tanh:
        for (std::size_t k = 0; k < prev.size(); ++k) prev[k] *= 1.0 - a[k] * a[k];
        break;
      case Activation::relu:
        for (std::size_t k = 0; k < prev.size(); ++k) {
          if (!(a[k] > 0.0)) prev[k] = 0.0;
        }
        break;
    }
    delta = std::move(prev);
  }
}

// d/dz of -log p_y is p - onehot(y).
std::vector<double> nll_delta(const Trace& trace, std::span<const int> labels,
                              double weight) {
  const std::size_t batch = trace.batch;
  const std::size_t classes = trace.probs.cols();
  std::vector<double> delta(classes * batch);
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t c = 0; c < classes; ++c) {
      const double target = static_cast<int>(c) == labels[s] ? 1.0 : 0.0;
      delta[c * batch + s] = weight * (trace.probs(s, c) - target);
    }
  }
  return delta;
}

// d/dz of -log(1 - p_y) is p - r, where r is the softmax over the classes
// other than y (r_y = 0). r is formed from the logits so it stays finite
// when 1 - p_y underflows.
std::vector<double> reverse_nll_delta(const Trace& trace,
                                      std::span<const int> labels, double weight) {
  const std::size_t batch = trace.batch;
  const std::size_t classes = trace.probs.cols();
  const auto& logits = trace.acts.back();
  std::vector<double> delta(classes * batch);
  std::vector<double> r(classes);
  for (std::size_t s = 0; s < batch; ++s) {
    const int y = labels[s];
    if (classes == 1) {
      delta[s] = 0.0;
      continue;
    }
    double m = -HUGE_VAL;
    for (std::size_t c = 0; c < classes; ++c) {
      if (static_cast<int>(c) != y) m = std::max(m, logits[c * batch + s]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      r[c] = static_cast<int>(c) == y ? 0.0 : std::exp(logits[c * batch + s] - m);
      sum += r[c];
    }
    for (std::size_t c = 0; c < classes; ++c) {
      delta[c * batch + s] = weight * (trace.probs(s, c) - r[c] / sum);
    }
  }
  return delta;
}

}  // namespace

Matrix forward(const MlpArch& arch, const ParamVector& params,
               const Matrix& inputs) {
  return run_forward(arch, params, inputs).probs;
}

LossGrad loss_grad(const MlpArch& arch, const ParamVector& params,
                   const Batch& train, const ObjectiveSpec& objective) {
  return loss_grad(arch, params, train, Batch{}, objective);
}

LossGrad loss_grad(const MlpArch& arch, const ParamVector& params,
                   const Batch& train, const Batch& poison,
                   const ObjectiveSpec& objective) {
  objective.validate();
  const double beta = objective.poison_weight();

  LossGrad out;
  out.grad = ParamVector(arch.param_count(), 0.0);
  double clean_term = 0.0;
  double poison_term = 0.0;

  if (beta < 1.0) {
    train.validate(arch);
    const Trace trace = run_forward(arch, params, train.inputs);
    const double n = static_cast<double>(train.size());
    clean_term = sum_nll(trace.probs, train.labels) / n;
    backward(arch, params, trace, nll_delta(trace, train.labels, (1.0 - beta) / n),
             out.grad);
  }
  if (beta > 0.0) {
    poison.validate(arch);
    const Trace trace = run_forward(arch, params, poison.inputs);
    const double n = static_cast<double>(poison.size());
    poison_term = sum_reverse_nll(trace.probs, poison.labels) / n;
    backward(arch, params, trace,
             reverse_nll_delta(trace, poison.labels, beta / n), out.grad);
  }
  out.loss = objective.kind == ObjectiveKind::clean
                 ? clean_term
                 : combine_poisoned(clean_term, poison_term, beta);
  return out;
}

}  // namespace basinscope
