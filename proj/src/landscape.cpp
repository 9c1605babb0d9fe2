// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "basinscope/error.hpp"
#include "basinscope/numerics.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/parallel.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

NetworkLoss::NetworkLoss(MlpArch arch, const Batch& data, std::size_t chunk)
    : arch_(std::move(arch)), size_(data.size()) {
  data.validate(arch_);
  if (chunk == 0) throw invalid_argument("chunk size must be >= 1");
  const std::size_t cols = data.inputs.cols();
  for (std::size_t begin = 0; begin < size_; begin += chunk) {
    const std::size_t end = std::min(size_, begin + chunk);
    Batch part{Matrix(end - begin, cols), {}};
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t c = 0; c < cols; ++c) part.inputs(s - begin, c) = data.inputs(s, c);
      part.labels.push_back(data.labels[s]);
    }
    chunks_.push_back(std::move(part));
  }
}

// Terms are added in sample order, exactly as cross_entropy() adds them, so
// the full sum matches it bit for bit.
double NetworkLoss::partial_sum(std::span<const double> point, double stop_at) const {
  const ParamVector params(std::vector<double>(point.begin(), point.end()));
  const double n = static_cast<double>(size_);
  double sum = 0.0;
  for (const Batch& part : chunks_) {
    const Matrix probs = forward(arch_, params, part.inputs);
    for (std::size_t s = 0; s < part.size(); ++s) sum += nll_term(probs.row(s), part.labels[s]);
    if (sum / n >= stop_at) break;
  }
  return sum;
}

double NetworkLoss::loss(std::span<const double> point) const {
  return partial_sum(point, HUGE_VAL) / static_cast<double>(size_);
}

bool NetworkLoss::at_least(std::span<const double> point, double threshold) const {
  return partial_sum(point, threshold) / static_cast<double>(size_) >= threshold;
}

QuadraticBowl::QuadraticBowl(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) throw invalid_argument("bowl needs at least one axis");
  for (double a : coefficients_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw invalid_argument("bowl coefficients must be positive");
    }
  }
}

double QuadraticBowl::loss(std::span<const double> point) const {
  if (point.size() != coefficients_.size()) {
    throw invalid_argument("point dimension does not match the bowl");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) sum += coefficients_[i] * point[i] * point[i];
  return sum;
}

double QuadraticBowl::log10_sublevel_volume(double cutoff) const {
  double log_v = log_unit_ball_volume(coefficients_.size());
  for (double a : coefficients_) log_v += 0.5 * std::log(cutoff / a);
  return log_v / std::numbers::ln10;
}

std::string_view to_string(Normalization normalization) {
  return normalization == Normalization::filter ? "filter" : "euclidean";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "euclidean") return Normalization::euclidean;
  if (name == "filter") return Normalization::filter;
  throw invalid_argument("unknown normalization '" + std::string(name) + "'");
}

namespace {

ParamVector gaussian_vector(std::size_t n, std::uint64_t base_seed,
                            std::uint64_t index) {
  Rng rng(derive_seed(base_seed, index));
  ParamVector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

void normalize_unit(ParamVector& v) {
  const double norm = l2_norm(v.span());
  for (double& x : v) x /= norm;
}

// Rescales a block (weights [w, w + len) plus one bias) of `d` to the norm
// of the same block of `ref`.
void match_block(ParamVector& d, const ParamVector& ref, std::size_t w,
                 std::size_t len, std::size_t bias, std::size_t layer,
                 std::size_t neuron) {
  double ref_sq = ref[bias] * ref[bias];
  double d_sq = d[bias] * d[bias];
  for (std::size_t k = w; k < w + len; ++k) {
    ref_sq += ref[k] * ref[k];
    d_sq += d[k] * d[k];
  }
  if (ref_sq == 0.0) {
    throw precondition_failed("filter normalization: reference block of layer " +
                              std::to_string(layer) + ", neuron " +
                              std::to_string(neuron) + " has zero norm");
  }
  const double scale = std::sqrt(ref_sq) / std::sqrt(d_sq);
  for (std::size_t k = w; k < w + len; ++k) d[k] *= scale;
  d[bias] *= scale;
}

BasinSample search_radius(const LossSurface& surface, const ParamVector& center,
                          const Direction& d, const RadiusSearch& search) {
  BasinSample sample;
  sample.direction_index = d.index;
  auto reached = [&](double t) {
    ++sample.evaluations;
    return surface.at_least(along(center, d, t).span(), search.cutoff);
  };

  double lo = 0.0;
  double hi = search.tol;
  for (;;) {
    if (hi >= search.max_radius) {
      hi = search.max_radius;
      if (!reached(hi)) {
        sample.radius = search.max_radius;
        sample.censored = true;
        return sample;
      }
      break;
    }
    if (reached(hi)) break;
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > search.tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  sample.radius = hi;
  return sample;
}

void require_inside(const LossSurface& surface, const ParamVector& center,
                    double cutoff) {
  const double at_center = surface.loss(center.span());
  if (!(at_center < cutoff)) {
    throw precondition_failed("loss at the center (" + std::to_string(at_center) +
                              ") is not below the basin cutoff (" +
                              std::to_string(cutoff) + ")");
  }
}

}  // namespace

Direction sample_direction(const ParamVector& reference, const MlpArch& arch,
                           std::uint64_t base_seed, std::uint64_t index,
                           Normalization normalization) {
  if (reference.size() != arch.param_count()) {
    throw invalid_argument("reference does not match the architecture");
  }
  Direction dir{gaussian_vector(reference.size(), base_seed, index), normalization,
                base_seed, index};
  if (normalization == Normalization::euclidean) {
    normalize_unit(dir.values);
    return dir;
  }
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    const std::size_t fi = arch.fan_in(l);
    for (std::size_t o = 0; o < arch.fan_out(l); ++o) {
      match_block(dir.values, reference, arch.weight_offset(l) + o * fi, fi,
                  arch.bias_offset(l) + o, l, o);
    }
  }
  return dir;
}

Direction sample_direction(std::size_t dimension, std::uint64_t base_seed,
                           std::uint64_t index) {
  if (dimension == 0) throw invalid_argument("direction dimension must be >= 1");
  Direction dir{gaussian_vector(dimension, base_seed, index), Normalization::euclidean,
                base_seed, index};
  normalize_unit(dir.values);
  return dir;
}

ParamVector along(const ParamVector& center, const Direction& d, double t) {
  if (center.size() != d.values.size()) {
    throw invalid_argument("direction and center differ in dimension");
  }
  ParamVector p(center.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = center[i] + t * d.values[i];
  return p;
}

std::vector<double> ray_profile(const LossSurface& surface,
                                const ParamVector& center, const Direction& d,
                                std::span<const double> t_values) {
  check_finite(t_values, "ray coordinate");
  std::vector<double> out;
  out.reserve(t_values.size());
  for (double t : t_values) {
    out.push_back(t == 0.0 ? surface.loss(center.span())
                           : surface.loss(along(center, d, t).span()));
  }
  return out;
}

void RadiusSearch::validate() const {
  if (!std::isfinite(cutoff)) throw invalid_argument("cutoff must be finite");
  if (!(tol > 0.0)) throw invalid_argument("radius tolerance must be positive");
  if (!(max_radius >= tol) || !std::isfinite(max_radius)) {
    throw invalid_argument("max radius must be finite and at least the tolerance");
  }
}

BasinSample basin_radius(const LossSurface& surface, const ParamVector& center,
                         const Direction& d, const RadiusSearch& search) {
  search.validate();
  require_inside(surface, center, search.cutoff);
  return search_radius(surface, center, d, search);
}

std::vector<BasinSample> sample_basin(const LossSurface& surface,
                                      const ParamVector& center,
                                      const MlpArch* arch,
                                      const DirectionSet& directions,
                                      const RadiusSearch& search,
                                      std::size_t workers) {
  search.validate();
  if (arch == nullptr && directions.normalization == Normalization::filter) {
    throw invalid_argument("filter-normalized directions need an architecture");
  }
  require_inside(surface, center, search.cutoff);

  std::vector<BasinSample> samples(directions.count);
  parallel_for(directions.count, workers, [&](std::size_t i) {
    const Direction d =
        arch ? sample_direction(center, *arch, directions.base_seed, i,
                                directions.normalization)
             : sample_direction(center.size(), directions.base_seed, i);
    samples[i] = search_radius(surface, center, d, search);
  });
  return samples;
}

double Axis::at(std::size_t i) const {
  if (resolution <= 1) return lo + 0.5 * (hi - lo);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

Matrix plane_slice(const LossSurface& surface, const ParamVector& center,
                   const Direction& d1, const Direction& d2, const Axis& t_axis,
                   const Axis& s_axis, std::size_t workers) {
  if (d1.base_seed == d2.base_seed && d1.index == d2.index) {
    throw invalid_argument("plane slice needs two directions with distinct indices");
  }
  if (t_axis.resolution == 0 || s_axis.resolution == 0) {
    throw invalid_argument("slice resolution must be >= 1");
  }
  if (d1.values.size() != center.size() || d2.values.size() != center.size()) {
    throw invalid_argument("direction and center differ in dimension");
  }
  Matrix out(t_axis.resolution, s_axis.resolution);
  parallel_for(t_axis.resolution, workers, [&](std::size_t i) {
    const double t = t_axis.at(i);
    ParamVector p(center.size());
    for (std::size_t j = 0; j < s_axis.resolution; ++j) {
      const double s = s_axis.at(j);
      for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = center[k] + t * d1.values[k] + s * d2.values[k];
      }
      out(i, j) = surface.loss(p.span());
    }
  });
  return out;
}

VolumeEstimate log_volume(std::span<const BasinSample> samples, std::size_t n) {
  if (n == 0) throw invalid_argument("volume dimension must be >= 1");
  VolumeEstimate est;
  est.n = n;
  est.num_directions = samples.size();

  std::vector<double> log_terms;
  log_terms.reserve(samples.size());
  double sum = 0.0;
  est.min_radius = HUGE_VAL;
  est.max_radius = -HUGE_VAL;
  for (const BasinSample& s : samples) {
    if (s.censored) {
      ++est.num_censored;
      continue;
    }
    if (!(s.radius > 0.0)) {
      throw precondition_failed("direction " + std::to_string(s.direction_index) +
                                " has zero basin radius");
    }
    log_terms.push_back(static_cast<double>(n) * std::log(s.radius));
    sum += s.radius;
    est.min_radius = std::min(est.min_radius, s.radius);
    est.max_radius = std::max(est.max_radius, s.radius);
  }
  if (log_terms.empty()) {
    throw precondition_failed("all " + std::to_string(samples.size()) +
                              " directions are censored; no basin boundary found");
  }
  if (log_terms.size() < 2) {
    throw precondition_failed("volume needs at least two uncensored directions");
  }
  const double m = static_cast<double>(log_terms.size());
  est.mean_radius = sum / m;
  const double log_omega = log_unit_ball_volume(n);
  est.log10_omega_n = log_omega / std::numbers::ln10;
  est.log10_volume =
      (log_omega + log_sum_exp(log_terms) - std::log(m)) / std::numbers::ln10;
  return est;
}

SharpnessSummary sharpness_summary(std::span<const BasinSample> samples) {
  if (samples.empty()) throw invalid_argument("sharpness summary of no samples");
  SharpnessSummary out;
  std::size_t used = 0;
  double sum = 0.0;
  out.min_radius = HUGE_VAL;
  out.max_radius = -HUGE_VAL;
  for (const BasinSample& s : samples) {
    if (s.censored) continue;
    ++used;
    sum += s.radius;
    out.min_radius = std::min(out.min_radius, s.radius);
    out.max_radius = std::max(out.max_radius, s.radius);
  }
  out.censoring_rate = static_cast<double>(samples.size() - used) /
                       static_cast<double>(samples.size());
  if (used == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.mean_radius = out.min_radius = out.max_radius = nan;
  } else {
    out.mean_radius = sum / static_cast<double>(used);
  }
  return out;
}

}  // namespace basinscope
