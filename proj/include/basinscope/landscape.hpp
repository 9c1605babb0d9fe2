// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "basinscope/mlp.hpp"

namespace basinscope {

/// Anything that maps a parameter vector to a nonnegative loss. The
/// geometry routines below only see this interface, so analytic surfaces
/// with closed-form basins can stand in for a network.
class LossSurface {
 public:
  virtual ~LossSurface() = default;

  virtual std::size_t dimension() const = 0;
  virtual double loss(std::span<const double> point) const = 0;

  /// Same answer as loss(point) >= threshold. Implementations may stop
  /// evaluating once the answer is known.
  virtual bool at_least(std::span<const double> point, double threshold) const {
    return loss(point) >= threshold;
  }
};

/// Clean train cross-entropy of a network, evaluated in fixed-size chunks
/// so at_least() can stop once the running sum crosses the threshold.
class NetworkLoss final : public LossSurface {
 public:
  NetworkLoss(MlpArch arch, const Batch& data, std::size_t chunk = 50);

  std::size_t dimension() const override { return arch_.param_count(); }
  double loss(std::span<const double> point) const override;
  bool at_least(std::span<const double> point, double threshold) const override;

  const MlpArch& arch() const { return arch_; }

 private:
  double partial_sum(std::span<const double> point, double stop_at) const;

  MlpArch arch_;
  std::vector<Batch> chunks_;
  std::size_t size_ = 0;
};

/// L(x) = sum_i a_i x_i^2 with every a_i > 0.
class QuadraticBowl final : public LossSurface {
 public:
  explicit QuadraticBowl(std::vector<double> coefficients);
  static QuadraticBowl isotropic(std::size_t n) {
    return QuadraticBowl(std::vector<double>(n, 1.0));
  }

  std::size_t dimension() const override { return coefficients_.size(); }
  double loss(std::span<const double> point) const override;

  /// log10 volume of {L < cutoff}: an ellipsoid with semi-axes sqrt(c / a_i).
  double log10_sublevel_volume(double cutoff) const;

 private:
  std::vector<double> coefficients_;
};

enum class Normalization : std::uint8_t { euclidean, filter };

std::string_view to_string(Normalization normalization);
Normalization parse_normalization(std::string_view name);

/// A perturbation direction. Euclidean directions have unit norm; filter
/// directions match, block by block, the norms of the reference parameters,
/// where a block is one neuron's incoming weights together with its bias.
struct Direction {
  ParamVector values;
  Normalization normalization = Normalization::euclidean;
  std::uint64_t base_seed = 0;
  std::uint64_t index = 0;
};

/// Gaussian draw seeded by derive_seed(base_seed, index), then normalized.
/// Filter mode throws a precondition error naming the layer and neuron of
/// any zero-norm block in `reference`.
Direction sample_direction(const ParamVector& reference, const MlpArch& arch,
                           std::uint64_t base_seed, std::uint64_t index,
                           Normalization normalization);
/// Euclidean direction in R^dimension, for surfaces without an architecture.
Direction sample_direction(std::size_t dimension, std::uint64_t base_seed,
                           std::uint64_t index);

/// center + t * direction
ParamVector along(const ParamVector& center, const Direction& d, double t);

/// Loss at center + t_i * d for every t_i.
std::vector<double> ray_profile(const LossSurface& surface,
                                const ParamVector& center, const Direction& d,
                                std::span<const double> t_values);

struct RadiusSearch {
  double cutoff = 0.1;
  double tol = 1e-4;
  double max_radius = 1e3;

  void validate() const;
};

struct BasinSample {
  std::uint64_t direction_index = 0;
  /// Boundary distance, or max_radius when censored.
  double radius = 0.0;
  bool censored = false;
  std::size_t evaluations = 0;

  friend bool operator==(const BasinSample&, const BasinSample&) = default;
};

/// Distance from `center` to the cutoff level set along `d`: t doubles from
/// tol until the loss reaches the cutoff, then bisection narrows the bracket
/// to width tol and the upper end is returned. If the loss stays below the
/// cutoff up to max_radius the sample is censored.
BasinSample basin_radius(const LossSurface& surface, const ParamVector& center,
                         const Direction& d, const RadiusSearch& search);

/// Which directions to probe.
struct DirectionSet {
  std::size_t count = 3000;
  std::uint64_t base_seed = 0;
  Normalization normalization = Normalization::filter;
};

/// basin_radius over directions 0..count-1 on a worker pool. Results are
/// indexed by direction, so the output does not depend on scheduling.
/// `arch` may be null for euclidean directions on analytic surfaces.
std::vector<BasinSample> sample_basin(const LossSurface& surface,
                                      const ParamVector& center,
                                      const MlpArch* arch,
                                      const DirectionSet& directions,
                                      const RadiusSearch& search,
                                      std::size_t workers = 0);

/// Evenly spaced coordinates lo..hi inclusive; a single point sits at the
/// midpoint.
struct Axis {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t resolution = 51;

  double at(std::size_t i) const;
};

/// Loss over center + t_i * d1 + s_j * d2; rows follow t, columns follow s.
Matrix plane_slice(const LossSurface& surface, const ParamVector& center,
                   const Direction& d1, const Direction& d2, const Axis& t_axis,
                   const Axis& s_axis, std::size_t workers = 0);

struct VolumeEstimate {
  std::size_t n = 0;
  double log10_volume = 0.0;
  double log10_omega_n = 0.0;
  double mean_radius = 0.0;
  double min_radius = 0.0;
  double max_radius = 0.0;
  std::size_t num_directions = 0;
  std::size_t num_censored = 0;

  /// Censored directions were dropped, so the volume is an under-estimate.
  bool conservative() const { return num_censored > 0; }
};

/// V = omega_n * E[r^n] over the non-censored radii, assembled in log space:
/// log V = (n/2) ln pi - lgamma(1 + n/2) + LSE_i(n ln r_i) - ln m.
VolumeEstimate log_volume(std::span<const BasinSample> samples, std::size_t n);

struct SharpnessSummary {
  double mean_radius = 0.0;
  double min_radius = 0.0;
  double max_radius = 0.0;
  double censoring_rate = 0.0;
};

/// Statistics over the non-censored radii; they are NaN when every sample
/// is censored.
SharpnessSummary sharpness_summary(std::span<const BasinSample> samples);

}  // namespace basinscope
