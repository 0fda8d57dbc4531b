#pragma once

#include <vector>

#include "playstyle/core.hpp"

namespace playstyle {

/// Regularizer added to sample covariances so single-sample fits stay
/// positive definite.
inline constexpr double kCovarianceEpsilon = 1e-8;

/// Bhattacharyya distances are clipped here; exp(-10) is already ~0.
inline constexpr double kBhattacharyyaClip = 10.0;

struct CategoricalDistribution {
  std::vector<double> probs;       // sums to 1
  std::size_t support_count = 0;   // samples used
};

struct GaussianFit {
  std::vector<double> mean;
  std::vector<double> covariance;  // row-major D x D, symmetric PD
  std::size_t support_count = 0;

  int dim() const { return static_cast<int>(mean.size()); }
  double cov(int i, int j) const { return covariance[static_cast<std::size_t>(i) * mean.size() + j]; }
};

enum class GroundMetric {
  zero_one,  // actions are unordered labels; W2 = sqrt(TV)
  one_hot,   // actions embedded as one-hot vectors; W2 = sqrt(2 TV)
};

/// Empirical frequencies, no smoothing. Throws EmptySupport / SpaceMismatch.
CategoricalDistribution estimate_categorical(const std::vector<Action>& samples, int space_size);

/// Sample mean and biased (1/N) covariance plus epsilon * I.
GaussianFit estimate_gaussian(const std::vector<Action>& samples,
                              double epsilon = kCovarianceEpsilon);

/// 2-Wasserstein distance between categorical distributions under a discrete
/// ground metric. Symmetric, zero iff equal, range [0, 1] for zero_one.
double w2_categorical(const CategoricalDistribution& p, const CategoricalDistribution& q,
                      GroundMetric ground = GroundMetric::zero_one);

/// Closed-form 2-Wasserstein distance between Gaussians.
double w2_gaussian(const GaussianFit& p, const GaussianFit& q);

struct BhattacharyyaResult {
  double coefficient = 0.0;  // in [0, 1]
  double distance = 0.0;     // -ln(coefficient), clipped to kBhattacharyyaClip
};

BhattacharyyaResult bhattacharyya_categorical(const CategoricalDistribution& p,
                                              const CategoricalDistribution& q);

BhattacharyyaResult bhattacharyya_gaussian(const GaussianFit& p, const GaussianFit& q);

/// Principal square root of a symmetric positive semidefinite matrix
/// (row-major d x d). Exposed for verification; used by w2_gaussian.
std::vector<double> spd_sqrt(const std::vector<double>& matrix, int d);

}  // namespace playstyle
