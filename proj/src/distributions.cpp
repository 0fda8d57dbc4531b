#include "playstyle/distributions.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "playstyle/errors.hpp"

namespace playstyle {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<double>& m, int d) {
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out(i, j) = m[static_cast<std::size_t>(i) * d + j];
  }
  return out;
}

/// Principal square root via the symmetric eigendecomposition. Tiny negative
/// eigenvalues from roundoff are treated as zero.
Eigen::MatrixXd sqrt_sym(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
  Eigen::VectorXd values = solver.eigenvalues();
  for (int i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) {
      if (values(i) < -1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff())) {
        throw NumericalFailure("matrix not positive semidefinite");
      }
      values(i) = 0.0;
    }
    values(i) = std::sqrt(values(i));
  }
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

CategoricalDistribution estimate_categorical(const std::vector<Action>& samples, int space_size) {
  if (samples.empty()) throw EmptySupport("no samples for categorical estimate");
  if (space_size <= 0) throw SpaceMismatch("space size must be positive");
  CategoricalDistribution dist;
  dist.probs.assign(static_cast<std::size_t>(space_size), 0.0);
  dist.support_count = samples.size();
  for (const Action& a : samples) {
    const auto* d = std::get_if<DiscreteAction>(&a);
    if (d == nullptr) throw SpaceMismatch("continuous action in categorical estimate");
    if (d->index < 0 || d->index >= space_size) {
      throw SpaceMismatch("action index outside declared space");
    }
    dist.probs[static_cast<std::size_t>(d->index)] += 1.0;
  }
  for (double& p : dist.probs) p /= static_cast<double>(samples.size());
  return dist;
}

GaussianFit estimate_gaussian(const std::vector<Action>& samples, double epsilon) {
  if (samples.empty()) throw EmptySupport("no samples for gaussian estimate");
  const auto* first = std::get_if<ContinuousAction>(&samples.front());
  if (first == nullptr) throw SpaceMismatch("discrete action in gaussian estimate");
  const int d = static_cast<int>(first->values.size());

  GaussianFit fit;
  fit.mean.assign(d, 0.0);
  fit.covariance.assign(static_cast<std::size_t>(d) * d, 0.0);
  fit.support_count = samples.size();

  for (const Action& a : samples) {
    const auto* c = std::get_if<ContinuousAction>(&a);
    if (c == nullptr || static_cast<int>(c->values.size()) != d) {
      throw SpaceMismatch("mixed action dimensions in gaussian estimate");
    }
    for (int i = 0; i < d; ++i) fit.mean[i] += c->values[i];
  }
  const double n = static_cast<double>(samples.size());
  for (double& m : fit.mean) m /= n;

  for (const Action& a : samples) {
    const auto& c = std::get<ContinuousAction>(a);
    for (int i = 0; i < d; ++i) {
      const double di = c.values[i] - fit.mean[i];
      for (int j = 0; j < d; ++j) {
        fit.covariance[static_cast<std::size_t>(i) * d + j] += di * (c.values[j] - fit.mean[j]);
      }
    }
  }
  for (double& v : fit.covariance) v /= n;
  for (int i = 0; i < d; ++i) fit.covariance[static_cast<std::size_t>(i) * d + i] += epsilon;
  return fit;
}

double w2_categorical(const CategoricalDistribution& p, const CategoricalDistribution& q,
                      GroundMetric ground) {
  if (p.probs.size() != q.probs.size()) {
    throw SpaceMismatch("categorical distributions over different spaces");
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) tv += std::abs(p.probs[i] - q.probs[i]);
  tv *= 0.5;
  const double squared = ground == GroundMetric::zero_one ? tv : 2.0 * tv;
  return std::sqrt(squared);
}

double w2_gaussian(const GaussianFit& p, const GaussianFit& q) {
  const int d = p.dim();
  if (d != q.dim()) throw SpaceMismatch("gaussian fits of different dimension");

  double mean_sq = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = p.mean[i] - q.mean[i];
    mean_sq += diff * diff;
  }

  const Eigen::MatrixXd s1 = to_eigen(p.covariance, d);
  const Eigen::MatrixXd s2 = to_eigen(q.covariance, d);
  const Eigen::MatrixXd root2 = sqrt_sym(s2);
  const Eigen::MatrixXd cross = sqrt_sym(root2 * s1 * root2);
  const double trace_term = s1.trace() + s2.trace() - 2.0 * cross.trace();

  const double squared = mean_sq + std::max(0.0, trace_term);
  return std::sqrt(squared);
}

BhattacharyyaResult bhattacharyya_categorical(const CategoricalDistribution& p,
                                              const CategoricalDistribution& q) {
  if (p.probs.size() != q.probs.size()) {
    throw SpaceMismatch("categorical distributions over different spaces");
  }
  double bc = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) bc += std::sqrt(p.probs[i] * q.probs[i]);
  bc = std::clamp(bc, 0.0, 1.0);
  BhattacharyyaResult out;
  out.coefficient = bc;
  out.distance = bc <= 0.0 ? kBhattacharyyaClip : std::min(-std::log(bc), kBhattacharyyaClip);
  return out;
}

BhattacharyyaResult bhattacharyya_gaussian(const GaussianFit& p, const GaussianFit& q) {
  const int d = p.dim();
  if (d != q.dim()) throw SpaceMismatch("gaussian fits of different dimension");

  const Eigen::MatrixXd s1 = to_eigen(p.covariance, d);
  const Eigen::MatrixXd s2 = to_eigen(q.covariance, d);
  const Eigen::MatrixXd blend = 0.5 * (s1 + s2);

  Eigen::VectorXd diff(d);
  for (int i = 0; i < d; ++i) diff(i) = p.mean[i] - q.mean[i];

  const Eigen::LLT<Eigen::MatrixXd> llt(blend);
  if (llt.info() != Eigen::Success) throw NumericalFailure("blended covariance not PD");
  const double mahalanobis = diff.dot(llt.solve(diff));

  const double det_blend = blend.determinant();
  const double det1 = s1.determinant();
  const double det2 = s2.determinant();
  if (det_blend <= 0.0 || det1 <= 0.0 || det2 <= 0.0) {
    throw NumericalFailure("singular covariance in bhattacharyya distance");
  }
  double db = 0.125 * mahalanobis + 0.5 * std::log(det_blend / std::sqrt(det1 * det2));
  db = std::clamp(db, 0.0, kBhattacharyyaClip);

  BhattacharyyaResult out;
  out.distance = db;
  out.coefficient = std::exp(-db);
  return out;
}

std::vector<double> spd_sqrt(const std::vector<double>& matrix, int d) {
  const Eigen::MatrixXd root = sqrt_sym(to_eigen(matrix, d));
  std::vector<double> out(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(i) * d + j] = root(i, j);
  }
  return out;
}

}  // namespace playstyle
