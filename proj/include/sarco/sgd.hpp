#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sarco/core.hpp"
#include "sarco/features.hpp"

namespace sarco {

/// Declared defaults; every evaluation report echoes them. eta follows
/// the inverse-scaling schedule eta0 / t^power over sample steps.
struct Hyperparams {
  double l2_lambda = 1e-4;
  double eta0 = 0.5;
  double power = 0.5;
  int epochs = 5;
  std::uint64_t seed = 42;
};

namespace detail {

inline double dot_sparse(const std::vector<double>& w, const FeatureVector& x,
                         std::size_t dense_offset) {
  double s = 0.0;
  for (const auto& [j, v] : x.sparse) s += w[static_cast<std::size_t>(j)] * v;
  for (std::size_t d = 0; d < x.dense.size(); ++d) s += w[dense_offset + d] * x.dense[d];
  return s;
}

}  // namespace detail

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t sparse_dim = 0;
  std::size_t dense_dim = 0;
  Hyperparams hp;

  double decision(const FeatureVector& x) const {
    return detail::dot_sparse(weights, x, sparse_dim) + bias;
  }
  /// Sarcastic is the positive class; the boundary itself goes positive.
  Label predict(const FeatureVector& x) const {
    return decision(x) >= 0.0 ? Label::Sarcastic : Label::NotSarcastic;
  }
};

inline double label_sign(Label l) { return l == Label::Sarcastic ? 1.0 : -1.0; }

/// Mean hinge loss plus l2_lambda * ||w||^2 (bias unregularized).
inline double hinge_l2_objective(const std::vector<double>& w, double bias,
                                 const std::vector<FeatureVector>& xs,
                                 const std::vector<Label>& ys, double l2_lambda,
                                 std::size_t dense_offset) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double margin = label_sign(ys[i]) * (detail::dot_sparse(w, xs[i], dense_offset) + bias);
    loss += std::max(0.0, 1.0 - margin);
  }
  loss /= static_cast<double>(xs.size());
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  return loss + l2_lambda * reg;
}

struct Gradient {
  std::vector<double> w;
  double bias = 0.0;
};

/// Full-batch subgradient of the objective above. At points where every
/// sample margin differs from 1 the objective is differentiable and this
/// is the exact gradient.
inline Gradient hinge_l2_subgradient(const std::vector<double>& w, double bias,
                                     const std::vector<FeatureVector>& xs,
                                     const std::vector<Label>& ys, double l2_lambda,
                                     std::size_t dense_offset) {
  Gradient g;
  g.w.assign(w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double y = label_sign(ys[i]);
    double margin = y * (detail::dot_sparse(w, xs[i], dense_offset) + bias);
    if (margin >= 1.0) continue;
    for (const auto& [j, v] : xs[i].sparse) g.w[static_cast<std::size_t>(j)] -= inv_n * y * v;
    for (std::size_t d = 0; d < xs[i].dense.size(); ++d)
      g.w[dense_offset + d] -= inv_n * y * xs[i].dense[d];
    g.bias -= inv_n * y;
  }
  for (std::size_t j = 0; j < w.size(); ++j) g.w[j] += 2.0 * l2_lambda * w[j];
  return g;
}

/// Hinge-loss linear classifier trained by SGD with L2 regularization.
/// Deterministic for a fixed seed: one seeded engine drives the per-epoch
/// shuffles. The L2 decay uses the usual scale-factor trick so sparse
/// updates stay O(nnz).
inline LinearModel train(const std::vector<FeatureVector>& xs, const std::vector<Label>& ys,
                         std::size_t sparse_dim, std::size_t dense_dim,
                         const Hyperparams& hp) {
  if (xs.empty() || xs.size() != ys.size())
    throw Error("train: need a nonempty, aligned sample set");
  bool has[2] = {false, false};
  for (Label y : ys) has[label_index(y)] = true;
  if (!has[0] || !has[1]) throw Error("train: need at least one example of each class");

  const std::size_t dim = sparse_dim + dense_dim;
  std::vector<double> v(dim, 0.0);  // weights = scale * v
  double scale = 1.0;
  double bias = 0.0;
  std::mt19937_64 rng(hp.seed);
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  long long t = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (std::size_t oi : order) {
      ++t;
      const FeatureVector& x = xs[oi];
      double y = label_sign(ys[oi]);
      double eta = hp.eta0 / std::pow(static_cast<double>(t), hp.power);
      double margin = y * (scale * detail::dot_sparse(v, x, sparse_dim) + bias);
      double decay = 1.0 - 2.0 * eta * hp.l2_lambda;
      if (decay < 1e-12) decay = 1e-12;  // keeps the scale positive
      scale *= decay;
      if (margin < 1.0) {
        for (const auto& [j, val] : x.sparse)
          v[static_cast<std::size_t>(j)] += eta * y * val / scale;
        for (std::size_t d = 0; d < x.dense.size(); ++d)
          v[sparse_dim + d] += eta * y * x.dense[d] / scale;
        bias += eta * y;
      }
      if (scale < 1e-9) {
        for (double& vi : v) vi *= scale;
        scale = 1.0;
      }
    }
  }

  LinearModel model;
  model.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = scale * v[j];
  model.bias = bias;
  model.sparse_dim = sparse_dim;
  model.dense_dim = dense_dim;
  model.hp = hp;
  return model;
}

inline double l2_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

}  // namespace sarco
