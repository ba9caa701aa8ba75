// ordsteps/model.hpp

// Copyright 2026  the ordered-steps authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ordsteps/core.hpp"
#include "ordsteps/rng.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::model {

// One linear classifier per vocabulary component. A step's score is the mean
// of its components' scores; the softmax in the loss runs over the steps of
// the example's task only, never over a background class.

struct ComponentClassifierBank {
  Matrix weights;               // M x D
  std::vector<double> biases;   // M
  double dropout_rate = 0.5;    // on input features, inverted at train time

  std::size_t num_components() const { return weights.rows(); }
  std::size_t dim() const { return weights.cols(); }

  static ComponentClassifierBank zeros(std::size_t num_components,
                                       std::size_t dim,
                                       double dropout_rate = 0.5) {
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
      throw std::invalid_argument("dropout rate must be in [0, 1)");
    ComponentClassifierBank bank;
    bank.weights = Matrix(num_components, dim, 0.0);
    bank.biases.assign(num_components, 0.0);
    bank.dropout_rate = dropout_rate;
    return bank;
  }
};

/// Gradient (or gradient accumulator) with the same shape as the bank.
struct Gradient {
  Matrix weights;
  std::vector<double> biases;

  static Gradient zeros_like(const ComponentClassifierBank& bank) {
    Gradient g;
    g.weights = Matrix(bank.weights.rows(), bank.weights.cols(), 0.0);
    g.biases.assign(bank.biases.size(), 0.0);
    return g;
  }

  void scale(double f) {
    for (double& v : weights.data()) v *= f;
    for (double& v : biases) v *= f;
  }

  bool finite() const {
    for (double v : weights.data())
      if (!std::isfinite(v)) return false;
    for (double v : biases)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Bias-corrected Adam state over the bank parameters.
struct OptimizerState {
  Matrix first_moment_w, second_moment_w;
  std::vector<double> first_moment_b, second_moment_b;
  std::uint64_t step_count = 0;
  double learning_rate;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;

  static OptimizerState fresh(const ComponentClassifierBank& bank,
                              double learning_rate) {
    OptimizerState s;
    s.first_moment_w = Matrix(bank.weights.rows(), bank.weights.cols(), 0.0);
    s.second_moment_w = Matrix(bank.weights.rows(), bank.weights.cols(), 0.0);
    s.first_moment_b.assign(bank.biases.size(), 0.0);
    s.second_moment_b.assign(bank.biases.size(), 0.0);
    s.learning_rate = learning_rate;
    return s;
  }
};

/// g = W x + b. In training mode the input is multiplied by an inverted
/// dropout mask (zero with probability dropout_rate, else 1/keep), seeded
/// deterministically.
inline std::vector<double> forward_components(
    const ComponentClassifierBank& bank, const double* x, std::size_t dim,
    bool training = false, std::uint64_t seed = 0) {
  if (dim != bank.dim())
    throw std::invalid_argument("forward_components: dimension mismatch");
  const std::size_t m_count = bank.num_components();
  std::vector<double> input(x, x + dim);
  if (training && bank.dropout_rate > 0.0) {
    Rng rng(seed);
    const double keep = 1.0 - bank.dropout_rate;
    for (double& v : input)
      v = rng.uniform01() < bank.dropout_rate ? 0.0 : v / keep;
  }
  std::vector<double> g(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    double acc = bank.biases[m];
    const double* w = bank.weights.row(m);
    for (std::size_t d = 0; d < dim; ++d) acc += w[d] * input[d];
    g[m] = acc;
  }
  return g;
}

inline std::vector<double> forward_components(
    const ComponentClassifierBank& bank, const std::vector<double>& x,
    bool training = false, std::uint64_t seed = 0) {
  return forward_components(bank, x.data(), x.size(), training, seed);
}

/// f_k = sum_m A_km g_m / sum_m A_km — the mean of component scores.
inline std::vector<double> compose_step_scores(const std::vector<double>& g,
                                               const StepComponentMatrix& a) {
  if (g.size() != a.num_components())
    throw std::invalid_argument("compose_step_scores: dimension mismatch");
  std::vector<double> f(a.num_steps());
  for (std::size_t k = 0; k < a.num_steps(); ++k) {
    if (a.row_degrees[k] == 0)
      throw std::invalid_argument("compose_step_scores: zero row degree");
    double acc = 0.0;
    for (std::size_t m = 0; m < a.num_components(); ++m)
      if (a.entries(k, m)) acc += g[m];
    f[k] = acc / static_cast<double>(a.row_degrees[k]);
  }
  return f;
}

/// Max-subtracted softmax.
inline std::vector<double> softmax(const std::vector<double>& f) {
  double max_f = f[0];
  for (double v : f) max_f = std::max(max_f, v);
  std::vector<double> p(f.size());
  double z = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    p[i] = std::exp(f[i] - max_f);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

struct CrossEntropy {
  double loss;
  std::vector<double> dloss_df;  // softmax(f) - onehot(k)
};

/// loss = -f_k + logsumexp(f), stabilized by max subtraction.
inline CrossEntropy step_cross_entropy(const std::vector<double>& f,
                                       std::size_t k) {
  if (k >= f.size())
    throw std::invalid_argument("step_cross_entropy: label out of range");
  double max_f = f[0];
  for (double v : f) max_f = std::max(max_f, v);
  double z = 0.0;
  for (double v : f) z += std::exp(v - max_f);
  CrossEntropy out;
  out.loss = -(f[k] - max_f) + std::log(z);
  out.dloss_df.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out.dloss_df[i] = std::exp(f[i] - max_f) / z - (i == k ? 1.0 : 0.0);
  return out;
}

/// One labeled segment: feature row t of a video, step k of its task.
struct Example {
  const Matrix* features;          // T x D
  std::size_t t;
  const StepComponentMatrix* a;    // the video's task matrix
  std::size_t k;
};

namespace detail {
/// Pulls dloss_df back through the composition: c_m = sum_k r_k A_km / deg_k.
inline void compose_backward(const std::vector<double>& dloss_df,
                             const StepComponentMatrix& a,
                             std::vector<double>& dloss_dg) {
  dloss_dg.assign(a.num_components(), 0.0);
  for (std::size_t k = 0; k < a.num_steps(); ++k) {
    const double r = dloss_df[k] / static_cast<double>(a.row_degrees[k]);
    if (r == 0.0) continue;
    for (std::size_t m = 0; m < a.num_components(); ++m)
      if (a.entries(k, m)) dloss_dg[m] += r;
  }
}
}  // namespace detail

/// Summed cross-entropy over the examples and its exact gradient through the
/// composition and the linear bank. Dropout masks (training mode) are derived
/// per example from the seed, independent of batch order.
inline std::pair<double, Gradient> sum_loss_and_grad(
    const ComponentClassifierBank& bank, const std::vector<Example>& batch,
    bool training = false, std::uint64_t seed = 0) {
  if (batch.empty())
    throw std::invalid_argument("sum_loss_and_grad: empty batch");
  Gradient grad = Gradient::zeros_like(bank);
  double total_loss = 0.0;
  const std::size_t dim = bank.dim();
  std::vector<double> dloss_dg;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& ex = batch[i];
    if (ex.features->cols() != dim || ex.t >= ex.features->rows() ||
        ex.a->num_components() != bank.num_components())
      throw std::invalid_argument("sum_loss_and_grad: example shape mismatch");
    const double* x = ex.features->row(ex.t);
    std::vector<double> input(x, x + dim);
    if (training && bank.dropout_rate > 0.0) {
      Rng rng(Rng::derive(seed, i));
      const double keep = 1.0 - bank.dropout_rate;
      for (double& v : input)
        v = rng.uniform01() < bank.dropout_rate ? 0.0 : v / keep;
    }
    std::vector<double> g(bank.num_components());
    for (std::size_t m = 0; m < bank.num_components(); ++m) {
      double acc = bank.biases[m];
      const double* w = bank.weights.row(m);
      for (std::size_t d = 0; d < dim; ++d) acc += w[d] * input[d];
      g[m] = acc;
    }
    std::vector<double> f = compose_step_scores(g, *ex.a);
    CrossEntropy ce = step_cross_entropy(f, ex.k);
    total_loss += ce.loss;
    detail::compose_backward(ce.dloss_df, *ex.a, dloss_dg);
    for (std::size_t m = 0; m < bank.num_components(); ++m) {
      const double c = dloss_dg[m];
      if (c == 0.0) continue;
      double* wrow = grad.weights.row(m);
      for (std::size_t d = 0; d < dim; ++d) wrow[d] += c * input[d];
      grad.biases[m] += c;
    }
  }
  return {total_loss, std::move(grad)};
}

/// Mean-of-batch variant of sum_loss_and_grad, for minibatch descent.
inline std::pair<double, Gradient> batch_loss_and_grad(
    const ComponentClassifierBank& bank, const std::vector<Example>& batch,
    bool training = false, std::uint64_t seed = 0) {
  auto [loss, grad] = sum_loss_and_grad(bank, batch, training, seed);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  grad.scale(inv_n);
  return {loss * inv_n, std::move(grad)};
}

/// Per-(t, k) cross-entropy values, optionally with the squared gradient norm
/// of each term over all bank parameters (closed form for the linear bank;
/// dropout never applies here).
struct LossTable {
  Matrix values;                        // T x K
  std::optional<Matrix> grad_sq_norms;  // T x K when requested
};

inline LossTable loss_term_table(const ComponentClassifierBank& bank,
                                 const StepComponentMatrix& a,
                                 const FeatureSequence& x,
                                 bool with_grad_norms = false) {
  if (x.dim() != bank.dim())
    throw std::invalid_argument("loss_term_table: dimension mismatch");
  if (a.num_components() != bank.num_components())
    throw std::invalid_argument("loss_term_table: component count mismatch");
  const std::size_t T = x.num_segments(), K = a.num_steps();
  LossTable table;
  table.values = Matrix(T, K, 0.0);
  if (with_grad_norms) table.grad_sq_norms = Matrix(T, K, 0.0);
  std::vector<double> r(K), c;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> g = forward_components(bank, x.values.row(t), x.dim());
    std::vector<double> f = compose_step_scores(g, a);
    // shared logsumexp for the whole row
    double max_f = f[0];
    for (double v : f) max_f = std::max(max_f, v);
    double z = 0.0;
    for (double v : f) z += std::exp(v - max_f);
    const double lse = std::log(z);
    double x_sq = 0.0;
    if (with_grad_norms) {
      const double* row = x.values.row(t);
      for (std::size_t d = 0; d < x.dim(); ++d) x_sq += row[d] * row[d];
    }
    for (std::size_t k = 0; k < K; ++k) {
      table.values(t, k) = -(f[k] - max_f) + lse;
      if (!with_grad_norms) continue;
      for (std::size_t j = 0; j < K; ++j)
        r[j] = std::exp(f[j] - max_f) / z - (j == k ? 1.0 : 0.0);
      detail::compose_backward(r, a, c);
      double c_sq = 0.0;
      for (double v : c) c_sq += v * v;
      // ||grad_W||^2 + ||grad_b||^2 = ||c||^2 (||x||^2 + 1)
      (*table.grad_sq_norms)(t, k) = c_sq * (x_sq + 1.0);
    }
  }
  return table;
}

/// Standard bias-corrected Adam update, in place.
inline void adam_step(ComponentClassifierBank& bank, const Gradient& grad,
                      OptimizerState& state) {
  if (grad.weights.rows() != bank.weights.rows() ||
      grad.weights.cols() != bank.weights.cols() ||
      grad.biases.size() != bank.biases.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  if (!grad.finite())
    throw std::invalid_argument("adam_step: non-finite gradient");
  state.step_count += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
  auto update = [&](double& theta, double& m, double& v, double g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    theta -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  };
  for (std::size_t i = 0; i < bank.weights.data().size(); ++i)
    update(bank.weights.data()[i], state.first_moment_w.data()[i],
           state.second_moment_w.data()[i], grad.weights.data()[i]);
  for (std::size_t i = 0; i < bank.biases.size(); ++i)
    update(bank.biases[i], state.first_moment_b[i], state.second_moment_b[i],
           grad.biases[i]);
}

/// Plain gradient descent step theta -= lr * grad (the majorize-mode update).
inline void gradient_step(ComponentClassifierBank& bank, const Gradient& grad,
                          double learning_rate) {
  if (!grad.finite())
    throw std::invalid_argument("gradient_step: non-finite gradient");
  for (std::size_t i = 0; i < bank.weights.data().size(); ++i)
    bank.weights.data()[i] -= learning_rate * grad.weights.data()[i];
  for (std::size_t i = 0; i < bank.biases.size(); ++i)
    bank.biases[i] -= learning_rate * grad.biases[i];
}

}  // namespace ordsteps::model
