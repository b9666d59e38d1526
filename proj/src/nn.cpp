#include "edgeoff/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgeoff {

std::size_t ParamVector::add(const std::string& name, int rows, int cols) {
  for (const ParamBlock& b : blocks_)
    if (b.name == name)
      throw std::invalid_argument("ParamVector: duplicate block " + name);
  ParamBlock b;
  b.name = name;
  b.rows = rows;
  b.cols = cols;
  b.offset = value_.size();
  blocks_.push_back(b);
  value_.resize(value_.size() + b.size(), 0.0);
  grad_.resize(value_.size(), 0.0);
  return b.offset;
}

const ParamBlock& ParamVector::block(const std::string& name) const {
  for (const ParamBlock& b : blocks_)
    if (b.name == name) return b;
  throw std::invalid_argument("ParamVector: no block named " + name);
}

void ParamVector::zero_grad() {
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

void ParamVector::init_random(Rng& rng) {
  for (const ParamBlock& b : blocks_) {
    double* v = value_.data() + b.offset;
    if (b.cols == 1) {  // bias
      std::fill(v, v + b.size(), 0.0);
    } else {
      const double scale = std::sqrt(2.0 / static_cast<double>(b.cols));
      for (std::size_t i = 0; i < b.size(); ++i) v[i] = scale * rng.normal();
    }
  }
}

void linear_forward(const double* w, const double* b, const double* x,
                    double* y, int out, int in) {
  for (int o = 0; o < out; ++o) {
    const double* row = w + static_cast<std::size_t>(o) * in;
    double acc = b ? b[o] : 0.0;
    for (int i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void linear_backward(const double* w, const double* x, const double* dy,
                     double* dw, double* db, double* dx, int out, int in) {
  for (int o = 0; o < out; ++o) {
    const double g = dy[o];
    if (g == 0.0) continue;
    const double* row = w + static_cast<std::size_t>(o) * in;
    double* grow = dw + static_cast<std::size_t>(o) * in;
    for (int i = 0; i < in; ++i) grow[i] += g * x[i];
    if (db) db[o] += g;
    if (dx)
      for (int i = 0; i < in; ++i) dx[i] += g * row[i];
  }
}

void relu_forward(const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x_pre, const double* dy, double* dx, int n) {
  for (int i = 0; i < n; ++i)
    if (x_pre[i] > 0.0) dx[i] += dy[i];
}

void masked_softmax(const double* logits, const std::uint8_t* mask, double* p,
                    int n) {
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (!mask || mask[i]) hi = std::max(hi, logits[i]);
  if (hi == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("masked_softmax: all entries masked");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!mask || mask[i]) {
      p[i] = std::exp(logits[i] - hi);
      sum += p[i];
    } else {
      p[i] = 0.0;
    }
  }
  for (int i = 0; i < n; ++i) p[i] /= sum;
}

void adam_step(ParamVector& params, AdamState& state, double lr, double beta1,
               double beta2, double eps) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  double* v = params.values();
  const double* g = params.grads();
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace edgeoff
