#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "edgeoff/rng.hpp"

namespace edgeoff {

// One named tensor living inside a flat parameter vector.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;  // 1 for bias vectors
  std::size_t offset = 0;
  std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

// Flat parameter + gradient storage; layout is fixed by add() order so a
// checkpoint can be restored block by block.
class ParamVector {
 public:
  std::size_t add(const std::string& name, int rows, int cols);
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(const std::string& name) const;

  double* values(std::size_t offset = 0) { return value_.data() + offset; }
  const double* values(std::size_t offset = 0) const {
    return value_.data() + offset;
  }
  double* grads(std::size_t offset = 0) { return grad_.data() + offset; }
  std::vector<double>& value_vector() { return value_; }
  const std::vector<double>& value_vector() const { return value_; }
  std::vector<double>& grad_vector() { return grad_; }

  std::size_t size() const { return value_.size(); }
  void zero_grad();
  // He-style init for weight matrices, zeros for biases
  void init_random(Rng& rng);

 private:
  std::vector<ParamBlock> blocks_;
  std::vector<double> value_;
  std::vector<double> grad_;
};

// y = W x + b; W row-major (out x in); b may be null
void linear_forward(const double* w, const double* b, const double* x,
                    double* y, int out, int in);
// accumulates dW, db (may be null), dx (may be null)
void linear_backward(const double* w, const double* x, const double* dy,
                     double* dw, double* db, double* dx, int out, int in);

void relu_forward(const double* x, double* y, int n);
// dx += dy where the forward input was positive
void relu_backward(const double* x_pre, const double* dy, double* dx, int n);

// Numerically stable softmax over the unmasked entries; masked entries get
// probability exactly 0. `mask[i]` nonzero means allowed.
void masked_softmax(const double* logits, const std::uint8_t* mask, double* p,
                    int n);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(ParamVector& params, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace edgeoff
