#pragma once

// Fully connected layer with explicit gradient buffers. Training forwards
// cache their input; backward accumulates into grad_weight / grad_bias and
// returns the input cotangent. Complex layers follow the conjugate-cotangent
// (Wirtinger) rule for real losses: grad = dL/dRe + i*dL/dIm, so
//   grad_weight = X^H G,  grad_input = G W^H,  grad_bias = colsum(G).
// For real scalars the adjoints reduce to plain transposes.

#include "iinr/rng.hpp"
#include "iinr/tensor.hpp"

#include <stdexcept>

namespace iinr {

template <class T>
struct LinearLayer {
  Tensor2<T> weight;       // fan_in x fan_out
  std::vector<T> bias;     // fan_out
  Tensor2<T> grad_weight;
  std::vector<T> grad_bias;
  Tensor2<T> cached_input;
  bool has_cached_input = false;

  LinearLayer() = default;
  LinearLayer(index_t fan_in, index_t fan_out)
      : weight(fan_in, fan_out),
        bias(static_cast<std::size_t>(fan_out), T{}),
        grad_weight(fan_in, fan_out),
        grad_bias(static_cast<std::size_t>(fan_out), T{}) {}

  index_t fan_in() const { return weight.rows; }
  index_t fan_out() const { return weight.cols; }

  Tensor2<T> apply(const Tensor2<T>& input) const {
    require_shape(input.cols == fan_in(), "linear_forward input cols vs fan_in");
    Tensor2<T> out(input.rows, fan_out());
    emap(out).noalias() = emap(input) * emap(weight);
    using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
    emap(out).rowwise() += Eigen::Map<const RowVec>(bias.data(), fan_out());
    return out;
  }

  Tensor2<T> apply_train(Tensor2<T> input) {
    cached_input = std::move(input);
    has_cached_input = true;
    return apply(cached_input);
  }

  Tensor2<T> backward(const Tensor2<T>& grad_out) {
    if (!has_cached_input)
      throw std::logic_error("linear_backward: no cached input (forward not called)");
    require_shape(grad_out.cols == fan_out(), "linear_backward grad cols vs fan_out");
    require_shape(grad_out.rows == cached_input.rows, "linear_backward grad rows vs batch");
    emap(grad_weight).noalias() += emap(cached_input).adjoint() * emap(grad_out);
    const auto gb = col_sum(grad_out);
    for (std::size_t i = 0; i < grad_bias.size(); ++i) grad_bias[i] += gb[i];
    Tensor2<T> grad_in(grad_out.rows, fan_in());
    emap(grad_in).noalias() = emap(grad_out) * emap(weight).adjoint();
    return grad_in;
  }

  void zero_grad() {
    grad_weight.fill(T{});
    std::fill(grad_bias.begin(), grad_bias.end(), T{});
  }
};

inline index_t parameter_count(const LinearLayer<double>& l) {
  return l.fan_in() * l.fan_out() + l.fan_out();
}
inline index_t parameter_count(const LinearLayer<cdouble>& l) {
  return 2 * (l.fan_in() * l.fan_out() + l.fan_out());
}

namespace detail {

inline void fill_uniform(Tensor2<double>& w, Rng& rng, double bound) {
  for (auto& v : w.data) v = rng.uniform(-bound, bound);
}

inline void fill_uniform(Tensor2<cdouble>& w, Rng& rng, double bound) {
  for (auto& v : w.data) {
    const double re = rng.uniform(-bound, bound);
    const double im = rng.uniform(-bound, bound);
    v = cdouble(re, im);
  }
}

}  // namespace detail

}  // namespace iinr
