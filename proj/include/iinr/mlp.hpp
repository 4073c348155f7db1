#pragma once

// Coordinate MLP: alternating linear layers and a fixed pointwise
// nonlinearity. Layer layout is [in -> width] + hidden_layers x
// [width -> width] + [width -> out]; the activation follows every linear
// except the last, which gets output_activation (Identity by default).
// An "N-layer" network in the usual INR sense is hidden_layers = N.
//
// Complex (Gabor wavelet) models keep a real interface: the input is
// promoted to complex before the first layer and the real part is taken
// after the last. parameter_count counts a complex scalar as two.

#include "iinr/activation.hpp"
#include "iinr/layer.hpp"
#include "iinr/rng.hpp"
#include "iinr/tensor.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace iinr {

struct MlpSpec {
  index_t in_dim = 1;
  index_t out_dim = 1;
  index_t hidden_width = 1;
  index_t hidden_layers = 0;  // number of width->width linears
  Activation activation = Activation::relu();
  Activation output_activation = Activation::identity();

  bool complex_valued() const { return activation.is_complex(); }

  void validate() const {
    if (in_dim < 1 || out_dim < 1 || hidden_width < 1)
      throw std::invalid_argument("MlpSpec: dims must be >= 1");
    if (hidden_layers < 0) throw std::invalid_argument("MlpSpec: hidden_layers < 0");
    activation.validate();
    output_activation.validate();
    if (complex_valued() && output_activation.kind != ActKind::Identity)
      throw std::invalid_argument("MlpSpec: complex model needs Identity output");
  }

  // (fan_in, fan_out) of every linear layer, in order.
  std::vector<std::pair<index_t, index_t>> layer_dims() const {
    std::vector<std::pair<index_t, index_t>> dims;
    dims.emplace_back(in_dim, hidden_width);
    for (index_t i = 0; i < hidden_layers; ++i) dims.emplace_back(hidden_width, hidden_width);
    dims.emplace_back(hidden_width, out_dim);
    return dims;
  }
};

inline index_t parameter_count(const MlpSpec& spec) {
  index_t n = 0;
  for (auto [fi, fo] : spec.layer_dims()) n += fi * fo + fo;
  return spec.complex_valued() ? 2 * n : n;
}

// Real FLOPs per input row: 2 per MAC (8 when complex), 4 per activated
// element; Identity is free.
inline index_t flops_per_sample(const MlpSpec& spec) {
  const index_t mac_cost = spec.complex_valued() ? 8 : 2;
  index_t fl = 0;
  const auto dims = spec.layer_dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    fl += mac_cost * dims[i].first * dims[i].second;
    const Activation& act = (i + 1 == dims.size()) ? spec.output_activation : spec.activation;
    if (act.kind != ActKind::Identity) fl += 4 * dims[i].second;
  }
  return fl;
}

// Copyable forward-pass instrumentation (evaluation count + executed FLOPs).
struct ForwardStats {
  std::atomic<std::uint64_t> calls{0};
  std::atomic<std::uint64_t> flops{0};

  ForwardStats() = default;
  ForwardStats(const ForwardStats& o)
      : calls(o.calls.load(std::memory_order_relaxed)),
        flops(o.flops.load(std::memory_order_relaxed)) {}
  ForwardStats& operator=(const ForwardStats& o) {
    calls.store(o.calls.load(std::memory_order_relaxed), std::memory_order_relaxed);
    flops.store(o.flops.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
  }
  void reset() {
    calls.store(0, std::memory_order_relaxed);
    flops.store(0, std::memory_order_relaxed);
  }
};

template <class T>
struct Mlp {
  MlpSpec spec;
  std::vector<LinearLayer<T>> layers;
  std::uint64_t rng_seed = 0;
  mutable ForwardStats stats;

  // Activation derivatives cached by forward_train, consumed by backward.
  // Real models use act_deriv only; complex models cache both Wirtinger
  // partials (act_deriv = df/dz, act_deriv_bar = df/dzbar).
  std::vector<Tensor2<T>> act_deriv;
  std::vector<Tensor2<T>> act_deriv_bar;
  bool has_cache = false;

  static constexpr bool is_complex = std::is_same_v<T, cdouble>;

  index_t in_dim() const { return spec.in_dim; }
  index_t out_dim() const { return spec.out_dim; }

  Mat forward(const Mat& input) const {
    count_forward(input.rows);
    if constexpr (is_complex) {
      Tensor2<T> h = promote(input);
      for (std::size_t i = 0; i < layers.size(); ++i)
        h = activation_apply(act_at(i), layers[i].apply(h));
      return real_part(h);
    } else {
      Mat h = input;
      for (std::size_t i = 0; i < layers.size(); ++i)
        h = activation_apply(act_at(i), layers[i].apply(h));
      return h;
    }
  }

  Mat forward_train(const Mat& input) {
    count_forward(input.rows);
    act_deriv.assign(layers.size(), Tensor2<T>{});
    if constexpr (is_complex) act_deriv_bar.assign(layers.size(), Tensor2<T>{});
    has_cache = true;
    if constexpr (is_complex) {
      Tensor2<T> h = promote(input);
      for (std::size_t i = 0; i < layers.size(); ++i) {
        Tensor2<T> z = layers[i].apply_train(std::move(h));
        h = activation_apply_train(act_at(i), z, act_deriv[i], act_deriv_bar[i]);
      }
      return real_part(h);
    } else {
      Mat h = input;
      for (std::size_t i = 0; i < layers.size(); ++i) {
        Mat z = layers[i].apply_train(std::move(h));
        h = activation_apply_train(act_at(i), z, act_deriv[i]);
      }
      return h;
    }
  }

  // Accumulates parameter gradients; returns the cotangent wrt the (real)
  // input. Requires a preceding forward_train.
  Mat backward(const Mat& grad_out) {
    if (!has_cache) throw std::logic_error("mlp backward: forward_train not called");
    require_shape(grad_out.cols == spec.out_dim, "mlp backward grad cols");
    if constexpr (is_complex) {
      Tensor2<T> g = promote(grad_out);  // Re-projection backward: zero imaginary part
      for (std::size_t i = layers.size(); i-- > 0;) {
        // g_z = g * conj(df/dz) + conj(g) * df/dzbar
        for (std::size_t k = 0; k < g.data.size(); ++k)
          g.data[k] = g.data[k] * std::conj(act_deriv[i].data[k]) +
                      std::conj(g.data[k]) * act_deriv_bar[i].data[k];
        g = layers[i].backward(g);
      }
      return real_part(g);  // promotion backward: keep the real axis
    } else {
      Mat g = grad_out;
      for (std::size_t i = layers.size(); i-- > 0;) {
        for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] *= act_deriv[i].data[k];
        g = layers[i].backward(g);
      }
      return g;
    }
  }

  void zero_grad() {
    for (auto& l : layers) l.zero_grad();
  }

  // Visits every real scalar parameter paired with its gradient slot, in a
  // fixed order (per layer: weight row-major, then bias; complex scalars as
  // re, im).
  template <class F>
  void for_each_param(F&& f) {
    for (auto& l : layers) {
      visit_block(l.weight.data, l.grad_weight.data, f);
      visit_block(l.bias, l.grad_bias, f);
    }
  }

  // Read-only scalar visitation in the same order.
  template <class F>
  void visit_params(F&& f) const {
    for (const auto& l : layers) {
      visit_block_const(l.weight.data, f);
      visit_block_const(l.bias, f);
    }
  }

 private:
  const Activation& act_at(std::size_t i) const {
    return i + 1 == layers.size() ? spec.output_activation : spec.activation;
  }

  void count_forward(index_t rows) const {
    stats.calls.fetch_add(1, std::memory_order_relaxed);
    stats.flops.fetch_add(static_cast<std::uint64_t>(rows) *
                              static_cast<std::uint64_t>(flops_per_sample(spec)),
                          std::memory_order_relaxed);
  }

  template <class F>
  static void visit_block(std::vector<double>& p, std::vector<double>& g, F& f) {
    for (std::size_t i = 0; i < p.size(); ++i) f(p[i], g[i]);
  }
  template <class F>
  static void visit_block(std::vector<cdouble>& p, std::vector<cdouble>& g, F& f) {
    auto* pd = reinterpret_cast<double*>(p.data());
    auto* gd = reinterpret_cast<double*>(g.data());
    for (std::size_t i = 0; i < 2 * p.size(); ++i) f(pd[i], gd[i]);
  }
  template <class F>
  static void visit_block_const(const std::vector<double>& p, F& f) {
    for (double v : p) f(v);
  }
  template <class F>
  static void visit_block_const(const std::vector<cdouble>& p, F& f) {
    const auto* pd = reinterpret_cast<const double*>(p.data());
    for (std::size_t i = 0; i < 2 * p.size(); ++i) f(pd[i]);
  }
};

using RealMlp = Mlp<double>;
using ComplexMlp = Mlp<cdouble>;

template <class T>
index_t parameter_count(const Mlp<T>& m) {
  return parameter_count(m.spec);
}
template <class T>
index_t flops_per_sample(const Mlp<T>& m) {
  return flops_per_sample(m.spec);
}

// Weight initialization. Sine follows the SIREN scheme: first layer
// U(-1/fan_in, 1/fan_in), deeper layers U(+-sqrt(6/fan_in)/omega). All other
// activations use uniform Kaiming-style U(+-sqrt(6/fan_in)); Gabor wavelet
// layers draw real and imaginary parts independently from that range.
// Biases start at zero.
template <class T>
Mlp<T> init_mlp(const MlpSpec& spec, Rng rng) {
  spec.validate();
  if (spec.complex_valued() != std::is_same_v<T, cdouble>)
    throw std::invalid_argument("init_mlp: scalar type does not match activation family");
  Mlp<T> model;
  model.spec = spec;
  model.rng_seed = rng.seed();
  const auto dims = spec.layer_dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto [fi, fo] = dims[i];
    LinearLayer<T> layer(fi, fo);
    double bound;
    if (spec.activation.kind == ActKind::Sine)
      bound = (i == 0) ? 1.0 / static_cast<double>(fi)
                       : std::sqrt(6.0 / static_cast<double>(fi)) / spec.activation.omega;
    else
      bound = std::sqrt(6.0 / static_cast<double>(fi));
    detail::fill_uniform(layer.weight, rng, bound);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

inline RealMlp init_real_mlp(const MlpSpec& spec, Rng rng) { return init_mlp<double>(spec, rng); }
inline ComplexMlp init_complex_mlp(const MlpSpec& spec, Rng rng) {
  return init_mlp<cdouble>(spec, rng);
}

}  // namespace iinr
