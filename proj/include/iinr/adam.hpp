#pragma once

// Adam with bias correction over the flat real-parameter view of a model.
// Complex parameters are updated as independent (re, im) pairs, which is the
// steepest-descent update for the conjugate Wirtinger gradient convention
// used by the layers. Gradients are zeroed after each step.

#include <cmath>
#include <cstdint>
#include <vector>

namespace iinr {

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  std::int64_t step_count = 0;
  std::vector<double> m, v;
};

// Model must provide for_each_param(f) visiting (double& param, double& grad)
// in a stable order.
template <class Model>
void adam_step(Model& model, AdamState& st) {
  if (st.m.empty()) {
    std::size_t n = 0;
    model.for_each_param([&](double&, double&) { ++n; });
    st.m.assign(n, 0.0);
    st.v.assign(n, 0.0);
  }
  st.step_count += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  std::size_t i = 0;
  model.for_each_param([&](double& p, double& g) {
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double mhat = st.m[i] / bc1;
    const double vhat = st.v[i] / bc2;
    p -= st.lr * mhat / (std::sqrt(vhat) + st.eps_adam);
    g = 0.0;
    ++i;
  });
}

}  // namespace iinr
