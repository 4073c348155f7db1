#pragma once

// Pointwise nonlinearities for the three backbone families plus ReLU and
// Identity. Real activations carry an ordinary derivative; the complex Gabor
// wavelet is non-holomorphic, so its backward applies the Wirtinger chain
// rule with the gradient convention g = dL/dRe + i*dL/dIm (real loss L).

#include "iinr/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iinr {

enum class ActKind { Sine, Gauss, GaborWavelet, ReLU, Identity };

struct Activation {
  ActKind kind = ActKind::Identity;
  double omega = 30.0;  // Sine / GaborWavelet frequency
  double sigma = 10.0;  // Gauss / GaborWavelet spread

  static Activation sine(double omega) { return {ActKind::Sine, omega, 0.0}; }
  static Activation gauss(double sigma) { return {ActKind::Gauss, 0.0, sigma}; }
  static Activation gabor(double omega, double sigma) {
    return {ActKind::GaborWavelet, omega, sigma};
  }
  static Activation relu() { return {ActKind::ReLU, 0.0, 0.0}; }
  static Activation identity() { return {ActKind::Identity, 0.0, 0.0}; }

  bool is_complex() const { return kind == ActKind::GaborWavelet; }

  void validate() const {
    if ((kind == ActKind::Sine || kind == ActKind::GaborWavelet) && !(omega > 0.0))
      throw std::invalid_argument("activation: omega must be > 0");
    if ((kind == ActKind::Gauss || kind == ActKind::GaborWavelet) && !(sigma > 0.0))
      throw std::invalid_argument("activation: sigma must be > 0");
  }
};

inline const char* act_name(ActKind k) {
  switch (k) {
    case ActKind::Sine: return "sine";
    case ActKind::Gauss: return "gauss";
    case ActKind::GaborWavelet: return "gabor";
    case ActKind::ReLU: return "relu";
    case ActKind::Identity: return "identity";
  }
  return "?";
}

inline double act_scalar(const Activation& a, double z) {
  switch (a.kind) {
    case ActKind::Sine: return std::sin(a.omega * z);
    case ActKind::Gauss: {
      const double s = a.sigma * z;
      return std::exp(-s * s);
    }
    case ActKind::ReLU: return z > 0.0 ? z : 0.0;
    case ActKind::Identity: return z;
    case ActKind::GaborWavelet:
      throw std::invalid_argument("gabor wavelet needs complex input");
  }
  return 0.0;
}

inline double act_scalar_deriv(const Activation& a, double z) {
  switch (a.kind) {
    case ActKind::Sine: return a.omega * std::cos(a.omega * z);
    case ActKind::Gauss: {
      const double s = a.sigma * z;
      return -2.0 * a.sigma * s * std::exp(-s * s);
    }
    case ActKind::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case ActKind::Identity: return 1.0;
    case ActKind::GaborWavelet:
      throw std::invalid_argument("gabor wavelet needs complex input");
  }
  return 0.0;
}

// psi(z) = exp(i*omega*z - |sigma*z|^2)
inline cdouble gabor_scalar(const Activation& a, cdouble z) {
  const double norm2 = std::norm(a.sigma * z);
  const cdouble expo = cdouble(0.0, a.omega) * z - norm2;
  return std::exp(expo);
}

// Wirtinger partials d(psi)/dz and d(psi)/dzbar at z.
inline void gabor_partials(const Activation& a, cdouble z, cdouble& dz, cdouble& dzbar) {
  const cdouble psi = gabor_scalar(a, z);
  const double s2 = a.sigma * a.sigma;
  dz = psi * (cdouble(0.0, a.omega) - s2 * std::conj(z));
  dzbar = psi * (-s2 * z);
}

inline Mat activation_apply(const Activation& a, const Mat& z) {
  if (a.is_complex())
    throw std::invalid_argument("activation_apply: gabor wavelet on real tensor");
  Mat out(z.rows, z.cols);
  for (std::size_t i = 0; i < z.data.size(); ++i) out.data[i] = act_scalar(a, z.data[i]);
  return out;
}

namespace detail {
inline void sincos_both(double x, double& s, double& c) {
#if defined(__GLIBC__)
  ::sincos(x, &s, &c);
#else
  s = std::sin(x);
  c = std::cos(x);
#endif
}
}  // namespace detail

// Training-path variant: computes the activation and its derivative in one
// pass (one sincos / one exp per element) so backward is a plain multiply.
inline Mat activation_apply_train(const Activation& a, const Mat& z, Mat& deriv) {
  Mat out(z.rows, z.cols);
  deriv = Mat(z.rows, z.cols);
  switch (a.kind) {
    case ActKind::Sine:
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        double s, c;
        detail::sincos_both(a.omega * z.data[i], s, c);
        out.data[i] = s;
        deriv.data[i] = a.omega * c;
      }
      return out;
    case ActKind::Gauss:
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        const double s = a.sigma * z.data[i];
        const double e = std::exp(-s * s);
        out.data[i] = e;
        deriv.data[i] = -2.0 * a.sigma * s * e;
      }
      return out;
    case ActKind::ReLU:
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        const bool pos = z.data[i] > 0.0;
        out.data[i] = pos ? z.data[i] : 0.0;
        deriv.data[i] = pos ? 1.0 : 0.0;
      }
      return out;
    case ActKind::Identity:
      deriv.fill(1.0);
      return z;
    case ActKind::GaborWavelet:
      throw std::invalid_argument("activation_apply_train: gabor wavelet on real tensor");
  }
  return out;
}

// Complex variant caching both Wirtinger partials.
inline CMat activation_apply_train(const Activation& a, const CMat& z, CMat& dz, CMat& dzbar) {
  CMat out(z.rows, z.cols);
  dz = CMat(z.rows, z.cols);
  dzbar = CMat(z.rows, z.cols);
  switch (a.kind) {
    case ActKind::GaborWavelet: {
      const double s2 = a.sigma * a.sigma;
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        const cdouble psi = gabor_scalar(a, z.data[i]);
        out.data[i] = psi;
        dz.data[i] = psi * (cdouble(0.0, a.omega) - s2 * std::conj(z.data[i]));
        dzbar.data[i] = psi * (-s2 * z.data[i]);
      }
      return out;
    }
    case ActKind::Identity:
      dz.fill(cdouble(1.0, 0.0));
      dzbar.fill(cdouble(0.0, 0.0));
      return z;
    default:
      throw std::invalid_argument(std::string("activation_apply_train: ") + act_name(a.kind) +
                                  " on complex tensor");
  }
}

inline CMat activation_apply(const Activation& a, const CMat& z) {
  CMat out(z.rows, z.cols);
  switch (a.kind) {
    case ActKind::GaborWavelet:
      for (std::size_t i = 0; i < z.data.size(); ++i) out.data[i] = gabor_scalar(a, z.data[i]);
      return out;
    case ActKind::Identity:
      return z;
    default:
      throw std::invalid_argument(std::string("activation_apply: ") + act_name(a.kind) +
                                  " on complex tensor");
  }
}

// Backward through the activation given the cached pre-activation z and the
// cotangent grad_out; returns grad wrt z.
inline Mat activation_backward(const Activation& a, const Mat& z, const Mat& grad_out) {
  require_shape(z.same_shape(grad_out), "activation_backward");
  Mat out(z.rows, z.cols);
  for (std::size_t i = 0; i < z.data.size(); ++i)
    out.data[i] = grad_out.data[i] * act_scalar_deriv(a, z.data[i]);
  return out;
}

inline CMat activation_backward(const Activation& a, const CMat& z, const CMat& grad_out) {
  require_shape(z.same_shape(grad_out), "activation_backward");
  CMat out(z.rows, z.cols);
  switch (a.kind) {
    case ActKind::GaborWavelet:
      // g_z = g * conj(df/dz) + conj(g) * df/dzbar
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        cdouble dz, dzbar;
        gabor_partials(a, z.data[i], dz, dzbar);
        out.data[i] = grad_out.data[i] * std::conj(dz) + std::conj(grad_out.data[i]) * dzbar;
      }
      return out;
    case ActKind::Identity:
      return grad_out;
    default:
      throw std::invalid_argument(std::string("activation_backward: ") + act_name(a.kind) +
                                  " on complex tensor");
  }
}

}  // namespace iinr
