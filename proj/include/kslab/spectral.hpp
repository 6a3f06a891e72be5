#pragma once

// Spectral calculus on the periodic grid.
//
// Transform convention (used everywhere in the project):
//
//   forward:  c(k) = Σ_x f(x) exp(-2πi k·x / L)       (unnormalized; c(0) = mean × cell count)
//   inverse:  f(x) = (1/N) Σ_k c(k) exp(+2πi k·x / L)
//
// Wavevector components are signed, k_j ∈ [-N_j/2, N_j/2 - 1], and the
// fractional Laplacian (-Δ)^{α/2} acts as the multiplier μ(k) = |ξ(k)|^α with
// ξ_j = 2π k_j / L_j.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "kslab/grid.hpp"

namespace kslab {

template <typename Scalar>
class SpectralFieldT {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  SpectralFieldT() = default;
  SpectralFieldT(Grid grid, Vector coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) throw std::invalid_argument("spectrum size does not match grid");
  }

  const Grid& grid() const { return grid_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  Complex operator[](Eigen::Index i) const { return coeffs_[i]; }

 private:
  Grid grid_;
  Vector coeffs_;
};

using SpectralField = SpectralFieldT<double>;

/// Signed wavenumber stored at array position i on an axis of n points.
inline int signed_wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

/// Flat index of the mode -k, the Hermitian partner of the mode at `flat`.
inline Eigen::Index conjugate_index(const Grid& grid, Eigen::Index flat) {
  auto idx = grid.unravel(flat);
  for (int a = 0; a < grid.dim(); ++a) {
    const int n = grid.axis(a).points;
    auto& i = idx[static_cast<std::size_t>(a)];
    i = (n - i) % n;
  }
  return grid.ravel(idx);
}

/// |ξ(k)|² for every stored mode.
inline Eigen::ArrayXd wavevector_norm2(const Grid& grid) {
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    const auto idx = grid.unravel(c);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto& ax = grid.axis(a);
      const double xi = 2.0 * std::numbers::pi * signed_wavenumber(idx[static_cast<std::size_t>(a)], ax.points) / ax.length;
      s += xi * xi;
    }
    out[c] = s;
  }
  return out;
}

/// μ(k) = |ξ(k)|^{order}; order = α gives the symbol of (-Δ)^{α/2}.
inline Eigen::ArrayXd fractional_symbol(const Grid& grid, double order) {
  return wavevector_norm2(grid).pow(0.5 * order);
}

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

/// In-place multi-dimensional complex transform, one axis at a time.
template <typename Scalar>
void transform_axes(const Grid& grid, Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& data, bool inverse) {
  using Complex = std::complex<Scalar>;
  auto& fft = fft_engine<Scalar>();
  std::vector<Complex> line, out;
  Eigen::Index stride = 1;
  for (int a = grid.dim() - 1; a >= 0; --a) {
    const int n = grid.axis(a).points;
    line.resize(static_cast<std::size_t>(n));
    const Eigen::Index block = stride * n;
    for (Eigen::Index outer = 0; outer < grid.size(); outer += block) {
      for (Eigen::Index inner = 0; inner < stride; ++inner) {
        const Eigen::Index base = outer + inner;
        for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = data[base + i * stride];
        if (inverse)
          fft.inv(out, line);
        else
          fft.fwd(out, line);
        for (int i = 0; i < n; ++i) data[base + i * stride] = out[static_cast<std::size_t>(i)];
      }
    }
    stride = block;
  }
}

}  // namespace detail

/// Discrete Fourier transform of a real field (unnormalized forward convention).
template <typename Scalar>
SpectralFieldT<Scalar> forward_transform(const FieldT<Scalar>& f) {
  if (!f.values().allFinite()) throw std::invalid_argument("forward_transform: non-finite input");
  typename SpectralFieldT<Scalar>::Vector data = f.values().template cast<std::complex<Scalar>>();
  detail::transform_axes<Scalar>(f.grid(), data, false);
  return SpectralFieldT<Scalar>(f.grid(), std::move(data));
}

/// Largest violation of c(-k) = conj(c(k)), relative to the largest coefficient.
template <typename Scalar>
Scalar hermitian_defect(const SpectralFieldT<Scalar>& s) {
  const auto& c = s.coeffs();
  const Scalar scale = c.size() ? c.cwiseAbs().maxCoeff() : Scalar(0);
  if (scale == Scalar(0)) return Scalar(0);
  Scalar worst = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const Eigen::Index j = conjugate_index(s.grid(), i);
    worst = std::max(worst, std::abs(c[j] - std::conj(c[i])));
  }
  return worst / scale;
}

/// Inverse transform back to a real field; rejects spectra that are not Hermitian.
template <typename Scalar>
FieldT<Scalar> inverse_transform(const SpectralFieldT<Scalar>& s) {
  if (hermitian_defect(s) > Scalar(1e-10))
    throw std::invalid_argument("inverse_transform: spectrum violates Hermitian symmetry");
  typename SpectralFieldT<Scalar>::Vector data = s.coeffs();
  detail::transform_axes<Scalar>(s.grid(), data, true);
  return FieldT<Scalar>(s.grid(), data.real());
}

/// Mode-wise multiplication c(k) ← m(k) c(k).
template <typename Scalar, typename Derived>
SpectralFieldT<Scalar> apply_multiplier(const SpectralFieldT<Scalar>& s, const Eigen::ArrayBase<Derived>& m) {
  typename SpectralFieldT<Scalar>::Vector c = (s.coeffs().array() * m.template cast<std::complex<Scalar>>()).matrix();
  return SpectralFieldT<Scalar>(s.grid(), std::move(c));
}

inline void require_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (1,2)");
}

/// (-Δ)^{α/2} f for α ∈ (1,2) via the Fourier multiplier |ξ|^α.
template <typename Scalar>
FieldT<Scalar> fractional_laplacian(const FieldT<Scalar>& f, double alpha) {
  require_alpha(alpha);
  auto s = apply_multiplier(forward_transform(f), fractional_symbol(f.grid(), alpha));
  s.coeffs()[0] = 0;
  return inverse_transform(s);
}

/// Solves (I + (-Δ)^{α/2}) v = u mode-wise, v̂(k) = û(k) / (1 + μ(k)).
template <typename Scalar>
FieldT<Scalar> resolvent_solve(const FieldT<Scalar>& u, double alpha) {
  const Eigen::ArrayXd inv = (1.0 + fractional_symbol(u.grid(), alpha)).inverse();
  auto s = apply_multiplier(forward_transform(u), inv);
  s.coeffs()[0] = std::complex<Scalar>(u.values().sum(), 0);
  return inverse_transform(s);
}

/// Spectral gradient, one field per axis. The Nyquist mode is dropped so the result stays real.
template <typename Scalar>
std::vector<FieldT<Scalar>> gradient(const FieldT<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  const Grid& grid = f.grid();
  const auto spec = forward_transform(f);
  std::vector<FieldT<Scalar>> out;
  for (int a = 0; a < grid.dim(); ++a) {
    const auto& ax = grid.axis(a);
    typename SpectralFieldT<Scalar>::Vector c(grid.size());
    for (Eigen::Index m = 0; m < grid.size(); ++m) {
      const int i = grid.unravel(m)[static_cast<std::size_t>(a)];
      const int k = signed_wavenumber(i, ax.points);
      const double xi = (2 * i == ax.points) ? 0.0 : 2.0 * std::numbers::pi * k / ax.length;
      c[m] = spec[m] * Complex(0, static_cast<Scalar>(xi));
    }
    out.push_back(inverse_transform(SpectralFieldT<Scalar>(grid, std::move(c))));
  }
  return out;
}

/// L² inner product ⟨f, g⟩ with cell-volume weights.
template <typename Scalar>
Scalar inner_product(const FieldT<Scalar>& f, const FieldT<Scalar>& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  return f.values().dot(g.values()) * static_cast<Scalar>(f.grid().cell_volume());
}

}  // namespace kslab
