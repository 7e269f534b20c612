#pragma once

// Test-side oracles and generators.  The eigenvalue oracle deliberately uses
// a different algorithm family than the library (characteristic-polynomial
// root isolation guided by the critical points of the cubic, instead of the
// trigonometric closed form or Jacobi sweeps), so agreement between the two
// is evidence rather than tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "seqctx/linalg.hpp"
#include "seqctx/quantum.hpp"
#include "seqctx/rng.hpp"

namespace testutil {

using seqctx::Complex;
using seqctx::DensityState;
using seqctx::HermitianOperator;
using seqctx::Ket;
using seqctx::SplitMix64;
using seqctx::SquareMatrix;

// Monic characteristic cubic p(x) = x^3 + a x^2 + b x + c of a 3x3 Hermitian
// matrix, assembled from trace, Frobenius norm, and the literal determinant.
struct Cubic {
  double a = 0.0, b = 0.0, c = 0.0;
  double operator()(double x) const { return ((x + a) * x + b) * x + c; }
};

inline Cubic charpoly3(const HermitianOperator& h) {
  if (h.dim() != 3) throw std::invalid_argument("charpoly3 wants dim 3");
  double tr = 0.0;
  double frob2 = 0.0;
  for (int r = 0; r < 3; ++r) {
    tr += h.entry(r, r).real();
    for (int c = 0; c < 3; ++c) frob2 += std::norm(h.entry(r, c));
  }
  const auto& m = h.matrix();
  const Complex det = m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
                      m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
                      m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
  Cubic p;
  p.a = -tr;
  p.b = 0.5 * (tr * tr - frob2);
  p.c = -det.real();
  return p;
}

inline double bisect_root(const Cubic& p, double lo, double hi) {
  double flo = p(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = p(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All three eigenvalues (ascending, with multiplicity) by root isolation.
// Simple roots are bracketed between the critical points of the cubic and
// bisected; a root AT a critical point is a double root, invisible to sign
// changes but located to full precision by the quadratic formula on p'.
inline std::array<double, 3> eig3_oracle(const HermitianOperator& h) {
  const Cubic p = charpoly3(h);
  double row_max = 0.0;
  for (int r = 0; r < 3; ++r) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += std::abs(h.entry(r, c));
    row_max = std::max(row_max, s);
  }
  const double lo = -row_max - 1.0;
  const double hi = row_max + 1.0;
  const double scale = std::max(1.0, row_max);
  const double eps = 1e-11 * scale * scale * scale;

  const double disc = p.a * p.a - 3.0 * p.b;
  if (disc <= eps / std::max(1.0, scale)) {
    const double t = -p.a / 3.0;  // (near-)triple root
    return {t, t, t};
  }
  const double sq = std::sqrt(disc);
  const double t1 = (-p.a - sq) / 3.0;  // local max of p
  const double t2 = (-p.a + sq) / 3.0;  // local min of p
  const double p1 = p(t1);
  const double p2 = p(t2);

  std::array<double, 3> out{};
  if (std::abs(p1) <= eps && std::abs(p2) <= eps) {
    const double t = 0.5 * (t1 + t2);
    return {t, t, t};
  }
  if (std::abs(p1) <= eps) {  // double root at the local max
    out = {t1, t1, bisect_root(p, t2, hi)};
  } else if (std::abs(p2) <= eps) {  // double root at the local min
    out = {bisect_root(p, lo, t1), t2, t2};
  } else {
    out = {bisect_root(p, lo, t1), bisect_root(p, t1, t2), bisect_root(p, t2, hi)};
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline HermitianOperator random_hermitian(SplitMix64& rng, int dim, double scale = 1.0) {
  SquareMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    m.at(r, r) = Complex(scale * (2.0 * rng.uniform() - 1.0), 0.0);
    for (int c = r + 1; c < dim; ++c) {
      const Complex z(scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0));
      m.at(r, c) = z;
      m.at(c, r) = std::conj(z);
    }
  }
  return HermitianOperator::from_matrix(m);
}

inline Ket random_ket(SplitMix64& rng, int dim) {
  std::vector<Complex> amp;
  amp.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    amp.emplace_back(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
  }
  return Ket(std::move(amp)).normalized();
}

// Full-rank density operator: A^dag A plus a ridge, trace-normalized.
inline DensityState random_full_rank_state(SplitMix64& rng, int dim) {
  SquareMatrix a(dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      a.at(r, c) = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    }
  }
  SquareMatrix gram = a.adjoint() * a;
  for (int r = 0; r < dim; ++r) gram.at(r, r) += Complex(0.05, 0.0);
  const Complex tr = gram.trace();
  const HermitianOperator rho =
      HermitianOperator::from_matrix(gram.scaled(Complex(1.0 / tr.real(), 0.0)));
  return DensityState::from_operator(rho);
}

}  // namespace testutil
