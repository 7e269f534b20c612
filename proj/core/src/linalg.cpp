#include "seqctx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqctx {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(dim));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(std::vector<Complex> amplitudes) : amp_(std::move(amplitudes)) {
  check_dim(static_cast<int>(amp_.size()));
}

Ket Ket::basis(int dim, int index) {
  check_dim(dim);
  if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
  std::vector<Complex> a(static_cast<size_t>(dim), Complex{0.0, 0.0});
  a[static_cast<size_t>(index)] = Complex{1.0, 0.0};
  return Ket(std::move(a));
}

double Ket::norm() const {
  double s = 0.0;
  for (const Complex& c : amp_) s += std::norm(c);
  return std::sqrt(s);
}

bool Ket::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Ket Ket::normalized() const {
  const double n = norm();
  if (n <= kStructureTol) throw std::invalid_argument("cannot normalize the zero vector");
  std::vector<Complex> a(amp_);
  for (Complex& c : a) c /= n;
  return Ket(std::move(a));
}

Ket Ket::with_canonical_phase(double tol) const {
  for (const Complex& c : amp_) {
    const double mag = std::abs(c);
    if (mag > tol) {
      const Complex phase = c / mag;
      std::vector<Complex> a(amp_);
      for (Complex& x : a) x *= std::conj(phase);
      return Ket(std::move(a));
    }
  }
  return *this;  // zero vector: nothing to fix
}

Complex inner_product(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  Complex s{0.0, 0.0};
  for (int i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// SquareMatrix

SquareMatrix::SquareMatrix(int dim) : dim_(dim) {
  check_dim(dim);
  m_.assign(static_cast<size_t>(dim) * static_cast<size_t>(dim), Complex{0.0, 0.0});
}

SquareMatrix SquareMatrix::identity(int dim) {
  SquareMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = Complex{1.0, 0.0};
  return m;
}

Complex SquareMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (int i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

SquareMatrix SquareMatrix::adjoint() const {
  SquareMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
  return r;
}

double SquareMatrix::distance(const SquareMatrix& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("distance: dimension mismatch");
  double d = 0.0;
  for (size_t i = 0; i < m_.size(); ++i) d = std::max(d, std::abs(m_[i] - other.m_[i]));
  return d;
}

double SquareMatrix::max_abs() const {
  double d = 0.0;
  for (const Complex& c : m_) d = std::max(d, std::abs(c));
  return d;
}

SquareMatrix SquareMatrix::operator+(const SquareMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("matrix add: dimension mismatch");
  SquareMatrix r(dim_);
  for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i] + o.m_[i];
  return r;
}

SquareMatrix SquareMatrix::operator-(const SquareMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("matrix sub: dimension mismatch");
  SquareMatrix r(dim_);
  for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i] - o.m_[i];
  return r;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("matrix mul: dimension mismatch");
  SquareMatrix r(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int k = 0; k < dim_; ++k) {
      const Complex aik = at(i, k);
      if (aik == Complex{0.0, 0.0}) continue;
      for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
    }
  }
  return r;
}

SquareMatrix SquareMatrix::scaled(Complex factor) const {
  SquareMatrix r(dim_);
  for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i] * factor;
  return r;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator HermitianOperator::from_matrix(const SquareMatrix& m, double tol) {
  const int d = m.dim();
  const double scale = std::max(1.0, m.max_abs());
  SquareMatrix s(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Complex sym = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
      if (std::abs(m.at(i, j) - sym) > tol * scale) {
        throw std::invalid_argument("matrix is not Hermitian within tolerance");
      }
      s.at(i, j) = sym;
    }
  }
  for (int i = 0; i < d; ++i) s.at(i, i) = Complex{s.at(i, i).real(), 0.0};
  return HermitianOperator(std::move(s));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(SquareMatrix::identity(dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(SquareMatrix(dim));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(m_.scaled(Complex{factor, 0.0}));
}

Ket HermitianOperator::apply(const Ket& v) const {
  if (v.dim() != dim()) throw std::invalid_argument("apply: dimension mismatch");
  std::vector<Complex> out(static_cast<size_t>(dim()), Complex{0.0, 0.0});
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) out[static_cast<size_t>(i)] += m_.at(i, j) * v[j];
  return Ket(std::move(out));
}

HermitianOperator projector(const Ket& v) {
  if (!v.is_normalized()) throw std::invalid_argument("projector requires a normalized ket");
  SquareMatrix m(v.dim());
  for (int i = 0; i < v.dim(); ++i)
    for (int j = 0; j < v.dim(); ++j) m.at(i, j) = v[i] * std::conj(v[j]);
  return HermitianOperator::from_matrix(m);
}

double real_trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace product: dimension mismatch");
  Complex t{0.0, 0.0};
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < a.dim(); ++k) t += a.entry(i, k) * b.entry(k, i);
  const double scale = std::max(1.0, a.max_abs() * b.max_abs());
  if (std::abs(t.imag()) > 1e-9 * scale) {
    throw std::logic_error("trace product of Hermitian operators has a large imaginary part");
  }
  return t.real();
}

HermitianOperator sandwich(const HermitianOperator& a, const HermitianOperator& rho) {
  const SquareMatrix prod = a.matrix() * rho.matrix() * a.matrix();
  // Hermitian in exact arithmetic; symmetrization absorbs rounding drift.
  return HermitianOperator::from_matrix(prod, 1e-9);
}

// ---------------------------------------------------------------------------
// Eigen solvers

namespace {

// Cyclic Jacobi sweeps for complex Hermitian matrices.  Each rotation
// annihilates one off-diagonal pair via a phased Givens rotation.
EigenSystem jacobi_eigensystem(const HermitianOperator& h) {
  const int d = h.dim();
  SquareMatrix a = h.matrix();
  SquareMatrix v = SquareMatrix::identity(d);
  const double scale = std::max(1.0, a.max_abs());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += std::norm(a.at(p, q));
    if (off <= (1e-12 * scale) * (1e-12 * scale)) break;

    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const Complex apq = a.at(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-300) continue;
        const Complex u = apq / g;
        const double tau = (a.at(q, q).real() - a.at(p, p).real()) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau)));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        SquareMatrix rot = SquareMatrix::identity(d);
        rot.at(p, p) = Complex{c, 0.0};
        rot.at(p, q) = s * u;
        rot.at(q, p) = -s * std::conj(u);
        rot.at(q, q) = Complex{c, 0.0};

        a = rot.adjoint() * a * rot;
        v = v * rot;
      }
    }
  }

  std::vector<int> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a.at(x, x).real() < a.at(y, y).real(); });

  EigenSystem es{std::vector<double>(static_cast<size_t>(d)), SquareMatrix(d)};
  for (int k = 0; k < d; ++k) {
    es.values[static_cast<size_t>(k)] = a.at(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
    for (int r = 0; r < d; ++r) es.vectors.at(r, k) = v.at(r, order[static_cast<size_t>(k)]);
  }
  return es;
}

// Closed-form eigenvalues of a 3x3 Hermitian matrix: shift to zero trace and
// apply the trigonometric solution of the characteristic cubic.
std::array<double, 3> analytic_eig3(const HermitianOperator& h) {
  const double q = h.trace() / 3.0;
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double di = h.entry(i, i).real() - q;
    p2 += di * di;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) p2 += 2.0 * std::norm(h.entry(i, j));

  const double p = std::sqrt(p2 / 6.0);
  if (p <= 1e-14 * std::max(1.0, std::abs(q))) {
    return {q, q, q};
  }

  // det((A - qI)/p), guaranteed real for Hermitian input.
  SquareMatrix b = h.matrix() - SquareMatrix::identity(3).scaled(Complex{q, 0.0});
  b = b.scaled(Complex{1.0 / p, 0.0});
  const Complex det = b.at(0, 0) * (b.at(1, 1) * b.at(2, 2) - b.at(1, 2) * b.at(2, 1)) -
                      b.at(0, 1) * (b.at(1, 0) * b.at(2, 2) - b.at(1, 2) * b.at(2, 0)) +
                      b.at(0, 2) * (b.at(1, 0) * b.at(2, 1) - b.at(1, 1) * b.at(2, 0));
  const double r = std::clamp(det.real() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;

  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double mid = 3.0 * q - hi - lo;
  return {lo, mid, hi};
}

// Residual of the characteristic polynomial at x, normalized by matrix scale.
double charpoly_residual(const HermitianOperator& h, double x) {
  SquareMatrix b = h.matrix() - SquareMatrix::identity(h.dim()).scaled(Complex{x, 0.0});
  const Complex det = b.at(0, 0) * (b.at(1, 1) * b.at(2, 2) - b.at(1, 2) * b.at(2, 1)) -
                      b.at(0, 1) * (b.at(1, 0) * b.at(2, 2) - b.at(1, 2) * b.at(2, 0)) +
                      b.at(0, 2) * (b.at(1, 0) * b.at(2, 1) - b.at(1, 1) * b.at(2, 0));
  const double scale = std::max(1.0, h.max_abs());
  return std::abs(det) / (scale * scale * scale);
}

// Characteristic polynomial lambda^3 + c2 lambda^2 + c1 lambda + c0 of a 3x3
// Hermitian matrix, via the trace, the Frobenius norm, and the determinant.
struct Cubic {
  double c2, c1, c0;
};

Cubic charpoly3(const HermitianOperator& h) {
  const double tr = h.trace();
  double tr_sq = 0.0;  // Tr(h^2) = sum |h_ij|^2 for Hermitian h
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) tr_sq += std::norm(h.entry(i, j));
  }
  const SquareMatrix& b = h.matrix();
  const Complex det = b.at(0, 0) * (b.at(1, 1) * b.at(2, 2) - b.at(1, 2) * b.at(2, 1)) -
                      b.at(0, 1) * (b.at(1, 0) * b.at(2, 2) - b.at(1, 2) * b.at(2, 0)) +
                      b.at(0, 2) * (b.at(1, 0) * b.at(2, 1) - b.at(1, 1) * b.at(2, 0));
  return {-tr, 0.5 * (tr * tr - tr_sq), -det.real()};
}

// Newton-polish every root of the characteristic cubic.  Only valid when the
// spectrum is well separated: simple roots converge quadratically, while a
// double root can only be recovered to about sqrt(coefficient noise) by any
// polynomial-side method (the callers route clustered spectra to Jacobi).
std::array<double, 3> polished_eig3(const HermitianOperator& h) {
  std::array<double, 3> e = analytic_eig3(h);
  const Cubic cp = charpoly3(h);
  auto poly = [&](double x) { return ((x + cp.c2) * x + cp.c1) * x + cp.c0; };
  auto deriv = [&](double x) { return (3.0 * x + 2.0 * cp.c2) * x + cp.c1; };
  for (double& root : e) {
    for (int it = 0; it < 3; ++it) {
      const double d = deriv(root);
      if (std::abs(d) < 1e-300) break;
      root -= poly(root) / d;
    }
  }
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

std::vector<double> eigenvalues(const HermitianOperator& h) {
  const int d = h.dim();
  if (d == 1) return {h.entry(0, 0).real()};
  if (d == 2) {
    const double a = h.entry(0, 0).real();
    const double b = h.entry(1, 1).real();
    const double m = 0.5 * (a + b);
    const double r = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(h.entry(0, 1)));
    return {m - r, m + r};
  }
  if (d == 3) {
    const std::array<double, 3> e = polished_eig3(h);
    // The polished closed form is only trustworthy for well-separated
    // spectra; clustered or degenerate ones go to Jacobi sweeps, which work
    // on the matrix itself and resolve double eigenvalues to full precision.
    const double scale = std::max(1.0, h.max_abs());
    const bool separated =
        (e[1] - e[0]) > 1e-4 * scale && (e[2] - e[1]) > 1e-4 * scale;
    if (!separated) return jacobi_eigensystem(h).values;
    for (double x : e) {
      if (charpoly_residual(h, x) > 1e-9) return jacobi_eigensystem(h).values;
    }
    return {e[0], e[1], e[2]};
  }
  return jacobi_eigensystem(h).values;
}

EigenSystem eigensystem(const HermitianOperator& h) { return jacobi_eigensystem(h); }

double max_eigenvalue(const HermitianOperator& h) { return eigenvalues(h).back(); }

double min_eigenvalue(const HermitianOperator& h) { return eigenvalues(h).front(); }

bool is_psd(const HermitianOperator& h, double tol) { return min_eigenvalue(h) >= -tol; }

HermitianOperator sqrt_psd(const HermitianOperator& h, double tol) {
  const EigenSystem es = eigensystem(h);
  const int d = h.dim();
  SquareMatrix m(d);
  for (int k = 0; k < d; ++k) {
    double lam = es.values[static_cast<size_t>(k)];
    if (lam < -tol) throw std::invalid_argument("sqrt_psd: operator has a negative eigenvalue");
    lam = std::max(lam, 0.0);
    const double root = std::sqrt(lam);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        m.at(i, j) += root * es.vectors.at(i, k) * std::conj(es.vectors.at(j, k));
      }
    }
  }
  return HermitianOperator::from_matrix(m, 1e-9);
}

}  // namespace seqctx
