#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Small dense complex linear algebra for low-dimensional Hilbert spaces.
// Everything here is a plain immutable value; dimensions are validated to
// stay small (<= kMaxDim) because the rest of the library only ever needs
// qubits and qutrits plus a little head-room.

namespace seqctx {

using Complex = std::complex<double>;

// Tolerance ladder used across the library:
//   structure (hermiticity, normalization)      1e-12
//   spectra / orthogonality / POVM sums         1e-10
//   optimizer feasibility                       1e-8
inline constexpr double kStructureTol = 1e-12;
inline constexpr double kSpectrumTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr int kMaxDim = 8;

// Thrown when user-supplied data (files, flags, JSON payloads) is invalid.
// Internal contract violations use std::invalid_argument / std::logic_error.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A column vector of complex amplitudes.
class Ket {
 public:
  explicit Ket(std::vector<Complex> amplitudes);
  static Ket basis(int dim, int index);

  int dim() const { return static_cast<int>(amp_.size()); }
  const Complex& operator[](int i) const { return amp_[static_cast<size_t>(i)]; }

  double norm() const;
  bool is_normalized(double tol = kStructureTol) const;
  // Unit-norm copy; throws std::invalid_argument on the zero vector.
  Ket normalized() const;
  // Multiplies by a global phase so the first nonzero amplitude is real and
  // nonnegative.  Canonical form used for serialization.
  Ket with_canonical_phase(double tol = kStructureTol) const;

 private:
  std::vector<Complex> amp_;
};

// <a|b>; conjugates the first argument (physics convention).
Complex inner_product(const Ket& a, const Ket& b);

// General complex square matrix.  Used for intermediate products and
// diagnostics; the Hermitian-validated wrapper below is the primary type.
class SquareMatrix {
 public:
  explicit SquareMatrix(int dim);
  static SquareMatrix identity(int dim);

  int dim() const { return dim_; }
  Complex& at(int r, int c) { return m_[static_cast<size_t>(r * dim_ + c)]; }
  const Complex& at(int r, int c) const { return m_[static_cast<size_t>(r * dim_ + c)]; }

  Complex trace() const;
  SquareMatrix adjoint() const;
  // Largest entrywise |a_jk - b_jk|.
  double distance(const SquareMatrix& other) const;
  double max_abs() const;

  SquareMatrix operator+(const SquareMatrix& o) const;
  SquareMatrix operator-(const SquareMatrix& o) const;
  SquareMatrix operator*(const SquareMatrix& o) const;
  SquareMatrix scaled(Complex factor) const;

 private:
  int dim_;
  std::vector<Complex> m_;
};

// A square matrix validated to be Hermitian on construction.
class HermitianOperator {
 public:
  // Validates hermiticity within tol (throws std::invalid_argument), then
  // stores the exactly symmetrized matrix (a_jk + conj(a_kj))/2.
  static HermitianOperator from_matrix(const SquareMatrix& m, double tol = kStructureTol);
  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);

  int dim() const { return m_.dim(); }
  const Complex& entry(int r, int c) const { return m_.at(r, c); }
  const SquareMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double max_abs() const { return m_.max_abs(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator scaled(double factor) const;
  Ket apply(const Ket& v) const;

 private:
  explicit HermitianOperator(SquareMatrix m) : m_(std::move(m)) {}
  SquareMatrix m_;
};

// |v><v| for a normalized ket; throws std::invalid_argument otherwise.
HermitianOperator projector(const Ket& v);

// Tr(A B); real for Hermitian arguments (the imaginary part, a numerical
// residue, is discarded after being checked against kStructureTol).
double real_trace_product(const HermitianOperator& a, const HermitianOperator& b);

// A * rho * A (Hermitian for Hermitian inputs).
HermitianOperator sandwich(const HermitianOperator& a, const HermitianOperator& rho);

struct EigenSystem {
  std::vector<double> values;  // ascending
  SquareMatrix vectors;        // column k pairs with values[k]
};

// All eigenvalues, ascending.  Dimensions 1-3 use closed forms (the 3x3 case
// via the trigonometric solution of the characteristic cubic) and fall back
// to Jacobi sweeps if the closed form loses accuracy; higher dimensions use
// cyclic Jacobi directly.
std::vector<double> eigenvalues(const HermitianOperator& h);

// Eigenvalues and eigenvectors via cyclic Jacobi sweeps (convergence 1e-12
// relative off-diagonal mass).
EigenSystem eigensystem(const HermitianOperator& h);

double max_eigenvalue(const HermitianOperator& h);
double min_eigenvalue(const HermitianOperator& h);
bool is_psd(const HermitianOperator& h, double tol = kSpectrumTol);

// Principal square root of a PSD operator.  Eigenvalues in [-tol, 0) are
// clamped to zero; anything below -tol throws std::invalid_argument.
HermitianOperator sqrt_psd(const HermitianOperator& h, double tol = kSpectrumTol);

}  // namespace seqctx
