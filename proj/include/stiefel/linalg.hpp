#pragma once

// Dense linear algebra surface used by the geometry and the solvers.
//
// Storage is Eigen's default column-major layout. Everything downstream goes
// through the functions declared here plus ordinary Eigen expressions.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>

namespace stiefel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Builds a matrix from nested row lists and rejects non-finite entries.
Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

/// Throws ContractViolation if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);

Matrix matmul(const Matrix& a, const Matrix& b);

/// Solves a x = b for square a with partial pivoting.
/// Intended for the small (k x k, 2k x 2k) systems of the Cayley formulas.
/// Throws SingularMatrix when a is singular to working precision.
Matrix solve_square(const Matrix& a, const Matrix& b);

struct ThinQR {
  Matrix q;  // n x k, orthonormal columns
  Matrix r;  // k x k, upper triangular, diag(r) >= 0
};

/// Thin Householder QR with the sign convention diag(r) >= 0.
/// Throws RankDeficient if a column is (numerically) dependent on the previous ones.
ThinQR qr_thin(const Matrix& a);

struct SymmetricEigen {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column i belongs to eigenvalues[i]
};

/// Cyclic Jacobi rotation eigensolver for small symmetric matrices.
/// Throws NotSymmetric if ||a - a^T||_F > 1e-12 ||a||_F.
SymmetricEigen jacobi_eigh(const Matrix& a);

}  // namespace stiefel
