#include "stiefel/linalg.hpp"

#include "stiefel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace stiefel {

namespace {

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) throw ContractViolation("from_rows: empty matrix");
  const auto n = static_cast<Eigen::Index>(rows.begin()->size());
  if (n == 0) throw ContractViolation("from_rows: empty row");
  Matrix a(m, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw ContractViolation("from_rows: ragged rows");
    }
    Eigen::Index j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  require_finite(a, "from_rows");
  return a;
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ContractViolation(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ContractViolation("matmul: cannot multiply " + shape(a) + " by " + shape(b));
  }
  return a * b;
}

Matrix solve_square(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) {
    throw ContractViolation("solve_square: matrix is " + shape(a) + ", not square");
  }
  if (b.rows() != a.rows()) {
    throw ContractViolation("solve_square: right-hand side " + shape(b) + " does not match " +
                            shape(a));
  }
  if (!a.allFinite()) throw SingularMatrix("solve_square: non-finite matrix");

  Eigen::PartialPivLU<Matrix> lu(a);
  // rcond() is a 1-norm estimate of 1/cond(a); anything below m*eps is singular
  // as far as double precision is concerned.
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(a.rows()) * kEps)) {
    throw SingularMatrix("solve_square: matrix is singular to working precision (rcond=" +
                         std::to_string(rcond) + ")");
  }
  return lu.solve(b);
}

ThinQR qr_thin(const Matrix& a) {
  const auto n = a.rows();
  const auto k = a.cols();
  if (n < k) throw ContractViolation("qr_thin: need rows >= cols, got " + shape(a));
  require_finite(a, "qr_thin");

  Eigen::HouseholderQR<Matrix> qr(a);
  ThinQR out;
  out.q = qr.householderQ() * Matrix::Identity(n, k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  const double tol = static_cast<double>(std::max(n, k)) * kEps * std::max(a.norm(), 1e-300);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (std::abs(out.r(j, j)) <= tol) {
      throw RankDeficient("qr_thin: column " + std::to_string(j) + " is linearly dependent");
    }
    if (out.r(j, j) < 0.0) {
      out.q.col(j) *= -1.0;
      out.r.row(j) *= -1.0;
    }
  }
  return out;
}

SymmetricEigen jacobi_eigh(const Matrix& input) {
  if (input.rows() != input.cols()) {
    throw ContractViolation("jacobi_eigh: matrix is " + shape(input) + ", not square");
  }
  require_finite(input, "jacobi_eigh");
  const double scale = input.norm();
  if ((input - input.transpose()).norm() > 1e-12 * scale) {
    throw NotSymmetric("jacobi_eigh: input is not symmetric");
  }

  const auto m = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(m, m);

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= kEps * scale) break;
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p,q); t is the smaller root of
        // t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        for (Eigen::Index r = 0; r < m; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < m; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < m; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    out.eigenvalues(i) = a(src, src);
    out.eigenvectors.col(i) = v.col(src);
  }
  return out;
}

}  // namespace stiefel
