#include "invfree/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

namespace invfree {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw LinalgError(what);
}

double max_abs_entry(const DenseMatrix& m) {
  double best = 0.0;
  for (double v : m.entries()) best = std::max(best, std::abs(v));
  return best;
}

struct LuFactors {
  DenseMatrix lu;             // L below the diagonal (unit diag implied), U on and above
  std::vector<std::size_t> perm;
  double det = 0.0;
};

LuFactors lu_factor(const DenseMatrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0, "lu_factor: square matrix required");
  const std::size_t n = m.rows();
  const double tiny = 1e-14 * max_abs_entry(m);

  LuFactors f;
  f.lu = m;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  double sign = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot_row = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(pivot_row, k))) pivot_row = i;
    if (std::abs(f.lu(pivot_row, k)) <= tiny)
      throw SingularMatrix("singular matrix: pivot " + std::to_string(k) +
                           " below threshold");
    if (pivot_row != k) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(f.lu(k, j), f.lu(pivot_row, j));
      std::swap(f.perm[k], f.perm[pivot_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      for (std::size_t j = k + 1; j < n; ++j)
        f.lu(i, j) -= f.lu(i, k) * f.lu(k, j);
    }
  }
  f.det = sign;
  for (std::size_t k = 0; k < n; ++k) f.det *= f.lu(k, k);
  return f;
}

DenseVector lu_solve(const LuFactors& f, const DenseVector& b) {
  const std::size_t n = f.perm.size();
  DenseVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * y[j];
    y[ii] = s / f.lu(ii, ii);
  }
  return y;
}

// Determinant of a minor by direct expansion; only used for n - 1 <= 3.
double det_small(const DenseMatrix& m) {
  switch (m.rows()) {
    case 0: return 1.0;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      throw LinalgError("det_small: unsupported size");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw LinalgError("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  require(a.size() == b.size(), "vector add: size mismatch");
  DenseVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  require(a.size() == b.size(), "vector sub: size mismatch");
  DenseVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

DenseVector operator*(double s, const DenseVector& v) {
  DenseVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add: shape mismatch");
  DenseMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sub: shape mismatch");
  DenseMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

DenseMatrix operator*(double s, const DenseMatrix& m) {
  DenseMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = s * m(i, j);
  return r;
}

DenseVector operator*(const DenseMatrix& m, const DenseVector& v) {
  require(m.cols() == v.size(), "matrix-vector product: shape mismatch");
  DenseVector r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matrix product: shape mismatch");
  DenseMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

bool all_finite(const DenseVector& v) {
  for (double x : v) if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const DenseMatrix& m) {
  for (double x : m.entries()) if (!std::isfinite(x)) return false;
  return true;
}

InverseResult invert(const DenseMatrix& m) {
  const LuFactors f = lu_factor(m);
  const std::size_t n = m.rows();
  InverseResult out;
  out.determinant = f.det;
  out.inverse = DenseMatrix(n, n);
  DenseVector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const DenseVector col = lu_solve(f, e);
    for (std::size_t i = 0; i < n; ++i) out.inverse(i, j) = col[i];
    e[j] = 0.0;
  }
  return out;
}

double determinant(const DenseMatrix& m) { return lu_factor(m).det; }

DenseVector solve_linear(const DenseMatrix& a, const DenseVector& b) {
  require(a.rows() == b.size(), "solve_linear: shape mismatch");
  return lu_solve(lu_factor(a), b);
}

double cofactor(const DenseMatrix& m, std::size_t row, std::size_t col) {
  require(m.rows() == m.cols() && m.rows() > 0, "cofactor: square matrix required");
  const std::size_t n = m.rows();
  require(row < n && col < n, "cofactor: index out of range");
  if (n == 1) return 1.0;
  const double sign = ((row + col) % 2 == 0) ? 1.0 : -1.0;
  if (n <= 4) {
    DenseMatrix minor(n - 1, n - 1);
    for (std::size_t i = 0, mi = 0; i < n; ++i) {
      if (i == row) continue;
      for (std::size_t j = 0, mj = 0; j < n; ++j) {
        if (j == col) continue;
        minor(mi, mj++) = m(i, j);
      }
      ++mi;
    }
    return sign * det_small(minor);
  }
  // adj(m) = det(m) * inverse(m), so C(row, col) = det * inv(col, row)
  const InverseResult inv = invert(m);
  return inv.determinant * inv.inverse(col, row);
}

double vector_norm(const DenseVector& v, VectorNorm kind) {
  require(v.size() > 0, "vector_norm: empty vector");
  if (kind == VectorNorm::max) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
  }
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dominant_eigenvalue(const DenseMatrix& sym, double tol, int max_iterations) {
  require(sym.rows() == sym.cols() && sym.rows() > 0,
          "dominant_eigenvalue: square matrix required");
  const std::size_t n = sym.rows();

  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0;
  bool reseeded = false;
  auto reseed = [&] {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = dist(rng);
    reseeded = true;
  };

  double scale = vector_norm(v, VectorNorm::euclidean);
  v = (1.0 / scale) * v;
  double lambda = 0.0;
  int iter = 0;
  while (true) {
    const DenseVector w = sym * v;
    const double wn = vector_norm(w, VectorNorm::euclidean);
    if (wn == 0.0) {
      if (!reseeded) {
        reseed();
        v = (1.0 / vector_norm(v, VectorNorm::euclidean)) * v;
        iter = 0;
        continue;
      }
      return 0.0;  // v stayed in the kernel after reseeding: matrix is zero-like
    }
    const double lambda_next = wn;  // v is unit, so |sym v| -> lambda_max
    v = (1.0 / wn) * w;
    if (iter > 0 && std::abs(lambda_next - lambda) <= tol * std::max(1.0, lambda_next))
      return lambda_next;
    lambda = lambda_next;
    if (++iter >= max_iterations) {
      if (!reseeded) {
        reseed();
        v = (1.0 / vector_norm(v, VectorNorm::euclidean)) * v;
        iter = 0;
        continue;
      }
      throw PowerIterationStall("power iteration did not settle within " +
                                std::to_string(max_iterations) + " iterations");
    }
  }
}

std::pair<double, double> symmetric_2x2_eigenvalues(const DenseMatrix& m) {
  require(m.rows() == 2 && m.cols() == 2, "symmetric_2x2_eigenvalues: 2x2 required");
  const double tr = m(0, 0) + m(1, 1);
  const double gap = std::hypot(m(0, 0) - m(1, 1), 2.0 * m(0, 1));
  return {(tr + gap) / 2.0, (tr - gap) / 2.0};
}

double matrix_norm(const DenseMatrix& m, MatrixNorm kind) {
  require(m.rows() > 0 && m.cols() > 0, "matrix_norm: empty matrix");
  switch (kind) {
    case MatrixNorm::frobenius: {
      double s = 0.0;
      for (double x : m.entries()) s += x * x;
      return std::sqrt(s);
    }
    case MatrixNorm::max_row_sum: {
      double best = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
      }
      return best;
    }
    case MatrixNorm::spectral: {
      if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
      const DenseMatrix gram = m * transpose(m);
      if (gram.rows() == 2)
        return std::sqrt(std::max(0.0, symmetric_2x2_eigenvalues(gram).first));
      return std::sqrt(std::max(0.0, dominant_eigenvalue(gram)));
    }
  }
  throw LinalgError("matrix_norm: unknown norm kind");
}

}  // namespace invfree
