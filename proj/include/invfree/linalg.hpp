#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invfree {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

class PowerIterationStall : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n) : data_(n, 0.0) {}
  DenseVector(std::initializer_list<double> xs) : data_(xs) {}
  explicit DenseVector(std::vector<double> xs) : data_(std::move(xs)) {}

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  const std::vector<double>& entries() const { return data_; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::vector<double> data_;
};

// Row-major dense matrix; all routines below assume square inputs unless noted.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& entries() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class VectorNorm { max, euclidean };
enum class MatrixNorm { spectral, frobenius, max_row_sum };

inline std::string norm_name(VectorNorm kind) {
  return kind == VectorNorm::max ? "max" : "euclidean";
}

struct InverseResult {
  DenseMatrix inverse;
  double determinant = 0.0;
};

DenseMatrix identity(std::size_t n);
DenseMatrix transpose(const DenseMatrix& m);

DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double s, const DenseVector& v);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& m);
DenseVector operator*(const DenseMatrix& m, const DenseVector& v);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

bool all_finite(const DenseVector& v);
bool all_finite(const DenseMatrix& m);

// LU with partial pivoting; determinant is the pivot product with the
// permutation sign.  A pivot below 1e-14 * max|entry| counts as singular.
InverseResult invert(const DenseMatrix& m);
double determinant(const DenseMatrix& m);
DenseVector solve_linear(const DenseMatrix& a, const DenseVector& b);

// Signed cofactor of entry (row, col), 0-based; minor expansion for n <= 4,
// adjugate-from-inverse for larger n.  Returns 1 for n = 1.
double cofactor(const DenseMatrix& m, std::size_t row, std::size_t col);

double vector_norm(const DenseVector& v, VectorNorm kind);
double matrix_norm(const DenseMatrix& m, MatrixNorm kind);

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration, seeded with the all-ones vector and re-seeded once with a
// pseudo-random vector if the estimate has not settled within the cap.
double dominant_eigenvalue(const DenseMatrix& sym, double tol = 1e-12,
                           int max_iterations = 10000);

// Eigenvalues (max, min) of a symmetric 2x2 matrix, closed form.
std::pair<double, double> symmetric_2x2_eigenvalues(const DenseMatrix& m);

}  // namespace invfree
