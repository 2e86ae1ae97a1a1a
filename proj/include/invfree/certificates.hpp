#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "invfree/linalg.hpp"
#include "invfree/problem.hpp"

namespace invfree {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CertificateFailed : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class HOutOfRange : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

// a: the real root of a^3 + 2a^2 + 3a - 2 = 0 (in (0.477, 0.478)), the pass
// threshold for h = B^2 eta K.  radius_factor scales B*eta into the radius of
// the existence/uniqueness ball: (2 - a - a^2) / (2 (1 - a - a^2)).
struct ConvergenceThreshold {
  double a = 0.0;
  double radius_factor = 0.0;
};

const ConvergenceThreshold& convergence_threshold();

enum class TheoremId { theorem1, theorem2, theorem3, newton_kantorovich };

std::string theorem_name(TheoremId id);

struct Certificate {
  TheoremId theorem = TheoremId::theorem1;
  bool passed = false;
  double B = 0.0;
  double eta = 0.0;
  double K = 0.0;
  double h = 0.0;          // B^2 eta K, or B eta K for Newton-Kantorovich
  double threshold = 0.0;  // a, or 1/2 for Newton-Kantorovich
  double S = 0.0;          // 2(1+h) / (h^2 + 2h + 3)
  double N1 = 0.0;         // (h^2 + 2h + 3) / 2
  DenseVector ball_center;
  double ball_radius = 0.0;
  VectorNorm ball_norm = VectorNorm::max;
  std::string details;
};

// Abstract hypothesis check: |U0| <= B, |U0 P(x0)| <= B eta wrapped as
// residual bound eta, |P''| <= K; passes when h = B^2 eta K <= a.
Certificate theorem1_certificate(double B, double eta, double K,
                                 const DenseVector& center, VectorNorm norm);

// Max-norm instantiation: eta = max_i |f_i|, B = (sum of |cofactors|)/|det|,
// K = n^2 L.  The plain row-sum norm of U0 is reported in details.
Certificate theorem2_certificate(const ProblemSpec& p, double L);
Certificate theorem2_certificate_at(const ProblemSpec& p, double L,
                                    const DenseVector& x0);

// Euclidean instantiation: eta = |P(x0)|_2, B = spectral norm of U0 (closed
// form for n <= 2, power iteration above, Frobenius upper bound on stall),
// K = n sqrt(n) L.
Certificate theorem3_certificate(const ProblemSpec& p, double L);
Certificate theorem3_certificate_at(const ProblemSpec& p, double L,
                                    const DenseVector& x0);

// Classical comparison baseline: h0 = B0 eta0 K <= 1/2, ball radius
// (1 - sqrt(1 - 2 h0)) / h0 * eta0 (continuously extended through h0 = 0).
Certificate newton_kantorovich_certificate(double B0, double eta0, double K,
                                           const DenseVector& center,
                                           VectorNorm norm);
Certificate newton_kantorovich_certificate_at(const ProblemSpec& p, double L,
                                              const DenseVector& x0);

// Ball around the n-th iterate whose radius is the a-priori error bound drawn
// from c; the tightened region the certificate guarantees after n steps.
Certificate refine_at_iterate(const Certificate& c, const DenseVector& x_n, int n);

// Bound on |x_n - x*| after n >= 1 steps under a passing certificate.
double apriori_error_bound(const Certificate& c, int n);

// One row of the appendix recurrences.  alpha/beta/A follow the literal
// recurrences and may overflow to inf in deep rows; epsilon/q/gamma/N are
// carried in h-scaled form and stay finite for h in [0, a], k <= 30.
struct BoundSequenceRow {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double A = 0.0;
  double c = 0.0;
  double epsilon = 0.0;  // alpha_k h^(2^(k-1) - 1)
  double q = 0.0;        // A_k h^(2^(k-1))
  double gamma = 0.0;    // sum of epsilon_1..epsilon_k
  double N = 0.0;        // 1 + (1 + q_k)^2 / 2
};

struct BoundSequences {
  double h = 0.0;
  std::vector<BoundSequenceRow> rows;
};

BoundSequences bound_sequences(double h, int k_max);

struct LabeledBall {
  std::string label;
  DenseVector center;
  double radius = 0.0;
  VectorNorm norm = VectorNorm::max;
  bool contained = false;  // ball (as its enclosing box) inside the domain box
};

struct RegionGeometry {
  DenseVector lower;
  DenseVector upper;
  std::vector<LabeledBall> balls;
};

// Balls labeled G0, G1, ... in certificate order, with containment flags
// against the closed box [lower, upper].
RegionGeometry region_geometry(const std::vector<Certificate>& certs,
                               const DenseVector& lower, const DenseVector& upper);

// {"theorem","passed","B","eta","K","h","a","S","N1","ball":{...},"details"}
// with 17-significant-digit numbers.
std::string certificate_json(const Certificate& c);

// CSV: label,center_1..center_n,radius,contained
void write_region_csv(const RegionGeometry& g, std::ostream& out);

}  // namespace invfree
