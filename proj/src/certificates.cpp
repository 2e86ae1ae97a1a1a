#include "invfree/certificates.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "invfree/numfmt.hpp"

namespace invfree {

namespace {

double threshold_cubic(double a) { return ((a + 2.0) * a + 3.0) * a - 2.0; }

ConvergenceThreshold compute_threshold() {
  // The cubic is strictly increasing, with a sign change inside [0.4, 0.6].
  double lo = 0.4;
  double hi = 0.6;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_cubic(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double a = 0.5 * (lo + hi);
  // Walk down until N_1(a) * a <= 1 holds in rounded arithmetic, so a passing
  // h never yields a contraction factor above one.  (Exact equality
  // N_1(a) a = 1 is how the threshold is characterized.)
  while (((a * a + 2.0 * a + 3.0) / 2.0) * a > 1.0) {
    a = std::nextafter(a, 0.0);
  }
  ConvergenceThreshold t;
  t.a = a;
  t.radius_factor = (2.0 - a - a * a) / (2.0 * (1.0 - a - a * a));
  return t;
}

double majorant_S(double h) { return 2.0 * (1.0 + h) / (h * h + 2.0 * h + 3.0); }

double majorant_N1(double h) { return (h * h + 2.0 * h + 3.0) / 2.0; }

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
  }
}

// Shared scaffold for the order-two theorems (h = B^2 eta K vs a).
Certificate make_kogan_certificate(TheoremId id, double B, double eta, double K,
                                   const DenseVector& center, VectorNorm norm) {
  require_nonnegative(B, "B");
  require_nonnegative(eta, "eta");
  require_nonnegative(K, "K");
  const ConvergenceThreshold& t = convergence_threshold();
  Certificate c;
  c.theorem = id;
  c.B = B;
  c.eta = eta;
  c.K = K;
  c.h = B * B * eta * K;
  c.threshold = t.a;
  c.S = majorant_S(c.h);
  c.N1 = majorant_N1(c.h);
  c.passed = c.h <= t.a;
  c.ball_center = center;
  c.ball_radius = t.radius_factor * B * eta;
  c.ball_norm = norm;
  return c;
}

std::string pass_clause(const Certificate& c) {
  std::ostringstream s;
  s << "h=" << format_full(c.h) << (c.passed ? " <= " : " > ")
    << format_full(c.threshold);
  return s.str();
}

DenseMatrix invert_jacobian_at(const ProblemSpec& p, const DenseVector& x,
                               double* det_out) {
  const DenseMatrix jac = evaluate_jacobian(p, x);
  InverseResult inv = invert(jac);
  if (det_out != nullptr) {
    *det_out = inv.determinant;
  }
  return inv.inverse;
}

}  // namespace

const ConvergenceThreshold& convergence_threshold() {
  static const ConvergenceThreshold t = compute_threshold();
  return t;
}

std::string theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::theorem1:
      return "T1";
    case TheoremId::theorem2:
      return "T2";
    case TheoremId::theorem3:
      return "T3";
    case TheoremId::newton_kantorovich:
      return "NK";
  }
  throw std::invalid_argument("unknown theorem id");
}

Certificate theorem1_certificate(double B, double eta, double K,
                                 const DenseVector& center, VectorNorm norm) {
  Certificate c = make_kogan_certificate(TheoremId::theorem1, B, eta, K, center, norm);
  c.details = "constants supplied directly; " + pass_clause(c);
  return c;
}

Certificate theorem2_certificate(const ProblemSpec& p, double L) {
  return theorem2_certificate_at(p, L, p.initial_point);
}

Certificate theorem2_certificate_at(const ProblemSpec& p, double L,
                                    const DenseVector& x0) {
  require_nonnegative(L, "L");
  const std::size_t n = p.dimension();
  const DenseMatrix jac = evaluate_jacobian(p, x0);
  double det = 0.0;
  const DenseMatrix u0 = [&] {
    InverseResult inv = invert(jac);
    det = inv.determinant;
    return inv.inverse;
  }();
  double cofactor_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cofactor_sum += std::abs(cofactor(jac, i, j));
    }
  }
  const double B = cofactor_sum / std::abs(det);
  const double eta = vector_norm(evaluate_residual(p, x0), VectorNorm::max);
  const double K = static_cast<double>(n) * static_cast<double>(n) * L;
  Certificate c =
      make_kogan_certificate(TheoremId::theorem2, B, eta, K, x0, VectorNorm::max);
  std::ostringstream d;
  d << "cofactor_sum=" << format_full(cofactor_sum) << "; det=" << format_full(det)
    << "; B_rowsum=" << format_full(matrix_norm(u0, MatrixNorm::max_row_sum))
    << "; L=" << format_full(L) << "; " << pass_clause(c);
  c.details = d.str();
  return c;
}

Certificate theorem3_certificate(const ProblemSpec& p, double L) {
  return theorem3_certificate_at(p, L, p.initial_point);
}

Certificate theorem3_certificate_at(const ProblemSpec& p, double L,
                                    const DenseVector& x0) {
  require_nonnegative(L, "L");
  const std::size_t n = p.dimension();
  const DenseMatrix u0 = invert_jacobian_at(p, x0, nullptr);
  std::ostringstream d;
  double B = 0.0;
  if (n == 1) {
    B = std::abs(u0(0, 0));
    d << "B=|u0|";
  } else if (n == 2) {
    const DenseMatrix gram = u0 * transpose(u0);
    const auto [lambda_1, lambda_2] = symmetric_2x2_eigenvalues(gram);
    B = std::sqrt(lambda_1);
    d << "UUt_11=" << format_full(gram(0, 0)) << "; UUt_12=" << format_full(gram(0, 1))
      << "; UUt_22=" << format_full(gram(1, 1))
      << "; lambda_1=" << format_full(lambda_1)
      << "; lambda_2=" << format_full(lambda_2) << "; B_source=closed_form";
  } else {
    try {
      const double lambda_max = dominant_eigenvalue(u0 * transpose(u0));
      B = std::sqrt(lambda_max);
      d << "lambda_max=" << format_full(lambda_max) << "; B_source=power_iteration";
    } catch (const PowerIterationStall&) {
      B = matrix_norm(u0, MatrixNorm::frobenius);
      d << "B_source=frobenius_fallback";
    }
  }
  const double eta = vector_norm(evaluate_residual(p, x0), VectorNorm::euclidean);
  const double K = static_cast<double>(n) * std::sqrt(static_cast<double>(n)) * L;
  Certificate c = make_kogan_certificate(TheoremId::theorem3, B, eta, K, x0,
                                         VectorNorm::euclidean);
  d << "; L=" << format_full(L) << "; " << pass_clause(c);
  c.details = d.str();
  return c;
}

Certificate newton_kantorovich_certificate(double B0, double eta0, double K,
                                           const DenseVector& center,
                                           VectorNorm norm) {
  require_nonnegative(B0, "B0");
  require_nonnegative(eta0, "eta0");
  require_nonnegative(K, "K");
  Certificate c;
  c.theorem = TheoremId::newton_kantorovich;
  c.B = B0;
  c.eta = eta0;
  c.K = K;
  c.h = B0 * eta0 * K;
  c.threshold = 0.5;
  c.S = majorant_S(c.h);
  c.N1 = majorant_N1(c.h);
  c.passed = c.h <= 0.5;
  c.ball_center = center;
  // (1 - sqrt(1 - 2h)) / h * eta0, written without the h -> 0 cancellation.
  c.ball_radius =
      c.passed ? 2.0 * eta0 / (1.0 + std::sqrt(1.0 - 2.0 * c.h)) : 0.0;
  c.ball_norm = norm;
  c.details = "h0=" + format_full(c.h) + (c.passed ? " <= 0.5" : " > 0.5");
  return c;
}

Certificate newton_kantorovich_certificate_at(const ProblemSpec& p, double L,
                                              const DenseVector& x0) {
  require_nonnegative(L, "L");
  const std::size_t n = p.dimension();
  const VectorNorm norm = p.options.norm;
  const DenseMatrix u0 = invert_jacobian_at(p, x0, nullptr);
  const DenseVector newton_step = u0 * evaluate_residual(p, x0);
  const double eta0 = vector_norm(newton_step, norm);
  double B0 = 0.0;
  double K = 0.0;
  if (norm == VectorNorm::max) {
    B0 = matrix_norm(u0, MatrixNorm::max_row_sum);
    K = static_cast<double>(n) * static_cast<double>(n) * L;
  } else {
    B0 = matrix_norm(u0, MatrixNorm::spectral);
    K = static_cast<double>(n) * std::sqrt(static_cast<double>(n)) * L;
  }
  Certificate c = newton_kantorovich_certificate(B0, eta0, K, x0, norm);
  c.details = "eta0=|U0 P(x0)| in the " + norm_name(norm) + " norm; L=" +
              format_full(L) + "; " + c.details;
  return c;
}

Certificate refine_at_iterate(const Certificate& c, const DenseVector& x_n, int n) {
  if (x_n.size() != c.ball_center.size()) {
    throw std::invalid_argument("iterate dimension does not match the certificate");
  }
  const double radius = apriori_error_bound(c, n);
  Certificate refined = c;
  refined.ball_center = x_n;
  refined.ball_radius = radius;
  refined.details = theorem_name(c.theorem) + " ball tightened at iterate " +
                    std::to_string(n) + " by the a-priori bound";
  return refined;
}

double apriori_error_bound(const Certificate& c, int n) {
  if (n < 1 || n > 60) {
    throw std::invalid_argument("a-priori bound supported for 1 <= n <= 60");
  }
  if (!c.passed) {
    throw CertificateFailed("a-priori bound requires a passing certificate");
  }
  const double h = c.h;
  if (c.theorem == TheoremId::newton_kantorovich) {
    // (2 h0)^(2^n - 1) / 2^(n - 1) * eta0.
    return std::pow(2.0 * h, std::exp2(n) - 1.0) / std::exp2(n - 1) * c.eta;
  }
  const double S = c.S;
  const double contraction = std::pow(c.N1 * h, std::exp2(n) - 2.0);
  return h * (1.0 + h) / 2.0 * std::pow(S, n - 1) / (1.0 - S) * contraction *
         c.B * c.eta;
}

BoundSequences bound_sequences(double h, int k_max) {
  if (k_max < 1 || k_max > 30) {
    throw std::invalid_argument("k_max must lie in [1, 30]");
  }
  const double a = convergence_threshold().a;
  if (!(h >= 0.0)) {
    throw HOutOfRange("h must be nonnegative");
  }
  if (h > a) {
    throw HOutOfRange("h=" + format_full(h) + " exceeds the threshold a=" +
                      format_full(a));
  }
  BoundSequences out;
  out.h = h;
  out.rows.reserve(static_cast<std::size_t>(k_max));

  BoundSequenceRow row;
  row.k = 1;
  row.alpha = 1.0;
  row.beta = 0.5;
  row.A = 1.0;
  row.c = 1.0 + h;
  row.epsilon = 1.0;
  row.q = h;
  row.gamma = 1.0;
  row.N = majorant_N1(h);
  out.rows.push_back(row);

  // b_k = beta_k h^(2^k - 1) stays bounded where beta_k alone overflows.
  double b = h / 2.0;
  for (int k = 2; k <= k_max; ++k) {
    const BoundSequenceRow& prev = out.rows.back();
    BoundSequenceRow next;
    next.k = k;
    next.alpha = prev.c * prev.beta;
    next.beta = prev.A * prev.A * prev.beta + next.alpha * next.alpha / 2.0;
    next.A = prev.A * prev.A + next.alpha * prev.c;
    next.epsilon = prev.c * b;
    next.q = prev.q * prev.q + prev.c * next.epsilon * h;
    b = prev.q * prev.q * b + next.epsilon * next.epsilon * h / 2.0;
    next.c = prev.c * (1.0 + next.q);
    next.gamma = prev.gamma + next.epsilon;
    next.N = 1.0 + (1.0 + next.q) * (1.0 + next.q) / 2.0;
    out.rows.push_back(next);
  }
  return out;
}

RegionGeometry region_geometry(const std::vector<Certificate>& certs,
                               const DenseVector& lower, const DenseVector& upper) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("box bounds have mismatched dimensions");
  }
  RegionGeometry g;
  g.lower = lower;
  g.upper = upper;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const Certificate& c = certs[i];
    if (c.ball_center.size() != lower.size()) {
      throw std::invalid_argument("certificate ball dimension does not match the box");
    }
    LabeledBall ball;
    ball.label = "G" + std::to_string(i);
    ball.center = c.ball_center;
    ball.radius = c.ball_radius;
    ball.norm = c.ball_norm;
    ball.contained = true;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (c.ball_center[j] - c.ball_radius < lower[j] ||
          c.ball_center[j] + c.ball_radius > upper[j]) {
        ball.contained = false;
        break;
      }
    }
    g.balls.push_back(ball);
  }
  return g;
}

std::string certificate_json(const Certificate& c) {
  std::ostringstream out;
  out << "{\"theorem\":\"" << theorem_name(c.theorem) << "\""
      << ",\"passed\":" << (c.passed ? "true" : "false")
      << ",\"B\":" << format_json_number(c.B) << ",\"eta\":" << format_json_number(c.eta)
      << ",\"K\":" << format_json_number(c.K) << ",\"h\":" << format_json_number(c.h)
      << ",\"a\":" << format_json_number(c.threshold) << ",\"S\":" << format_json_number(c.S)
      << ",\"N1\":" << format_json_number(c.N1) << ",\"ball\":{\"center\":[";
  for (std::size_t i = 0; i < c.ball_center.size(); ++i) {
    if (i > 0) out << ",";
    out << format_json_number(c.ball_center[i]);
  }
  out << "],\"radius\":" << format_json_number(c.ball_radius) << ",\"norm\":\""
      << norm_name(c.ball_norm) << "\"},\"details\":"
      << nlohmann::json(c.details).dump() << "}";
  return out.str();
}

void write_region_csv(const RegionGeometry& g, std::ostream& out) {
  const std::size_t n = g.lower.size();
  out << "label";
  for (std::size_t j = 0; j < n; ++j) {
    out << ",center_" << (j + 1);
  }
  out << ",radius,contained\n";
  for (const LabeledBall& ball : g.balls) {
    out << ball.label;
    for (std::size_t j = 0; j < n; ++j) {
      out << "," << format_full(ball.center[j]);
    }
    out << "," << format_full(ball.radius) << ","
        << (ball.contained ? "true" : "false") << "\n";
  }
}

}  // namespace invfree
