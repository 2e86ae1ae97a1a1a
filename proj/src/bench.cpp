#include "invfree/bench.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "invfree/numfmt.hpp"

namespace invfree {

OrderEstimate estimate_order(const std::vector<double>& errors) {
  if (errors.size() < 4) {
    throw InsufficientSamples("order estimation needs at least four errors, got " +
                              std::to_string(errors.size()));
  }
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw std::invalid_argument("errors must be positive and finite");
    }
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i + 1] >= errors[i]) {
      throw std::invalid_argument("errors must decrease strictly");
    }
  }
  // Ratios whose smallest error is within rounding noise of the limit say
  // nothing about the order; drop them.
  const double noise_floor = 100.0 * DBL_EPSILON * errors.front();
  OrderEstimate est;
  for (std::size_t k = 1; k + 1 < errors.size(); ++k) {
    if (errors[k + 1] <= noise_floor) continue;
    est.ratios.push_back(std::log(errors[k + 1] / errors[k]) /
                         std::log(errors[k] / errors[k - 1]));
  }
  if (est.ratios.empty()) {
    throw InsufficientSamples("every error triple sits at the noise floor");
  }
  std::vector<double> sorted = est.ratios;
  std::sort(sorted.begin(), sorted.end());
  est.rho = sorted[sorted.size() / 2];  // upper median
  est.samples_used = static_cast<int>(est.ratios.size());
  return est;
}

namespace {

MethodReport run_method(const ProblemSpec& p, Method m) {
  MethodReport r;
  r.method = m;
  SolveTrace t;
  try {
    t = solve(p, m, solve_options_for(p));
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.ran = true;
  r.verdict = t.verdict;
  r.steps = t.steps();
  r.final_residual_norm = t.states.back().residual_norm;
  r.counters = t.counters;
  if (m == Method::inverse_free && t.verdict == Verdict::converged &&
      t.counters.inversions != 1) {
    throw std::logic_error("inverse-free run recorded " +
                           std::to_string(t.counters.inversions) + " inversions");
  }
  if (t.verdict == Verdict::converged) {
    try {
      const OrderEstimate est =
          estimate_order(empirical_error_sequence(t, t.final_point()));
      r.rho = est.rho;
      r.rho_samples = est.samples_used;
    } catch (const InsufficientSamples&) {
    } catch (const std::invalid_argument&) {
      // Stalled or non-monotone tails leave the order unestimated.
    }
  }
  return r;
}

std::string method_json(const MethodReport& r) {
  std::ostringstream o;
  o << "{\"ran\":" << (r.ran ? "true" : "false") << ",\"verdict\":\""
    << verdict_name(r.verdict) << "\",\"steps\":" << r.steps
    << ",\"final_residual_norm\":" << format_json_number(r.final_residual_norm)
    << ",\"rho\":" << format_json_number(r.rho)
    << ",\"rho_samples\":" << r.rho_samples
    << ",\"counters\":{\"inversions\":" << r.counters.inversions
    << ",\"linear_solves\":" << r.counters.linear_solves
    << ",\"jacobian_evaluations\":" << r.counters.jacobian_evaluations
    << ",\"residual_evaluations\":" << r.counters.residual_evaluations
    << ",\"matrix_multiplications\":" << r.counters.matrix_multiplications
    << "},\"error\":" << nlohmann::json(r.error).dump() << "}";
  return o.str();
}

}  // namespace

ComparisonReport compare(const ProblemSpec& p) {
  ComparisonReport r;
  r.problem = p.name;
  r.inverse_free = run_method(p, Method::inverse_free);
  r.newton = run_method(p, Method::newton);
  return r;
}

std::string comparison_json(const ComparisonReport& r) {
  return "{\"problem\":" + nlohmann::json(r.problem).dump() +
         ",\"kogan\":" + method_json(r.inverse_free) +
         ",\"newton\":" + method_json(r.newton) + "}";
}

CertifiedSolve certify_then_solve(const ProblemSpec& p, TheoremId theorem,
                                  int max_restarts, int grid_points_per_axis) {
  if (theorem != TheoremId::theorem2 && theorem != TheoremId::theorem3) {
    throw std::invalid_argument("certified solve supports T2 and T3 only");
  }
  if (max_restarts < 0) {
    throw std::invalid_argument("max_restarts must be nonnegative");
  }
  const double L = estimate_second_derivative_bound(p, grid_points_per_axis).value;
  const VectorNorm norm =
      theorem == TheoremId::theorem2 ? VectorNorm::max : VectorNorm::euclidean;

  CertifiedSolve out;
  IterationState s;
  s.x = p.initial_point;
  s.residual = evaluate_residual(p, s.x);
  s.residual_norm = vector_norm(s.residual, norm);

  for (int attempt = 0;; ++attempt) {
    Certificate c = theorem == TheoremId::theorem2
                        ? theorem2_certificate_at(p, L, s.x)
                        : theorem3_certificate_at(p, L, s.x);
    out.certificates.push_back(c);
    if (c.passed || attempt == max_restarts) {
      out.certified = c.passed;
      out.warmup_steps = attempt;
      out.trace = solve_from(p, Method::inverse_free, solve_options_for(p), s.x);
      return out;
    }
    // Warm up with the method's own step; the chain shares one inversion.
    if (s.approximate_inverse.empty()) {
      s.approximate_inverse = invert(evaluate_jacobian(p, s.x)).inverse;
    }
    s = step_inverse_free(p, s, norm);
  }
}

}  // namespace invfree
