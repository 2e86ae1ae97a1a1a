#include "invfree/solver.hpp"

#include <cmath>
#include <ostream>

#include "invfree/numfmt.hpp"

namespace invfree {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "Converged";
    case Verdict::max_iterations: return "MaxIterations";
    case Verdict::diverged: return "Diverged";
    case Verdict::singular_at_start: return "SingularAtStart";
  }
  return "?";
}

SolveOptions solve_options_for(const ProblemSpec& p) {
  SolveOptions o;
  o.tolerance = p.options.tolerance;
  o.max_iterations = p.options.max_iterations;
  o.norm = p.options.norm;
  return o;
}

IterationState step_inverse_free(const ProblemSpec& p, const IterationState& s,
                                 VectorNorm norm) {
  if (s.approximate_inverse.empty())
    throw SolverError("inverse-free step needs a state carrying U_k");
  IterationState next;
  next.k = s.k + 1;
  next.x = s.x - s.approximate_inverse * s.residual;
  next.residual = evaluate_residual(p, next.x);
  const DenseMatrix J = evaluate_jacobian(p, next.x);
  next.approximate_inverse =
      (2.0 * identity(p.dimension()) - s.approximate_inverse * J) *
      s.approximate_inverse;
  next.residual_norm = vector_norm(next.residual, norm);
  next.step_norm = vector_norm(next.x - s.x, norm);
  return next;
}

namespace {

SolveTrace run_solve(const ProblemSpec& p, Method method, const SolveOptions& opts,
                     const DenseVector& start) {
  SolveTrace t;
  t.method = method;
  t.norm = opts.norm;

  IterationState s;
  s.k = 0;
  s.x = start;
  s.residual = evaluate_residual(p, s.x);
  t.counters.residual_evaluations += 1;
  s.residual_norm = vector_norm(s.residual, opts.norm);

  if (method == Method::inverse_free) {
    // U_0 is established before any stopping check: the method is defined by
    // its single up-front inversion, even when the start is already a root
    const DenseMatrix J0 = evaluate_jacobian(p, s.x);
    t.counters.jacobian_evaluations += 1;
    try {
      s.approximate_inverse = invert(J0).inverse;
      t.counters.inversions += 1;
    } catch (const SingularMatrix&) {
      t.verdict = Verdict::singular_at_start;
      t.states.push_back(std::move(s));
      return t;
    }
  }

  const double initial_residual_norm = s.residual_norm;
  t.states.push_back(s);
  int consecutive_growth = 0;

  if (s.residual_norm <= opts.tolerance) {
    t.verdict = Verdict::converged;
    return t;
  }

  for (int k = 0; k < opts.max_iterations; ++k) {
    const IterationState& cur = t.states.back();
    IterationState next;
    if (method == Method::inverse_free) {
      next = step_inverse_free(p, cur, opts.norm);
      t.counters.residual_evaluations += 1;
      t.counters.jacobian_evaluations += 1;
      t.counters.matrix_multiplications += 2;
    } else {
      const DenseMatrix J = evaluate_jacobian(p, cur.x);
      t.counters.jacobian_evaluations += 1;
      DenseVector delta;
      try {
        delta = solve_linear(J, cur.residual);
        t.counters.linear_solves += 1;
      } catch (const SingularMatrix& e) {
        if (k == 0) {
          t.verdict = Verdict::singular_at_start;
          return t;
        }
        throw SingularNewtonStep("Jacobian singular at step " + std::to_string(k + 1) +
                                 ": " + e.what());
      }
      next.k = cur.k + 1;
      next.x = cur.x - delta;
      next.residual = evaluate_residual(p, next.x);
      t.counters.residual_evaluations += 1;
      next.residual_norm = vector_norm(next.residual, opts.norm);
      next.step_norm = vector_norm(next.x - cur.x, opts.norm);
    }

    const double xn = vector_norm(next.x, opts.norm);
    const double res_norm = next.residual_norm;
    const double step_norm = next.step_norm;
    t.states.push_back(std::move(next));

    if (res_norm <= opts.tolerance ||
        step_norm <= opts.tolerance * (1.0 + xn)) {
      t.verdict = Verdict::converged;
      return t;
    }
    if (res_norm > opts.divergence_factor * initial_residual_norm) {
      if (++consecutive_growth >= 3) {
        t.verdict = Verdict::diverged;
        return t;
      }
    } else {
      consecutive_growth = 0;
    }
  }
  t.verdict = Verdict::max_iterations;
  return t;
}

}  // namespace

SolveTrace solve(const ProblemSpec& p, Method method, const SolveOptions& opts) {
  return run_solve(p, method, opts, p.initial_point);
}

SolveTrace solve_from(const ProblemSpec& p, Method method, const SolveOptions& opts,
                      const DenseVector& start) {
  if (start.size() != p.dimension())
    throw DimensionMismatch("start point has " + std::to_string(start.size()) +
                            " entries for " + std::to_string(p.dimension()) +
                            " variables");
  return run_solve(p, method, opts, start);
}

std::vector<double> empirical_error_sequence(const SolveTrace& t,
                                             const DenseVector& x_star) {
  if (t.verdict != Verdict::converged)
    throw std::invalid_argument("error sequence needs a converged trace");
  if (x_star.size() != t.final_point().size())
    throw std::invalid_argument("x_star dimension mismatch");
  std::vector<double> errs;
  errs.reserve(t.states.size());
  for (const IterationState& s : t.states)
    errs.push_back(vector_norm(s.x - x_star, t.norm));
  while (!errs.empty() && errs.back() == 0.0) errs.pop_back();
  return errs;
}

void write_trace_csv(const SolveTrace& t, std::ostream& out) {
  const std::size_t n = t.states.empty() ? 0 : t.states.front().x.size();
  out << "k";
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",res_" << i;
  out << ",residual_norm,step_norm\n";
  for (const IterationState& s : t.states) {
    out << s.k;
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_full(s.x[i]);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_full(s.residual[i]);
    out << ',' << format_full(s.residual_norm) << ',' << format_full(s.step_norm)
        << '\n';
  }
}

}  // namespace invfree
