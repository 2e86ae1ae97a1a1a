#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "invfree/linalg.hpp"
#include "invfree/problem.hpp"

namespace invfree {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton's per-step factorization hit a singular Jacobian after the first step.
class SingularNewtonStep : public SolverError {
 public:
  using SolverError::SolverError;
};

// kogan: invert the Jacobian once, then update the approximate inverse
// multiplicatively (U <- (2I - U J) U); newton: factor and solve every step.
enum class Method { inverse_free, newton };

enum class Verdict { converged, max_iterations, diverged, singular_at_start };

std::string verdict_name(Verdict v);

struct SolveOptions {
  double tolerance = 1e-13;
  int max_iterations = 50;
  VectorNorm norm = VectorNorm::max;
  double divergence_factor = 10.0;
};

SolveOptions solve_options_for(const ProblemSpec& p);

struct IterationState {
  int k = 0;
  DenseVector x;
  DenseMatrix approximate_inverse;  // U_k; empty for Newton traces
  DenseVector residual;
  double residual_norm = 0.0;
  double step_norm = 0.0;  // |x_k - x_{k-1}|, 0 at the start
};

struct CostCounters {
  long inversions = 0;
  long linear_solves = 0;
  long jacobian_evaluations = 0;
  long residual_evaluations = 0;
  long matrix_multiplications = 0;
};

struct SolveTrace {
  Method method = Method::inverse_free;
  VectorNorm norm = VectorNorm::max;
  Verdict verdict = Verdict::max_iterations;
  std::vector<IterationState> states;
  CostCounters counters;

  const DenseVector& final_point() const { return states.back().x; }
  int steps() const { return static_cast<int>(states.size()) - 1; }
};

// One inverse-free step from s (which must carry U_k): moves x, re-evaluates
// the residual, and refreshes U at the new point.  No matrix inversion.
IterationState step_inverse_free(const ProblemSpec& p, const IterationState& s,
                                 VectorNorm norm = VectorNorm::max);

// Runs the iteration with the dual stopping rule (residual_norm <= tol or
// step_norm <= tol * (1 + |x|)) and a divergence guard (residual above
// divergence_factor * initial on three consecutive steps).
SolveTrace solve(const ProblemSpec& p, Method method, const SolveOptions& opts);
SolveTrace solve_from(const ProblemSpec& p, Method method, const SolveOptions& opts,
                      const DenseVector& start);

// Distances |x_k - x_star| in the trace norm, trailing exact zeros dropped.
std::vector<double> empirical_error_sequence(const SolveTrace& t,
                                             const DenseVector& x_star);

// CSV: k,x_1..x_n,res_1..res_n,residual_norm,step_norm (17 significant digits).
void write_trace_csv(const SolveTrace& t, std::ostream& out);

}  // namespace invfree
