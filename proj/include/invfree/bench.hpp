#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "invfree/certificates.hpp"
#include "invfree/problem.hpp"
#include "invfree/solver.hpp"

namespace invfree {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public BenchError {
 public:
  using BenchError::BenchError;
};

struct OrderEstimate {
  double rho = 0.0;
  int samples_used = 0;         // ratios that survived the noise floor
  std::vector<double> ratios;   // log(e_{k+1}/e_k) / log(e_k/e_{k-1})
};

// Empirical convergence order: the upper median of the successive-ratio
// exponents, skipping triples whose smallest error sits at or below the
// noise floor 100 eps e_0.  Needs at least four strictly decreasing positive
// errors and at least one usable triple.
OrderEstimate estimate_order(const std::vector<double>& errors);

struct MethodReport {
  Method method = Method::inverse_free;
  bool ran = false;             // false when the run threw; see `error`
  Verdict verdict = Verdict::max_iterations;
  int steps = 0;
  double final_residual_norm = 0.0;
  CostCounters counters;
  double rho = 0.0;             // 0 when no order estimate was possible
  int rho_samples = 0;
  std::string error;
};

struct ComparisonReport {
  std::string problem;
  MethodReport inverse_free;
  MethodReport newton;
};

// Runs both methods on the problem's own options and estimates the empirical
// order of each converged run against its own final point.  Per-method
// failures are captured in the report, not rethrown.
ComparisonReport compare(const ProblemSpec& p);

// {"problem":...,"kogan":{...},"newton":{...}} with verdicts, costs, rho.
std::string comparison_json(const ComparisonReport& r);

struct CertifiedSolve {
  std::vector<Certificate> certificates;  // one per attempted start point
  SolveTrace trace;
  bool certified = false;  // the start point of `trace` carried a passing certificate
  int warmup_steps = 0;    // inverse-free steps taken before a certificate passed
};

// Certify at the starting point with the chosen theorem (T2 or T3); on
// failure advance one inverse-free step and retry, up to max_restarts times.
// Solves from the first certified point, or from the last iterate anyway
// when every attempt fails.
CertifiedSolve certify_then_solve(const ProblemSpec& p, TheoremId theorem,
                                  int max_restarts = 3,
                                  int grid_points_per_axis = 33);

}  // namespace invfree
