#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "invfree/certificates.hpp"
#include "invfree/problem.hpp"
#include "invfree/solver.hpp"

using namespace invfree;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

double big_S(double h) { return 2.0 * (1.0 + h) / (h * h + 2.0 * h + 3.0); }

ProblemSpec euclidean_paper_clone() {
  nlohmann::json doc{
      {"name", "paper_clone"},
      {"variables", {"x1", "x2"}},
      {"equations", {"2*x1^3 - x2^2 - 1", "x1*x2^3 - x2 - 4"}},
      {"initial_point", {1.2, 1.7}},
      {"domain", {{"lower", {0.0, 0.0}}, {"upper", {1.3, 1.8}}}},
      {"options", {{"norm", "euclidean"}}},
  };
  return parse_problem(doc.dump());
}

ProblemSpec near_identity_3x3() {
  // U0 = diag(1, 1/1.00002, 1): the gram matrix has a nearly degenerate
  // dominant eigenvalue, which deterministically stalls the power iteration.
  nlohmann::json doc{
      {"name", "near_identity"},
      {"variables", {"x1", "x2", "x3"}},
      {"equations", {"x1", "1.00002*x2", "x3"}},
      {"initial_point", {0.5, 0.5, 0.5}},
      {"domain", {{"lower", {0.0, 0.0, 0.0}}, {"upper", {1.0, 1.0, 1.0}}}},
  };
  return parse_problem(doc.dump());
}

}  // namespace

TEST_CASE("convergence threshold constant") {
  const ConvergenceThreshold& t = convergence_threshold();
  CHECK(t.a == 0.4779672430090125);
  CHECK(t.a > 0.477);
  CHECK(t.a < 0.478);
  const double residual = ((t.a + 2.0) * t.a + 3.0) * t.a - 2.0;
  CHECK(std::abs(residual) < 1e-14);
  // the defining identity: the contraction factor N1(a) * a never exceeds one
  const double n1 = (t.a * t.a + 2.0 * t.a + 3.0) / 2.0;
  CHECK(n1 * t.a <= 1.0);
  CHECK(t.radius_factor ==
        doctest::Approx(2.2031128757231997).epsilon(1e-15));
  CHECK(&convergence_threshold() == &t);  // computed once, cached
}

TEST_CASE("theorem names") {
  CHECK(theorem_name(TheoremId::theorem1) == "T1");
  CHECK(theorem_name(TheoremId::theorem2) == "T2");
  CHECK(theorem_name(TheoremId::theorem3) == "T3");
  CHECK(theorem_name(TheoremId::newton_kantorovich) == "NK");
}

TEST_CASE("theorem 1 wraps directly supplied constants") {
  DenseVector center{1.0, 2.0};
  Certificate c =
      theorem1_certificate(0.11, 0.476, 44.1235, center, VectorNorm::euclidean);
  CHECK(c.theorem == TheoremId::theorem1);
  CHECK(c.h == 0.11 * 0.11 * 0.476 * 44.1235);
  CHECK(c.passed);
  CHECK(c.threshold == convergence_threshold().a);
  CHECK(c.S == doctest::Approx(big_S(c.h)).epsilon(1e-15));
  CHECK(c.S * c.N1 == doctest::Approx(1.0 + c.h).epsilon(1e-14));
  CHECK(c.ball_radius ==
        doctest::Approx(convergence_threshold().radius_factor * 0.11 * 0.476)
            .epsilon(1e-15));
  CHECK(c.ball_center[0] == 1.0);
  CHECK(c.ball_norm == VectorNorm::euclidean);
  CHECK(contains(c.details, "constants supplied directly"));
  CHECK(contains(c.details, " <= "));

  Certificate fail = theorem1_certificate(1.0, 1.0, 1.0, center, VectorNorm::max);
  CHECK(!fail.passed);
  CHECK(fail.h == 1.0);
  CHECK(contains(fail.details, " > "));

  CHECK_THROWS_AS(
      (void)theorem1_certificate(-0.1, 1.0, 1.0, center, VectorNorm::max),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)theorem1_certificate(1.0, std::numeric_limits<double>::quiet_NaN(),
                                 1.0, center, VectorNorm::max),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)theorem1_certificate(1.0, 1.0, std::numeric_limits<double>::infinity(),
                                 center, VectorNorm::max),
      std::invalid_argument);
}

TEST_CASE("theorem 2 on the reference system") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate c = theorem2_certificate(p, 15.6);
  CHECK(c.theorem == TheoremId::theorem2);
  CHECK(c.B == doctest::Approx(0.26907319256358747).epsilon(1e-13));
  CHECK(c.eta == doctest::Approx(0.434).epsilon(1e-14));
  CHECK(c.K == 62.4);  // 2^2 * 15.6 is an exact scaling
  CHECK(c.h == doctest::Approx(1.9607182110709982).epsilon(1e-13));
  CHECK(!c.passed);  // h is far above a at the starting point
  CHECK(c.S == doctest::Approx(0.5500202160668121).epsilon(1e-13));
  CHECK(c.N1 == doctest::Approx(5.3829261626837255).epsilon(1e-13));
  // the nominal ball is still reported so failed regions can be drawn
  CHECK(c.ball_radius == doctest::Approx(0.2572745989311739).epsilon(1e-13));
  CHECK(c.ball_center[0] == 1.2);
  CHECK(c.ball_center[1] == 1.7);
  CHECK(c.ball_norm == VectorNorm::max);
  CHECK(contains(c.details, "cofactor_sum=26.356999999999"));
  CHECK(contains(c.details, "det=97.9547"));
  CHECK(contains(c.details, "B_rowsum=0.138359789764"));
  CHECK(contains(c.details, "L=15.6"));
  CHECK(contains(c.details, " > "));

  CHECK_THROWS_AS((void)theorem2_certificate(p, -1.0), std::invalid_argument);
}

TEST_CASE("theorem 3 on the reference system") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate c = theorem3_certificate(p, 15.6);
  CHECK(c.theorem == TheoremId::theorem3);
  CHECK(c.B == doctest::Approx(0.1100600278799216).epsilon(1e-13));
  CHECK(c.eta == doctest::Approx(0.47604134274241316).epsilon(1e-14));
  CHECK(c.K == doctest::Approx(44.12346314604057).epsilon(1e-15));
  CHECK(c.h == doctest::Approx(0.25443303611719764).epsilon(1e-13));
  CHECK(c.passed);
  CHECK(c.S == doctest::Approx(0.7020552099157312).epsilon(1e-13));
  CHECK(c.N1 == doctest::Approx(1.7868011210511052).epsilon(1e-13));
  CHECK(c.ball_radius == doctest::Approx(0.11542796488135894).epsilon(1e-12));
  CHECK(c.ball_norm == VectorNorm::euclidean);
  CHECK(contains(c.details, "UUt_11=0.010421449612"));
  CHECK(contains(c.details, "UUt_12=-0.001753581579"));
  CHECK(contains(c.details, "UUt_22=0.010295547580"));
  CHECK(contains(c.details, "lambda_1=0.012113209736"));
  CHECK(contains(c.details, "lambda_2=0.008603787456"));
  CHECK(contains(c.details, "B_source=closed_form"));
  CHECK(contains(c.details, " <= "));
}

TEST_CASE("theorem 3 restarted at the first iterate is much tighter") {
  const ProblemSpec& p = builtin_problem("paper_example");
  SolveTrace t = solve(p, Method::inverse_free, solve_options_for(p));
  Certificate c = theorem3_certificate_at(p, 15.6, t.states[1].x);
  CHECK(c.passed);
  CHECK(c.B == doctest::Approx(0.10674639066960438).epsilon(1e-11));
  CHECK(c.eta == doctest::Approx(0.007667814702334644).epsilon(1e-10));
  CHECK(c.h == doctest::Approx(0.0038552060973105033).epsilon(1e-10));
  CHECK(c.ball_radius == doctest::Approx(0.0018032733210684563).epsilon(1e-10));
  CHECK(c.ball_center[0] == t.states[1].x[0]);
}

TEST_CASE("theorem 3 above two dimensions: power iteration and its fallback") {
  const ProblemSpec& cyc = builtin_problem("cyclic_3x3");
  const double L = estimate_second_derivative_bound(cyc, 33).value;
  CHECK(L == doctest::Approx(0.1).epsilon(1e-9));
  Certificate c = theorem3_certificate(cyc, L);
  CHECK(c.passed);
  CHECK(c.B == doctest::Approx(1.0516080608729907).epsilon(1e-9));
  CHECK(c.eta == doctest::Approx(0.12104867306170682).epsilon(1e-12));
  CHECK(c.h == doctest::Approx(0.06955842311456652).epsilon(1e-9));
  CHECK(c.ball_radius == doctest::Approx(0.280446928651333).epsilon(1e-9));
  CHECK(contains(c.details, "B_source=power_iteration"));
  CHECK(contains(c.details, "lambda_max="));

  Certificate fb = theorem3_certificate(near_identity_3x3(), 0.0);
  CHECK(contains(fb.details, "B_source=frobenius_fallback"));
  const double expected_frob =
      std::sqrt(2.0 + (1.0 / 1.00002) * (1.0 / 1.00002));
  CHECK(fb.B == doctest::Approx(expected_frob).epsilon(1e-13));
  CHECK(fb.K == 0.0);
  CHECK(fb.h == 0.0);
  CHECK(fb.passed);
}

TEST_CASE("newton-kantorovich direct constants") {
  DenseVector center{1.2, 1.7};
  Certificate c = newton_kantorovich_certificate(0.11, 0.476, 44.1235, center,
                                                 VectorNorm::euclidean);
  CHECK(c.theorem == TheoremId::newton_kantorovich);
  CHECK(c.h == doctest::Approx(2.31030646).epsilon(1e-14));
  CHECK(c.threshold == 0.5);
  CHECK(!c.passed);
  CHECK(c.ball_radius == 0.0);  // no guarantee, no ball
  CHECK(contains(c.details, " > 0.5"));

  // h0 exactly at the boundary: radius collapses to 2*eta0
  Certificate edge = newton_kantorovich_certificate(1.0, 0.5, 1.0, center,
                                                    VectorNorm::max);
  CHECK(edge.h == 0.5);
  CHECK(edge.passed);
  CHECK(edge.ball_radius == 1.0);
  CHECK(apriori_error_bound(edge, 1) == 0.5);
  CHECK(apriori_error_bound(edge, 2) == 0.25);
  CHECK(apriori_error_bound(edge, 3) == 0.125);

  // h0 = 0 keeps the radius finite through the continuous extension
  Certificate zero = newton_kantorovich_certificate(1.0, 0.25, 0.0, center,
                                                    VectorNorm::max);
  CHECK(zero.passed);
  CHECK(zero.ball_radius == 0.25);  // 2*eta0 / (1 + 1)

  CHECK_THROWS_AS((void)newton_kantorovich_certificate(-1.0, 1.0, 1.0, center,
                                                       VectorNorm::max),
                  std::invalid_argument);
}

TEST_CASE("newton-kantorovich evaluated on the reference system") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate c = newton_kantorovich_certificate_at(p, 15.6, p.initial_point);
  CHECK(c.B == doctest::Approx(0.1383597897641728).epsilon(1e-13));
  CHECK(c.eta == doctest::Approx(0.039020319175913365).epsilon(1e-12));
  CHECK(c.K == 62.4);
  CHECK(c.h == doctest::Approx(0.3368878130411223).epsilon(1e-12));
  CHECK(c.passed);
  CHECK(c.ball_radius == doctest::Approx(0.04967069619334845).epsilon(1e-12));
  CHECK(c.ball_norm == VectorNorm::max);
  CHECK(contains(c.details, "eta0=|U0 P(x0)| in the max norm"));
  CHECK(contains(c.details, "L=15.6"));
  CHECK(contains(c.details, " <= 0.5"));

  ProblemSpec pe = euclidean_paper_clone();
  Certificate e = newton_kantorovich_certificate_at(pe, 15.6, pe.initial_point);
  CHECK(e.B == doctest::Approx(0.1100600278799216).epsilon(1e-13));
  CHECK(e.eta == doctest::Approx(0.05233487412301835).epsilon(1e-12));
  CHECK(e.h == doctest::Approx(0.2541501639917415).epsilon(1e-12));
  CHECK(e.passed);
  CHECK(e.ball_radius == doctest::Approx(0.06152653913274184).epsilon(1e-12));
  CHECK(e.ball_norm == VectorNorm::euclidean);
  CHECK(contains(e.details, "eta0=|U0 P(x0)| in the euclidean norm"));
}

TEST_CASE("a-priori bounds shrink doubly exponentially") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate c = theorem3_certificate(p, 15.6);
  REQUIRE(c.passed);
  CHECK(apriori_error_bound(c, 1) ==
        doctest::Approx(0.028062701830144813).epsilon(1e-11));
  CHECK(apriori_error_bound(c, 2) ==
        doctest::Approx(0.004071928857742545).epsilon(1e-11));
  CHECK(apriori_error_bound(c, 3) ==
        doctest::Approx(0.00012211536579375022).epsilon(1e-11));
  CHECK(apriori_error_bound(c, 4) ==
        doctest::Approx(1.5643694070184534e-07).epsilon(1e-11));
  double prev = apriori_error_bound(c, 1);
  for (int n = 2; n <= 10; ++n) {
    const double cur = apriori_error_bound(c, n);
    CHECK(cur < prev);
    prev = cur;
  }
  const double deep = apriori_error_bound(c, 60);
  CHECK(std::isfinite(deep));
  CHECK(deep >= 0.0);

  CHECK_THROWS_AS((void)apriori_error_bound(c, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)apriori_error_bound(c, 61), std::invalid_argument);

  Certificate failed = theorem2_certificate(p, 15.6);
  REQUIRE(!failed.passed);
  CHECK_THROWS_AS((void)apriori_error_bound(failed, 1), CertificateFailed);
}

TEST_CASE("refinement recenters the ball at an iterate") {
  const ProblemSpec& p = builtin_problem("paper_example");
  SolveTrace t = solve(p, Method::inverse_free, solve_options_for(p));
  Certificate c = theorem3_certificate(p, 15.6);
  Certificate r = refine_at_iterate(c, t.states[1].x, 1);
  CHECK(r.theorem == TheoremId::theorem3);
  CHECK(r.ball_radius == doctest::Approx(0.028062701830144813).epsilon(1e-11));
  CHECK(r.ball_center[0] == t.states[1].x[0]);
  CHECK(r.ball_center[1] == t.states[1].x[1]);
  CHECK(r.h == c.h);  // constants are inherited, only the ball moves
  CHECK(r.details == "T3 ball tightened at iterate 1 by the a-priori bound");

  CHECK_THROWS_AS((void)refine_at_iterate(c, (DenseVector{1.0}), 1),
                  std::invalid_argument);
  Certificate failed = theorem2_certificate(p, 15.6);
  CHECK_THROWS_AS((void)refine_at_iterate(failed, t.states[1].x, 1),
                  CertificateFailed);
}

TEST_CASE("bound sequences: first row and the h = 0 degeneration") {
  const double a = convergence_threshold().a;
  BoundSequences s = bound_sequences(a / 2.0, 5);
  CHECK(s.h == a / 2.0);
  REQUIRE(s.rows.size() == 5);
  const BoundSequenceRow& r1 = s.rows[0];
  CHECK(r1.k == 1);
  CHECK(r1.alpha == 1.0);
  CHECK(r1.beta == 0.5);
  CHECK(r1.A == 1.0);
  CHECK(r1.c == 1.0 + s.h);
  CHECK(r1.epsilon == 1.0);
  CHECK(r1.q == s.h);
  CHECK(r1.gamma == 1.0);
  CHECK(r1.N == (s.h * s.h + 2.0 * s.h + 3.0) / 2.0);
  for (int k = 0; k < 5; ++k) CHECK(s.rows[k].k == k + 1);

  BoundSequences z = bound_sequences(0.0, 10);
  for (const BoundSequenceRow& row : z.rows) {
    CHECK(row.q == 0.0);
    CHECK(row.c == 1.0);
    CHECK(row.gamma == 1.0);
    CHECK(row.N == 1.5);
    CHECK(row.epsilon == (row.k == 1 ? 1.0 : 0.0));
  }
}

TEST_CASE("bound sequence invariants across the admissible h range") {
  const ConvergenceThreshold& t = convergence_threshold();
  const double a = t.a;
  for (double h : {0.0, a / 4.0, a / 2.0, 3.0 * a / 4.0, a}) {
    CAPTURE(h);
    BoundSequences s = bound_sequences(h, 20);
    const double N1 = s.rows[0].N;
    const double S = big_S(h);
    CHECK(N1 * h <= 1.0);
    CHECK(S * N1 == doctest::Approx(1.0 + h).epsilon(1e-14));
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      const BoundSequenceRow& prev = s.rows[i - 1];
      const BoundSequenceRow& cur = s.rows[i];
      CAPTURE(cur.k);
      CHECK(cur.q <= prev.q + 1e-15);
      CHECK(cur.N <= prev.N + 1e-15);
      CHECK(cur.N * cur.q <= 1.0 + 1e-12);
      CHECK(cur.gamma <= t.radius_factor + 1e-12);
      CHECK(cur.gamma >= 1.0);
      CHECK(cur.q <= prev.N * prev.q * prev.q + 1e-15);
      // epsilon_n <= S^(n-2) * h(1+h)/2 * (N1 h)^(2^(n-1) - 2)
      const double envelope = std::pow(S, cur.k - 2) * h * (1.0 + h) / 2.0 *
                              std::pow(N1 * h, std::exp2(cur.k - 1) - 2.0);
      CHECK(cur.epsilon <= envelope * (1.0 + 1e-9) + 1e-300);
    }
  }
}

TEST_CASE("literal and scaled sequence forms agree while both are finite") {
  const double h = 3.0 * convergence_threshold().a / 4.0;
  BoundSequences s = bound_sequences(h, 8);
  for (const BoundSequenceRow& row : s.rows) {
    REQUIRE(std::isfinite(row.A));
    const double pw = std::exp2(row.k - 1);
    const double eps_literal = row.alpha * std::pow(h, pw - 1.0);
    const double q_literal = row.A * std::pow(h, pw);
    CHECK(row.epsilon == doctest::Approx(eps_literal).epsilon(1e-12));
    CHECK(row.q == doctest::Approx(q_literal).epsilon(1e-12));
  }
}

TEST_CASE("deep rows overflow literally but stay finite in scaled form") {
  const double a = convergence_threshold().a;
  BoundSequences s = bound_sequences(a, 30);
  REQUIRE(s.rows.size() == 30);
  const BoundSequenceRow& last = s.rows.back();
  CHECK(std::isinf(last.A));  // the literal recurrence is allowed to blow up
  CHECK(std::isinf(last.beta));
  CHECK(std::isfinite(last.epsilon));
  CHECK(std::isfinite(last.q));
  CHECK(std::isfinite(last.gamma));
  CHECK(std::isfinite(last.N));
  CHECK(std::isfinite(last.c));
  CHECK(last.gamma <= convergence_threshold().radius_factor + 1e-12);
}

TEST_CASE("bound sequence domain errors") {
  CHECK_THROWS_AS((void)bound_sequences(-0.1, 5), HOutOfRange);
  CHECK_THROWS_AS((void)bound_sequences(0.48, 5), HOutOfRange);
  CHECK_THROWS_AS((void)bound_sequences(0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)bound_sequences(0.1, 31), std::invalid_argument);
  CHECK_NOTHROW((void)bound_sequences(convergence_threshold().a, 30));
}

TEST_CASE("region geometry containment against the box") {
  const ProblemSpec& p = builtin_problem("paper_example");
  SolveTrace t = solve(p, Method::inverse_free, solve_options_for(p));
  Certificate g0 = theorem3_certificate(p, 15.6);
  Certificate g1 = refine_at_iterate(g0, t.states[1].x, 1);
  RegionGeometry g = region_geometry({g0, g1}, p.lower, p.upper);
  REQUIRE(g.balls.size() == 2);
  CHECK(g.balls[0].label == "G0");
  CHECK(g.balls[1].label == "G1");
  // radius 0.115 around (1.2, 1.7) crosses x1 = 1.3 and x2 = 1.8
  CHECK(!g.balls[0].contained);
  CHECK(g.balls[1].contained);
  CHECK(g.balls[1].radius == g1.ball_radius);
  CHECK(g.balls[1].center[0] == t.states[1].x[0]);

  // zero-radius ball sitting exactly on the closed boundary counts as inside
  Certificate corner = theorem1_certificate(0.0, 0.0, 0.0, p.upper, VectorNorm::max);
  RegionGeometry zg = region_geometry({corner}, p.lower, p.upper);
  CHECK(zg.balls[0].radius == 0.0);
  CHECK(zg.balls[0].contained);

  Certificate outside =
      theorem1_certificate(0.0, 0.0, 0.0, (DenseVector{2.0, 2.0}), VectorNorm::max);
  RegionGeometry og = region_geometry({outside}, p.lower, p.upper);
  CHECK(!og.balls[0].contained);

  CHECK_THROWS_AS(
      (void)region_geometry({g0}, (DenseVector{0.0}), (DenseVector{1.0, 2.0})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)region_geometry({g0}, (DenseVector{0.0}), (DenseVector{1.0})),
      std::invalid_argument);
}

TEST_CASE("region CSV layout") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate g0 = theorem3_certificate(p, 15.6);
  SolveTrace t = solve(p, Method::inverse_free, solve_options_for(p));
  Certificate g1 = refine_at_iterate(g0, t.states[1].x, 1);
  RegionGeometry g = region_geometry({g0, g1}, p.lower, p.upper);

  std::ostringstream out;
  write_region_csv(g, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "label,center_1,center_2,radius,contained");

  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("G0,1.2,1.7,", 0) == 0);
  CHECK(line.substr(line.size() - 6) == ",false");

  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("G1,", 0) == 0);
  CHECK(line.substr(line.size() - 5) == ",true");
  // the radius column round-trips to the exact double
  const std::size_t last_comma = line.rfind(',');
  const std::size_t prev_comma = line.rfind(',', last_comma - 1);
  const double radius =
      std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
  CHECK(radius == g1.ball_radius);

  CHECK(!std::getline(in, line));
}

TEST_CASE("certificate JSON layout") {
  const ProblemSpec& p = builtin_problem("paper_example");
  Certificate c = theorem3_certificate(p, 15.6);
  nlohmann::json j = nlohmann::json::parse(certificate_json(c));
  REQUIRE(j.is_object());
  CHECK(j.size() == 11);
  for (const char* key :
       {"theorem", "passed", "B", "eta", "K", "h", "a", "S", "N1", "ball", "details"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["theorem"] == "T3");
  CHECK(j["passed"] == true);
  CHECK(j["B"].get<double>() == c.B);
  CHECK(j["eta"].get<double>() == c.eta);
  CHECK(j["K"].get<double>() == c.K);
  CHECK(j["h"].get<double>() == c.h);
  CHECK(j["a"].get<double>() == c.threshold);
  CHECK(j["S"].get<double>() == c.S);
  CHECK(j["N1"].get<double>() == c.N1);
  REQUIRE(j["ball"].is_object());
  CHECK(j["ball"].size() == 3);
  CHECK(j["ball"]["center"].size() == 2);
  CHECK(j["ball"]["center"][0].get<double>() == 1.2);
  CHECK(j["ball"]["radius"].get<double>() == c.ball_radius);
  CHECK(j["ball"]["norm"] == "euclidean");
  CHECK(j["details"].get<std::string>() == c.details);

  Certificate nk = newton_kantorovich_certificate(1.0, 1.0, 1.0,
                                                  (DenseVector{0.0}), VectorNorm::max);
  nlohmann::json jn = nlohmann::json::parse(certificate_json(nk));
  CHECK(jn["theorem"] == "NK");
  CHECK(jn["passed"] == false);
  CHECK(jn["ball"]["radius"].get<double>() == 0.0);
  CHECK(jn["ball"]["norm"] == "max");

  // non-finite numbers are serialized as quoted strings, keeping valid JSON
  Certificate weird;
  weird.h = std::numeric_limits<double>::quiet_NaN();
  weird.B = std::numeric_limits<double>::infinity();
  weird.ball_center = DenseVector{1.0};
  nlohmann::json jw = nlohmann::json::parse(certificate_json(weird));
  CHECK(jw["h"] == "nan");
  CHECK(jw["B"] == "inf");
}
