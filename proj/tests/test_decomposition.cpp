#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wiplab/decomposition.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/rng.hpp"
#include "wiplab/transfer.hpp"

using namespace wiplab;

namespace {

MapDescriptor doubling_desc() { return MapDescriptor{}; }

MapDescriptor uniform_baker() {
  MapDescriptor d;
  d.kind = MapKind::UniformBaker;
  return d;
}

MapDescriptor intermittent_baker(double gamma) {
  MapDescriptor d;
  d.kind = MapKind::IntermittentBaker;
  d.gamma = gamma;
  return d;
}

}  // namespace

TEST_CASE("chi truncation: geometric closed form for x - 1/2") {
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v = op.discretize(make_observable("base", doubling_desc()));
  const GridFunction chi = chi_truncated(op, v, 10);
  GridFunction diff = chi;
  diff.values -= (1.0 - std::pow(2.0, -10)) * v.values;
  // each P^j v is constant on blocks of 2^j cells, contributing up to
  // 1/(4N) of projection granularity to the sum
  CHECK(op.norm(diff, 1) < 10.0 * 0.25 / 4096);

  GridFunction zero;
  zero.values = Eigen::MatrixXd::Zero(4096, 1);
  CHECK(op.norm(chi_truncated(op, zero, 5), 1) == 0.0);

  const GridFunction c = op.discretize(make_observable("cos2pi", doubling_desc()));
  CHECK(op.norm(chi_truncated(op, c, 8), 1) < 1e-10);
}

TEST_CASE("martingale part: doubling base gives the +-1/2 martingale") {
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v = op.discretize(make_observable("base", doubling_desc()));
  const int k = default_truncation(op, v);
  // |P^n v|_1 = 2^-n/4 until the 4096-cell grid floor (~9.5e-7) is reached
  // at n = 12, just below the 1e-6 truncation threshold
  CHECK(k == 12);
  const Decomposition dec = martingale_part(op, v, k);
  CHECK(dec.residual_ker_p < 1e-8);
  CHECK(dec.truncation_k == k);
  for (int i = 0; i < 4096; i += 119) {
    const double expected = i < 2048 ? -0.5 : 0.5;
    CHECK(dec.mart.values(i, 0) == doctest::Approx(expected).epsilon(1e-4));
  }
  // reconstruction v = m + chi o T - chi (+ the truncated remainder)
  GridFunction recon;
  recon.values =
      dec.mart.values + op.koopman(dec.chi).values - dec.chi.values - v.values;
  CHECK(op.norm(recon, 1) < 1e-2);
  CHECK(op.norm(recon, 1) < 1e-5);
}

TEST_CASE("martingale part: cos is already in ker P") {
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v = op.discretize(make_observable("cos2pi", doubling_desc()));
  const Decomposition dec = martingale_part(op, v, 10);
  CHECK(op.norm(dec.chi, 1) < 1e-10);
  GridFunction diff = dec.mart;
  diff.values -= v.values;
  CHECK(op.norm(diff, 1) < 1e-10);
}

TEST_CASE("martingale part: coboundary observable has vanishing m") {
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v =
      op.discretize(make_observable("coboundary", doubling_desc()));
  const Decomposition dec = martingale_part(op, v, 20);
  CHECK(op.norm(dec.mart, 2) < 1e-2);
  CHECK(op.norm(dec.mart, 2) < 1e-3);  // grid projection artifact only
}

TEST_CASE("l2 cauchy bound") {
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v = op.discretize(make_observable("base", doubling_desc()));
  const auto [lhs, rhs] = l2_cauchy_bound_check(op, v, 5, 10);
  CHECK(lhs <= 1.2 * rhs);
  CHECK(rhs > 0.0);
  CHECK_THROWS_AS(l2_cauchy_bound_check(op, v, 10, 10), std::invalid_argument);

  const GridFunction c = op.discretize(make_observable("cos2pi", doubling_desc()));
  const auto [lhs_c, rhs_c] = l2_cauchy_bound_check(op, c, 3, 9);
  CHECK(lhs_c < 1e-10);  // v in ker P: m^(k) identical for all k
  CHECK(lhs_c <= 1.2 * rhs_c + 1e-15);

  const GridFunction cb =
      op.discretize(make_observable("coboundary", doubling_desc()));
  const auto [g1, r1] = l2_cauchy_bound_check(op, cb, 2, 6);
  const auto [g2, r2] = l2_cauchy_bound_check(op, cb, 6, 12);
  CHECK(g2 <= g1 + 1e-12);  // gap shrinks as ell grows
  CHECK(g1 <= 1.2 * r1 + 1e-15);
  CHECK(g2 <= 1.2 * r2 + 1e-15);
}

TEST_CASE("fiber conditional expectation: exact quadrature on the uniform baker") {
  const MapDescriptor desc = uniform_baker();
  const Observable fiber = make_observable("fiber", desc);
  const BaseTable t =
      fiber_conditional_expectation(desc, fiber, CondMethod::ExactQuadrature, 256);
  CHECK(t.values.cwiseAbs().maxCoeff() < 1e-10);  // E0(y - 1/2) = 0

  const Observable base = make_observable("base", desc);
  const BaseTable tb =
      fiber_conditional_expectation(desc, base, CondMethod::ExactQuadrature, 256);
  for (int i = 0; i < 256; i += 15) {
    const double x = (i + 0.5) / 256.0;
    CHECK(tb.eval(x)(0) == doctest::Approx(x - 0.5).epsilon(1e-6));
  }
}

TEST_CASE("fiber conditional expectation: binned estimator") {
  const MapDescriptor desc = uniform_baker();
  const Observable base = make_observable("base", desc);
  const BaseTable t = fiber_conditional_expectation(
      desc, base, CondMethod::Binned, 128, 1'000'000, 77);
  for (double x : {0.1, 0.35, 0.6, 0.85})
    CHECK(std::abs(t.eval(x)(0) - (x - 0.5)) < 0.05);
}

TEST_CASE("exact quadrature is rejected off the uniform baker") {
  const MapDescriptor desc = intermittent_baker(0.25);
  const Observable fiber = make_observable("fiber", desc);
  CHECK_THROWS_AS(fiber_conditional_expectation(desc, fiber,
                                                CondMethod::ExactQuadrature, 64),
                  std::invalid_argument);
}

TEST_CASE("hybrid criterion diagnostic: uniform baker") {
  const MapDescriptor desc = uniform_baker();
  const Observable fiber = make_observable("fiber", desc);
  const HybridDiagnostic diag =
      hybrid_criterion_diagnostic(desc, fiber, 12, 1024, 5000);
  REQUIRE(diag.series_plus.norms.size() == 13);
  for (int n = 0; n <= 12; ++n) {
    const double bound = *fiber.lipschitz_bound * std::pow(0.5, n);
    CHECK(diag.series_plus.norms[static_cast<std::size_t>(n)] <= bound);
    // E0(v) = 0 for the fiber coordinate, so the backward series vanishes
    CHECK(diag.series_minus.norms[static_cast<std::size_t>(n)] < 1e-6);
  }

  // a base-only observable is F0-measurable: forward series vanishes and
  // the backward series is the base-map transfer decay
  const Observable base = make_observable("base", desc);
  const HybridDiagnostic diag_b =
      hybrid_criterion_diagnostic(desc, base, 8, 2048, 5000);
  for (int n = 0; n <= 8; ++n) {
    CHECK(diag_b.series_plus.norms[static_cast<std::size_t>(n)] < 1e-10);
    CHECK(diag_b.series_minus.norms[static_cast<std::size_t>(n)] ==
          doctest::Approx(std::pow(2.0, -n) / 4.0).epsilon(1e-3));
  }
}

TEST_CASE("invertible decomposition: base-only observable") {
  const MapDescriptor desc = uniform_baker();
  const Observable base = make_observable("base", desc);
  const InvertibleDecomposition dec =
      invertible_decomposition(desc, base, 18, 2048);
  auto g = make_stream(5, 0);
  for (int i = 0; i < 100; ++i) {
    const Point p{uniform01(g), uniform01(g)};
    CHECK(std::abs(dec.chi_plus(p)(0)) < 1e-8);  // a_j = 0 for j >= 0
    CHECK(dec.v_hat(p)(0) == doctest::Approx(base.eval(p)(0)).epsilon(1e-6));
  }
}

TEST_CASE("invertible decomposition: fiber observable reconstruction") {
  const MapDescriptor desc = uniform_baker();
  const Observable fiber = make_observable("fiber", desc);
  const InvertibleDecomposition dec =
      invertible_decomposition(desc, fiber, 18, 2048);
  auto g = make_stream(6, 0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Point p{uniform01(g), uniform01(g)};
    const Point tp = baker_step(p, desc);
    const double recon =
        dec.v_hat(p)(0) + dec.chi_plus(tp)(0) - dec.chi_plus(p)(0);
    worst = std::max(worst, std::abs(fiber.eval(p)(0) - recon));
  }
  CHECK(worst < 1e-2 + dec.truncation_allowance);

  // E_{-1}(m) = 0: the conditional mean of m given the coarsened past
  const double residual =
      conditional_mean_residual(desc, dec.mart, 64, 200'000, 8);
  CHECK(residual < 1e-2);
}

TEST_CASE("invertible decomposition: zero observable") {
  const MapDescriptor desc = uniform_baker();
  Observable zero;
  zero.name = "zero";
  zero.dimension = 1;
  zero.eval = [](const Point&) { return Eigen::VectorXd::Zero(1); };
  zero.sup_norm_bound = 0.0;
  zero.lipschitz_bound = 0.0;
  const InvertibleDecomposition dec =
      invertible_decomposition(desc, zero, 5, 512);
  auto g = make_stream(9, 0);
  for (int i = 0; i < 50; ++i) {
    const Point p{uniform01(g), uniform01(g)};
    CHECK(std::abs(dec.chi_minus(p)(0)) < 1e-12);
    CHECK(std::abs(dec.chi_plus(p)(0)) < 1e-12);
    CHECK(std::abs(dec.v_hat(p)(0)) < 1e-12);
    CHECK(std::abs(dec.mart(p)(0)) < 1e-12);
  }
}

TEST_CASE("drift identity on the uniform baker") {
  const MapDescriptor desc = uniform_baker();
  const Observable pair = make_observable("baker-pair", desc);
  const DriftIdentityReport report =
      drift_identity_check(desc, pair, 16, 600'000, 21, 40);
  CHECK(report.within_tolerance(3.0));
  CHECK(report.lhs.rows() == 2);
  CHECK(report.rhs.rows() == 2);
}

TEST_CASE("martingale_part rejects an under-resolved grid") {
  // a very coarse lsv grid cannot place m in ker P
  const UlamOperator op(doubling_desc(), 4096, 128);
  const GridFunction v = op.discretize(make_observable("base", doubling_desc()));
  CHECK_THROWS_AS(martingale_part(op, v, 0), std::invalid_argument);
}
