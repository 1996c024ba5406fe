#include <doctest.h>

#include <cmath>

#include "wiplab/homog.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/rng.hpp"

using namespace wiplab;

namespace {

MapDescriptor doubling_desc() { return MapDescriptor{}; }

VecField zero_field(int d) {
  return [d](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(d); };
}

MatField identity_field(int d) {
  return [d](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(d, d);
  };
}

MatJacobian zero_jacobian(int d) {
  return [d](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>(
        static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d));
  };
}

}  // namespace

TEST_CASE("corrected drift: constant diffusion leaves the drift alone") {
  const int d = 2;
  const VecField a = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(x.array().sin().matrix());
  };
  const Eigen::MatrixXd e =
      (Eigen::MatrixXd(2, 2) << 0.3, -0.1, 0.2, 0.4).finished();
  for (DriftConvention conv :
       {DriftConvention::Proposition, DriftConvention::LiteralHalf}) {
    const VecField tilde = corrected_drift(a, identity_field(d),
                                           zero_jacobian(d), e, conv);
    const Eigen::VectorXd x = (Eigen::VectorXd(2) << 0.7, -1.3).finished();
    CHECK((tilde(x) - a(x)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("corrected drift: scalar b(x) = x closed form") {
  // d=1, a=0, b(x)=x: correction = E * db*b = E * x; half convention halves it
  const VecField a = zero_field(1);
  const MatField b = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, x(0));
  };
  const MatJacobian db = [](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Constant(1, 1, 1.0)};
  };
  const Eigen::MatrixXd e = Eigen::MatrixXd::Constant(1, 1, 0.25);
  const VecField full =
      corrected_drift(a, b, db, e, DriftConvention::Proposition);
  const VecField half =
      corrected_drift(a, b, db, e, DriftConvention::LiteralHalf);
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    const Eigen::VectorXd xv = Eigen::VectorXd::Constant(1, x);
    CHECK(full(xv)(0) == doctest::Approx(0.25 * x).epsilon(1e-12));
    CHECK(half(xv)(0) == doctest::Approx(0.125 * x).epsilon(1e-12));
  }
}

TEST_CASE("corrected drift: the two conventions differ by half the correction") {
  const int d = 2;
  const VecField a = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd((x.array() * x.array()).matrix());
  };
  const MatField b = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, x(0), x(1), std::cos(x(0));
    return m;
  };
  const MatJacobian db = [](const Eigen::VectorXd& x) {
    std::vector<Eigen::MatrixXd> j(2, Eigen::MatrixXd::Zero(2, 2));
    j[0](0, 1) = 1.0;                  // d b^{01} / d x^0
    j[0](1, 1) = -std::sin(x(0));      // d b^{11} / d x^0
    j[1](1, 0) = 1.0;                  // d b^{10} / d x^1
    return j;
  };
  const Eigen::MatrixXd e =
      (Eigen::MatrixXd(2, 2) << 0.1, 0.05, 0.2, 0.15).finished();
  const VecField full =
      corrected_drift(a, b, db, e, DriftConvention::Proposition);
  const VecField half =
      corrected_drift(a, b, db, e, DriftConvention::LiteralHalf);
  const Eigen::VectorXd x = (Eigen::VectorXd(2) << 0.4, -0.9).finished();
  const Eigen::VectorXd corr_full = full(x) - a(x);
  const Eigen::VectorXd corr_half = half(x) - a(x);
  CHECK((corr_full - 2.0 * corr_half).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("corrected drift: triangular instance used by the homogenisation run") {
  // a = (0, g(x)), b = diag(1, x1); only d_1 b^{11} = 1 is nonzero, so the
  // correction to component 2 is E^{01} (row/col 0-indexed)
  const VecField a = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << 0.0, -x(0) * x(0);
    return out;
  };
  const MatField b = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = x(0);
    return m;
  };
  const MatJacobian db = [](const Eigen::VectorXd&) {
    std::vector<Eigen::MatrixXd> j(2, Eigen::MatrixXd::Zero(2, 2));
    j[0](1, 1) = 1.0;
    return j;
  };
  const Eigen::MatrixXd e =
      (Eigen::MatrixXd(2, 2) << 1.0 / 12.0, 1.0 / 24.0, 1.0 / 6.0, 1.0 / 12.0)
          .finished();
  const VecField tilde =
      corrected_drift(a, b, db, e, DriftConvention::Proposition);
  for (double x1 : {-0.5, 0.2, 1.0}) {
    const Eigen::VectorXd x = (Eigen::VectorXd(2) << x1, 0.3).finished();
    CHECK(tilde(x)(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(tilde(x)(1) ==
          doctest::Approx(-x1 * x1 + 1.0 / 24.0).epsilon(1e-12));
  }
}

TEST_CASE("euler-maruyama: deterministic drift integrates exactly") {
  SDEConfig cfg;
  cfg.drift = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(1, 1.0);
  };
  cfg.diffusion = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1);
  };
  cfg.sigma = Eigen::MatrixXd::Constant(1, 1, 1.0);
  cfg.xi = Eigen::VectorXd::Constant(1, 0.5);
  cfg.dt = 1e-3;
  const SlowPath path = euler_maruyama(cfg, 1);
  CHECK(path.values(path.values.rows() - 1, 0) ==
        doctest::Approx(1.5).epsilon(1e-10));
  CHECK(path.times.front() == doctest::Approx(0.0));
  CHECK(path.times.back() == doctest::Approx(1.0));
}

TEST_CASE("euler-maruyama: brownian motion has variance sigma * t") {
  SDEConfig cfg;
  cfg.drift = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  cfg.diffusion = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(1, 1);
  };
  cfg.sigma = Eigen::MatrixXd::Constant(1, 1, 0.25);
  cfg.xi = Eigen::VectorXd::Zero(1);
  cfg.dt = 1e-3;
  const Eigen::MatrixXd ens = sde_terminal_ensemble(cfg, 2000, 11, 4);
  const double mean = ens.col(0).mean();
  const double var =
      (ens.col(0).array() - mean).square().sum() / (ens.rows() - 1.0);
  // se of the mean ~ 0.5/sqrt(2000); se of the variance ~ 0.25*sqrt(2/1999)
  CHECK(std::abs(mean) < 0.04);
  CHECK(std::abs(var - 0.25) < 0.03);
}

TEST_CASE("euler-maruyama: linear diffusion is a martingale") {
  SDEConfig cfg;
  cfg.drift = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  cfg.diffusion = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, x(0));
  };
  cfg.sigma = Eigen::MatrixXd::Constant(1, 1, 1.0);
  cfg.xi = Eigen::VectorXd::Constant(1, 1.0);
  cfg.dt = 1e-3;
  const Eigen::MatrixXd ens = sde_terminal_ensemble(cfg, 4000, 13, 4);
  const double mean = ens.col(0).mean();
  const double sd = std::sqrt(
      (ens.col(0).array() - mean).square().sum() / (ens.rows() - 1.0));
  CHECK(std::abs(mean - 1.0) < 3.0 * sd / std::sqrt(4000.0) + 0.01);
}

TEST_CASE("fast-slow recurrence: closed forms without noise") {
  FastSlowConfig cfg;
  cfg.epsilon = 0.05;
  cfg.xi = Eigen::VectorXd::Zero(1);
  cfg.a = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(1, 1.0);
  };
  cfg.b = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  cfg.fast = doubling_desc();
  cfg.obs = make_observable("base", cfg.fast);
  const SlowPath path = fast_slow_simulate(cfg, 3);
  REQUIRE(path.times.size() == 1001);
  // n = t_end / eps^2 steps of size eps^2 integrate the unit drift to t_end
  CHECK(path.values(1000, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(path.values(0, 0) == doctest::Approx(0.0));

  // zero observable with zero drift stays put
  FastSlowConfig still = cfg;
  still.a = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  still.b = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(1, 1);
  };
  Observable zero;
  zero.name = "zero";
  zero.dimension = 1;
  zero.eval = [](const Point&) { return Eigen::VectorXd::Zero(1); };
  zero.sup_norm_bound = 0.0;
  still.obs = zero;
  const SlowPath quiet = fast_slow_simulate(still, 3);
  CHECK(quiet.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fast-slow recurrence: blowup guard") {
  FastSlowConfig cfg;
  cfg.epsilon = 0.1;
  cfg.xi = Eigen::VectorXd::Constant(1, 2.0);
  cfg.a = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(x.array().pow(3).matrix() * 1e3);
  };
  cfg.b = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  cfg.fast = doubling_desc();
  cfg.obs = make_observable("base", cfg.fast);
  CHECK_THROWS_AS(fast_slow_simulate(cfg, 1), std::runtime_error);
}

TEST_CASE("fast-slow terminal variance matches the diffusion coefficient") {
  // x_{k+1} = x_k + eps v(y_k): the terminal law tends to N(0, Sigma t) with
  // Sigma = 1/4 for v = x - 1/2 under the doubling map
  FastSlowConfig cfg;
  cfg.epsilon = 0.05;
  cfg.xi = Eigen::VectorXd::Zero(1);
  cfg.a = zero_field(1);
  cfg.b = identity_field(1);
  cfg.fast = doubling_desc();
  cfg.obs = make_observable("base", cfg.fast);
  const Eigen::MatrixXd ens = fast_slow_terminal_ensemble(cfg, 300, 17, 4);
  const double mean = ens.col(0).mean();
  const double var =
      (ens.col(0).array() - mean).square().sum() / (ens.rows() - 1.0);
  const double var_se = 0.25 * std::sqrt(2.0 / 299.0);
  CHECK(std::abs(var - 0.25) < 4.0 * var_se + 0.02);
}

TEST_CASE("homogenisation comparison: identical ensembles always agree") {
  auto g = make_stream(19, 0);
  Eigen::MatrixXd ens(500, 2);
  for (int i = 0; i < 500; ++i) {
    ens(i, 0) = uniform01(g) - 0.5;
    ens(i, 1) = uniform01(g) * 2.0;
  }
  const auto reports = homogenisation_compare(ens, ens);
  REQUIRE(!reports.empty());
  for (const auto& r : reports) CHECK(r.passed);
  // report names cover means, variances, the cross covariance, and KS
  bool saw_mean = false, saw_cov = false, saw_ks = false;
  for (const auto& r : reports) {
    if (r.name.rfind("mean-", 0) == 0) saw_mean = true;
    if (r.name.rfind("covariance-", 0) == 0) saw_cov = true;
    if (r.name.rfind("ks-", 0) == 0) saw_ks = true;
  }
  CHECK(saw_mean);
  CHECK(saw_cov);
  CHECK(saw_ks);
}

TEST_CASE("homogenisation comparison: a shifted mean is detected") {
  auto g = make_stream(21, 0);
  Eigen::MatrixXd a(800, 1), b(800, 1);
  for (int i = 0; i < 800; ++i) {
    a(i, 0) = uniform01(g);
    b(i, 0) = uniform01(g) + 0.5;
  }
  const auto reports = homogenisation_compare(a, b);
  bool mean_failed = false;
  for (const auto& r : reports)
    if (r.name == "mean-0" && !r.passed) mean_failed = true;
  CHECK(mean_failed);
}
