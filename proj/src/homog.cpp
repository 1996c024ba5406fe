#include "wiplab/homog.hpp"

#include <cmath>
#include <stdexcept>

#include "wiplab/parallel.hpp"
#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

constexpr double kBlowupGuard = 1e6;
constexpr int kMacroGrid = 1000;

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigensolver failed");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-10 * scale)
      throw std::runtime_error("psd_sqrt: matrix not positive semidefinite");
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

SlowPath sampled_path(long steps, double t_end, int d) {
  SlowPath path;
  path.times.resize(kMacroGrid + 1);
  path.values.setZero(kMacroGrid + 1, d);
  for (int i = 0; i <= kMacroGrid; ++i)
    path.times[static_cast<std::size_t>(i)] =
        t_end * static_cast<double>(i) / kMacroGrid;
  (void)steps;
  return path;
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t r) {
  return splitmix64(master_seed ^ splitmix64(r));
}

}  // namespace

SlowPath fast_slow_simulate(const FastSlowConfig& cfg, std::uint64_t seed) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.1))
    throw std::invalid_argument("fast_slow_simulate: epsilon in (0, 0.1]");
  if (cfg.t_end <= 0.0)
    throw std::invalid_argument("fast_slow_simulate: t_end > 0");
  const int d = static_cast<int>(cfg.xi.size());
  const double eps2 = cfg.epsilon * cfg.epsilon;
  const long steps = static_cast<long>(std::ceil(cfg.t_end / eps2));

  Point y = random_point(cfg.fast, seed, 0);
  for (int i = 0; i < 10000; ++i) y = map_step(y, cfg.fast);

  SlowPath path = sampled_path(steps, cfg.t_end, d);
  Eigen::VectorXd x = cfg.xi;
  path.values.row(0) = x.transpose();
  int next_sample = 1;
  for (long k = 0; k < steps; ++k) {
    x += eps2 * cfg.a(x) + cfg.epsilon * (cfg.b(x) * cfg.obs.eval(y));
    y = map_step(y, cfg.fast);
    if (x.norm() > kBlowupGuard)
      throw std::runtime_error(
          "fast_slow_simulate: blowup guard tripped (|x| > 1e6)");
    while (next_sample <= kMacroGrid &&
           static_cast<double>(k + 1) >=
               static_cast<double>(next_sample) * steps / kMacroGrid) {
      path.values.row(next_sample) = x.transpose();
      ++next_sample;
    }
  }
  for (; next_sample <= kMacroGrid; ++next_sample)
    path.values.row(next_sample) = x.transpose();
  return path;
}

VecField corrected_drift(const VecField& a, const MatField& b,
                         const MatJacobian& db, const Eigen::MatrixXd& drift_e,
                         DriftConvention convention) {
  const double factor =
      convention == DriftConvention::Proposition ? 1.0 : 0.5;
  Eigen::MatrixXd e = drift_e;
  return [a, b, db, e, factor](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::MatrixXd bx = b(x);
    const std::vector<Eigen::MatrixXd> dbx = db(x);
    const int d = static_cast<int>(x.size());
    if (static_cast<int>(dbx.size()) != d || bx.rows() != d || bx.cols() != d ||
        e.rows() != d || e.cols() != d)
      throw std::invalid_argument("corrected_drift: shape mismatch");
    Eigen::VectorXd out = a(x);
    for (int beta = 0; beta < d; ++beta) {
      double corr = 0.0;
      for (int alpha = 0; alpha < d; ++alpha)
        for (int gamma = 0; gamma < d; ++gamma)
          for (int delta = 0; delta < d; ++delta)
            corr += e(gamma, delta) *
                    dbx[static_cast<std::size_t>(alpha)](beta, delta) *
                    bx(alpha, gamma);
      out(beta) += factor * corr;
    }
    return out;
  };
}

SlowPath euler_maruyama(const SDEConfig& cfg, std::uint64_t seed) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("euler_maruyama: dt > 0");
  if (cfg.t_end <= 0.0)
    throw std::invalid_argument("euler_maruyama: t_end > 0");
  const int d = static_cast<int>(cfg.xi.size());
  const Eigen::MatrixXd root = psd_sqrt(cfg.sigma);
  const long steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt));
  const double sdt = std::sqrt(cfg.dt);

  auto g = make_stream(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SlowPath path = sampled_path(steps, cfg.t_end, d);
  Eigen::VectorXd x = cfg.xi;
  Eigen::VectorXd z(d);
  path.values.row(0) = x.transpose();
  int next_sample = 1;
  for (long k = 0; k < steps; ++k) {
    for (int c = 0; c < d; ++c) z(c) = gauss(g);
    x += cfg.dt * cfg.drift(x) + cfg.diffusion(x) * (root * z * sdt);
    if (x.norm() > kBlowupGuard)
      throw std::runtime_error(
          "euler_maruyama: blowup guard tripped (|x| > 1e6)");
    while (next_sample <= kMacroGrid &&
           static_cast<double>(k + 1) >=
               static_cast<double>(next_sample) * steps / kMacroGrid) {
      path.values.row(next_sample) = x.transpose();
      ++next_sample;
    }
  }
  for (; next_sample <= kMacroGrid; ++next_sample)
    path.values.row(next_sample) = x.transpose();
  return path;
}

Eigen::MatrixXd fast_slow_terminal_ensemble(const FastSlowConfig& cfg,
                                            int replicas,
                                            std::uint64_t master_seed,
                                            int threads) {
  if (replicas < 2)
    throw std::invalid_argument("fast_slow_terminal_ensemble: replicas >= 2");
  Eigen::MatrixXd out(replicas, cfg.xi.size());
  parallel_for(static_cast<std::size_t>(replicas), threads,
               [&](std::size_t r) {
                 const SlowPath path =
                     fast_slow_simulate(cfg, replica_seed(master_seed, r));
                 out.row(static_cast<Eigen::Index>(r)) =
                     path.values.row(path.values.rows() - 1);
               });
  return out;
}

Eigen::MatrixXd sde_terminal_ensemble(const SDEConfig& cfg, int replicas,
                                      std::uint64_t master_seed, int threads) {
  if (replicas < 2)
    throw std::invalid_argument("sde_terminal_ensemble: replicas >= 2");
  Eigen::MatrixXd out(replicas, cfg.xi.size());
  parallel_for(static_cast<std::size_t>(replicas), threads,
               [&](std::size_t r) {
                 const SlowPath path =
                     euler_maruyama(cfg, replica_seed(master_seed, r));
                 out.row(static_cast<Eigen::Index>(r)) =
                     path.values.row(path.values.rows() - 1);
               });
  return out;
}

namespace {

struct MomentStats {
  double mean, mean_se, var, var_se;
};

MomentStats column_moments(const Eigen::VectorXd& col) {
  const auto n = static_cast<double>(col.size());
  MomentStats s{};
  s.mean = col.mean();
  const Eigen::ArrayXd centered = col.array() - s.mean;
  s.var = centered.square().sum() / (n - 1.0);
  s.mean_se = std::sqrt(s.var / n);
  const double m4 = centered.pow(4).mean();
  s.var_se = std::sqrt(std::max(m4 - s.var * s.var, 0.0) / n);
  return s;
}

TestReport z_report(const std::string& name, double a, double b, double se_a,
                    double se_b) {
  TestReport report;
  report.name = name;
  const double combined = std::sqrt(se_a * se_a + se_b * se_b);
  report.statistic =
      combined > 0.0 ? std::abs(a - b) / combined : (a == b ? 0.0 : 1e30);
  report.passed = report.statistic <= 3.0;
  report.p_value = report.passed ? 1.0 : 0.0;
  return report;
}

}  // namespace

std::vector<TestReport> homogenisation_compare(const Eigen::MatrixXd& fs,
                                               const Eigen::MatrixXd& sde) {
  if (fs.cols() != sde.cols())
    throw std::invalid_argument("homogenisation_compare: dimension mismatch");
  const int d = static_cast<int>(fs.cols());
  std::vector<TestReport> reports;
  for (int c = 0; c < d; ++c) {
    const MomentStats mf = column_moments(fs.col(c));
    const MomentStats ms = column_moments(sde.col(c));
    reports.push_back(z_report("mean-" + std::to_string(c), mf.mean, ms.mean,
                               mf.mean_se, ms.mean_se));
    reports.push_back(z_report("variance-" + std::to_string(c), mf.var, ms.var,
                               mf.var_se, ms.var_se));
  }
  for (int c1 = 0; c1 < d; ++c1)
    for (int c2 = c1 + 1; c2 < d; ++c2) {
      auto cov_stats = [&](const Eigen::MatrixXd& m, double& cov, double& se) {
        const auto n = static_cast<double>(m.rows());
        const Eigen::ArrayXd x = m.col(c1).array() - m.col(c1).mean();
        const Eigen::ArrayXd y = m.col(c2).array() - m.col(c2).mean();
        cov = (x * y).sum() / (n - 1.0);
        const double m22 = (x * y).square().mean();
        se = std::sqrt(std::max(m22 - cov * cov, 0.0) / n);
      };
      double cf, sf, cs, ss;
      cov_stats(fs, cf, sf);
      cov_stats(sde, cs, ss);
      reports.push_back(z_report(
          "covariance-" + std::to_string(c1) + std::to_string(c2), cf, cs, sf,
          ss));
    }
  for (int c = 0; c < d; ++c) {
    std::vector<double> a(fs.col(c).data(), fs.col(c).data() + fs.rows());
    std::vector<double> b(sde.col(c).data(), sde.col(c).data() + sde.rows());
    TestReport ks = ks_two_sample(std::move(a), std::move(b));
    ks.name = "ks-" + std::to_string(c);
    reports.push_back(ks);
  }
  return reports;
}

}  // namespace wiplab
