#include "wiplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wiplab/decomposition.hpp"
#include "wiplab/parallel.hpp"
#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

double normal_cdf(double x, double sd) {
  if (sd <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)));
}

double ks_lambda(double d_stat, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return (rn + 0.12 + 0.11 / rn) * d_stat;
}

// PSD square root via symmetric eigendecomposition; zero modes allowed,
// genuinely negative spectra rejected.
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

}  // namespace

double ks_asymptotic_pvalue(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

TestReport ks_normality(const std::vector<double>& samples, double variance) {
  if (samples.empty()) throw std::invalid_argument("ks_normality: no samples");
  if (variance < 0.0) throw std::invalid_argument("ks_normality: variance");
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end());
  const double sd = std::sqrt(variance);
  const auto n = static_cast<double>(s.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = normal_cdf(s[i], sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d_stat = std::max({d_stat, std::abs(cdf - lo), std::abs(cdf - hi)});
  }
  TestReport report;
  report.name = "ks-normality";
  report.statistic = d_stat;
  report.p_value = ks_asymptotic_pvalue(ks_lambda(d_stat, n));
  report.passed = report.p_value > 0.01;
  report.n1 = static_cast<long>(s.size());
  return report;
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  double d_stat = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d_stat = std::max(d_stat, std::abs(static_cast<double>(i) / na -
                                       static_cast<double>(j) / nb));
  }
  TestReport report;
  report.name = "ks-two-sample";
  report.statistic = d_stat;
  report.p_value = ks_asymptotic_pvalue(
      ks_lambda(d_stat, na * nb / (na + nb)));
  report.passed = report.p_value > 0.01;
  report.n1 = static_cast<long>(a.size());
  report.n2 = static_cast<long>(b.size());
  return report;
}

TestReport two_sample_compare(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("two_sample_compare: dimension mismatch");
  TestReport report;
  report.name = "two-sample-compare";
  report.p_value = 1.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    std::vector<double> sa(a.col(c).data(), a.col(c).data() + a.rows());
    std::vector<double> sb(b.col(c).data(), b.col(c).data() + b.rows());
    const TestReport marginal = ks_two_sample(std::move(sa), std::move(sb));
    report.statistic = std::max(report.statistic, marginal.statistic);
    report.p_value = std::min(report.p_value, marginal.p_value);
  }
  // Bonferroni over coordinates
  report.p_value = std::min(1.0, static_cast<double>(a.cols()) * report.p_value);
  report.passed = report.p_value > 0.01;
  report.n1 = a.rows();
  report.n2 = b.rows();
  return report;
}

LimitPairSample sample_limit_pair(const ReferenceLawSampler& sampler,
                                  long count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_limit_pair: count >= 1");
  if (sampler.n_fine < 2)
    throw std::invalid_argument("sample_limit_pair: n_fine >= 2");
  const int d = static_cast<int>(sampler.sigma.rows());
  const Eigen::MatrixXd root = psd_sqrt(sampler.sigma);
  const double dt = 1.0 / sampler.n_fine;
  const double sdt = std::sqrt(dt);

  LimitPairSample out;
  out.w.setZero(count, d);
  out.ww.assign(static_cast<std::size_t>(count), Eigen::MatrixXd::Zero(d, d));
  for (long r = 0; r < count; ++r) {
    auto g = make_stream(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd ww = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd z(d);
    for (int i = 0; i < sampler.n_fine; ++i) {
      for (int c = 0; c < d; ++c) z(c) = gauss(g);
      const Eigen::VectorXd dw = root * z * sdt;
      ww += w * dw.transpose();  // left-point (Ito) rule
      w += dw;
    }
    out.w.row(r) = w.transpose();
    out.ww[static_cast<std::size_t>(r)] = ww + sampler.drift;
  }
  return out;
}

std::vector<TestReport> maximal_inequality_suite(const MapDescriptor& desc,
                                                 const Observable& v,
                                                 const UlamOperator& op,
                                                 long n, int replicas,
                                                 std::uint64_t seed,
                                                 int threads) {
  desc.validate();
  if (n < 1 || replicas < 2)
    throw std::invalid_argument("maximal_inequality_suite: sizes");
  const GridFunction vg = op.discretize(v);
  const int k = default_truncation(op, vg, 40);
  const Decomposition dec = martingale_part(op, vg, k);

  // sum_j |P^j v|_1, summed until it stops moving
  double pj_sum = 0.0;
  {
    GridFunction cur = vg;
    for (int j = 0; j <= 60; ++j) {
      if (j > 0) cur = op.apply(cur, 1);
      pj_sum += op.norm(cur, 1);
    }
  }
  const double m_l2 = op.norm(dec.mart, 2);

  std::vector<double> max_v_sq(static_cast<std::size_t>(replicas));
  std::vector<double> max_m_sq(static_cast<std::size_t>(replicas));
  const int d = v.dimension;
  parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    Point p = random_point(desc, seed, r);
    for (int i = 0; i < 10000; ++i) p = map_step(p, desc);
    Eigen::VectorXd sv = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd sm = Eigen::VectorXd::Zero(d);
    double mv = 0.0, mm = 0.0;
    for (long j = 0; j < n; ++j) {
      sv += v.eval(p);
      sm += dec.mart.values.row(op.cell_of(p.base)).transpose();
      mv = std::max(mv, sv.squaredNorm());
      mm = std::max(mm, sm.squaredNorm());
      p = map_step(p, desc);
    }
    max_v_sq[r] = mv;
    max_m_sq[r] = mm;
  });
  double mean_v_sq = 0.0, mean_m_sq = 0.0;
  for (int r = 0; r < replicas; ++r) {
    mean_v_sq += max_v_sq[static_cast<std::size_t>(r)];
    mean_m_sq += max_m_sq[static_cast<std::size_t>(r)];
  }
  mean_v_sq /= replicas;
  mean_m_sq /= replicas;

  std::vector<TestReport> reports(2);
  {
    TestReport& rio = reports[0];
    rio.name = "rio-maximal-" + v.name;
    const double rhs =
        1.1 * 128.0 * static_cast<double>(n) * v.sup_norm_bound * pj_sum;
    rio.statistic = rhs > 0.0 ? mean_v_sq / rhs : (mean_v_sq > 0.0 ? 1e30 : 0.0);
    rio.passed = mean_v_sq <= rhs || mean_v_sq == 0.0;
    rio.p_value = rio.passed ? 1.0 : 0.0;
    rio.n1 = replicas;
    rio.seed = seed;
  }
  {
    TestReport& doob = reports[1];
    doob.name = "doob-maximal-" + v.name;
    const double lhs = std::sqrt(mean_m_sq);
    const double rhs =
        1.1 * 4.0 * std::sqrt(static_cast<double>(n)) * m_l2;
    doob.statistic = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e30 : 0.0);
    doob.passed = lhs <= rhs || lhs == 0.0;
    doob.p_value = doob.passed ? 1.0 : 0.0;
    doob.n1 = replicas;
    doob.seed = seed;
  }
  return reports;
}

TestReport zweimuller_robustness(const MapDescriptor& desc,
                                 const Observable& v,
                                 std::pair<double, double> base_interval,
                                 long n, int replicas, std::uint64_t seed,
                                 int threads) {
  if (!(base_interval.first >= 0.0 && base_interval.second <= 1.0 &&
        base_interval.first < base_interval.second))
    throw std::invalid_argument("zweimuller_robustness: bad interval");
  EnsembleSpec nu_spec;
  nu_spec.n = n;
  nu_spec.replicas = replicas;
  nu_spec.base_interval = base_interval;
  nu_spec.threads = threads;
  EnsembleSpec mu_spec;
  mu_spec.n = n;
  mu_spec.replicas = replicas;
  mu_spec.threads = threads;

  const Eigen::MatrixXd nu_terms =
      wip_terminal_ensemble(desc, v, nu_spec, seed);
  const Eigen::MatrixXd mu_terms =
      wip_terminal_ensemble(desc, v, mu_spec, splitmix64(seed + 1));
  TestReport report = two_sample_compare(nu_terms, mu_terms);
  report.name = "zweimuller-robustness";
  report.seed = seed;
  if (n < 1000) {
    report.note = "small-n: preasymptotic regime, distributional agreement "
                  "not expected";
  }
  return report;
}

}  // namespace wiplab
