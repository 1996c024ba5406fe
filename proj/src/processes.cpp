#include "wiplab/processes.hpp"

#include <cmath>
#include <stdexcept>

#include "wiplab/parallel.hpp"
#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

long path_steps(const Orbit& orbit, long n, double K) {
  if (n < 1 || K <= 0.0) throw std::invalid_argument("path: n >= 1, K > 0");
  const long steps = static_cast<long>(std::floor(n * K));
  if (static_cast<long>(orbit.points.size()) < steps)
    throw std::invalid_argument("path: orbit shorter than floor(nK)");
  return steps;
}

Point initial_point(const MapDescriptor& desc, const EnsembleSpec& spec,
                    std::uint64_t master_seed, std::uint64_t replica) {
  auto g = make_stream(master_seed, replica);
  Point p;
  if (spec.base_interval) {
    const auto [lo, hi] = *spec.base_interval;
    p.base = lo + uniform01(g) * (hi - lo);
    p.fiber = desc.is_baker() ? uniform01(g) : 0.0;
  } else {
    p.base = uniform01(g);
    p.fiber = desc.is_baker() ? uniform01(g) : 0.0;
    for (long i = 0; i < spec.burn_in; ++i) p = map_step(p, desc);
  }
  return p;
}

}  // namespace

PathPair wip_path(const Orbit& orbit, long n, double K) {
  const long steps = path_steps(orbit, n, K);
  const int d = static_cast<int>(orbit.values.cols());
  PathPair pair;
  pair.n = n;
  pair.K = K;
  pair.times.resize(static_cast<std::size_t>(steps) + 1);
  pair.w_path.setZero(steps + 1, d);
  const double root_n = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
  pair.times[0] = 0.0;
  for (long i = 1; i <= steps; ++i) {
    s += orbit.values.row(i - 1).transpose();
    pair.times[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    pair.w_path.row(i) = s.transpose() / root_n;
  }
  return pair;
}

PathPair iterated_path(const Orbit& orbit, long n, double K) {
  const long steps = path_steps(orbit, n, K);
  const int d = static_cast<int>(orbit.values.cols());
  PathPair pair;
  pair.n = n;
  pair.K = K;
  pair.times.resize(static_cast<std::size_t>(steps) + 1);
  pair.w_path.setZero(steps + 1, d);
  pair.ww_path.assign(static_cast<std::size_t>(steps) + 1,
                      Eigen::MatrixXd::Zero(d, d));
  const double root_n = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd ww = Eigen::MatrixXd::Zero(d, d);
  pair.times[0] = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const Eigen::VectorXd vi = orbit.values.row(i - 1).transpose();
    ww += s * vi.transpose() / static_cast<double>(n);
    s += vi;
    pair.times[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    pair.w_path.row(i) = s.transpose() / root_n;
    pair.ww_path[static_cast<std::size_t>(i)] = ww;
  }
  return pair;
}

double shuffle_identity_error(const PathPair& pair, const Orbit& orbit) {
  if (pair.ww_path.empty())
    throw std::invalid_argument("shuffle_identity_error: level-2 path needed");
  const int d = static_cast<int>(pair.w_path.cols());
  const long steps = static_cast<long>(pair.times.size()) - 1;
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(d, d);
  double worst = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const Eigen::VectorXd vi = orbit.values.row(i - 1).transpose();
    quad += vi * vi.transpose() / static_cast<double>(pair.n);
    const Eigen::VectorXd w = pair.w_path.row(i).transpose();
    const Eigen::MatrixXd& ww = pair.ww_path[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd lhs = w * w.transpose();
    const Eigen::MatrixXd rhs = ww + ww.transpose() + quad;
    const double denom = std::max(lhs.norm(), rhs.norm());
    if (denom > 0.0) worst = std::max(worst, (lhs - rhs).norm() / denom);
  }
  return worst;
}

std::vector<MatrixEstimate> lag_correlations_mc(const MapDescriptor& desc,
                                                const Observable& v, int J,
                                                long orbit_budget,
                                                std::uint64_t seed) {
  if (J < 0) throw std::invalid_argument("lag_correlations_mc: J >= 0");
  if (orbit_budget < 64L * (J + 1))
    throw std::invalid_argument("lag_correlations_mc: orbit_budget too small");
  const Orbit orbit =
      sample_orbit(desc, v, std::nullopt, orbit_budget, 10000, seed);
  const int d = v.dimension;
  const int nb = 32;
  const long usable = orbit_budget - J;
  const long bl = usable / nb;
  std::vector<MatrixEstimate> out(static_cast<std::size_t>(J) + 1);
  std::vector<std::vector<Eigen::MatrixXd>> batch_sums(
      static_cast<std::size_t>(J) + 1,
      std::vector<Eigen::MatrixXd>(nb, Eigen::MatrixXd::Zero(d, d)));
  for (int b = 0; b < nb; ++b) {
    const long lo = b * bl;
    for (long t = lo; t < lo + bl; ++t) {
      const Eigen::VectorXd vt = orbit.values.row(t).transpose();
      for (int j = 0; j <= J; ++j)
        batch_sums[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] +=
            vt * orbit.values.row(t + j);
    }
  }
  for (int j = 0; j <= J; ++j) {
    auto& bs = batch_sums[static_cast<std::size_t>(j)];
    for (auto& m : bs) m /= static_cast<double>(bl);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : bs) mean += m;
    mean /= nb;
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : bs) var += (m - mean).cwiseProduct(m - mean);
    out[static_cast<std::size_t>(j)].value = mean;
    out[static_cast<std::size_t>(j)].se =
        (var / ((nb - 1.0) * nb)).cwiseSqrt();
  }
  return out;
}

std::vector<Eigen::MatrixXd> lag_correlations_ulam(const UlamOperator& op,
                                                   const GridFunction& v,
                                                   int J) {
  if (J < 0) throw std::invalid_argument("lag_correlations_ulam: J >= 0");
  const int d = v.dim();
  const Eigen::VectorXd& w = op.cell_weights();
  std::vector<Eigen::MatrixXd> out;
  GridFunction cur = v;
  for (int j = 0; j <= J; ++j) {
    if (j > 0) cur = op.apply(cur, 1);
    // C_j(a,b) = sum_i w_i (P^j v)_a(i) v_b(i)
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < op.grid_size(); ++i)
      c += w(i) * cur.values.row(i).transpose() * v.values.row(i);
    out.push_back(c);
  }
  return out;
}

MatrixEstimate sigma_green_kubo(const std::vector<MatrixEstimate>& corr) {
  if (corr.empty()) throw std::invalid_argument("sigma_green_kubo: empty");
  MatrixEstimate s;
  s.value = corr[0].value;
  Eigen::MatrixXd var = corr[0].se.cwiseProduct(corr[0].se);
  for (std::size_t j = 1; j < corr.size(); ++j) {
    s.value += corr[j].value + corr[j].value.transpose();
    const Eigen::MatrixXd sj =
        corr[j].se.cwiseProduct(corr[j].se);
    var += sj + sj.transpose();
  }
  s.se = var.cwiseSqrt();
  return s;
}

Eigen::MatrixXd sigma_green_kubo(const std::vector<Eigen::MatrixXd>& corr) {
  if (corr.empty()) throw std::invalid_argument("sigma_green_kubo: empty");
  Eigen::MatrixXd s = corr[0];
  for (std::size_t j = 1; j < corr.size(); ++j)
    s += corr[j] + corr[j].transpose();
  return s;
}

Eigen::MatrixXd wip_terminal_ensemble(const MapDescriptor& desc,
                                      const Observable& v,
                                      const EnsembleSpec& spec,
                                      std::uint64_t master_seed) {
  desc.validate();
  if (spec.n < 1 || spec.replicas < 1)
    throw std::invalid_argument("wip_terminal_ensemble: sizes");
  const int d = v.dimension;
  Eigen::MatrixXd out(spec.replicas, d);
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  parallel_for(static_cast<std::size_t>(spec.replicas), spec.threads,
               [&](std::size_t r) {
                 Point p = initial_point(desc, spec, master_seed, r);
                 Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
                 for (long j = 0; j < spec.n; ++j) {
                   s += v.eval(p);
                   p = map_step(p, desc);
                 }
                 out.row(static_cast<Eigen::Index>(r)) =
                     s.transpose() / root_n;
               });
  return out;
}

std::vector<Eigen::MatrixXd> iterated_terminal_ensemble(
    const MapDescriptor& desc, const Observable& v, const EnsembleSpec& spec,
    std::uint64_t master_seed) {
  desc.validate();
  const int d = v.dimension;
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(spec.replicas),
                                   Eigen::MatrixXd::Zero(d, d));
  parallel_for(static_cast<std::size_t>(spec.replicas), spec.threads,
               [&](std::size_t r) {
                 Point p = initial_point(desc, spec, master_seed, r);
                 Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
                 Eigen::MatrixXd ww = Eigen::MatrixXd::Zero(d, d);
                 for (long j = 0; j < spec.n; ++j) {
                   const Eigen::VectorXd vj = v.eval(p);
                   ww += s * vj.transpose() / static_cast<double>(spec.n);
                   s += vj;
                   p = map_step(p, desc);
                 }
                 out[r] = ww;
               });
  return out;
}

MatrixEstimate matrix_ensemble_mean(const std::vector<Eigen::MatrixXd>& ms) {
  if (ms.empty()) throw std::invalid_argument("matrix_ensemble_mean: empty");
  const auto n = static_cast<double>(ms.size());
  MatrixEstimate est;
  est.value = Eigen::MatrixXd::Zero(ms[0].rows(), ms[0].cols());
  for (const auto& m : ms) est.value += m;
  est.value /= n;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(ms[0].rows(), ms[0].cols());
  for (const auto& m : ms)
    var += (m - est.value).cwiseProduct(m - est.value);
  est.se = (var / ((n - 1.0) * n)).cwiseSqrt();
  return est;
}

MatrixEstimate sigma_direct(const MapDescriptor& desc, const Observable& v,
                            const EnsembleSpec& spec,
                            std::uint64_t master_seed) {
  const Eigen::MatrixXd terms =
      wip_terminal_ensemble(desc, v, spec, master_seed);
  std::vector<Eigen::MatrixXd> outer;
  outer.reserve(static_cast<std::size_t>(terms.rows()));
  for (Eigen::Index r = 0; r < terms.rows(); ++r) {
    const Eigen::VectorXd w = terms.row(r).transpose();
    const Eigen::MatrixXd o = w * w.transpose();
    outer.push_back(0.5 * (o + o.transpose()));
  }
  return matrix_ensemble_mean(outer);
}

Eigen::MatrixXd sigma_martingale(const UlamOperator& op,
                                 const Decomposition& dec) {
  const int d = dec.mart.dim();
  const Eigen::VectorXd& w = op.cell_weights();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < op.grid_size(); ++i)
    s += w(i) * dec.mart.values.row(i).transpose() * dec.mart.values.row(i);
  return s;
}

MatrixEstimate drift_matrix(const std::vector<MatrixEstimate>& corr,
                            double* tail_estimate) {
  if (corr.size() < 2) throw std::invalid_argument("drift_matrix: need J >= 1");
  MatrixEstimate e;
  e.value = Eigen::MatrixXd::Zero(corr[0].value.rows(), corr[0].value.cols());
  Eigen::MatrixXd var = e.value;
  for (std::size_t j = 1; j < corr.size(); ++j) {
    e.value += corr[j].value;
    var += corr[j].se.cwiseProduct(corr[j].se);
  }
  e.se = var.cwiseSqrt();
  if (tail_estimate) {
    const double last = corr.back().value.norm();
    const double prev = corr[corr.size() - 2].value.norm();
    *tail_estimate = last;
    if (prev > 0.0 && last > 0.0 && last < prev) {
      const double r = last / prev;
      *tail_estimate = last * r / (1.0 - r);
    }
  }
  return e;
}

Eigen::MatrixXd drift_matrix(const std::vector<Eigen::MatrixXd>& corr) {
  if (corr.size() < 2) throw std::invalid_argument("drift_matrix: need J >= 1");
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(corr[0].rows(), corr[0].cols());
  for (std::size_t j = 1; j < corr.size(); ++j) e += corr[j];
  return e;
}

DegeneracyVerdict degeneracy_check(const Eigen::MatrixXd& sigma, double tol) {
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("degeneracy_check: eigensolver failed");
  DegeneracyVerdict verdict;
  verdict.min_eigenvalue = es.eigenvalues()(0);
  verdict.degenerate = verdict.min_eigenvalue < tol;
  verdict.witness = es.eigenvectors().col(0);
  return verdict;
}

}  // namespace wiplab
