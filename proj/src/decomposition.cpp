#include "wiplab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

constexpr int kFiberQuadPoints = 64;

MapDescriptor base_descriptor(const MapDescriptor& desc) {
  MapDescriptor b;
  b.kind = desc.base_is_lsv() ? MapKind::LSV : MapKind::Doubling;
  b.gamma = desc.base_gamma();
  return b;
}

bool lebesgue_fibers(const MapDescriptor& desc) {
  return desc.kind == MapKind::UniformBaker &&
         std::abs(desc.fiber_contraction - 0.5) < 1e-12;
}

void require_baker(const MapDescriptor& desc, const char* who) {
  desc.validate();
  if (!desc.is_baker())
    throw std::invalid_argument(std::string(who) + ": baker kind required");
}

// T^j(x, 0) for j = 0..jmax; the fiber map is affine, so
// T^j(x, y) = (bases[j], cpows[j]*y + offs[j]).
struct ForwardTrace {
  std::vector<double> bases, offs, cpows;
};

ForwardTrace forward_trace(const MapDescriptor& desc, double x, int jmax) {
  ForwardTrace t;
  t.bases.resize(jmax + 1);
  t.offs.resize(jmax + 1);
  t.cpows.resize(jmax + 1);
  Point q{x, 0.0};
  double cp = 1.0;
  for (int j = 0; j <= jmax; ++j) {
    t.bases[static_cast<std::size_t>(j)] = q.base;
    t.offs[static_cast<std::size_t>(j)] = q.fiber;
    t.cpows[static_cast<std::size_t>(j)] = cp;
    q = baker_step(q, desc);
    cp *= desc.fiber_contraction;
  }
  return t;
}

Eigen::VectorXd value_at_step(const Observable& v, const ForwardTrace& t,
                              int j, double y) {
  const auto sj = static_cast<std::size_t>(j);
  double fy = t.cpows[sj] * y + t.offs[sj];
  if (fy >= 1.0) fy = std::nextafter(1.0, 0.0);
  return v.eval(Point{t.bases[sj], fy});
}

// Fiber-averaged v o T^j at the trace's base point; an average over any
// fiber probability measure lies within Lip(v) * c^j of every pointwise
// value, which is all the forward diagnostics rely on.
Eigen::VectorXd e0_forward(const Observable& v, const ForwardTrace& t, int j,
                           int quad) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.dimension);
  for (int q = 0; q < quad; ++q)
    acc += value_at_step(v, t, j, (q + 0.5) / quad);
  return acc / quad;
}

std::vector<Point> sample_phase_points(const MapDescriptor& desc, long count,
                                       std::uint64_t seed) {
  std::vector<Point> pts(static_cast<std::size_t>(count));
  if (lebesgue_fibers(desc)) {
    auto g = make_stream(seed, 7);
    for (auto& p : pts) {
      p.base = uniform01(g);
      p.fiber = uniform01(g);
    }
  } else {
    // physical measure: thinned long orbit
    Point p = random_point(desc, seed, 7);
    for (int i = 0; i < 10000; ++i) p = map_step(p, desc);
    const int stride = 8;
    for (auto& q : pts) {
      q = p;
      for (int s = 0; s < stride; ++s) p = map_step(p, desc);
    }
  }
  return pts;
}

GridFunction table_on_grid(const UlamOperator& op, const BaseTable& table) {
  GridFunction g;
  g.values.setZero(op.grid_size(), table.dim());
  for (int i = 0; i < op.grid_size(); ++i)
    g.values.row(i) = table.eval(op.cell_center(i)).transpose();
  return g;
}

}  // namespace

GridFunction chi_truncated(const UlamOperator& op, const GridFunction& v,
                           int k) {
  if (k < 1) throw std::invalid_argument("chi_truncated: k >= 1");
  GridFunction acc;
  acc.values.setZero(v.values.rows(), v.values.cols());
  GridFunction cur = v;
  for (int j = 1; j <= k; ++j) {
    cur = op.apply(cur, 1);
    acc.values += cur.values;
  }
  return acc;
}

namespace {

GridFunction mart_of(const UlamOperator& op, const GridFunction& v, int k) {
  const GridFunction chi = chi_truncated(op, v, k);
  const GridFunction chi_t = op.koopman(chi);
  const GridFunction pkv = op.apply(v, k);
  GridFunction m;
  m.values = v.values - chi_t.values + chi.values - pkv.values;
  return m;
}

}  // namespace

Decomposition martingale_part(const UlamOperator& op, const GridFunction& v,
                              int k) {
  if (k < 1) throw std::invalid_argument("martingale_part: k >= 1");
  Decomposition dec;
  dec.truncation_k = k;
  dec.chi = chi_truncated(op, v, k);
  const GridFunction chi_t = op.koopman(dec.chi);
  const GridFunction pkv = op.apply(v, k);
  dec.mart.values =
      v.values - chi_t.values + dec.chi.values - pkv.values;
  dec.residual_ker_p = op.norm(op.apply(dec.mart, 1), 1);
  if (dec.residual_ker_p > 0.1)
    throw std::runtime_error(
        "martingale_part: |P m|_1 > 0.1, grid under-resolved");
  GridFunction m2 = mart_of(op, v, 2 * k);
  m2.values -= dec.mart.values;
  dec.l2_cauchy_gap = op.norm(m2, 2);
  return dec;
}

int default_truncation(const UlamOperator& op, const GridFunction& v,
                       int k_cap) {
  GridFunction cur = v;
  for (int k = 1; k <= k_cap; ++k) {
    cur = op.apply(cur, 1);
    if (op.norm(cur, 1) < 1e-6) return k;
  }
  return k_cap;
}

std::pair<double, double> l2_cauchy_bound_check(const UlamOperator& op,
                                                const GridFunction& v, int ell,
                                                int k) {
  if (!(ell >= 1 && ell < k))
    throw std::invalid_argument("l2_cauchy_bound_check: need 1 <= ell < k");
  GridFunction diff = mart_of(op, v, k);
  diff.values -= mart_of(op, v, ell).values;
  const double n2 = op.norm(diff, 2);
  const double lhs = n2 * n2;

  const double sup_v = op.norm(v, 0);
  double sum = 0.0;
  double prev = -1.0, last = -1.0;
  GridFunction cur = op.apply(v, ell);
  for (int n = ell; n <= 4 * k; ++n) {
    if (n > ell) cur = op.apply(cur, 1);
    const double n1 = op.norm(cur, 1);
    sum += n1;
    prev = last;
    last = n1;
  }
  if (prev > 0.0 && last > 0.0 && last < prev) {
    const double r = last / prev;
    sum += last * r / (1.0 - r);
  }
  return {lhs, 4.0 * sup_v * sum};
}

Eigen::VectorXd BaseTable::eval(double base) const {
  const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, base);
  const auto idx = static_cast<Eigen::Index>(it - (edges.begin() + 1));
  return values.row(idx).transpose();
}

BaseTable fiber_conditional_expectation(const MapDescriptor& desc,
                                        const Observable& w, CondMethod method,
                                        int resolution, long orbit_budget,
                                        std::uint64_t seed) {
  require_baker(desc, "fiber_conditional_expectation");
  if (resolution < 2)
    throw std::invalid_argument("fiber_conditional_expectation: resolution");
  BaseTable table;
  if (method == CondMethod::ExactQuadrature) {
    if (!lebesgue_fibers(desc))
      throw std::invalid_argument(
          "exact_quadrature needs the uniform baker with fiber contraction "
          "1/2 (Lebesgue conditional fiber measure)");
    const int quad = 256;
    table.edges.resize(static_cast<std::size_t>(resolution) + 1);
    for (int i = 0; i <= resolution; ++i)
      table.edges[static_cast<std::size_t>(i)] =
          static_cast<double>(i) / resolution;
    table.values.setZero(resolution, w.dimension);
    for (int i = 0; i < resolution; ++i) {
      const double x = (i + 0.5) / resolution;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.dimension);
      for (int q = 0; q < quad; ++q)
        acc += w.eval(Point{x, (q + 0.5) / quad});
      table.values.row(i) = acc.transpose() / quad;
    }
    return table;
  }

  if (orbit_budget < 64L * resolution)
    throw std::invalid_argument(
        "fiber_conditional_expectation: orbit_budget too small for the bin "
        "count");
  Orbit orbit = sample_orbit(desc, w, std::nullopt, orbit_budget, 10000, seed);
  std::vector<long> order(static_cast<std::size_t>(orbit_budget));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return orbit.points[static_cast<std::size_t>(a)].base <
           orbit.points[static_cast<std::size_t>(b)].base;
  });
  table.edges.assign(static_cast<std::size_t>(resolution) + 1, 0.0);
  table.edges.back() = 1.0;
  table.values.setZero(resolution, w.dimension);
  for (int b = 0; b < resolution; ++b) {
    const long lo = b * orbit_budget / resolution;
    const long hi = (b + 1) * orbit_budget / resolution;
    if (hi <= lo)
      throw std::runtime_error("fiber_conditional_expectation: empty bin");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.dimension);
    for (long t = lo; t < hi; ++t)
      acc += orbit.values.row(order[static_cast<std::size_t>(t)]).transpose();
    table.values.row(b) = acc.transpose() / static_cast<double>(hi - lo);
    if (b > 0)
      table.edges[static_cast<std::size_t>(b)] =
          orbit.points[static_cast<std::size_t>(order[static_cast<std::size_t>(
                           lo)])].base;
  }
  return table;
}

HybridDiagnostic hybrid_criterion_diagnostic(const MapDescriptor& desc,
                                             const Observable& v, int n_max,
                                             int grid_size, long sample_budget,
                                             std::uint64_t seed) {
  require_baker(desc, "hybrid_criterion_diagnostic");
  if (n_max < 8)
    throw std::invalid_argument("hybrid_criterion_diagnostic: n_max >= 8");

  HybridDiagnostic diag;

  // backward series: condition on the base coordinate, which averages the
  // fiber, then push n steps through the base transfer operator
  const CondMethod method = lebesgue_fibers(desc) ? CondMethod::ExactQuadrature
                                                  : CondMethod::Binned;
  const int resolution =
      method == CondMethod::ExactQuadrature ? grid_size : 512;
  const BaseTable e0v = fiber_conditional_expectation(
      desc, v, method, resolution, 2'000'000, seed);
  const UlamOperator op(base_descriptor(desc), grid_size, 128);
  GridFunction g = table_on_grid(op, e0v);
  diag.series_minus = gordin_l1_diagnostic(op, g, n_max);

  // forward series: fiber quadrature along forward traces, L2 over points
  const std::vector<Point> pts =
      sample_phase_points(desc, sample_budget, seed);
  std::vector<double> acc(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const Point& p : pts) {
    const ForwardTrace trace = forward_trace(desc, p.base, n_max);
    for (int n = 0; n <= n_max; ++n) {
      const Eigen::VectorXd diff =
          e0_forward(v, trace, n, kFiberQuadPoints) -
          value_at_step(v, trace, n, p.fiber);
      acc[static_cast<std::size_t>(n)] += diff.squaredNorm();
    }
  }
  diag.series_plus.p = 2;
  for (int n = 0; n <= n_max; ++n) {
    diag.series_plus.lags.push_back(n);
    diag.series_plus.norms.push_back(std::sqrt(
        acc[static_cast<std::size_t>(n)] / static_cast<double>(pts.size())));
  }
  diag.series_plus.fitted_exponent = fit_loglog_exponent(
      diag.series_plus.lags, diag.series_plus.norms, n_max / 2, n_max);
  diag.series_plus.tail_cutoff = n_max / 2;
  for (std::size_t i = 0; i < diag.series_plus.lags.size(); ++i)
    if (diag.series_plus.lags[i] >= diag.series_plus.tail_cutoff)
      diag.series_plus.tail_sum += diag.series_plus.norms[i];
  return diag;
}

InvertibleDecomposition invertible_decomposition(const MapDescriptor& desc,
                                                 const Observable& v, int k,
                                                 int grid_size,
                                                 long orbit_budget,
                                                 std::uint64_t seed) {
  require_baker(desc, "invertible_decomposition");
  if (k < 1) throw std::invalid_argument("invertible_decomposition: k >= 1");

  struct State {
    MapDescriptor desc;
    Observable v;
    std::shared_ptr<UlamOperator> op;
    GridFunction chi_minus_grid;
    int k_plus = 0;
  };
  auto st = std::make_shared<State>();
  st->desc = desc;
  st->v = v;
  st->op = std::make_shared<UlamOperator>(base_descriptor(desc), grid_size,
                                          128);

  const CondMethod method = lebesgue_fibers(desc) ? CondMethod::ExactQuadrature
                                                  : CondMethod::Binned;
  const int resolution =
      method == CondMethod::ExactQuadrature ? grid_size : 512;
  const BaseTable e0v =
      fiber_conditional_expectation(desc, v, method, resolution, orbit_budget,
                                    seed);
  GridFunction g = table_on_grid(*st->op, e0v);
  st->chi_minus_grid = chi_truncated(*st->op, g, k);

  // geometric fiber contraction picks the chi_plus cutoff
  const double c = desc.fiber_contraction;
  const double lip = v.lipschitz_bound.value_or(2.0 * v.sup_norm_bound);
  int k_plus = 1;
  while (k_plus < 60 && lip * std::pow(c, k_plus + 1) / (1.0 - c) > 1e-8)
    ++k_plus;
  st->k_plus = k_plus;

  InvertibleDecomposition dec;
  dec.truncation_k = k;
  dec.truncation_k_plus = k_plus;

  // backward tail estimated by geometric extrapolation of |P^n (E0 v)|_1
  {
    GridFunction a = st->op->apply(g, k - 1 > 0 ? k - 1 : 1);
    const double prev = st->op->norm(a, 1);
    a = st->op->apply(a, 1);
    const double last = st->op->norm(a, 1);
    double tail = last;
    if (prev > 0.0 && last > 0.0 && last < prev)
      tail = last * (last / prev) / (1.0 - last / prev);
    dec.truncation_allowance =
        tail + lip * std::pow(c, k_plus + 1) / (1.0 - c);
  }

  dec.chi_minus = [st](const Point& p) -> Eigen::VectorXd {
    return st->chi_minus_grid.values.row(st->op->cell_of(p.base)).transpose();
  };
  auto chi_plus_at = [st](const Point& p) -> Eigen::VectorXd {
    const ForwardTrace trace = forward_trace(st->desc, p.base, st->k_plus);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(st->v.dimension);
    for (int j = 0; j <= st->k_plus; ++j)
      acc += e0_forward(st->v, trace, j, kFiberQuadPoints) -
             value_at_step(st->v, trace, j, p.fiber);
    return acc;
  };
  dec.chi_plus = chi_plus_at;
  auto chi_minus_at = dec.chi_minus;
  dec.v_hat = [st, chi_plus_at](const Point& p) -> Eigen::VectorXd {
    const Point tp = baker_step(p, st->desc);
    return st->v.eval(p) - chi_plus_at(tp) + chi_plus_at(p);
  };
  dec.mart = [st, chi_plus_at, chi_minus_at](const Point& p) -> Eigen::VectorXd {
    const Point tp = baker_step(p, st->desc);
    const Eigen::VectorXd chi_p = chi_minus_at(p) + chi_plus_at(p);
    const Eigen::VectorXd chi_tp = chi_minus_at(tp) + chi_plus_at(tp);
    return st->v.eval(p) - chi_tp + chi_p;
  };
  return dec;
}

namespace {

// entrywise batch-mean stderr over 32 chunks
void batch_stats(const std::vector<Eigen::MatrixXd>& batches,
                 Eigen::MatrixXd& mean, Eigen::MatrixXd& se) {
  const auto nb = static_cast<double>(batches.size());
  mean = Eigen::MatrixXd::Zero(batches[0].rows(), batches[0].cols());
  for (const auto& b : batches) mean += b;
  mean /= nb;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
  for (const auto& b : batches)
    var += (b - mean).cwiseProduct(b - mean);
  se = (var / ((nb - 1.0) * nb)).cwiseSqrt();
}

}  // namespace

bool DriftIdentityReport::within_tolerance(double n_sigma) const {
  for (Eigen::Index i = 0; i < lhs.rows(); ++i)
    for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
      const double tol = n_sigma * std::sqrt(lhs_stderr(i, j) * lhs_stderr(i, j) +
                                             rhs_stderr(i, j) * rhs_stderr(i, j)) +
                         truncation_allowance;
      if (std::abs(lhs(i, j) - rhs(i, j)) > tol) return false;
    }
  return true;
}

DriftIdentityReport drift_identity_check(const MapDescriptor& desc,
                                         const Observable& v, int k,
                                         long orbit_budget, std::uint64_t seed,
                                         int lag_cutoff) {
  require_baker(desc, "drift_identity_check");
  const int d = v.dimension;
  const int nb = 32;

  DriftIdentityReport report;
  InvertibleDecomposition dec =
      invertible_decomposition(desc, v, k, 4096, orbit_budget, seed);
  report.truncation_allowance = dec.truncation_allowance;

  // lhs: lag-sum of v (x) (v o T^j) along one long orbit
  {
    Orbit orbit =
        sample_orbit(desc, v, std::nullopt, orbit_budget, 10000, seed);
    const long usable = orbit_budget - lag_cutoff;
    const long bl = usable / nb;
    std::vector<Eigen::MatrixXd> batches;
    for (int b = 0; b < nb; ++b) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
      const long lo = b * bl;
      for (long t = lo; t < lo + bl; ++t) {
        const Eigen::VectorXd vt = orbit.values.row(t).transpose();
        for (int j = 1; j <= lag_cutoff; ++j)
          s += vt * orbit.values.row(t + j);
      }
      batches.push_back(s / static_cast<double>(bl));
    }
    batch_stats(batches, report.lhs, report.lhs_stderr);
  }

  // rhs: Monte Carlo of chi (x) v - m (x) (chi_plus o T)
  {
    const long m_points = 20'000;
    const std::vector<Point> pts =
        sample_phase_points(desc, m_points, seed + 1);
    const long bl = m_points / nb;
    std::vector<Eigen::MatrixXd> batches;
    for (int b = 0; b < nb; ++b) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
      for (long t = b * bl; t < (b + 1) * bl; ++t) {
        const Point& p = pts[static_cast<std::size_t>(t)];
        const Point tp = baker_step(p, desc);
        const Eigen::VectorXd vp = v.eval(p);
        const Eigen::VectorXd cp = dec.chi_plus(p);
        const Eigen::VectorXd cpt = dec.chi_plus(tp);
        const Eigen::VectorXd chi_p = dec.chi_minus(p) + cp;
        const Eigen::VectorXd chi_tp = dec.chi_minus(tp) + cpt;
        const Eigen::VectorXd m = vp - chi_tp + chi_p;
        s += chi_p * vp.transpose() - m * cpt.transpose();
      }
      batches.push_back(s / static_cast<double>(bl));
    }
    batch_stats(batches, report.rhs, report.rhs_stderr);
  }
  return report;
}

double conditional_mean_residual(
    const MapDescriptor& desc,
    const std::function<Eigen::VectorXd(const Point&)>& f, int bins,
    long samples, std::uint64_t seed) {
  require_baker(desc, "conditional_mean_residual");
  if (bins < 2 || samples < 8L * bins)
    throw std::invalid_argument("conditional_mean_residual: sizes");
  const std::vector<Point> pts = sample_phase_points(desc, samples, seed);
  // the fiber coordinate encodes the full past symbol sequence; the base of
  // the preimage would leak the current symbol into the conditioning
  std::vector<std::pair<double, long>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    keyed[i] = {pts[i].fiber, static_cast<long>(i)};
  std::sort(keyed.begin(), keyed.end());
  const int d = static_cast<int>(f(pts[0]).size());
  double res = 0.0;
  for (int b = 0; b < bins; ++b) {
    const long lo = b * samples / bins;
    const long hi = (b + 1) * samples / bins;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (long t = lo; t < hi; ++t)
      acc += f(pts[static_cast<std::size_t>(
          keyed[static_cast<std::size_t>(t)].second)]);
    acc /= static_cast<double>(hi - lo);
    res += acc.norm() * static_cast<double>(hi - lo);
  }
  return res / static_cast<double>(samples);
}

}  // namespace wiplab
