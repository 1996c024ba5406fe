#include "wiplab/transfer.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wiplab/rng.hpp"

namespace wiplab {

UlamOperator::UlamOperator(const MapDescriptor& desc, int grid_size,
                           int samples_per_cell)
    : desc_(desc), n_(grid_size), samples_per_cell_(samples_per_cell) {
  desc.validate();
  if (desc.is_baker())
    throw std::invalid_argument(
        "UlamOperator covers the interval maps; baker kinds use the "
        "fiber-conditional machinery instead");
  if (grid_size < 2) throw std::invalid_argument("grid_size >= 2 required");
  if (samples_per_cell < 32)
    throw std::invalid_argument("samples_per_cell >= 32 required");

  const double s_inv = 1.0 / samples_per_cell;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n_) * 4);
  std::vector<double> col(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    // accumulate per-column to keep the triplet list short
    std::fill(col.begin(), col.end(), 0.0);
    for (int s = 0; s < samples_per_cell; ++s) {
      const double x = (j + van_der_corput(static_cast<std::uint32_t>(s))) / n_;
      const double y = base_step(x, desc_);
      int i = static_cast<int>(y * n_);
      if (i >= n_) i = n_ - 1;
      col[static_cast<std::size_t>(i)] += s_inv;
    }
    for (int i = 0; i < n_; ++i)
      if (col[static_cast<std::size_t>(i)] != 0.0)
        trips.emplace_back(i, j, col[static_cast<std::size_t>(i)]);
  }
  forward_.resize(n_, n_);
  forward_.setFromTriplets(trips.begin(), trips.end());
  forward_.makeCompressed();

  if (desc_.kind == MapKind::Doubling) {
    weights_ = Eigen::VectorXd::Constant(n_, 1.0 / n_);
  } else {
    // Stationary weights: solve (M - I) w = 0 with the normalization
    // sum w = 1 replacing the last (redundant) equation.
    Eigen::SparseMatrix<double> a = forward_;
    std::vector<Eigen::Triplet<double>> at;
    at.reserve(static_cast<std::size_t>(a.nonZeros()) + n_);
    for (int k = 0; k < a.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
        if (it.row() == n_ - 1) continue;
        const double v = it.value() - (it.row() == it.col() ? 1.0 : 0.0);
        if (v != 0.0) at.emplace_back(it.row(), it.col(), v);
      }
    }
    for (int j = 0; j < n_; ++j) {
      bool diag_seen = false;
      for (Eigen::SparseMatrix<double>::InnerIterator it(forward_, j); it; ++it)
        if (it.row() == j) diag_seen = true;
      if (!diag_seen && j != n_ - 1) at.emplace_back(j, j, -1.0);
      at.emplace_back(n_ - 1, j, 1.0);
    }
    Eigen::SparseMatrix<double> sys(n_, n_);
    sys.setFromTriplets(at.begin(), at.end());
    sys.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("UlamOperator: stationary solve failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_);
    rhs(n_ - 1) = 1.0;
    weights_ = lu.solve(rhs);
  }
  if (weights_.minCoeff() <= 0.0)
    throw std::runtime_error(
        "UlamOperator: a cell received zero invariant mass; refine the grid "
        "or increase samples_per_cell");
}

int UlamOperator::cell_of(double x) const {
  int i = static_cast<int>(x * n_);
  if (i < 0) i = 0;
  if (i >= n_) i = n_ - 1;
  return i;
}

GridFunction UlamOperator::apply(const GridFunction& v, int n) const {
  if (v.grid_size() != n_)
    throw std::invalid_argument("apply: grid size mismatch");
  if (n < 0) throw std::invalid_argument("apply: n >= 0 required");
  GridFunction out = v;
  for (int it = 0; it < n; ++it) {
    Eigen::MatrixXd massed = weights_.asDiagonal() * out.values;
    out.values = forward_ * massed;
    out.values.array().colwise() /= weights_.array();
  }
  return out;
}

GridFunction UlamOperator::koopman(const GridFunction& v) const {
  if (v.grid_size() != n_)
    throw std::invalid_argument("koopman: grid size mismatch");
  GridFunction out;
  out.values = forward_.transpose() * v.values;
  return out;
}

GridFunction UlamOperator::discretize(const Observable& obs) const {
  GridFunction g;
  g.values.setZero(n_, obs.dimension);
  Point p;
  for (int j = 0; j < n_; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(obs.dimension);
    for (int s = 0; s < samples_per_cell_; ++s) {
      p.base = (j + van_der_corput(static_cast<std::uint32_t>(s))) / n_;
      acc += obs.eval(p);
    }
    g.values.row(j) = acc.transpose() / samples_per_cell_;
  }
  return g;
}

GridFunction UlamOperator::discretize(
    const std::function<double(double)>& f) const {
  GridFunction g;
  g.values.setZero(n_, 1);
  for (int j = 0; j < n_; ++j) {
    double acc = 0.0;
    for (int s = 0; s < samples_per_cell_; ++s)
      acc += f((j + van_der_corput(static_cast<std::uint32_t>(s))) / n_);
    g.values(j, 0) = acc / samples_per_cell_;
  }
  return g;
}

double UlamOperator::norm(const GridFunction& v, int p) const {
  if (v.grid_size() != n_)
    throw std::invalid_argument("norm: grid size mismatch");
  const Eigen::VectorXd rows = v.values.rowwise().norm();
  if (p == 0) return rows.maxCoeff();
  if (p == 1) return weights_.dot(rows);
  if (p == 2) return std::sqrt(weights_.dot(rows.array().square().matrix()));
  throw std::invalid_argument("norm: p must be 1, 2, or 0 (sup)");
}

Eigen::VectorXd UlamOperator::integral(const GridFunction& v) const {
  return v.values.transpose() * weights_;
}

void UlamOperator::dump_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_binary: cannot open " + path);
  const char magic[4] = {'U', 'L', 'A', 'M'};
  const std::uint32_t n = static_cast<std::uint32_t>(n_);
  const std::uint64_t weight_offset =
      16 + static_cast<std::uint64_t>(n_) * n_ * sizeof(double);
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&weight_offset), 8);
  Eigen::MatrixXd dense(forward_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double x = dense(i, j);
      out.write(reinterpret_cast<const char*>(&x), sizeof(double));
    }
  out.write(reinterpret_cast<const char*>(weights_.data()),
            static_cast<std::streamsize>(n_ * sizeof(double)));
}

double koopman_check(const UlamOperator& op, const GridFunction& v) {
  const GridFunction uv = op.koopman(v);
  GridFunction diff = op.apply(uv, 1);
  diff.values -= v.values;
  return op.norm(diff, 1);
}

std::optional<double> fit_loglog_exponent(const std::vector<int>& lags,
                                          const std::vector<double>& norms,
                                          int from, int to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (lags[k] < from || lags[k] > to || lags[k] < 1) continue;
    if (!(norms[k] > 0.0)) continue;
    const double x = std::log(static_cast<double>(lags[k]));
    const double y = std::log(norms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

DecaySeries gordin_l1_diagnostic(const UlamOperator& op, const GridFunction& v,
                                 int n_max, int tail_cutoff) {
  if (n_max < 8) throw std::invalid_argument("gordin_l1_diagnostic: n_max >= 8");
  if (tail_cutoff < 0) tail_cutoff = n_max / 2;
  DecaySeries series;
  series.p = 1;
  series.tail_cutoff = tail_cutoff;
  // P preserves the integral against the stationary weights, so any mean
  // component (e.g. a centering constant computed against the continuum
  // measure) would freeze the norms at a floor; the decay of interest is
  // that of the mean-zero part.
  GridFunction cur = v;
  const Eigen::VectorXd mean = op.integral(v);
  cur.values.rowwise() -= mean.transpose();
  const double v1 = op.norm(cur, 1);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) cur = op.apply(cur, 1);
    const double nrm = op.norm(cur, 1);
    if (nrm > v1 * (1.0 + 1e-10))
      throw std::runtime_error(
          "gordin_l1_diagnostic: L1 contraction violated");
    series.lags.push_back(n);
    series.norms.push_back(nrm);
    if (n >= tail_cutoff) series.tail_sum += nrm;
  }
  // fit over the central half of the lag range: the first quarter carries
  // transients, and in the last quarter the finite matrix's artificial
  // spectral gap takes over and steepens the slope at fixed grid size
  series.fitted_exponent = fit_loglog_exponent(series.lags, series.norms,
                                               n_max / 4, 3 * n_max / 4);
  return series;
}

DecaySeries correlation_decay(const MapDescriptor& desc, const Observable& v,
                              const Observable& w, int n_max,
                              long orbit_budget, std::uint64_t seed) {
  if (v.dimension != 1 || w.dimension != 1)
    throw std::invalid_argument("correlation_decay: scalar observables only");
  const long len = orbit_budget;
  if (len < 4L * n_max)
    throw std::invalid_argument("correlation_decay: orbit_budget too small");
  // one long orbit; both observables evaluated along it
  Orbit ov = sample_orbit(desc, v, std::nullopt, len, 10000, seed);
  Eigen::VectorXd va = ov.values.col(0);
  Eigen::VectorXd wa(len);
  for (long t = 0; t < len; ++t)
    wa(t) = w.eval(ov.points[static_cast<std::size_t>(t)])(0);

  const int batches = 32;
  DecaySeries series;
  series.p = 1;
  for (int n = 0; n <= n_max; ++n) {
    const long m = len - n;
    const long bl = m / batches;
    double mean = 0.0, m2 = 0.0;
    std::vector<double> bmeans(batches);
    for (int b = 0; b < batches; ++b) {
      double acc = 0.0;
      const long lo = b * bl;
      for (long t = lo; t < lo + bl; ++t) acc += va(t) * wa(t + n);
      bmeans[static_cast<std::size_t>(b)] = acc / static_cast<double>(bl);
    }
    for (double bm : bmeans) mean += bm;
    mean /= batches;
    for (double bm : bmeans) m2 += (bm - mean) * (bm - mean);
    const double se = std::sqrt(m2 / (batches - 1) / batches);
    series.lags.push_back(n);
    series.norms.push_back(std::abs(mean));
    series.stderrs.push_back(se);
  }
  series.fitted_exponent =
      fit_loglog_exponent(series.lags, series.norms, n_max / 2, n_max);
  series.tail_cutoff = n_max / 2;
  for (std::size_t k = 0; k < series.lags.size(); ++k)
    if (series.lags[k] >= series.tail_cutoff) series.tail_sum += series.norms[k];
  return series;
}

}  // namespace wiplab
