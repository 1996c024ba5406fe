#include "wiplab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wiplab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

void write_decay_csv(const std::string& path, const DecaySeries& series) {
  std::vector<std::vector<double>> rows;
  const bool have_se = !series.stderrs.empty();
  for (std::size_t i = 0; i < series.lags.size(); ++i)
    rows.push_back({static_cast<double>(series.lags[i]), series.norms[i],
                    have_se ? series.stderrs[i] : 0.0});
  write_csv(path, {"n", "norm", "stderr"}, rows);
}

void write_pathpair_csv(const std::string& path, const PathPair& pair) {
  const int d = static_cast<int>(pair.w_path.cols());
  std::vector<std::string> header{"t"};
  for (int c = 0; c < d; ++c) header.push_back("w" + std::to_string(c));
  const bool level2 = !pair.ww_path.empty();
  if (level2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        header.push_back("ww" + std::to_string(a) + std::to_string(b));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pair.times.size(); ++i) {
    std::vector<double> row{pair.times[i]};
    for (int c = 0; c < d; ++c)
      row.push_back(pair.w_path(static_cast<Eigen::Index>(i), c));
    if (level2)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) row.push_back(pair.ww_path[i](a, b));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json estimate_to_json(const MatrixEstimate& est) {
  return {{"value", matrix_to_json(est.value)},
          {"stderr", matrix_to_json(est.se)}};
}

nlohmann::json report_to_json(const TestReport& report) {
  nlohmann::json j{{"name", report.name},
                   {"statistic", report.statistic},
                   {"p_value", report.p_value},
                   {"passed", report.passed},
                   {"n1", report.n1},
                   {"n2", report.n2},
                   {"seed", report.seed}};
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

nlohmann::json sigma_report_to_json(const SigmaReport& report) {
  nlohmann::json witness = nlohmann::json::array();
  for (Eigen::Index i = 0; i < report.verdict.witness.size(); ++i)
    witness.push_back(report.verdict.witness(i));
  return {{"sigma_direct", estimate_to_json(report.direct)},
          {"sigma_green_kubo", estimate_to_json(report.green_kubo)},
          {"sigma_martingale", estimate_to_json(report.martingale)},
          {"drift_E", estimate_to_json(report.drift)},
          {"drift_tail", report.drift_tail},
          {"degenerate", report.verdict.degenerate},
          {"min_eigenvalue", report.verdict.min_eigenvalue},
          {"witness", witness}};
}

void append_ledger(const std::string& path, const nlohmann::json& entry) {
  nlohmann::json ledger = nlohmann::json::array();
  {
    std::ifstream in(path);
    if (in) {
      try {
        in >> ledger;
      } catch (const nlohmann::json::exception&) {
        throw std::runtime_error("append_ledger: " + path +
                                 " exists but is not valid JSON");
      }
      if (!ledger.is_array())
        throw std::runtime_error("append_ledger: " + path +
                                 " is not a JSON array");
    }
  }
  ledger.push_back(entry);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("append_ledger: cannot open " + path);
  out << ledger.dump(2) << "\n";
}

}  // namespace wiplab
