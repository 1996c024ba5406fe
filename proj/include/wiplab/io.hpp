#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiplab/processes.hpp"
#include "wiplab/stats.hpp"
#include "wiplab/transfer.hpp"

namespace wiplab {

// shortest round-trip decimal representation, stable across runs
std::string format_double(double x);

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_decay_csv(const std::string& path, const DecaySeries& series);
void write_pathpair_csv(const std::string& path, const PathPair& pair);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json estimate_to_json(const MatrixEstimate& est);
nlohmann::json report_to_json(const TestReport& report);
nlohmann::json sigma_report_to_json(const SigmaReport& report);

// results.json in output_dir holds an append-only JSON array of entries
void append_ledger(const std::string& path, const nlohmann::json& entry);

}  // namespace wiplab
