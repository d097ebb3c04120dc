#ifndef HDFLIP_IO_HPP
#define HDFLIP_IO_HPP

#include <optional>
#include <string>

#include "hdflip/combine.hpp"
#include "hdflip/multisplit.hpp"
#include "hdflip/sim.hpp"

namespace hdflip {

// Numeric CSV table with an optional (auto-detected) header row.
struct CsvTable {
  Matrix values;
  std::vector<std::string> names;  // empty when the file had no header
};

// Parses strictly numeric CSV. A first row containing any non-numeric cell is
// treated as the header. NaN/Inf cells and ragged rows are rejected with the
// offending coordinates.
CsvTable read_csv(const std::string& path);

// Loads a design matrix and its response. The response comes either from a
// single-column CSV at `response_path`, or from the design column named (or
// 1-based-indexed) by `response_column`, which is then removed from the
// design.
DesignData load_dataset(const std::string& design_path,
                        const std::optional<std::string>& response_path,
                        const std::optional<std::string>& response_column);

// Strict JSON config: every ExperimentConfig field present (randomize_active
// optional), unknown keys rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);

std::string experiment_report_to_json(const ExperimentConfig& config,
                                      const ExperimentReport& report);

std::string replication_records_to_csv(const ExperimentReport& report);

std::string subset_result_to_json(const SubsetResult& result,
                                  std::optional<int> tdp_bound);

// One row per variable: index, aggregated p-value, rejection flag.
std::string pvalue_table_to_csv(const MultisplitResult& result, double alpha);

// Q x m adjusted per-split p-values.
std::string adjusted_pvalues_to_csv(const PValueTable& table);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace hdflip

#endif  // HDFLIP_IO_HPP
