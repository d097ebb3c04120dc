#include "hdflip/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hdflip/errors.hpp"

namespace hdflip {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << content;
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;

  std::vector<std::vector<double>> rows;
  CsvTable table;
  Index cols = -1;
  int line_no = 0;
  int data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);

    if (cols == -1) {
      // First non-blank line: header iff any cell is non-numeric.
      bool numeric = true;
      double ignored;
      for (const std::string& f : fields)
        if (!parse_double(f, ignored)) { numeric = false; break; }
      cols = static_cast<Index>(fields.size());
      if (!numeric) {
        for (const std::string& f : fields) table.names.push_back(trim(f));
        continue;
      }
    }

    if (static_cast<Index>(fields.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch,
                  path + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(cols));
    }
    ++data_row;
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value;
      if (!parse_double(fields[c], value)) {
        throw Error(ErrorCode::ParseError,
                    path + ": non-numeric cell at row " +
                        std::to_string(data_row) + ", column " +
                        std::to_string(c + 1) + ": '" + trim(fields[c]) + "'");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteValue,
                    path + ": non-finite value at row " +
                        std::to_string(data_row) + ", column " +
                        std::to_string(c + 1));
      }
      row[c] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::ParseError, path + ": no data rows");
  }

  table.values.resize(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Index c = 0; c < cols; ++c)
      table.values(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  return table;
}

DesignData load_dataset(const std::string& design_path,
                        const std::optional<std::string>& response_path,
                        const std::optional<std::string>& response_column) {
  if (response_path.has_value() == response_column.has_value()) {
    throw Error(ErrorCode::InvalidConfig,
                "give exactly one of response file / response column");
  }
  CsvTable design = read_csv(design_path);

  DesignData data;
  if (response_path) {
    CsvTable response = read_csv(*response_path);
    if (response.values.cols() != 1) {
      throw Error(ErrorCode::DimensionMismatch,
                  *response_path + ": response must be a single column, got " +
                      std::to_string(response.values.cols()));
    }
    if (response.values.rows() != design.values.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "design has " + std::to_string(design.values.rows()) +
                      " rows, response has " +
                      std::to_string(response.values.rows()));
    }
    data.X = design.values;
    data.Y = response.values.col(0);
    data.names = design.names;
    return data;
  }

  // Response taken out of the design file, by name or 1-based position.
  Index col = -1;
  if (!design.names.empty()) {
    for (std::size_t i = 0; i < design.names.size(); ++i)
      if (design.names[i] == *response_column) col = static_cast<Index>(i);
  }
  if (col == -1) {
    try {
      col = static_cast<Index>(std::stoi(*response_column)) - 1;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError,
                  "response column '" + *response_column + "' not found");
    }
  }
  if (col < 0 || col >= design.values.cols()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "response column " + std::to_string(col + 1) + " outside 1.." +
                    std::to_string(design.values.cols()));
  }

  data.Y = design.values.col(col);
  data.X.resize(design.values.rows(), design.values.cols() - 1);
  Index out = 0;
  for (Index c = 0; c < design.values.cols(); ++c) {
    if (c == col) continue;
    data.X.col(out) = design.values.col(c);
    if (!design.names.empty()) data.names.push_back(design.names[static_cast<std::size_t>(c)]);
    ++out;
  }
  return data;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  }

  static const std::unordered_set<std::string> known = {
      "n", "m", "m1", "rho", "snr", "strength", "Q", "B", "alpha",
      "selector", "replications", "seed", "method", "combiner",
      "randomize_active"};
  static const std::unordered_set<std::string> optional = {"randomize_active"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown config key '" + item.key() + "'");
    }
  }
  for (const std::string& key : known) {
    if (!optional.count(key) && !j.contains(key)) {
      throw Error(ErrorCode::InvalidConfig, "missing config key '" + key + "'");
    }
  }

  ExperimentConfig config;
  try {
    config.n = j.at("n").get<Index>();
    config.m = j.at("m").get<Index>();
    config.m1 = j.at("m1").get<int>();
    config.rho = j.at("rho").get<double>();
    config.snr = j.at("snr").get<double>();
    config.Q = j.at("Q").get<int>();
    config.B = j.at("B").get<int>();
    config.alpha = j.at("alpha").get<double>();
    config.replications = j.at("replications").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("randomize_active"))
      config.randomize_active = j.at("randomize_active").get<bool>();

    const std::string strength = j.at("strength").get<std::string>();
    if (strength == "uniform") config.strength = BetaStrength::Uniform;
    else if (strength == "increasing") config.strength = BetaStrength::Increasing;
    else throw Error(ErrorCode::InvalidConfig, "strength must be uniform|increasing");

    const std::string selector = j.at("selector").get<std::string>();
    if (selector == "oracle") config.selector = SelectorKind::Oracle;
    else if (selector == "lasso") config.selector = SelectorKind::Lasso;
    else throw Error(ErrorCode::InvalidConfig, "selector must be oracle|lasso");

    const std::string method = j.at("method").get<std::string>();
    if (method == "exact") config.method = StatsMethod::Exact;
    else if (method == "approximate") config.method = StatsMethod::Approximate;
    else if (method == "multisplit") config.method = StatsMethod::Multisplit;
    else throw Error(ErrorCode::InvalidConfig, "method must be exact|approximate|multisplit");

    const std::string combiner = j.at("combiner").get<std::string>();
    if (combiner == "max") config.combiner = CombinerKind::Max;
    else if (combiner == "sum") config.combiner = CombinerKind::Sum;
    else throw Error(ErrorCode::InvalidConfig, "combiner must be max|sum");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }

  config.validate();
  return config;
}

std::string experiment_report_to_json(const ExperimentConfig& config,
                                      const ExperimentReport& report) {
  json j;
  j["config"] = {
      {"n", config.n}, {"m", config.m}, {"m1", config.m1}, {"rho", config.rho},
      {"snr", config.snr}, {"strength", to_string(config.strength)},
      {"Q", config.Q}, {"B", config.B}, {"alpha", config.alpha},
      {"selector", to_string(config.selector)},
      {"replications", config.replications}, {"seed", config.seed},
      {"method", to_string(config.method)},
      {"combiner", to_string(config.combiner)},
      {"randomize_active", config.randomize_active}};
  j["fwer"] = report.fwer;
  j["mean_rejections"] = report.mean_rejections;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["failed_replications"] = report.failed_replications;
  return j.dump(2) + "\n";
}

std::string replication_records_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "replication,rejections,false_rejections,failed\n";
  for (std::size_t r = 0; r < report.records.size(); ++r) {
    const ReplicationRecord& record = report.records[r];
    out << (r + 1) << ',' << record.rejections << ',' << record.false_rejections
        << ',' << (record.failed ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string subset_result_to_json(const SubsetResult& result,
                                  std::optional<int> tdp_bound) {
  json j;
  std::vector<int> subset_1based;
  subset_1based.reserve(result.subset.size());
  for (int v : result.subset) subset_1based.push_back(v + 1);
  j["subset"] = subset_1based;
  j["statistic_observed"] = result.decision.statistic_observed;
  j["critical_value"] = result.decision.critical_value;
  j["pvalue"] = result.decision.pvalue;
  j["reject"] = result.decision.reject;
  if (tdp_bound) j["tdp_bound"] = *tdp_bound;
  return j.dump(2) + "\n";
}

std::string pvalue_table_to_csv(const MultisplitResult& result, double alpha) {
  std::ostringstream out;
  out << "variable,p_aggregated,reject\n";
  for (Index j = 0; j < result.table.aggregated.size(); ++j) {
    const bool reject = result.table.aggregated(j) <= alpha;
    out << (j + 1) << ',' << format_double(result.table.aggregated(j)) << ','
        << (reject ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string adjusted_pvalues_to_csv(const PValueTable& table) {
  std::ostringstream out;
  for (Index j = 0; j < table.adjusted.cols(); ++j) {
    if (j) out << ',';
    out << (j + 1);
  }
  out << '\n';
  for (Index q = 0; q < table.adjusted.rows(); ++q) {
    for (Index j = 0; j < table.adjusted.cols(); ++j) {
      if (j) out << ',';
      out << format_double(table.adjusted(q, j));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hdflip
