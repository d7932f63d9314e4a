#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proxflow {

enum class RunStatus { Converged, BudgetExhausted, Diverged };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct TraceRow {
  std::int64_t iter = 0;
  double seconds = 0;  ///< wall-clock since run start, preprocessing included
  double objective = 0;
  std::optional<double> kkt;
  std::optional<double> sigma_x;
  std::optional<double> sigma_z;
  std::optional<double> rho;
};

/// Time-stamped convergence record of one solver run. Serialized as CSV with
/// a versioned comment header; the column set is the same for every solver
/// with empty fields where a diagnostic does not apply.
struct Trace {
  static constexpr int kSchemaVersion = 1;

  std::string solver;
  std::string config_hash;
  double preprocessing_seconds = 0;
  RunStatus status = RunStatus::BudgetExhausted;
  std::vector<TraceRow> rows;

  double final_objective() const;

  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
  static Trace read_csv(std::istream& is);
  static Trace read_csv_file(const std::string& path);
};

}  // namespace proxflow
