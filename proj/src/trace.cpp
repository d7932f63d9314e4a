#include "proxflow/trace.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "proxflow/errors.hpp"

namespace proxflow {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::BudgetExhausted: return "budget_exhausted";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "converged") return RunStatus::Converged;
  if (s == "budget_exhausted") return RunStatus::BudgetExhausted;
  if (s == "diverged") return RunStatus::Diverged;
  throw IoError("trace: unknown run status '" + s + "'");
}

double Trace::final_objective() const {
  if (rows.empty()) throw IoError("trace: no rows");
  return rows.back().objective;
}

namespace {

void put_opt(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

}  // namespace

void Trace::write_csv(std::ostream& os) const {
  os << std::setprecision(17);
  os << "# proxflow-trace v" << kSchemaVersion << "\n";
  os << "# solver=" << solver << "\n";
  os << "# config_hash=" << config_hash << "\n";
  os << "# preprocessing_seconds=" << preprocessing_seconds << "\n";
  os << "# status=" << to_string(status) << "\n";
  os << "iter,seconds,objective,kkt,sigma_x,sigma_z,rho\n";
  for (const auto& r : rows) {
    os << r.iter << ',' << r.seconds << ',' << r.objective << ',';
    put_opt(os, r.kkt);
    os << ',';
    put_opt(os, r.sigma_x);
    os << ',';
    put_opt(os, r.sigma_z);
    os << ',';
    put_opt(os, r.rho);
    os << '\n';
  }
}

void Trace::write_csv_file(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("trace: cannot open '" + path + "' for writing");
  write_csv(f);
}

Trace Trace::read_csv(std::istream& is) {
  Trace t;
  std::string line;
  bool version_seen = false, header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.erase(body.begin());
      if (body.rfind("proxflow-trace v", 0) == 0) {
        const int v = std::stoi(body.substr(16));
        if (v != kSchemaVersion) throw IoError("trace: unsupported schema version " + std::to_string(v));
        version_seen = true;
      } else if (auto pos = body.find('='); pos != std::string::npos) {
        const std::string key = body.substr(0, pos), val = body.substr(pos + 1);
        if (key == "solver") t.solver = val;
        else if (key == "config_hash") t.config_hash = val;
        else if (key == "preprocessing_seconds") t.preprocessing_seconds = std::stod(val);
        else if (key == "status") t.status = run_status_from_string(val);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "iter,seconds,objective,kkt,sigma_x,sigma_z,rho")
        throw IoError("trace: unexpected CSV header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 7) fields.emplace_back();
    if (fields.size() != 7) throw IoError("trace: malformed row '" + line + "'");
    TraceRow r;
    r.iter = std::stoll(fields[0]);
    r.seconds = std::stod(fields[1]);
    r.objective = std::stod(fields[2]);
    r.kkt = parse_opt(fields[3]);
    r.sigma_x = parse_opt(fields[4]);
    r.sigma_z = parse_opt(fields[5]);
    r.rho = parse_opt(fields[6]);
    t.rows.push_back(r);
  }
  if (!version_seen) throw IoError("trace: missing schema version line");
  if (!header_seen) throw IoError("trace: missing CSV header");
  return t;
}

Trace Trace::read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("trace: cannot open '" + path + "'");
  return read_csv(f);
}

}  // namespace proxflow
