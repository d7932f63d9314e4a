#include "proxflow/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "proxflow/datagen.hpp"
#include "proxflow/errors.hpp"
#include "proxflow/io.hpp"

namespace proxflow {
namespace bench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double require_positive(double v, const char* what) {
  if (!(v > 0)) throw ConfigError(std::string(what) + " must be positive");
  return v;
}

GeneratorSpec parse_generator(const json& j) {
  GeneratorSpec g;
  g.kind = j.at("kind").get<std::string>();
  if (g.kind == "gaussian" || g.kind == "product") {
    g.n = j.at("n").get<std::size_t>();
    g.p = j.at("p").get<std::size_t>();
    g.sparsity = j.value("sparsity", 0.1);
    g.noise_variance = j.value("noise_variance", 0.0);
    if (g.kind == "product") g.rank = j.at("rank").get<std::size_t>();
    if (g.n == 0 || g.p == 0) throw ConfigError("generator: n and p must be positive");
  } else if (g.kind == "tomo") {
    g.size = j.at("size").get<int>();
    g.angles = j.at("angles").get<int>();
    g.noise_percent = j.value("noise_percent", 1.0);
    if (g.size < 16 || g.angles < 1) throw ConfigError("generator: bad tomo parameters");
  } else {
    throw ConfigError("unknown generator '" + g.kind + "'");
  }
  return g;
}

json generator_to_json(const GeneratorSpec& g) {
  json j{{"kind", g.kind}};
  if (g.kind == "tomo") {
    j["size"] = g.size;
    j["angles"] = g.angles;
    j["noise_percent"] = g.noise_percent;
  } else {
    j["n"] = g.n;
    j["p"] = g.p;
    j["sparsity"] = g.sparsity;
    j["noise_variance"] = g.noise_variance;
    if (g.kind == "product") j["rank"] = g.rank;
  }
  return j;
}

Penalty parse_penalty(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "l1") return SeparableL1{};
  if (type == "tv") {
    auto dims = j.at("dims").get<std::vector<int>>();
    return TvPenalty{GridShape(std::move(dims))};
  }
  throw ConfigError("unknown penalty '" + type + "'");
}

json penalty_to_json(const Penalty& p) {
  if (std::holds_alternative<SeparableL1>(p)) return json{{"type", "l1"}};
  return json{{"type", "tv"}, {"dims", std::get<TvPenalty>(p).grid.dims}};
}

SolverSpec parse_solver(const json& j) {
  SolverSpec s;
  s.name = j.at("name").get<std::string>();
  solver_kind_from_string(s.name);  // validates
  s.label = j.value("label", s.name);
  if (j.contains("rho")) s.options.rho = require_positive(j["rho"].get<double>(), "rho");
  if (j.contains("gamma")) s.options.gamma = require_positive(j["gamma"].get<double>(), "gamma");
  s.options.adapt_variances = j.value("adapt_variances", true);
  s.options.rho_init = j.value("rho_init", 1.0);
  s.options.amp_sigma0 = j.value("amp_sigma0", 1.0);
  s.options.kkt_every = j.value("kkt_every", 0);
  s.budget.max_iters = j.value("max_iters", std::int64_t{1000});
  if (s.budget.max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (j.contains("max_seconds")) s.budget.max_seconds = require_positive(j["max_seconds"].get<double>(), "max_seconds");
  s.budget.stop_tol = j.value("stop_tol", 1e-10);
  s.budget.stop_window = j.value("stop_window", 10);
  return s;
}

json solver_to_json(const SolverSpec& s) {
  json j{{"name", s.name}, {"label", s.label}};
  if (s.options.rho) j["rho"] = *s.options.rho;
  if (s.options.gamma) j["gamma"] = *s.options.gamma;
  j["adapt_variances"] = s.options.adapt_variances;
  j["rho_init"] = s.options.rho_init;
  j["amp_sigma0"] = s.options.amp_sigma0;
  j["kkt_every"] = s.options.kkt_every;
  j["max_iters"] = s.budget.max_iters;
  if (s.budget.max_seconds) j["max_seconds"] = *s.budget.max_seconds;
  j["stop_tol"] = s.budget.stop_tol;
  j["stop_window"] = s.budget.stop_window;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  const int version = j.value("schema_version", -1);
  if (version != ExperimentConfig::kSchemaVersion)
    throw ConfigError("unsupported or missing schema_version");
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.lambda = j.value("lambda", 1.0);
  if (!(cfg.lambda >= 0)) throw ConfigError("lambda must be non-negative");

  const auto& prob = j.at("problem");
  if (prob.contains("generator")) {
    cfg.generator = parse_generator(prob["generator"]);
  } else if (prob.contains("files")) {
    FilesSpec f;
    f.a_path = prob["files"].at("A").get<std::string>();
    f.y_path = prob["files"].at("y").get<std::string>();
    if (!fs::exists(f.a_path)) throw ConfigError("matrix file '" + f.a_path + "' does not exist");
    if (!fs::exists(f.y_path)) throw ConfigError("response file '" + f.y_path + "' does not exist");
    cfg.files = f;
  } else {
    throw ConfigError("problem must name a generator or input files");
  }

  cfg.penalty = parse_penalty(j.at("penalty"));

  if (!j.contains("solvers") || !j["solvers"].is_array() || j["solvers"].empty())
    throw ConfigError("at least one solver must be configured");
  for (const auto& sj : j["solvers"]) cfg.solvers.push_back(parse_solver(sj));

  if (j.contains("output")) cfg.output_dir = j["output"].value("dir", std::string("."));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = ExperimentConfig::kSchemaVersion;
  j["seed"] = cfg.seed;
  j["lambda"] = cfg.lambda;
  if (cfg.generator) j["problem"] = json{{"generator", generator_to_json(*cfg.generator)}};
  if (cfg.files) j["problem"] = json{{"files", json{{"A", cfg.files->a_path}, {"y", cfg.files->y_path}}}};
  j["penalty"] = penalty_to_json(cfg.penalty);
  j["solvers"] = json::array();
  for (const auto& s : cfg.solvers) j["solvers"].push_back(solver_to_json(s));
  j["output"] = json{{"dir", cfg.output_dir}};
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Problem build_problem(const ExperimentConfig& cfg) {
  std::shared_ptr<const DenseMap> a;
  std::vector<double> y;
  if (cfg.generator) {
    const auto& g = *cfg.generator;
    if (g.kind == "tomo") {
      auto inst = datagen::make_tomo(g.size, g.angles, g.noise_percent, cfg.seed);
      a = inst.radon;
      y = std::move(inst.y);
    } else {
      const auto kind = g.kind == "product" ? datagen::MatrixKind::Product : datagen::MatrixKind::Gaussian;
      auto inst = datagen::make_synthetic(kind, g.n, g.p, g.rank, g.sparsity, g.noise_variance, cfg.seed);
      a = inst.A;
      y = std::move(inst.y);
    }
  } else {
    auto am = read_matrix_binary(cfg.files->a_path);
    auto ym = read_matrix_binary(cfg.files->y_path);
    if (ym.cols != 1) throw ConfigError("response file must be a single column");
    a = std::make_shared<DenseMap>(am.rows, am.cols, std::move(am.data));
    y = std::move(ym.data);
  }
  return Problem(std::move(y), std::move(a), cfg.lambda, cfg.penalty);
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, bool parallel) {
  const Problem prob = build_problem(cfg);
  const std::string hash = config_hash(cfg);
  fs::create_directories(cfg.output_dir);

  // The spectral precomputation depends only on (A, penalty); share it.
  const Precomputation* shared = nullptr;
  Precomputation pre;
  for (const auto& s : cfg.solvers) {
    const auto kind = solver_kind_from_string(s.name);
    if (kind == SolverKind::Vamp || kind == SolverKind::Admm || kind == SolverKind::Prs) {
      pre = precompute(prob.A_ptr(), prob.penalty());
      shared = &pre;
      break;
    }
  }

  // Unique output stem per solver entry.
  std::vector<std::string> paths(cfg.solvers.size());
  std::set<std::string> taken;
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    std::string stem = cfg.solvers[i].label;
    std::string candidate = stem;
    int suffix = 2;
    while (!taken.insert(candidate).second) candidate = stem + "-" + std::to_string(suffix++);
    paths[i] = (fs::path(cfg.output_dir) / (candidate + ".csv")).string();
  }

  std::vector<Trace> traces(cfg.solvers.size());
  auto run_one = [&](std::size_t i) {
    const auto& s = cfg.solvers[i];
    traces[i] = run(prob, solver_kind_from_string(s.name), s.options, s.budget, shared);
    traces[i].config_hash = hash;
    traces[i].write_csv_file(paths[i]);
  };

  if (parallel && cfg.solvers.size() > 1) {
    std::vector<std::thread> workers;
    workers.reserve(cfg.solvers.size());
    for (std::size_t i = 0; i < cfg.solvers.size(); ++i) workers.emplace_back(run_one, i);
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < cfg.solvers.size(); ++i) run_one(i);
  }
  return paths;
}

namespace {

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void plot_svg(const std::vector<Trace>& traces, std::ostream& os) {
  if (traces.empty()) throw ParameterError("plot_svg: no traces");

  double baseline = std::numeric_limits<double>::infinity();
  double t_max = 0;
  for (const auto& t : traces) {
    if (t.rows.empty()) throw ParameterError("plot_svg: empty trace");
    for (const auto& r : t.rows) {
      baseline = std::min(baseline, r.objective);
      t_max = std::max(t_max, r.seconds);
    }
  }
  // Gap floor: half the smallest positive gap keeps the best point on the plot.
  double floor_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0;
  for (const auto& t : traces)
    for (const auto& r : t.rows) {
      const double g = r.objective - baseline;
      if (g > 0) floor_gap = std::min(floor_gap, g);
      max_gap = std::max(max_gap, g);
    }
  if (!std::isfinite(floor_gap)) floor_gap = 1.0;  // all traces constant
  floor_gap *= 0.5;
  if (max_gap <= floor_gap) max_gap = floor_gap * 10;
  if (t_max <= 0) t_max = 1;

  const double width = 800, height = 500;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double ylo = std::log10(floor_gap), yhi = std::log10(max_gap);
  auto xmap = [&](double s) { return ml + pw * (s / t_max); };
  auto ymap = [&](double g) {
    const double lg = std::log10(std::max(g, floor_gap));
    return mt + ph * (1.0 - (lg - ylo) / std::max(yhi - ylo, 1e-12));
  };

  std::ostringstream title;
  title << "objective gap vs wall-clock seconds (gap baseline: min objective across traces = "
        << std::setprecision(12) << baseline << ")";

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<title>" << svg_escape(title.str()) << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<text x=\"" << ml << "\" y=\"22\" font-size=\"13\">" << svg_escape(title.str()) << "</text>\n";

  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double s = t_max * i / 5.0;
    const double x = xmap(s);
    os << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x << "\" y2=\"" << mt + ph + 4
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">" << std::setprecision(3)
       << s << "</text>\n";
  }
  const int dec_lo = static_cast<int>(std::floor(ylo));
  const int dec_hi = static_cast<int>(std::ceil(yhi));
  const int dec_step = std::max(1, (dec_hi - dec_lo) / 8);
  for (int d = dec_lo; d <= dec_hi; d += dec_step) {
    const double g = std::pow(10.0, d);
    if (g < floor_gap || g > max_gap) continue;
    const double yy = ymap(g);
    os << "<line x1=\"" << ml - 4 << "\" y1=\"" << yy << "\" x2=\"" << ml << "\" y2=\"" << yy
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\">wall-clock seconds (preprocessing included)</text>\n";

  for (std::size_t ti = 0; ti < traces.size(); ++ti) {
    const auto& t = traces[ti];
    const char* color = kPalette[ti % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows) {
      os << std::setprecision(8) << xmap(r.seconds) << ',' << ymap(r.objective - baseline) << ' ';
    }
    os << "\"/>\n";
    const double ly = mt + 16 + 16 * static_cast<double>(ti);
    os << "<line x1=\"" << ml + pw - 130 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 110 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << ml + pw - 104 << "\" y=\"" << ly << "\">" << svg_escape(t.solver)
       << (t.status == RunStatus::Diverged ? " (diverged)" : "") << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace bench
}  // namespace proxflow
