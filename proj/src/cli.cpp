#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "proxflow/bench.hpp"
#include "proxflow/datagen.hpp"
#include "proxflow/errors.hpp"
#include "proxflow/io.hpp"

namespace proxflow {
namespace bench {

namespace {

using nlohmann::json;

void write_meta(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

int do_gen(const std::string& kind, std::uint64_t seed, const std::string& out, std::size_t n, std::size_t p,
           std::size_t rank, double sparsity, double noise_variance, int size, int angles,
           double noise_percent, bool csv) {
  json meta{{"kind", kind}, {"seed", seed}};
  auto emit = [&](const std::string& stem, std::uint32_t rows, std::uint32_t cols,
                  std::span<const double> data) {
    write_matrix_binary(out + "-" + stem + ".bin", rows, cols, data);
    if (csv) write_matrix_csv(out + "-" + stem + ".csv", rows, cols, data);
    meta["files"][stem] = out + "-" + stem + ".bin";
  };
  if (kind == "shepp-logan") {
    const auto img = datagen::shepp_logan(size);
    emit("image", size, size, img);
    meta["size"] = size;
  } else if (kind == "tomo") {
    const auto inst = datagen::make_tomo(size, angles, noise_percent, seed);
    emit("A", static_cast<std::uint32_t>(inst.radon->rows()), static_cast<std::uint32_t>(inst.radon->cols()),
         inst.radon->entries());
    emit("x", size, size, inst.phantom);
    emit("y", static_cast<std::uint32_t>(inst.y.size()), 1, inst.y);
    meta["size"] = size;
    meta["angles"] = angles;
    meta["noise_percent"] = noise_percent;
    meta["noise_variance"] = inst.noise_variance;
  } else if (kind == "gaussian" || kind == "product") {
    const auto mk = kind == "product" ? datagen::MatrixKind::Product : datagen::MatrixKind::Gaussian;
    const auto inst = datagen::make_synthetic(mk, n, p, rank, sparsity, noise_variance, seed);
    emit("A", static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(p), inst.A->entries());
    emit("x", static_cast<std::uint32_t>(p), 1, inst.x_true);
    emit("y", static_cast<std::uint32_t>(n), 1, inst.y);
    meta["n"] = n;
    meta["p"] = p;
    meta["sparsity"] = sparsity;
    meta["noise_variance"] = noise_variance;
    if (kind == "product") meta["rank"] = rank;
  } else {
    throw ConfigError("unknown generator '" + kind + "'");
  }
  write_meta(out + "-meta.json", meta);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"proxflow: message-passing and splitting solvers for l1- and TV-regularized least squares"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate problem data as flat binary files");
  std::string gen_kind, gen_out = "data";
  std::uint64_t gen_seed = 0;
  std::size_t gn = 0, gp = 0, grank = 0;
  double gsparsity = 0.1, gnoise = 0.0, gnoise_percent = 1.0;
  int gsize = 64, gangles = 10;
  bool gcsv = false;
  gen->add_option("--kind", gen_kind, "gaussian | product | tomo | shepp-logan")->required();
  gen->add_option("--out", gen_out, "output path prefix");
  gen->add_option("--seed", gen_seed, "PRNG seed");
  gen->add_option("--n", gn, "rows");
  gen->add_option("--p", gp, "columns");
  gen->add_option("--rank", grank, "product-matrix rank");
  gen->add_option("--sparsity", gsparsity, "Bernoulli-Gaussian nonzero fraction");
  gen->add_option("--noise-variance", gnoise, "measurement noise variance");
  gen->add_option("--size", gsize, "image side length");
  gen->add_option("--angles", gangles, "projection count");
  gen->add_option("--noise-percent", gnoise_percent, "sinogram noise level in percent");
  gen->add_flag("--csv", gcsv, "also write CSV copies");

  // run
  auto* runc = app.add_subcommand("run", "run configured solvers and write trace CSVs");
  std::string cfg_path, run_out;
  std::uint64_t run_seed = 0;
  bool seed_set = false, parallel = false;
  runc->add_option("--config", cfg_path, "experiment config JSON")->required();
  runc->add_option("--seed", run_seed, "override the config seed")->each([&](const std::string&) { seed_set = true; });
  runc->add_option("--out", run_out, "override the output directory");
  runc->add_flag("--parallel", parallel, "run solvers concurrently");

  // plot
  auto* plot = app.add_subcommand("plot", "render trace CSVs as an SVG comparison plot");
  std::vector<std::string> trace_paths;
  std::string plot_out = "plot.svg";
  plot->add_option("traces", trace_paths, "trace CSV files")->required();
  plot->add_option("--out", plot_out, "output SVG path");

  try {
    app.parse(argc, const_cast<char**>(argv));
    if (gen->parsed()) return do_gen(gen_kind, gen_seed, gen_out, gn, gp, grank, gsparsity, gnoise, gsize,
                                     gangles, gnoise_percent, gcsv);
    if (runc->parsed()) {
      auto cfg = load_config(cfg_path);
      if (seed_set) cfg.seed = run_seed;
      if (!run_out.empty()) cfg.output_dir = run_out;
      const auto paths = run_experiment(cfg, parallel);
      for (const auto& p : paths) std::cout << p << '\n';
      return 0;
    }
    if (plot->parsed()) {
      std::vector<Trace> traces;
      traces.reserve(trace_paths.size());
      for (const auto& p : trace_paths) traces.push_back(Trace::read_csv_file(p));
      std::ofstream f(plot_out);
      if (!f) throw IoError("cannot open '" + plot_out + "' for writing");
      plot_svg(traces, f);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace bench
}  // namespace proxflow
