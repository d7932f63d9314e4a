// Microbenchmark comparing the serial reference kernels against the OpenMP
// variants. Run with PROXFLOW_THREADS=<k> (or --threads) to size the pool.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "proxflow/kernels.hpp"
#include "proxflow/rng.hpp"
#include "proxflow/threads.hpp"

using namespace proxflow;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f, int reps) {
  f();  // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
  Philox rng(0xBE5Cull, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void report(const char* name, const char* size, double serial_ms, double par_ms) {
  std::printf("%-22s %-14s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx\n", name, size, serial_ms,
              par_ms, serial_ms / par_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 20;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) set_max_threads(std::atoi(argv[++i]));
    if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) reps = std::atoi(argv[++i]);
  }
  std::printf("threads: %d\n", max_threads());

  {
    const std::size_t n = 1200, p = 4000;
    const auto m = random_vec(n * p, 1);
    const auto x = random_vec(p, 2);
    std::vector<double> y(n);
    const double ts = time_ms([&] { kernels::serial::matvec(n, p, m.data(), x.data(), y.data()); }, reps);
    const double tp = time_ms([&] { kernels::par::matvec(n, p, m.data(), x.data(), y.data()); }, reps);
    report("matvec", "1200x4000", ts, tp);
  }
  {
    GridShape shape({512, 512});
    const auto x = random_vec(shape.size(), 3);
    std::vector<double> g(shape.size() * 2), back(shape.size());
    const double ts = time_ms([&] { kernels::serial::grad_apply(shape, x.data(), g.data()); }, reps);
    const double tp = time_ms([&] { kernels::par::grad_apply(shape, x.data(), g.data()); }, reps);
    report("grad_apply", "512x512", ts, tp);
    const double ts2 = time_ms([&] { kernels::serial::grad_adjoint(shape, g.data(), back.data()); }, reps);
    const double tp2 = time_ms([&] { kernels::par::grad_adjoint(shape, g.data(), back.data()); }, reps);
    report("grad_adjoint", "512x512", ts2, tp2);
  }
  {
    const std::size_t n = 1 << 22;
    const auto v = random_vec(n, 4);
    std::vector<double> out(n);
    const double ts = time_ms([&] { kernels::serial::soft_threshold(n, v.data(), 0.5, out.data()); }, reps);
    const double tp = time_ms([&] { kernels::par::soft_threshold(n, v.data(), 0.5, out.data()); }, reps);
    report("soft_threshold", "4M", ts, tp);
    const double ts2 =
        time_ms([&] { kernels::serial::group_soft_threshold(n / 2, 2, v.data(), 0.5, out.data()); }, reps);
    const double tp2 =
        time_ms([&] { kernels::par::group_soft_threshold(n / 2, 2, v.data(), 0.5, out.data()); }, reps);
    report("group_soft_threshold", "2M groups", ts2, tp2);
  }
  return 0;
}
