#include "sweep.hpp"

#include "eofsep/errors.hpp"
#include "eofsep/optimizer.hpp"
#include "eofsep/states.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace eofsep::cli {

namespace {

double parse_number(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) throw DomainError("bad grid value '" + token + "'");
  return value;
}

void validate_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw DomainError(std::string(name) + " grid values must lie in [0, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(name) + " grid must be strictly ascending");
    }
  }
}

SweepRow evaluate_point(double a, double e, const SweepSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const DensityMatrix rho = mix_with_identity(horodecki_state(a), e);
  OptimizerConfig config = spec.config;
  config.jobs = 1;
  SweepRow row;
  row.a = a;
  row.e = e;
  row.cardinality = std::max(spec.cardinality, rho.rank());
  const OptimizationResult result = eof_variational(rho, row.cardinality, config);
  row.restarts_converged = result.restarts_converged();
  row.iterations = std::accumulate(result.iterations_used.begin(), result.iterations_used.end(),
                                   std::size_t{0});
  row.floored = result.best_value < kEofFloor;
  row.eof = row.floored ? 0.0 : result.best_value;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

void SweepSpec::validate() const {
  validate_grid(a_grid, "a");
  validate_grid(e_grid, "e");
  if (cardinality < 1) throw DomainError("cardinality must be positive");
  config.validate();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ':')) parts.push_back(parse_number(token));
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
      throw DomainError("range grid must read lo:step:hi with step > 0 and hi >= lo");
    }
    const auto n = static_cast<std::size_t>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = parts[0] + static_cast<double>(i) * parts[1];
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_number(token));
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& on_row) {
  spec.validate();
  std::vector<std::pair<double, double>> points;
  for (double a : spec.a_grid) {
    for (double e : spec.e_grid) points.emplace_back(a, e);
  }
  std::vector<SweepRow> rows(points.size());
  std::size_t workers = spec.jobs == 0 ? std::thread::hardware_concurrency() : spec.jobs;
  workers = std::clamp<std::size_t>(workers, 1, points.size());

  std::atomic<std::size_t> next{0};
  std::mutex report;
  std::exception_ptr failure;
  auto work = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = evaluate_point(points[i].first, points[i].second, spec);
        if (on_row) {
          std::lock_guard lock(report);
          on_row(rows[i]);
        }
      } catch (...) {
        std::lock_guard lock(report);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "a,e,K,eof,restarts_converged,iterations,seconds,floored\n";
  for (const SweepRow& r : rows) {
    out << std::setprecision(12) << r.a << ',' << r.e << ',' << r.cardinality << ','
        << std::setprecision(10) << r.eof << ',' << r.restarts_converged << ',' << r.iterations
        << ',' << std::fixed << std::setprecision(3) << r.seconds << std::defaultfloat << ','
        << (r.floored ? 1 : 0) << '\n';
  }
}

void write_plot_script(std::ostream& out, const std::filesystem::path& csv_path) {
  out << R"py(#!/usr/bin/env python3
# Renders EoF surfaces over the (a, e) grid of a sweep CSV.
import csv
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else )py"
      << std::quoted(csv_path.string()) << R"py(
rows = list(csv.DictReader(open(path)))
a_vals = sorted({float(r["a"]) for r in rows})
e_vals = sorted({float(r["e"]) for r in rows})
eof = np.full((len(e_vals), len(a_vals)), np.nan)
for r in rows:
    eof[e_vals.index(float(r["e"])), a_vals.index(float(r["a"]))] = float(r["eof"])
A, E = np.meshgrid(a_vals, e_vals)

fig = plt.figure(figsize=(12, 5))
ax = fig.add_subplot(1, 2, 1, projection="3d")
ax.plot_surface(A, E, eof, cmap="viridis")
ax.set_xlabel("a")
ax.set_ylabel("e")
ax.set_zlabel("EoF")
ax.set_title("linear scale")

ax = fig.add_subplot(1, 2, 2, projection="3d")
ax.plot_surface(A, E, np.log10(np.maximum(eof, 1e-10)), cmap="viridis")
ax.set_xlabel("a")
ax.set_ylabel("e")
ax.set_zlabel("log10 EoF")
ax.set_title("logarithmic scale (floor 1e-10)")

fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
)py";
}

}  // namespace eofsep::cli
