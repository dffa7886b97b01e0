#pragma once

#include "eofsep/config.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace eofsep::cli {

/// EoF values below this are reported as 0 with the floored flag set.
inline constexpr double kEofFloor = 1e-10;

struct SweepSpec {
  std::vector<double> a_grid;
  std::vector<double> e_grid;
  std::size_t cardinality = 14;
  OptimizerConfig config;
  /// Grid points evaluated concurrently; 0 selects the hardware concurrency.
  std::size_t jobs = 0;

  /// Throws DomainError for empty, unsorted or out-of-range grids.
  void validate() const;
};

struct SweepRow {
  double a = 0.0;
  double e = 0.0;
  std::size_t cardinality = 0;
  double eof = 0.0;
  std::size_t restarts_converged = 0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  bool floored = false;
};

/// "v1,v2,..." or "lo:step:hi" (inclusive).
std::vector<double> parse_grid(const std::string& text);

/// Rows in a-major, e-minor order. The cardinality is raised to the rank when
/// a mixture has higher rank than requested.
std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& on_row = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Standalone matplotlib program rendering linear and log10 surfaces of the
/// CSV at `csv_path`.
void write_plot_script(std::ostream& out, const std::filesystem::path& csv_path);

}  // namespace eofsep::cli
