#include "support.hpp"

#include "eofsep/concurrence.hpp"
#include "eofsep/ensemble.hpp"
#include "eofsep/errors.hpp"
#include "eofsep/linalg.hpp"
#include "eofsep/objectives.hpp"
#include "eofsep/optimizer.hpp"
#include "eofsep/states.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace eofsep;
using namespace eofsep::testing;

namespace {

constexpr double kEofFloor = 1e-10;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

OptimizerConfig base_config(std::size_t jobs) {
  OptimizerConfig c;
  c.jobs = jobs;
  return c;
}

double eof_at(const DensityMatrix& rho, std::size_t k, const OptimizerConfig& config) {
  return eof_variational(rho, std::max(k, rho.rank()), config).best_value;
}

Verdict wootters_agreement(const OptimizerConfig& config) {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t rank = 1 + static_cast<std::size_t>(i % 4);
    const DensityMatrix rho = random_state({2, 2}, rank, rng);
    const double exact = eof_from_concurrence(concurrence_2x2(rho).c);
    const double found = eof_at(rho, default_cardinality(rho.rank()), config);
    worst = std::max(worst, std::abs(found - exact));
  }
  return {worst <= 1e-6, "50 states, max |EoF - E(C)| = " + fmt(worst)};
}

Verdict horodecki_point(const OptimizerConfig& config) {
  const double eof = eof_at(horodecki_state(0.225), 14, config);
  return {std::abs(eof - 0.0109) <= 5e-4, "a=0.225 e=1 K=14 EoF = " + fmt(eof)};
}

Verdict separability_boundary(const OptimizerConfig& config) {
  const DensityMatrix h = horodecki_state(0.225);
  double largest = -1.0;
  for (int step = 85; step <= 100; ++step) {
    const double e = step / 100.0;
    const double eof = eof_at(mix_with_identity(h, e), 14, config);
    if (eof < kEofFloor) largest = std::max(largest, e);
  }
  return {largest >= 0.92 - 1e-12 && largest <= 0.94 + 1e-12,
          "largest separable e = " + fmt(largest)};
}

Verdict cardinality_trend(const OptimizerConfig& config) {
  const DensityMatrix h = horodecki_state(0.225);
  std::vector<double> values;
  std::ostringstream list;
  bool monotone = true;
  for (std::size_t k = 7; k <= 14; ++k) {
    values.push_back(eof_at(h, k, config));
    list << (k == 7 ? "" : " ") << fmt(values.back());
    if (values.size() > 1 && values.back() > values[values.size() - 2] + 1e-4) monotone = false;
  }
  return {monotone && values.back() < values.front(), "EoF(K=7..14) = " + list.str()};
}

Verdict horodecki_ppt() {
  double worst = 1.0;
  bool all = true;
  for (int i = 1; i <= 20; ++i) {
    const PeresResult p = peres_test(horodecki_state(i / 21.0));
    all = all && p.is_ppt;
    worst = std::min(worst, p.min_eigenvalue);
  }
  return {all, "20 values of a, min partial-transpose eigenvalue = " + fmt(worst)};
}

Verdict genconc_boundary(const OptimizerConfig& config) {
  int mismatches = 0;
  int stronger = 0;
  int entangled = 0;
  std::ostringstream notes;
  for (int ia = 0; ia < 10; ++ia) {
    const double a = 0.05 + 0.1 * ia;
    const DensityMatrix h = horodecki_state(a);
    for (int ie = 0; ie < 10; ++ie) {
      const double e = 0.82 + 0.02 * ie;
      const DensityMatrix rho = mix_with_identity(h, e);
      const double eof = eof_at(rho, 14, config);
      const GenConcResult g = genconc_criterion(a_matrices(rho, IndicatorSet(rho.dims())), config);
      const bool by_eof = eof > 1e-8;
      const bool by_genconc = !g.passes;
      if (by_eof) ++entangled;
      if (by_eof != by_genconc) {
        ++mismatches;
        notes << " (a=" << fmt(a) << " e=" << fmt(e) << " eof=" << fmt(eof)
              << " ratio=" << fmt(g.max_ratio) << ")";
      }
      if (by_genconc && peres_test(rho).is_ppt) ++stronger;
    }
  }
  return {mismatches == 0 && stronger >= 1,
          "100 cells, " + std::to_string(entangled) + " entangled, " +
              std::to_string(mismatches) + " mismatches, " + std::to_string(stronger) +
              " PPT cells detected" + notes.str()};
}

Verdict gradient_oracle() {
  std::mt19937_64 rng(1007);
  const BipartiteDims dims_list[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}};
  double worst_eof = 0.0;
  double worst_sep = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BipartiteDims dims = dims_list[i % 5];
    std::uniform_int_distribution<std::size_t> rank_dist(2, dims.total());
    const std::size_t rank = rank_dist(rng);
    std::uniform_int_distribution<std::size_t> k_dist(rank, std::min(rank * rank, rank + 4));
    const std::size_t k = k_dist(rng);
    const DensityMatrix rho = random_state(dims, rank, rng);
    const ComplexMatrix t = random_unitary(k, rng);
    const ComplexMatrix x = random_skew(k, rng);

    const EofObjective eof(rho, k);
    ComplexMatrix g;
    eof.value_and_gradient(t, g);
    const double fd = directional_fd([&](const ComplexMatrix& s) { return eof.value(s); }, t, x);
    worst_eof = std::max(worst_eof, relative_error(fd, hs_inner(g, x)));

    const SepObjective sep(a_matrices(rho, IndicatorSet(dims)), k);
    sep.value_and_gradient(t, g);
    const double fds = directional_fd([&](const ComplexMatrix& s) { return sep.value(s); }, t, x);
    worst_sep = std::max(worst_sep, relative_error(fds, hs_inner(g, x)));
  }
  return {worst_eof <= 1e-6 && worst_sep <= 1e-6,
          "max relative error EoF " + fmt(worst_eof) + ", separability " + fmt(worst_sep)};
}

Verdict structural_identities() {
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    std::uniform_int_distribution<int> size(2, 5);
    const int m = size(rng);
    const int n = size(rng);
    const int p = size(rng);
    const ComplexMatrix a = random_gaussian(m, n, rng);
    const ComplexMatrix b = random_gaussian(n, p, rng);
    const ComplexMatrix lhs = second_compound(a * b);
    worst = std::max(worst, (lhs - second_compound(a) * second_compound(b)).norm() /
                                std::max(1.0, lhs.norm()));
    const ComplexMatrix id = second_compound(ComplexMatrix::Identity(m, m));
    worst = std::max(worst, (id - ComplexMatrix::Identity(id.rows(), id.cols())).norm());
  }

  // l2 over all tuples equals 4 * sum_k 1/2 [(Tr B_k)^2 - Tr B_k^2], B_k = y~_k y~_k^dagger.
  const BipartiteDims dims_list[] = {{2, 2}, {2, 3}, {3, 3}, {3, 4}};
  for (int i = 0; i < 40; ++i) {
    const BipartiteDims dims = dims_list[i % 4];
    const std::size_t rank = 2 + static_cast<std::size_t>(i % 3);
    const DensityMatrix rho = random_state(dims, rank, rng);
    const std::size_t k = rank + 2;
    const TMatrix t = TMatrix::from_unitary(random_unitary(k, rng), rank);
    const ComplexMatrix y = rho.scaled_support() * t.matrix();
    double identity = 0.0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      const ComplexMatrix yt = tilde_reshape(y.col(c), dims);
      const ComplexMatrix bk = yt * yt.adjoint();
      const double tr = bk.trace().real();
      identity += 0.5 * (tr * tr - (bk * bk).trace().real());
    }
    const double l2 = sep_objective_l2(a_matrices(rho, IndicatorSet(dims)), t);
    worst = std::max(worst, std::abs(l2 - 4.0 * identity));
  }

  int bad_rank = 0;
  for (const BipartiteDims& dims : dims_list) {
    const IndicatorSet s(dims);
    for (std::size_t alpha = 0; alpha < s.size(); ++alpha) {
      const RealVector sv = singular_values(s.dense(alpha).cast<Complex>());
      const auto rank = (sv.array() > 1e-10).count();
      if (rank != 4) ++bad_rank;
    }
  }

  for (std::size_t n = 1; n <= 12; ++n) {
    const ComplexMatrix a = random_symmetric(n, rng);
    const TakagiFactors f = takagi(a);
    worst = std::max(worst, (f.u.transpose() * f.sigma.cast<Complex>().asDiagonal() * f.u - a).norm());
    worst = std::max(worst, unitarity_defect(f.u));
  }
  return {worst <= 1e-10 && bad_rank == 0,
          "max identity defect " + fmt(worst) + ", indicators without rank 4: " +
              std::to_string(bad_rank)};
}

// sum_k sqrt(|d_k|^2 + delta^2), d = diag(T^T A T) with A padded to K x K.
class SmoothedL1 {
 public:
  SmoothedL1(const ComplexMatrix& a, std::size_t k, double delta)
      : a_(ComplexMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))),
        delta_(delta) {
    a_.topLeftCorner(a.rows(), a.cols()) = a;
  }

  double value(const ComplexMatrix& t) const {
    const ComplexVector d = (t.transpose() * a_ * t).diagonal();
    double f = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) f += std::sqrt(std::norm(d(k)) + delta_ * delta_);
    return f;
  }

  double value_and_gradient(const ComplexMatrix& t, ComplexMatrix& gradient) const {
    const ComplexMatrix g = t.transpose() * a_ * t;
    ComplexVector w(g.rows());
    double f = 0.0;
    for (Eigen::Index k = 0; k < g.rows(); ++k) {
      const double s = std::sqrt(std::norm(g(k, k)) + delta_ * delta_);
      f += s;
      w(k) = std::conj(g(k, k)) / s;
    }
    const ComplexMatrix m = 2.0 * w.asDiagonal() * g;
    gradient = 0.5 * (m.adjoint() - m);
    return f;
  }

 private:
  ComplexMatrix a_;
  double delta_;
};

double l1_of(const ComplexMatrix& a, const ComplexMatrix& u) {
  const auto r = a.rows();
  const ComplexMatrix t = u.topRows(r);
  return (t.transpose() * a * t).diagonal().cwiseAbs().sum();
}

Verdict rank3_cardinality(const OptimizerConfig& config) {
  std::mt19937_64 rng(1009);
  const ComplexVector v = random_vector(4, rng).normalized();
  const DensityMatrix rho({2, 2}, (ComplexMatrix::Identity(4, 4) - v * v.adjoint()) / 3.0);
  const AMatrixSet a_set = a_matrices(rho, IndicatorSet(rho.dims()));
  const ComplexMatrix& a = a_set.matrices.front();
  const RealVector s = singular_values(a);
  const double target = std::abs(s(0) - s(1) - s(2));
  if (!(rho.rank() == 3 && s(0) < s(1) + s(2))) return {false, "constructed state lacks the property"};

  // K = 3: continuation on the smoothing width from many starts.
  double best3 = std::numeric_limits<double>::infinity();
  OptimizerConfig inner = config;
  inner.max_iterations = 4000;
  for (std::size_t start = 0; start < 12; ++start) {
    std::mt19937_64 srng = restart_rng(config.seed, start);
    ComplexMatrix u = start == 0 ? ComplexMatrix::Identity(3, 3) : random_unitary(3, srng);
    for (double delta = 1e-2; delta >= 1e-8 * 0.999; delta /= 10.0) {
      const SmoothedL1 obj(a, 3, delta);
      u = geodesic_cg_minimize(make_manifold_objective(obj), u, inner, -1.0).t;
    }
    best3 = std::min(best3, l1_of(a, u));
  }

  // K = 4: l2 minimization polished to the floating-point floor.
  const OptimizationResult r4 = sep_variational(rho, 4, config);
  const SepObjective sep(a_set, 4);
  OptimizerConfig polish = config;
  polish.grad_tol = 1e-20;
  const CgOutcome polished = geodesic_cg_minimize(make_manifold_objective(sep), r4.best_T, polish, 1e-32);
  const double l1_4 = std::min(l1_of(a, r4.best_T), l1_of(a, polished.t));

  const bool pass = target > 0.0 && std::abs(best3 - target) <= 1e-6 && l1_4 <= 1e-10;
  return {pass, "K=3 l1 = " + fmt(best3) + " (expected " + fmt(target) + "), K=4 l1 = " + fmt(l1_4)};
}

Verdict preselect_round_trip() {
  std::mt19937_64 rng(1010);
  struct Case {
    BipartiteDims dims;
    std::size_t k;
  };
  const Case cases[] = {{{2, 2}, 2}, {{2, 3}, 3}, {{3, 3}, 4}, {{2, 4}, 4}, {{3, 4}, 6}};
  double worst = 0.0;
  int skipped = 0;
  for (int i = 0; i < 20; ++i) {
    const Case& c = cases[i % 5];
    if (!preselection_rank_condition(c.dims, c.k, c.k)) ++skipped;
    const SeparableInstance sep = random_separable(c.dims, c.k, rng);
    if (sep.rho.rank() != c.k) ++skipped;
    const PreselectResult p = preselect_T(a_matrices(sep.rho, IndicatorSet(c.dims)), sep.rho);
    const double best = p.best ? p.objective_values[*p.best] : std::numeric_limits<double>::infinity();
    worst = std::max(worst, best);
  }
  return {worst <= 1e-12 && skipped == 0,
          "20 states, max best-candidate l2 = " + fmt(worst) +
              (skipped ? ", invalid instances: " + std::to_string(skipped) : "")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::size_t jobs = 0;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const OptimizerConfig config = base_config(jobs);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"wootters-agreement", [&] { return wootters_agreement(config); }},
      {"horodecki-eof-point", [&] { return horodecki_point(config); }},
      {"separability-boundary", [&] { return separability_boundary(config); }},
      {"cardinality-trend", [&] { return cardinality_trend(config); }},
      {"horodecki-ppt", [] { return horodecki_ppt(); }},
      {"genconc-vs-eof", [&] { return genconc_boundary(config); }},
      {"gradient-oracle", [] { return gradient_oracle(); }},
      {"structural-identities", [] { return structural_identities(); }},
      {"rank3-cardinality", [&] { return rank3_cardinality(config); }},
      {"preselect-round-trip", [] { return preselect_round_trip(); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " " << criteria[i].first
              << ": " << v.detail << " [" << std::fixed << std::setprecision(1) << secs << " s]"
              << std::defaultfloat << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
