#include "eofsep/concurrence.hpp"

#include "eofsep/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace eofsep {

namespace {

constexpr double kRatioZero = 1e-14;
constexpr double kBalanceTolerance = 1e-10;
constexpr std::size_t kBalanceMaxSweeps = 10000;
constexpr double kMemberTolerance = 1e-8;
constexpr double kPolishFloor = 1e-30;
constexpr std::size_t kGenconcRandomStarts = 20;
constexpr std::size_t kGenconcMaxSteps = 2000;
constexpr double kNullTolerance = 1e-10;

void require_2x2(const DensityMatrix& rho) {
  if (rho.dims().n1 != 2 || rho.dims().n2 != 2) {
    throw DimensionError("expected a 2x2 state, got " + std::to_string(rho.dims().n1) + "x" +
                         std::to_string(rho.dims().n2));
  }
}

std::vector<double> sorted_descending(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

ComplexMatrix combine(const AMatrixSet& a_set, const ComplexVector& x) {
  const auto r = static_cast<Eigen::Index>(a_set.rank);
  ComplexMatrix a = ComplexMatrix::Zero(r, r);
  for (std::size_t alpha = 0; alpha < a_set.size(); ++alpha) {
    a.noalias() += x(static_cast<Eigen::Index>(alpha)) * a_set.matrices[alpha];
  }
  return a;
}

// Largest |d_k| / w_k - c over members of non-negligible weight.
double member_deviation(const AMatrixSet& a_set, const TMatrix& t, double c) {
  const ComplexMatrix d = minor_diagonals(a_set, t);
  const RealVector w = ensemble_weights(a_set, t);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) < kNegligibleWeight) continue;
    worst = std::max(worst, std::abs(d.col(k).norm() / w(k) - c));
  }
  return worst;
}

// Real orthogonal O with diag(O^T Z O) = 0 for a trace-free real symmetric Z.
// Each Givens rotation zeroes the largest positive diagonal entry against the
// most negative one.
RealMatrix zero_diagonal_rotation(RealMatrix z, const RealVector& scale) {
  const Eigen::Index n = z.rows();
  RealMatrix o = RealMatrix::Identity(n, n);
  auto deviation = [&]() {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(z(i, i)) / std::max(scale(i), kNegligibleWeight));
    }
    return worst;
  };
  for (std::size_t sweep = 0; sweep < kBalanceMaxSweeps; ++sweep) {
    if (deviation() < kBalanceTolerance) return o;
    Eigen::Index k = 0;
    Eigen::Index l = 0;
    z.diagonal().maxCoeff(&k);
    z.diagonal().minCoeff(&l);
    const double zkk = z(k, k);
    const double zll = z(l, l);
    if (!(zkk > 0.0 && zll < 0.0)) break;
    // New (k,k) entry is c^2 (z_kk + 2 t z_kl + t^2 z_ll) with t = s / c.
    const double zkl = z(k, l);
    const double disc = std::sqrt(zkl * zkl - zkk * zll);
    const double t = zkl >= 0.0 ? -zkk / (zkl + disc) : zkk / (disc - zkl);
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    RealMatrix g = RealMatrix::Identity(n, n);
    g(k, k) = c;
    g(l, l) = c;
    g(l, k) = s;
    g(k, l) = -s;
    z = g.transpose() * z * g;
    z(k, k) = 0.0;
    o = o * g;
  }
  if (deviation() < kBalanceTolerance) return o;
  throw ConvergenceError("diagonal balancing did not converge");
}

struct RatioEval {
  double ratio = 0.0;
  ComplexVector gradient;  // ascent direction in C^M
};

RatioEval evaluate_ratio(const AMatrixSet& a_set, const ComplexVector& x, bool with_gradient) {
  const ComplexMatrix a = combine(a_set, x);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  RatioEval out;
  out.ratio = singular_value_ratio(sigma);
  if (!with_gradient || !std::isfinite(out.ratio)) return out;

  const double s1 = sigma(0);
  const double rest = sigma.sum() - s1;
  if (rest < kRatioZero) {
    out.gradient = ComplexVector::Zero(static_cast<Eigen::Index>(a_set.size()));
    return out;
  }
  Eigen::Index cluster = 1;
  while (cluster < sigma.size() && sigma(cluster) >= s1 * (1.0 - 1e-9)) ++cluster;

  const ComplexMatrix& u = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  out.gradient.resize(static_cast<Eigen::Index>(a_set.size()));
  for (std::size_t alpha = 0; alpha < a_set.size(); ++alpha) {
    const ComplexMatrix m = u.adjoint() * a_set.matrices[alpha] * v;
    const Complex nuclear = m.diagonal().sum();
    const Complex top = m.diagonal().head(cluster).sum() / static_cast<double>(cluster);
    const Complex d_rest = nuclear - top;
    const Complex d_ratio = (top * rest - s1 * d_rest) / (rest * rest);
    out.gradient(static_cast<Eigen::Index>(alpha)) = std::conj(d_ratio);
  }
  return out;
}

// Adaptive projected-gradient ascent of the ratio on the unit sphere.
std::pair<double, ComplexVector> ascend_ratio(const AMatrixSet& a_set, ComplexVector x) {
  x.normalize();
  RatioEval cur = evaluate_ratio(a_set, x, true);
  if (!std::isfinite(cur.ratio)) return {cur.ratio, x};
  double step = 0.1;
  for (std::size_t it = 0; it < kGenconcMaxSteps; ++it) {
    ComplexVector g = cur.gradient;
    g -= x.dot(g).real() * x;
    const double gnorm = g.norm();
    if (!(gnorm > 1e-14 * std::max(1.0, cur.ratio))) break;
    bool improved = false;
    while (step > 1e-12) {
      ComplexVector trial = x + (step / gnorm) * g;
      trial.normalize();
      RatioEval next = evaluate_ratio(a_set, trial, true);
      if (next.ratio > cur.ratio) {
        const bool stalled = next.ratio - cur.ratio <= 1e-15 * std::max(1.0, cur.ratio);
        x = std::move(trial);
        cur = std::move(next);
        step = std::min(step * 2.0, 1.0);
        improved = !stalled;
        if (!std::isfinite(cur.ratio)) return {cur.ratio, x};
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {cur.ratio, x};
}

}  // namespace

double thompson_min_abs_diag_sum(std::span<const double> sigma, std::size_t k) {
  if (k < sigma.size()) {
    throw DomainError("k = " + std::to_string(k) + " is smaller than the number of singular values");
  }
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] >= 0.0)) throw DomainError("singular values must be non-negative");
    if (i > 0 && sigma[i] > sigma[i - 1]) throw DomainError("singular values must be sorted descending");
  }
  if (sigma.empty()) return 0.0;
  const double rest = std::accumulate(sigma.begin() + 1, sigma.end(), 0.0);
  if (k == 3) {
    const double s2 = sigma.size() > 1 ? sigma[1] : 0.0;
    const double s3 = sigma.size() > 2 ? sigma[2] : 0.0;
    return std::abs(sigma[0] - s2 - s3);
  }
  return std::max(0.0, sigma[0] - rest);
}

bool thompson_feasible(std::span<const double> diag_moduli, std::span<const double> sigma,
                       double tolerance) {
  if (diag_moduli.size() != sigma.size()) {
    throw DimensionError("diagonal and singular value lists differ in length");
  }
  const std::vector<double> d = sorted_descending(diag_moduli);
  const std::vector<double> s = sorted_descending(sigma);
  const std::size_t n = d.size();
  if (n == 0) return true;
  if (d.back() < 0.0 || s.back() < 0.0) throw DomainError("moduli must be non-negative");
  const double d_total = std::accumulate(d.begin(), d.end(), 0.0);
  const double s_total = std::accumulate(s.begin(), s.end(), 0.0);

  double d_prefix = 0.0;
  double s_prefix = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // sum_{i<k} d_i - sum_{i>=k} d_i <= sum_{i!=k} s_i - s_k
    const double lhs2 = d_prefix - (d_total - d_prefix);
    const double rhs2 = s_total - 2.0 * s[k];
    if (lhs2 > rhs2 + tolerance) return false;
    d_prefix += d[k];
    s_prefix += s[k];
    if (d_prefix > s_prefix + tolerance) return false;
  }
  if (n >= 3) {
    const double lhs3 = d_total - 2.0 * (d[n - 3] + d[n - 2] + d[n - 1]);
    const double rhs3 = s_total - 2.0 * (s[n - 2] + s[n - 1]);
    if (lhs3 > rhs3 + tolerance) return false;
  }
  return true;
}

ConcurrenceResult concurrence_2x2(const DensityMatrix& rho) {
  require_2x2(rho);
  const AMatrixSet a_set = a_matrices(rho, IndicatorSet(rho.dims()));
  ConcurrenceResult out;
  out.sigma = singular_values(a_set.matrices.front());
  const double s1 = out.sigma(0);
  const double rest = out.sigma.sum() - s1;
  out.c = std::clamp(s1 - rest, 0.0, 1.0);
  out.optimal_k = rho.rank();
  if (rho.rank() == 3 && s1 < rest - 1e-12) out.optimal_k = 4;
  return out;
}

double eof_from_concurrence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("concurrence must lie in [0, 1]");
  const double p = 0.5 * (1.0 + std::sqrt(1.0 - c * c));
  return binary_h(p) + binary_h(1.0 - p);
}

Ensemble optimal_ensemble_2x2(const DensityMatrix& rho, const OptimizerConfig& config) {
  const ConcurrenceResult conc = concurrence_2x2(rho);
  const AMatrixSet a_set = a_matrices(rho, IndicatorSet(rho.dims()));
  const std::size_t r = rho.rank();

  const double s1 = conc.sigma(0);
  const double rest = conc.sigma.sum() - s1;
  if (conc.c > 0.0 || r == 1 || s1 >= rest - 1e-12) {
    const auto rr = static_cast<Eigen::Index>(r);
    const TakagiFactors tk = takagi(a_set.matrices.front());
    ComplexVector phases = ComplexVector::Constant(rr, Complex(0.0, 1.0));
    phases(0) = 1.0;
    // T'^T A T' = Diag(s1, -s2, ..., -sR), trace C.
    const ComplexMatrix t_prime = tk.u.adjoint() * phases.asDiagonal();
    const ComplexMatrix n = t_prime.adjoint() * a_set.weights.head(rr).cast<Complex>().asDiagonal() *
                            t_prime;
    RealMatrix z = -conc.c * n.real();
    z.diagonal() += tk.sigma;
    for (Eigen::Index i = 1; i < rr; ++i) z(i, i) -= 2.0 * tk.sigma(i);
    const RealVector scale = n.real().diagonal();
    RealMatrix o;
    try {
      o = zero_diagonal_rotation(z, scale);
    } catch (const ConvergenceError&) {
      throw EnsembleConvergenceError("diagonal balancing did not converge",
                                     ensemble_from_T(rho, TMatrix(t_prime)));
    }
    const TMatrix t(ComplexMatrix(t_prime * o.cast<Complex>()));
    Ensemble ensemble = ensemble_from_T(rho, t);
    if (member_deviation(a_set, t, conc.c) > kMemberTolerance) {
      throw EnsembleConvergenceError("member concurrences are not balanced", std::move(ensemble));
    }
    return ensemble;
  }

  const OptimizationResult opt = sep_variational(rho, conc.optimal_k, config);
  // Member concurrences scale like sqrt(l2) / weight, so polish past the
  // separability early stop.
  const SepObjective objective(a_set, conc.optimal_k);
  OptimizerConfig polish = config;
  polish.grad_tol = kPolishFloor;
  const CgOutcome polished =
      geodesic_cg_minimize(make_manifold_objective(objective), opt.best_T, polish, kPolishFloor);
  const ComplexMatrix& best = polished.value < opt.best_value ? polished.t : opt.best_T;
  const TMatrix t = TMatrix::from_unitary(best, r);
  Ensemble ensemble = ensemble_from_T(rho, t);
  if (member_deviation(a_set, t, 0.0) > kMemberTolerance) {
    throw EnsembleConvergenceError("no product ensemble found at K = " +
                                       std::to_string(conc.optimal_k),
                                   std::move(ensemble));
  }
  return ensemble;
}

RealVector concurrence_vector(const AMatrixSet& a_set, const TMatrix& t) {
  if (t.rank() != a_set.rank) {
    throw DimensionError("T has " + std::to_string(t.rank()) + " rows, expected " +
                         std::to_string(a_set.rank));
  }
  return minor_diagonals(a_set, t).cwiseAbs().rowwise().sum();
}

double singular_value_ratio(const RealVector& sigma) {
  if (sigma.size() == 0) return 0.0;
  const double s1 = sigma.maxCoeff();
  const double rest = sigma.sum() - s1;
  if (rest < kRatioZero) return s1 > kRatioZero ? std::numeric_limits<double>::infinity() : 0.0;
  return s1 / rest;
}

NecessaryConditionResult necessary_condition_per_alpha(const AMatrixSet& a_set) {
  NecessaryConditionResult out;
  out.ratios.reserve(a_set.size());
  for (const ComplexMatrix& a : a_set.matrices) {
    const RealVector sigma = singular_values(a);
    const double ratio = singular_value_ratio(sigma);
    out.ratios.push_back(ratio);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    const double s1 = sigma.size() > 0 ? sigma(0) : 0.0;
    const double rest = sigma.sum() - s1;
    if (!std::isfinite(ratio) || s1 > rest + 1e-12) out.holds = false;
  }
  return out;
}

double genconc_ratio(const AMatrixSet& a_set, const ComplexVector& x) {
  if (x.size() != static_cast<Eigen::Index>(a_set.size())) {
    throw DimensionError("x has " + std::to_string(x.size()) + " components, expected " +
                         std::to_string(a_set.size()));
  }
  const double norm = x.norm();
  if (!(norm > 0.0)) return 0.0;
  return evaluate_ratio(a_set, x / norm, false).ratio;
}

GenConcResult genconc_criterion(const AMatrixSet& a_set, const OptimizerConfig& config) {
  if (a_set.mode != IndicatorMode::full) {
    throw DomainError("the generalized concurrence criterion needs every indicator tuple");
  }
  const auto m = static_cast<Eigen::Index>(a_set.size());
  std::vector<ComplexVector> starts;
  for (Eigen::Index alpha = 0; alpha < m; ++alpha) starts.push_back(ComplexVector::Unit(m, alpha));
  for (std::size_t s = 0; s < kGenconcRandomStarts; ++s) {
    auto rng = restart_rng(config.seed, s);
    const ComplexMatrix g = random_gaussian(static_cast<std::size_t>(m), 1, rng);
    starts.emplace_back(g.col(0));
  }

  GenConcResult out;
  out.max_ratio = -1.0;
  for (const ComplexVector& x0 : starts) {
    auto [ratio, x] = ascend_ratio(a_set, x0);
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_x = std::move(x);
    }
    if (!std::isfinite(out.max_ratio)) break;
  }
  out.max_ratio = std::max(out.max_ratio, 0.0);
  out.passes = out.max_ratio <= 1.0 + 1e-9;
  return out;
}

std::size_t full_tuple_count(const BipartiteDims& dims) {
  return dims.n1 * (dims.n1 - 1) / 2 * (dims.n2 * (dims.n2 - 1) / 2);
}

bool preselection_rank_condition(const BipartiteDims& dims, std::size_t k,
                                 std::size_t product_members) {
  if (product_members > k) throw DomainError("P cannot exceed K");
  return k * (k - 1) / 2 + k - product_members <= full_tuple_count(dims);
}

PreselectResult preselect_T(const AMatrixSet& a_set, const DensityMatrix& rho,
                            std::size_t product_members, std::uint64_t seed) {
  if (a_set.rank != rho.rank() || !(a_set.dims == rho.dims())) {
    throw DimensionError("A-matrices do not belong to this state");
  }
  const std::size_t r = a_set.rank;
  const std::size_t p = product_members == 0 ? r : product_members;
  PreselectResult out;
  out.applicable = preselection_rank_condition(a_set.dims, r, p);

  const auto rr = static_cast<Eigen::Index>(r);
  const Eigen::Index unknowns = rr * (rr + 1) / 2;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slots;
  for (Eigen::Index i = 0; i < rr; ++i) {
    for (Eigen::Index j = i; j < rr; ++j) slots.emplace_back(i, j);
  }
  ComplexMatrix system(static_cast<Eigen::Index>(a_set.size()), unknowns);
  for (std::size_t alpha = 0; alpha < a_set.size(); ++alpha) {
    const ComplexMatrix& a = a_set.matrices[alpha];
    for (Eigen::Index s = 0; s < unknowns; ++s) {
      const auto [i, j] = slots[static_cast<std::size_t>(s)];
      system(static_cast<Eigen::Index>(alpha), s) = i == j ? a(i, i) : 2.0 * a(i, j);
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> solver(system, Eigen::ComputeFullV);
  const RealVector& sv = solver.singularValues();
  const double cutoff = kNullTolerance * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
  const ComplexMatrix null_basis = solver.matrixV().rightCols(unknowns - rank);
  out.null_dimension = static_cast<std::size_t>(null_basis.cols());
  if (null_basis.cols() == 0) return out;

  std::vector<ComplexVector> solutions;
  for (Eigen::Index c = 0; c < null_basis.cols(); ++c) solutions.emplace_back(null_basis.col(c));
  if (null_basis.cols() > 1) {
    std::mt19937_64 rng(seed);
    solutions.emplace_back(null_basis * random_gaussian(out.null_dimension, 1, rng).col(0));
  }

  for (const ComplexVector& b_vec : solutions) {
    ComplexMatrix b(rr, rr);
    for (Eigen::Index s = 0; s < unknowns; ++s) {
      const auto [i, j] = slots[static_cast<std::size_t>(s)];
      b(i, j) = b_vec(s);
      b(j, i) = b_vec(s);
    }
    TMatrix t(eig_hermitian(b * b.conjugate()).vectors);
    out.objective_values.push_back(sep_objective_l2(a_set, t));
    out.candidates.push_back(std::move(t));
  }
  const auto best = std::min_element(out.objective_values.begin(), out.objective_values.end());
  out.best = static_cast<std::size_t>(best - out.objective_values.begin());
  return out;
}

}  // namespace eofsep
