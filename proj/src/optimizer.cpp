#include "eofsep/optimizer.hpp"

#include "eofsep/concurrence.hpp"
#include "eofsep/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

namespace eofsep {

void OptimizerConfig::validate() const {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (line_search_max_evals < 2) throw DomainError("line_search_max_evals must be at least 2");
  if (!(grad_tol > 0.0) || !(objective_tol > 0.0) || !(early_stop_eof > 0.0)) {
    throw DomainError("optimizer tolerances must be positive");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::gradient: return "gradient";
    case StopReason::stagnation: return "stagnation";
    case StopReason::floor: return "floor";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::line_search: return "line_search";
  }
  return "unknown";
}

ComplexMatrix parallel_transport(const ComplexMatrix& grad_prev, const ComplexMatrix& x_prev,
                                 double t_prev) {
  if (t_prev == 0.0) return grad_prev;
  const SkewExponential half(x_prev);
  return half(t_prev / 2.0) * grad_prev * half(-t_prev / 2.0);
}

namespace {

struct Probe {
  double t = 0.0;
  double f = 0.0;
  double slope = 0.0;
  ComplexMatrix point;
  ComplexMatrix gradient;
};

class GeodesicLine {
 public:
  GeodesicLine(const ManifoldObjective& objective, const ComplexMatrix& base,
               const ComplexMatrix& direction)
      : objective_(objective), base_(base), direction_(direction), exp_(direction) {}

  Probe at(double t) {
    ++evals_;
    Probe p;
    p.t = t;
    p.point = base_ * exp_(t);
    p.f = objective_.value_and_gradient(p.point, p.gradient);
    p.slope = hs_inner(p.gradient, direction_);
    return p;
  }

  std::size_t evals() const noexcept { return evals_; }
  double spectral_radius() const noexcept { return exp_.spectral_radius(); }

 private:
  const ManifoldObjective& objective_;
  const ComplexMatrix& base_;
  const ComplexMatrix& direction_;
  SkewExponential exp_;
  std::size_t evals_ = 0;
};

double cubic_minimizer(const Probe& lo, const Probe& hi) {
  const double span = hi.t - lo.t;
  const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (lo.t - hi.t);
  const double disc = d1 * d1 - lo.slope * hi.slope;
  double t = lo.t + span / 2.0;
  if (disc >= 0.0 && std::isfinite(disc)) {
    const double d2 = std::copysign(std::sqrt(disc), span);
    const double denom = hi.slope - lo.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double cand = hi.t - span * (hi.slope + d2 - d1) / denom;
      if (std::isfinite(cand)) t = cand;
    }
  }
  // Keep the trial point away from the bracket ends.
  const double a = std::min(lo.t, hi.t);
  const double b = std::max(lo.t, hi.t);
  const double margin = 0.1 * (b - a);
  return std::clamp(t, a + margin, b - margin);
}

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.1;

// Strong-Wolfe search along the geodesic. Falls back to the lowest point
// satisfying sufficient decrease when the budget runs out.
std::optional<Probe> wolfe_search(GeodesicLine& line, double f0, double d0, double t_init,
                                  double t_max, std::size_t max_evals) {
  const auto armijo = [&](const Probe& p) { return p.f <= f0 + kArmijo * p.t * d0; };
  const auto strong = [&](const Probe& p) { return std::abs(p.slope) <= -kCurvature * d0; };
  const auto fallback = [](const Probe& lo) -> std::optional<Probe> {
    if (lo.t > 0.0) return lo;
    return std::nullopt;
  };

  const auto zoom = [&](Probe lo, Probe hi) -> std::optional<Probe> {
    while (line.evals() < max_evals) {
      if (std::abs(hi.t - lo.t) <= 1e-15 * std::max(1.0, std::abs(lo.t))) break;
      Probe p = line.at(cubic_minimizer(lo, hi));
      if (!std::isfinite(p.f) || !armijo(p) || p.f >= lo.f) {
        hi = std::move(p);
      } else {
        if (strong(p)) return p;
        if (p.slope * (hi.t - lo.t) >= 0.0) hi = lo;
        lo = std::move(p);
      }
    }
    return fallback(lo);
  };

  Probe prev;
  prev.f = f0;
  prev.slope = d0;
  double t = std::min(t_init, t_max);
  while (line.evals() < max_evals) {
    Probe p = line.at(t);
    if (!std::isfinite(p.f) || !armijo(p) || (prev.t > 0.0 && p.f >= prev.f)) {
      return zoom(std::move(prev), std::move(p));
    }
    if (strong(p)) return p;
    if (p.slope >= 0.0) return zoom(std::move(p), std::move(prev));
    if (p.t >= t_max) return p;
    prev = std::move(p);
    t = std::min(2.0 * t, t_max);
  }
  return fallback(prev);
}

}  // namespace

CgOutcome geodesic_cg_minimize(const ManifoldObjective& objective, const ComplexMatrix& t0,
                               const OptimizerConfig& config, double floor) {
  config.validate();
  if (t0.rows() != t0.cols()) throw DimensionError("geodesic_cg_minimize: start must be square");
  const std::size_t dim = static_cast<std::size_t>(t0.rows());
  const std::size_t reset_period = std::max<std::size_t>(dim * dim, 2);

  CgOutcome out;
  out.t = unitarity_defect(t0) > 1e-12 ? nearest_unitary(t0) : t0;
  ComplexMatrix grad;
  out.value = objective.value_and_gradient(out.t, grad);
  if (out.value <= floor) {
    out.converged = true;
    out.reason = StopReason::floor;
    return out;
  }

  ComplexMatrix direction = -grad;
  bool steepest = true;
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  std::size_t stalls = 0;
  std::size_t since_reset = 0;

  while (out.iterations < config.max_iterations) {
    const double grad_sq = grad.squaredNorm();
    if (std::sqrt(grad_sq) <= config.grad_tol) {
      out.converged = true;
      out.reason = StopReason::gradient;
      return out;
    }
    double d0 = hs_inner(grad, direction);
    if (!(d0 < 0.0)) {
      direction = -grad;
      d0 = -grad_sq;
      steepest = true;
    }

    GeodesicLine line(objective, out.t, direction);
    const double radius = std::max(line.spectral_radius(), 1e-300);
    const double t_max = std::numbers::pi / radius;
    double t_init = 0.1 / radius;
    if (std::isfinite(f_prev) && f_prev > out.value) {
      const double guess = 2.02 * (out.value - f_prev) / d0;
      if (guess > 0.0 && std::isfinite(guess)) t_init = guess;
    }
    std::optional<Probe> step =
        wolfe_search(line, out.value, d0, t_init, t_max, config.line_search_max_evals);
    if (!step || !(step->f < out.value)) {
      if (!steepest) {
        direction = -grad;
        steepest = true;
        since_reset = 0;
        continue;
      }
      // No decrease even along steepest descent. After a stalled step this is
      // the usual end at working precision; otherwise the run failed.
      out.converged = stalls > 0;
      out.reason = stalls > 0 ? StopReason::stagnation : StopReason::line_search;
      return out;
    }

    ++out.iterations;
    ++since_reset;
    const ComplexMatrix grad_prev = grad;
    const ComplexMatrix direction_prev = direction;
    const double step_prev = step->t;
    f_prev = out.value;
    out.t = std::move(step->point);
    grad = std::move(step->gradient);
    out.value = step->f;
    if (unitarity_defect(out.t) > 1e-12) {
      out.t = nearest_unitary(out.t);
      out.value = objective.value_and_gradient(out.t, grad);
    }

    if (out.value <= floor) {
      out.converged = true;
      out.reason = StopReason::floor;
      return out;
    }
    if (f_prev - out.value <= config.objective_tol * std::abs(out.value)) {
      if (++stalls >= 3) {
        out.converged = true;
        out.reason = StopReason::stagnation;
        return out;
      }
    } else {
      stalls = 0;
    }

    // Directions are body-frame generators (T exp(t X)); along that geodesic
    // a tangent generator is carried as exp(-X t/2) G exp(X t/2), and the
    // previous direction is invariant.
    const ComplexMatrix moved = parallel_transport(grad_prev, -direction_prev, step_prev);
    double gamma = hs_inner(grad - moved, grad) / grad_prev.squaredNorm();
    if (!(gamma > 0.0) || !std::isfinite(gamma) || since_reset >= reset_period) {
      gamma = 0.0;
      since_reset = 0;
    }
    direction = -grad + gamma * direction_prev;
    steepest = gamma == 0.0;
  }
  out.reason = StopReason::max_iterations;
  return out;
}

bool OptimizationResult::best_converged() const {
  const auto it = std::min_element(per_restart_values.begin(), per_restart_values.end());
  return it != per_restart_values.end() &&
         converged[static_cast<std::size_t>(it - per_restart_values.begin())];
}

std::size_t OptimizationResult::restarts_converged() const {
  return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), true));
}

std::mt19937_64 restart_rng(std::uint64_t seed, std::size_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(restart) >> 32)};
  return std::mt19937_64(seq);
}

OptimizationResult multistart_minimize(const ManifoldObjective& objective, std::size_t k,
                                       const std::vector<ComplexMatrix>& starts,
                                       const OptimizerConfig& config, double floor) {
  config.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  const std::size_t n = config.restarts;
  std::vector<std::optional<CgOutcome>> outcomes(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> cutoff{n};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n || idx > cutoff.load()) return;
      try {
        ComplexMatrix t0;
        if (idx < starts.size()) {
          t0 = starts[idx];
        } else {
          auto rng = restart_rng(config.seed, idx);
          t0 = random_unitary(k, rng);
        }
        outcomes[idx] = geodesic_cg_minimize(objective, t0, config, floor);
        if (outcomes[idx]->value <= floor) {
          std::size_t current = cutoff.load();
          while (idx < current && !cutoff.compare_exchange_weak(current, idx)) {
          }
        }
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        cutoff.store(0);
        return;
      }
    }
  };

  std::size_t jobs = config.jobs != 0 ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  OptimizationResult result;
  result.cardinality = k;
  const std::size_t last = std::min(cutoff.load(), n - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx <= last; ++idx) {
    const CgOutcome& o = *outcomes[idx];
    result.per_restart_values.push_back(o.value);
    result.iterations_used.push_back(o.iterations);
    result.converged.push_back(o.converged);
    result.stop_reasons.push_back(o.reason);
    if (o.value < best) {
      best = o.value;
      result.best_value = o.value;
      result.best_T = o.t;
    }
  }
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return result;
}

namespace {

std::vector<ComplexMatrix> seeded_starts(const DensityMatrix& rho, std::size_t k,
                                         const OptimizerConfig& config) {
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<ComplexMatrix> starts{ComplexMatrix::Identity(kk, kk)};
  if (!config.preselect_seeding || config.restarts < 2) return starts;
  const AMatrixSet a_set = a_matrices(rho, IndicatorSet(rho.dims()));
  const PreselectResult pre = preselect_T(a_set, rho, 0, config.seed);
  if (!pre.best) return starts;
  const ComplexMatrix& t = pre.candidates[*pre.best].matrix();
  ComplexMatrix padded = ComplexMatrix::Identity(kk, kk);
  padded.topLeftCorner(t.rows(), t.cols()) = t;
  starts.push_back(std::move(padded));
  return starts;
}

}  // namespace

OptimizationResult eof_variational(const DensityMatrix& rho, std::size_t k,
                                   const OptimizerConfig& config) {
  config.validate();
  const EofObjective objective(rho, k, !config.allow_any_cardinality);
  OptimizationResult result = multistart_minimize(make_manifold_objective(objective), k,
                                                  seeded_starts(rho, k, config), config,
                                                  config.early_stop_eof);
  result.ensemble = ensemble_from_T(rho, TMatrix::from_unitary(result.best_T, rho.rank()));
  return result;
}

OptimizationResult sep_variational(const DensityMatrix& rho, std::size_t k,
                                   const OptimizerConfig& config, IndicatorMode mode) {
  config.validate();
  const SepObjective objective(a_matrices(rho, IndicatorSet(rho.dims(), mode)), k);
  OptimizationResult result =
      multistart_minimize(make_manifold_objective(objective), k, seeded_starts(rho, k, config),
                          config, kSeparableEarlyStop);
  result.ensemble = ensemble_from_T(rho, TMatrix::from_unitary(result.best_T, rho.rank()));
  return result;
}

}  // namespace eofsep
