#ifndef NASHCONT_HOMOTOPY_HPP
#define NASHCONT_HOMOTOPY_HPP

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nashcont/polynomial.hpp"

namespace nashcont {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class PathStatus { converged, diverged, stalled };

inline const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::converged: return "converged";
    case PathStatus::diverged: return "diverged";
    case PathStatus::stalled: return "stalled";
  }
  return "?";
}

enum class Predictor { tangent, secant };

struct HomotopyConfig {
  Complex gamma{1.0, 0.0};
  std::uint64_t gamma_seed = 0;
  int k = 2;
  double initial_step = 0.05;
  double min_step = 1e-8;
  double max_step = 0.1;
  double corrector_tol = 1e-9;   // relative Newton update accepted as converged
  int max_corrector_iterations = 3;
  double divergence_bound = 1e8;
  double endgame_threshold = 0.99;  // step cap shrinks to (1 - t) / 4 beyond this
  double final_tol = 1e-8;       // residual of the target required for convergence
  int successes_to_grow = 5;
  long max_steps = 200000;
  Predictor predictor = Predictor::tangent;
  /// Return true to abandon the path at (x, t); it reports stalled.
  std::function<bool(const CVector&, double)> abandon;

  /// Gamma on the unit circle from a seed, so runs are reproducible.
  static HomotopyConfig with_seed(std::uint64_t seed) {
    HomotopyConfig c;
    c.gamma_seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    c.gamma = std::polar(1.0, angle(rng));
    return c;
  }

  void validate() const {
    if (k < 1) throw std::invalid_argument("homotopy power k must be at least 1");
    if (!(min_step > 0 && min_step <= initial_step && initial_step <= max_step && max_step < 1))
      throw std::invalid_argument("step bounds must satisfy 0 < min <= initial <= max < 1");
    if (!(corrector_tol > 0) || !(final_tol > 0)) throw std::invalid_argument("tolerances must be positive");
    if (max_corrector_iterations < 1) throw std::invalid_argument("need at least one corrector iteration");
  }
};

struct PathResult {
  PathStatus status = PathStatus::stalled;
  CVector endpoint;
  double t_reached = 0.0;
  double residual = 0.0;  // max-norm of the target at the endpoint
  double err = 0.0;       // size of the last Newton correction
  double rco = 0.0;       // reciprocal condition estimate of the target Jacobian
  long steps = 0;
  long rejected_steps = 0;
  long corrector_iterations = 0;
  double arc_length = 0.0;
  std::string message;
};

/// Flat form of a system for repeated evaluation of values and Jacobian.
class CompiledSystem {
public:
  CompiledSystem() = default;

  explicit CompiledSystem(const ComplexSystem& system) : nvars_(system.nvars()) {
    for (const auto& eq : system.equations()) {
      Equation e;
      for (const auto& t : eq.terms()) {
        CTerm ct{t.coeff, {}};
        for (std::size_t v = 0; v < nvars_; ++v)
          for (int p = 0; p < t.mono.exponents[v]; ++p) ct.vars.push_back(static_cast<int>(v));
        e.push_back(std::move(ct));
      }
      eqs_.push_back(std::move(e));
    }
  }

  std::size_t nvars() const { return nvars_; }
  std::size_t size() const { return eqs_.size(); }

  CVector value(const CVector& x) const {
    CVector f = CVector::Zero(static_cast<Eigen::Index>(eqs_.size()));
    for (std::size_t r = 0; r < eqs_.size(); ++r)
      for (const auto& t : eqs_[r]) {
        Complex v = t.coeff;
        for (int q : t.vars) v *= x[q];
        f[static_cast<Eigen::Index>(r)] += v;
      }
    return f;
  }

  /// Values and Jacobian together; rows are equations.
  void evaluate(const CVector& x, CVector& f, CMatrix& jac) const {
    const auto m = static_cast<Eigen::Index>(eqs_.size());
    const auto n = static_cast<Eigen::Index>(nvars_);
    f = CVector::Zero(m);
    jac = CMatrix::Zero(m, n);
    for (Eigen::Index r = 0; r < m; ++r)
      for (const auto& t : eqs_[static_cast<std::size_t>(r)]) {
        Complex v = t.coeff;
        for (int q : t.vars) v *= x[q];
        f[r] += v;
        for (std::size_t a = 0; a < t.vars.size(); ++a) {
          if (a && t.vars[a] == t.vars[a - 1]) continue;  // repeated factor handled by multiplicity below
          Complex d = t.coeff;
          int mult = 0;
          bool skipped = false;
          for (int q : t.vars) {
            if (q == t.vars[a]) {
              ++mult;
              if (!skipped) {
                skipped = true;
                continue;
              }
            }
            d *= x[q];
          }
          jac(r, t.vars[a]) += d * static_cast<double>(mult);
        }
      }
  }

private:
  struct CTerm {
    Complex coeff;
    std::vector<int> vars;  // sorted, with repetition for powers
  };
  using Equation = std::vector<CTerm>;

  std::size_t nvars_ = 0;
  std::vector<Equation> eqs_;
};

namespace detail {

inline void require_same_shape(const CompiledSystem& q, const CompiledSystem& p) {
  if (q.nvars() != p.nvars() || q.size() != p.size() || q.size() != q.nvars())
    throw std::invalid_argument("start and target systems must be square and of the same shape");
}

inline double max_norm(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct HomotopyEvaluator {
  const CompiledSystem& q;
  const CompiledSystem& p;
  const HomotopyConfig& cfg;

  // H, H_x and H_t at (x, t).
  void operator()(const CVector& x, double t, CVector& h, CMatrix& hx, CVector* ht) const {
    CVector fq, fp;
    CMatrix jq, jp;
    q.evaluate(x, fq, jq);
    p.evaluate(x, fp, jp);
    const double s = 1.0 - t;
    const Complex wq = cfg.gamma * std::pow(s, cfg.k);
    const double wp = std::pow(t, cfg.k);
    h = wq * fq + wp * fp;
    hx = wq * jq + wp * jp;
    if (ht) {
      const Complex dq = -cfg.gamma * static_cast<double>(cfg.k) * std::pow(s, cfg.k - 1);
      const double dp = static_cast<double>(cfg.k) * std::pow(t, cfg.k - 1);
      *ht = dq * fq + dp * fp;
    }
  }
};

// Reciprocal condition number in the 1-norm from an explicit inverse.
inline double rcond(const CMatrix& a, const Eigen::PartialPivLU<CMatrix>& lu) {
  if (a.size() == 0) return 1.0;
  const double na = a.cwiseAbs().colwise().sum().maxCoeff();
  const CMatrix inv = lu.inverse();
  const double ni = inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(ni) || na == 0.0 || ni == 0.0) return 0.0;
  return 1.0 / (na * ni);
}

constexpr double kSingular = 1e-14;

}  // namespace detail

/// H(x, t) = gamma (1-t)^k Q(x) + t^k P(x).
inline CVector homotopy_eval(const CompiledSystem& start, const CompiledSystem& target, const HomotopyConfig& config,
                             const CVector& x, double t) {
  detail::require_same_shape(start, target);
  if (static_cast<std::size_t>(x.size()) != start.nvars()) throw std::invalid_argument("point has wrong length");
  return config.gamma * std::pow(1.0 - t, config.k) * start.value(x) + std::pow(t, config.k) * target.value(x);
}

inline CVector homotopy_eval(const ComplexSystem& start, const ComplexSystem& target, const HomotopyConfig& config,
                      const CVector& x, double t) {
  return homotopy_eval(CompiledSystem(start), CompiledSystem(target), config, x, t);
}

/// Predictor-corrector tracking of one start root from t = 0 to t = 1.
inline PathResult track_path(const CompiledSystem& start, const CompiledSystem& target, const CVector& root,
                             const HomotopyConfig& config) {
  config.validate();
  detail::require_same_shape(start, target);
  const auto n = static_cast<Eigen::Index>(start.nvars());
  if (root.size() != n) throw std::invalid_argument("start root has wrong length");

  PathResult res;
  detail::HomotopyEvaluator H{start, target, config};
  CVector x = root, h, ht;
  CMatrix hx;
  double t = 0.0;
  double dt = config.initial_step;
  int streak = 0;
  CVector prev_x = x;
  double prev_t = -1.0;

  // Newton at fixed t; true when the update settles within the iteration cap.
  auto correct = [&](CVector& y, double tt, int max_iter, double& last) {
    for (int it = 0; it < max_iter; ++it) {
      H(y, tt, h, hx, nullptr);
      ++res.corrector_iterations;
      Eigen::PartialPivLU<CMatrix> lu(hx);
      if (std::abs(lu.determinant()) == 0.0) return false;
      const CVector dx = lu.solve(-h);
      if (!dx.allFinite()) return false;
      y += dx;
      last = detail::max_norm(dx);
      if (last <= config.corrector_tol * (1.0 + detail::max_norm(y))) return true;
    }
    return false;
  };

  while (t < 1.0) {
    if (res.steps + res.rejected_steps >= config.max_steps) {
      res.status = PathStatus::stalled;
      res.message = "step budget exhausted";
      break;
    }
    if (config.abandon && config.abandon(x, t)) {
      res.status = PathStatus::stalled;
      res.message = "abandoned";
      break;
    }
    double cap = config.max_step;
    if (t > config.endgame_threshold) cap = std::min(cap, std::max(config.min_step, (1.0 - t) * 0.25));
    double step = std::min({dt, cap, 1.0 - t});
    if (1.0 - t - step < config.min_step) step = 1.0 - t;
    const double t1 = t + step;

    CVector guess;
    if (config.predictor == Predictor::secant && prev_t >= 0.0) {
      guess = x + (x - prev_x) * (step / (t - prev_t));
    } else {
      H(x, t, h, hx, &ht);
      Eigen::PartialPivLU<CMatrix> lu(hx);
      const CVector dxdt = lu.solve(-ht);
      guess = dxdt.allFinite() ? CVector(x + step * dxdt) : x;
    }
    double last = 0.0;
    const bool ok = guess.allFinite() && correct(guess, t1, config.max_corrector_iterations, last);
    if (ok) {
      res.arc_length += (guess - x).norm();
      prev_x = x;
      prev_t = t;
      x = guess;
      t = t1 >= 1.0 ? 1.0 : t1;
      res.err = last;
      ++res.steps;
      if (++streak >= config.successes_to_grow) {
        dt = std::min(dt * 2.0, config.max_step);
        streak = 0;
      }
      if (detail::max_norm(x) > config.divergence_bound) {
        res.status = PathStatus::diverged;
        res.message = "solution norm exceeded bound";
        break;
      }
    } else {
      ++res.rejected_steps;
      streak = 0;
      dt = step * 0.5;
      if (dt < config.min_step) {
        res.status = detail::max_norm(x) > std::sqrt(config.divergence_bound) ? PathStatus::diverged : PathStatus::stalled;
        res.message = "step size underflow";
        break;
      }
    }
  }
  res.t_reached = t;

  if (t >= 1.0 && res.message.empty()) {
    double last = res.err;
    correct(x, 1.0, 8, last);
    res.err = last;
    CVector f;
    CMatrix j;
    target.evaluate(x, f, j);
    res.residual = detail::max_norm(f);
    Eigen::PartialPivLU<CMatrix> lu(j);
    res.rco = detail::rcond(j, lu);
    if (!x.allFinite()) {
      res.status = PathStatus::diverged;
      res.message = "non-finite endpoint";
    } else if (res.rco < detail::kSingular) {
      res.status = PathStatus::stalled;
      res.message = "singular Jacobian at endpoint";
    } else if (res.residual <= config.final_tol * (1.0 + detail::max_norm(x))) {
      res.status = PathStatus::converged;
    } else {
      res.status = PathStatus::stalled;
      res.message = "endpoint residual above tolerance";
    }
  } else {
    res.residual = detail::max_norm(target.value(x));
  }
  res.endpoint = x;
  return res;
}

inline PathResult track_path(const ComplexSystem& start, const ComplexSystem& target, const CVector& root,
                      const HomotopyConfig& config) {
  return track_path(CompiledSystem(start), CompiledSystem(target), root, config);
}

/// Tracks every root; results keep input order for any worker count.
inline std::vector<PathResult> track_all(const CompiledSystem& start, const CompiledSystem& target,
                                         const std::vector<CVector>& roots, const HomotopyConfig& config,
                                         unsigned workers = 1) {
  config.validate();
  detail::require_same_shape(start, target);
  std::vector<PathResult> results(roots.size());
  if (roots.empty()) return results;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(roots.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < roots.size();) {
      try {
        results[i] = track_path(start, target, roots[i], config);
      } catch (const std::exception& e) {
        results[i].status = PathStatus::stalled;
        results[i].endpoint = roots[i];
        results[i].message = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
    return results;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return results;
}

inline std::vector<PathResult> track_all(const ComplexSystem& start, const ComplexSystem& target,
                                  const std::vector<CVector>& roots, const HomotopyConfig& config,
                                  unsigned workers = 1) {
  return track_all(CompiledSystem(start), CompiledSystem(target), roots, config, workers);
}

inline CVector to_cvector(const std::vector<Complex>& v) {
  CVector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

inline std::vector<Complex> to_std(const CVector& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace nashcont

#endif  // NASHCONT_HOMOTOPY_HPP
