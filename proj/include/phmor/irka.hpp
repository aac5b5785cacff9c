#pragma once

// Iterative interpolation-point selection: sigma_i <- -lambda_i, b_i <- residue direction,
// wrapped around any of the structure-preserving reducers.

#include <limits>
#include <optional>
#include <ostream>

#include "phmor/reducers.hpp"

namespace phmor {

/// Points closer than this to the imaginary axis are moved to real part +kAxisShift.
inline constexpr double kAxisShift = 1e-8;

namespace detail {

/// Index of the conjugate partner of each entry (itself for real entries).
inline std::vector<std::size_t> conjugate_partners(const ComplexVector& z) {
  const std::size_t r = static_cast<std::size_t>(z.size());
  std::vector<std::size_t> partner(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    if (partner[i] != r) continue;
    const Complex zi = z(static_cast<Eigen::Index>(i));
    if (std::abs(zi.imag()) <= 1e-10 * (1.0 + std::abs(zi))) {
      partner[i] = i;
      continue;
    }
    std::size_t best = r;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r; ++j) {
      if (j == i || partner[j] != r) continue;
      const double d = std::abs(z(static_cast<Eigen::Index>(j)) - std::conj(zi));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == r) {
      partner[i] = i;  // unmatched: forced real below
    } else {
      partner[i] = best;
      partner[best] = i;
    }
  }
  return partner;
}

inline Complex sanitize_point(Complex sigma) {
  if (std::abs(sigma.real()) < kAxisShift) sigma.real(kAxisShift);
  return sigma;
}

}  // namespace detail

/// sigma_i = -lambda_i, with points near the imaginary axis moved to real part
/// +1e-8 and exact conjugate closure restored.
inline std::vector<Complex> mirror_and_sanitize(const ComplexVector& poles) {
  const auto partner = detail::conjugate_partners(poles);
  const std::size_t r = partner.size();
  std::vector<Complex> out(r);
  std::vector<bool> done(r, false);
  for (std::size_t i = 0; i < r; ++i) {
    if (done[i]) continue;
    Complex s = detail::sanitize_point(-poles(static_cast<Eigen::Index>(i)));
    if (partner[i] == i) {
      out[i] = Complex(s.real(), 0.0);
    } else {
      out[i] = s;
      out[partner[i]] = std::conj(s);
      done[partner[i]] = true;
    }
    done[i] = true;
  }
  return out;
}

/// max_i |sigma_i - sigma'_pi(i)| / (1 + |sigma_i|) under a matching pi:
/// greedy nearest-neighbour for r <= 20, sorted by (|sigma|, arg) above.
inline double convergence_metric(const std::vector<Complex>& prev, const std::vector<Complex>& next) {
  if (prev.size() != next.size()) throw DimensionError("convergence_metric: point sets differ in length");
  const std::size_t r = prev.size();
  double worst = 0.0;
  if (r <= 20) {
    std::vector<bool> used(r, false);
    for (std::size_t i = 0; i < r; ++i) {
      std::size_t best = r;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < r; ++j) {
        if (used[j]) continue;
        const double d = std::abs(prev[i] - next[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      used[best] = true;
      worst = std::max(worst, best_d / (1.0 + std::abs(prev[i])));
    }
    return worst;
  }
  auto key_less = [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return std::arg(a) < std::arg(b);
  };
  std::vector<Complex> a = prev, b = next;
  std::sort(a.begin(), a.end(), key_less);
  std::sort(b.begin(), b.end(), key_less);
  for (std::size_t i = 0; i < r; ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
  return worst;
}

struct IRKAConfig {
  int r = 1;
  int max_iterations = 100;
  double tolerance = 1e-6;
  std::optional<InterpolationData> initial;  // default: log-spaced reals with all-ones directions
  double init_lo = 1e-2;
  double init_hi = 1e4;
  ReducerOptions reducer;

  void check() const {
    if (r < 1) throw ArgumentError("IRKA: r >= 1 required");
    if (!(tolerance > 0.0)) throw ArgumentError("IRKA: tolerance must be positive");
    if (max_iterations < 1) throw ArgumentError("IRKA: max_iterations >= 1 required");
  }
};

struct IRKAIteration {
  std::vector<Complex> points;  // points used for this iteration's reduction
  ComplexVector poles;          // finite poles of the reduced model
  double metric = 0.0;          // change from points to their mirrored poles
  bool ph_valid = false;
  double min_eig_W = 0.0;
};

struct IRKATrace {
  std::vector<IRKAIteration> iterations;
  bool converged = false;
  int best_iteration = -1;
};

struct IRKAStep {
  ReducedModel model;
  PoleResidueForm poles;
  InterpolationData next;
};

/// One fixed-point step: reduce at `data`, then mirror poles and take residue directions.
inline IRKAStep irka_step(const AnyPartition& part, ReductionMethod method, const InterpolationData& data,
                          const ReducerOptions& opt = {}) {
  IRKAStep out{reduce(part, method, data, opt), {}, {}};
  out.poles = pole_residue(out.model);
  out.next.points = mirror_and_sanitize(out.poles.poles);
  const auto partner = detail::conjugate_partners(out.poles.poles);
  out.next.directions.resize(out.next.points.size());
  for (std::size_t i = 0; i < partner.size(); ++i) {
    const ComplexVector b = out.poles.right.col(static_cast<Eigen::Index>(i));
    if (partner[i] == i) {
      out.next.directions[i] = b.real().cast<Complex>();
    } else if (partner[i] > i) {
      out.next.directions[i] = b;
      out.next.directions[partner[i]] = b.conjugate();
    }
  }
  return out;
}

struct IRKAResult {
  ReducedModel model;
  InterpolationData data;  // points and directions that produced `model`
  InterpolationData next;  // mirrored poles of `model`
  IRKATrace trace;
  std::vector<std::string> warnings;
};

inline IRKAResult irka_reduce(const AnyPartition& part, ReductionMethod method, const IRKAConfig& cfg) {
  cfg.check();
  const Eigen::Index m = system_of(part).m();
  InterpolationData data = cfg.initial ? *cfg.initial : InterpolationData::log_spaced(cfg.init_lo, cfg.init_hi, cfg.r, m);
  IRKAResult best;
  double best_metric = std::numeric_limits<double>::infinity();
  IRKATrace trace;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    IRKAStep step = irka_step(part, method, data, cfg.reducer);
    IRKAIteration rec;
    rec.points = data.points;
    rec.poles = step.poles.poles;
    rec.metric = step.next.size() == data.size() ? convergence_metric(data.points, step.next.points)
                                                 : std::numeric_limits<double>::infinity();
    rec.ph_valid = step.model.ph_valid;
    rec.min_eig_W = step.model.min_eig_W;
    trace.iterations.push_back(rec);
    if (rec.metric < best_metric || trace.best_iteration < 0) {
      best_metric = rec.metric;
      trace.best_iteration = it;
      best.model = step.model;
      best.data = data;
      best.next = step.next;
    }
    if (rec.metric < cfg.tolerance) {
      trace.converged = true;
      best.model = std::move(step.model);
      best.data = data;
      best.next = std::move(step.next);
      trace.best_iteration = it;
      break;
    }
    if (step.next.empty()) break;
    data = std::move(step.next);
  }
  if (!trace.converged) {
    best.warnings.push_back("IRKA did not converge in " + std::to_string(cfg.max_iterations) +
                            " iterations; returning the iterate with the smallest point change (" +
                            num(best_metric) + ")");
  }
  best.trace = std::move(trace);
  return best;
}

/// CSV: iteration, metric, min_eig_W, ph_valid, then re/im of each point.
inline void write_trace_csv(std::ostream& os, const IRKATrace& trace) {
  std::size_t r = 0;
  for (const auto& it : trace.iterations) r = std::max(r, it.points.size());
  os << "iteration,metric,min_eig_W,ph_valid";
  for (std::size_t i = 0; i < r; ++i) os << ",re_sigma" << i + 1 << ",im_sigma" << i + 1;
  os << '\n';
  const auto old_precision = os.precision(12);
  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    const auto& it = trace.iterations[k];
    os << k + 1 << ',' << it.metric << ',' << it.min_eig_W << ',' << (it.ph_valid ? 1 : 0);
    for (std::size_t i = 0; i < r; ++i) {
      if (i < it.points.size()) {
        os << ',' << it.points[i].real() << ',' << it.points[i].imag();
      } else {
        os << ",,";
      }
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace phmor
