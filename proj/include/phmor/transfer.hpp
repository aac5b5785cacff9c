#pragma once

// Transfer-function evaluation, polynomial parts and error norms.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phmor/partition.hpp"

namespace phmor {

/// Any model that can be sampled: s -> H(s) (outputs x inputs).
using TransferFunction = std::function<ComplexMatrix(Complex)>;

/// H(s) = C (sE - A)^{-1} B + D.
inline ComplexMatrix eval(const GenericLTISystem& sys, Complex s) {
  const ComplexMatrix pencil = s * sys.E.cast<Complex>() - sys.A.cast<Complex>();
  ComplexMatrix x;
  try {
    x = solve_complex(pencil, sys.B.cast<Complex>());
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError("eval: s = (" + num(s.real()) + ", " + num(s.imag()) +
                                  ") is numerically an eigenvalue of the pencil",
                              e.rcond());
  }
  return sys.C.cast<Complex>() * x + sys.D.cast<Complex>();
}

inline ComplexMatrix eval(const PHDAESystem& sys, Complex s) { return eval(as_generic(sys), s); }

/// H(s) b.
inline ComplexVector eval_tangential(const GenericLTISystem& sys, Complex s, const ComplexVector& b) {
  if (b.size() != sys.inputs()) throw DimensionError("eval_tangential: direction length != inputs");
  const ComplexMatrix pencil = s * sys.E.cast<Complex>() - sys.A.cast<Complex>();
  const ComplexVector x = solve_complex(pencil, sys.B.cast<Complex>() * b);
  return sys.C.cast<Complex>() * x + sys.D.cast<Complex>() * b;
}

/// c^T H(s), returned as a column vector.
inline ComplexVector eval_tangential_left(const GenericLTISystem& sys, Complex s, const ComplexVector& c) {
  if (c.size() != sys.outputs()) throw DimensionError("eval_tangential_left: direction length != outputs");
  const ComplexMatrix pencil = s * sys.E.cast<Complex>() - sys.A.cast<Complex>();
  const ComplexVector y = solve_complex(pencil.transpose(), sys.C.transpose().cast<Complex>() * c);
  return sys.B.transpose().cast<Complex>() * y + sys.D.transpose().cast<Complex>() * c;
}

inline TransferFunction transfer_of(GenericLTISystem sys) {
  sys.check();
  return [sys = std::move(sys)](Complex s) { return eval(sys, s); };
}

inline TransferFunction transfer_of(const PHDAESystem& sys) { return transfer_of(as_generic(sys)); }

// ---------------------------------------------------------------------------
// Polynomial part

/// P(s) = P0 + s P1.
struct PolynomialPart {
  RealMatrix P0;
  RealMatrix P1;

  ComplexMatrix evaluate(Complex s) const { return P0.cast<Complex>() + s * P1.cast<Complex>(); }
};

/// P0 = D - (B2 + P2)^T (J22 - R22)^{-1} (B2 - P2), P1 = 0.
inline PolynomialPart polynomial_part_index1(const Index1Partition& part) {
  const PHDAESystem& sys = part.system();
  const RealMatrix c2 = (part.B2() + part.P2()).transpose();
  const RealMatrix b2 = part.B2() - part.P2();
  PolynomialPart out;
  out.P0 = sys.feedthrough() - c2 * solve_real(part.A22(), b2);
  out.P1 = RealMatrix::Zero(sys.m(), sys.m());
  return out;
}

/// Index-2 data shared by the polynomial part and the constraint-aware reducer.
/// With Z = (J12^T E11^{-1} J12)^{-1}, Bc = B - P, Cc = (B + P)^T:
///   input_map    = Bc1 + A11 E11^{-1} J12 Z Bc2
///   output_map   = Cc1 - Cc2 Z J12^T E11^{-1} A11
///   D0           = D + Cc1 E11^{-1} J12 Z Bc2 - Cc2 Z J12^T E11^{-1} Bc1
///                    - Cc2 Z J12^T E11^{-1} A11 E11^{-1} J12 Z Bc2
///   D1           = Cc2 Z Bc2
struct Index2Shift {
  RealMatrix Z;
  RealMatrix input_map;   // n1 x m
  RealMatrix output_map;  // m x n1
  RealMatrix D0;
  RealMatrix D1;
};

inline Index2Shift index2_shift(const Index2Partition& part) {
  const PHDAESystem& sys = part.system();
  const Eigen::Index m = sys.m();
  const RealMatrix b1 = part.B1() - part.P1();
  const RealMatrix c1 = (part.B1() + part.P1()).transpose();
  Index2Shift out;
  if (part.n2() == 0) {
    out.Z = RealMatrix(0, 0);
    out.input_map = b1;
    out.output_map = c1;
    out.D0 = sys.feedthrough();
    out.D1 = RealMatrix::Zero(m, m);
    return out;
  }
  const RealMatrix b2 = part.B2() - part.P2();
  const RealMatrix c2 = (part.B2() + part.P2()).transpose();
  const RealMatrix a11 = part.A11();
  const Eigen::LLT<RealMatrix> e11(part.E11());
  const RealMatrix j12 = part.J12();
  out.Z = solve_real(part.coupling(), RealMatrix::Identity(part.n2(), part.n2()));
  const RealMatrix g = e11.solve(j12) * out.Z;              // E11^{-1} J12 Z        (n1 x n2)
  const RealMatrix h = out.Z * e11.solve(j12).transpose();  // Z J12^T E11^{-1}      (n2 x n1)
  out.input_map = b1 + a11 * g * b2;
  out.output_map = c1 - c2 * h * a11;
  out.D0 = sys.feedthrough() + c1 * g * b2 - c2 * h * b1 - c2 * h * a11 * g * b2;
  out.D1 = c2 * out.Z * b2;
  return out;
}

/// P(s) = D0 + s D1 of an index-2 partition.
inline PolynomialPart polynomial_part_index2(const Index2Partition& part) {
  const Index2Shift sh = index2_shift(part);
  return {sh.D0, sh.D1};
}

// ---------------------------------------------------------------------------
// Frequency grids and responses

struct FrequencyGrid {
  std::vector<double> omega;  // strictly ascending, rad/s

  static FrequencyGrid logspace(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
      throw ArgumentError("FrequencyGrid::logspace needs 0 < lo < hi and count >= 2");
    }
    FrequencyGrid g;
    g.omega.resize(static_cast<std::size_t>(count));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int k = 0; k < count; ++k) {
      g.omega[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (count - 1));
    }
    return g;
  }

  /// 400 log-spaced points on [1e-4, 1e4].
  static FrequencyGrid default_grid() { return logspace(1e-4, 1e4, 400); }

  void check() const {
    if (omega.size() < 2) throw ArgumentError("frequency grid needs at least two points");
    for (std::size_t k = 1; k < omega.size(); ++k) {
      if (!(omega[k] > omega[k - 1])) throw ArgumentError("frequency grid must be strictly ascending");
    }
  }
};

struct FrequencyResponse {
  FrequencyGrid grid;
  std::vector<ComplexMatrix> values;  // H(i omega_k)
};

inline FrequencyResponse frequency_response(const TransferFunction& h, const FrequencyGrid& grid) {
  grid.check();
  FrequencyResponse out{grid, {}};
  out.values.reserve(grid.omega.size());
  for (double w : grid.omega) out.values.push_back(h(Complex(0.0, w)));
  return out;
}

/// CSV: omega, then re/im of each entry H_jk (row-major), one row per point.
inline void write_frequency_response_csv(std::ostream& os, const FrequencyResponse& fr) {
  if (fr.values.empty()) return;
  const Eigen::Index p = fr.values.front().rows(), m = fr.values.front().cols();
  os << "omega";
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      os << ",re_H" << j + 1 << k + 1 << ",im_H" << j + 1 << k + 1;
    }
  }
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < fr.values.size(); ++i) {
    os << fr.grid.omega[i];
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) os << ',' << fr.values[i](j, k).real() << ',' << fr.values[i](j, k).imag();
    }
    os << '\n';
  }
  os.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Error norms

inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> dec(m);
  return dec.singularValues()(0);
}

struct HinfError {
  double absolute = 0.0;
  double relative = 0.0;
  double argmax_omega = 0.0;
};

namespace detail {

/// Linear growth of the error over the top of the grid means the polynomial
/// parts differ in their s-term and the supremum is infinite.
inline bool tail_diverges(const std::vector<double>& omega, const std::vector<double>& err) {
  const std::size_t k = omega.size();
  const std::size_t tail = std::max<std::size_t>(5, k / 10);
  if (k < tail + 1) return false;
  const std::size_t start = k - tail;
  for (std::size_t i = start + 1; i < k; ++i) {
    if (!(err[i] > err[i - 1])) return false;
  }
  const double w_ratio = omega[k - 1] / omega[start];
  const double e_ratio = err[start] > 0.0 ? err[k - 1] / err[start] : std::numeric_limits<double>::infinity();
  return w_ratio >= 2.0 && e_ratio >= 0.5 * w_ratio;
}

}  // namespace detail

/// Grid supremum of ||H(iw) - Hr(iw)||_2, absolute and relative to sup ||H(iw)||_2.
inline HinfError hinf_error(const FrequencyResponse& full, const TransferFunction& reduced) {
  HinfError out;
  double hmax = 0.0;
  std::vector<double> err(full.values.size());
  for (std::size_t k = 0; k < full.values.size(); ++k) {
    const ComplexMatrix hr = reduced(Complex(0.0, full.grid.omega[k]));
    if (hr.rows() != full.values[k].rows() || hr.cols() != full.values[k].cols()) {
      throw DimensionError("hinf_error: full and reduced transfer functions differ in shape");
    }
    err[k] = spectral_norm(full.values[k] - hr);
    hmax = std::max(hmax, spectral_norm(full.values[k]));
    if (err[k] > out.absolute) {
      out.absolute = err[k];
      out.argmax_omega = full.grid.omega[k];
    }
  }
  if (detail::tail_diverges(full.grid.omega, err)) {
    throw PolynomialMismatchError("hinf_error: error grows linearly at high frequency; polynomial parts differ");
  }
  out.relative = hmax > 0.0 ? out.absolute / hmax : out.absolute;
  return out;
}

inline HinfError hinf_error(const TransferFunction& full, const TransferFunction& reduced,
                            const FrequencyGrid& grid = FrequencyGrid::default_grid()) {
  return hinf_error(frequency_response(full, grid), reduced);
}

struct H2Options {
  double log_omega_min = -23.0;  // natural log of the lower integration limit, about 1e-10
  double log_omega_max = 23.0;
  double rel_tol = 1e-10;
  unsigned max_depth = 12;
  double probe_omega = 1e8;        // where the polynomial parts are compared
  double mismatch_tol = 1e-6;      // relative to 1 + ||H(i probe_omega)||
};

/// sqrt( (1/2pi) int_R ||G(iw)||_F^2 dw ), using conjugate symmetry to integrate
/// over w > 0 only, in the variable t = ln w, split into unit-length panels.
inline double h2_norm(const TransferFunction& g, const H2Options& opt = {}) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double t) {
    const double w = std::exp(t);
    const ComplexMatrix v = g(Complex(0.0, w));
    return v.squaredNorm() * w;
  };
  double total = 0.0;
  for (double a = opt.log_omega_min; a < opt.log_omega_max; a += 1.0) {
    const double b = std::min(a + 1.0, opt.log_omega_max);
    total += gauss_kronrod<double, 15>::integrate(integrand, a, b, opt.max_depth, opt.rel_tol);
  }
  return std::sqrt(std::max(total, 0.0) / M_PI);
}

/// H2 distance between two models. Throws PolynomialMismatchError when the
/// difference does not decay at high frequency.
inline double h2_error(const TransferFunction& full, const TransferFunction& reduced, const H2Options& opt = {}) {
  const Complex probe(0.0, opt.probe_omega);
  const ComplexMatrix hf = full(probe);
  const ComplexMatrix hr = reduced(probe);
  if (hf.rows() != hr.rows() || hf.cols() != hr.cols()) {
    throw DimensionError("h2_error: full and reduced transfer functions differ in shape");
  }
  const double gap = spectral_norm(hf - hr);
  if (gap > opt.mismatch_tol * (1.0 + spectral_norm(hf))) {
    throw PolynomialMismatchError("h2_error: polynomial parts differ (gap " + num(gap) + " at omega = " +
                                  num(opt.probe_omega) + "); H2 distance is infinite");
  }
  return h2_norm([&](Complex s) { return ComplexMatrix(full(s) - reduced(s)); }, opt);
}

}  // namespace phmor
