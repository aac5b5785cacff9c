#pragma once

// Experiment driver: system sources, reduction sweeps and on-disk artifacts.

#include <memory>
#include <optional>

#include "phmor/io.hpp"
#include "phmor/irka.hpp"
#include "phmor/regularize.hpp"

namespace phmor {

/// A failure inside a named stage of an experiment run.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& detail)
      : Error("stage '" + stage + "' failed: " + detail), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// ---------------------------------------------------------------------------
// Hand-sized fixtures

/// E = diag(1, 0), J = [0 1; -1 0], R = diag(0, 1), B = [2; 1]:  H(s) = (s + 4)/(s + 1).
inline Index1Benchmark fixture_index1() {
  RealMatrix e(2, 2), j(2, 2), r(2, 2), b(2, 1);
  e << 1, 0, 0, 0;
  j << 0, 1, -1, 0;
  r << 0, 0, 0, 1;
  b << 2, 1;
  return {PHDAESystem(e, j, r, b, RealMatrix(), RealMatrix(), RealMatrix()), 1};
}

/// E = diag(1, 1, 0), J = [0 1 0; -1 0 1; 0 -1 0], R = diag(1, 0, 0), B = e1:  H(s) = 1/(s + 1).
inline Index2Benchmark fixture_index2() {
  RealMatrix e = RealMatrix::Zero(3, 3), j(3, 3), r = RealMatrix::Zero(3, 3), b = RealMatrix::Zero(3, 1);
  e(0, 0) = e(1, 1) = 1.0;
  j << 0, 1, 0, -1, 0, 1, 0, -1, 0;
  r(0, 0) = 1.0;
  b(0, 0) = 1.0;
  return {PHDAESystem(e, j, r, b, RealMatrix(), RealMatrix(), RealMatrix()), 2};
}

// ---------------------------------------------------------------------------
// Generator specs: "name" or "name:key=value,key=value"

struct GeneratorSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;

  static GeneratorSpec parse(const std::string& text) {
    GeneratorSpec g;
    const auto colon = text.find(':');
    g.name = text.substr(0, colon);
    if (colon == std::string::npos) return g;
    std::istringstream rest(text.substr(colon + 1));
    for (std::string tok; std::getline(rest, tok, ',');) {
      if (tok.empty()) continue;
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ArgumentError("generator parameter '" + tok + "' is not key=value");
      g.params.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return g;
  }

  double number(const std::string& key, double fallback) const {
    for (const auto& [k, v] : params) {
      if (k != key) continue;
      try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
      } catch (const std::exception&) {
        throw ArgumentError("generator parameter " + key + "='" + v + "' is not a number");
      }
    }
    return fallback;
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw ArgumentError("generator '" + name + "' has no parameter '" + k + "'");
    }
  }
};

/// A system with its partition sizes and index class.
struct SystemSource {
  SparsePHDAE sparse;
  Eigen::Index n1 = 0, n2 = 0, n3 = 0;
  std::string index_class = "unknown";  // index1, index2, mixed, unknown

  Manifest manifest() const {
    Manifest mf;
    mf.set("n", static_cast<long long>(sparse.n()));
    mf.set("m", static_cast<long long>(sparse.m()));
    mf.set("n1", static_cast<long long>(n1));
    mf.set("n2", static_cast<long long>(n2));
    mf.set("n3", static_cast<long long>(n3));
    mf.set("index_class", index_class);
    return mf;
  }
};

inline const char* kGeneratorHelp =
    "mass-spring[:k=,mass=,spring=,damper=,ground-spring=,ground-damper=,amplitude=]  index-2 chain\n"
    "mass-spring-mixed[:k=,...,relaxation=]                                        chain in mixed form\n"
    "oseen[:n=,viscosity=,wind-x=,wind-y=,split=]                                  MAC-grid Oseen\n"
    "random-index1[:n1=,n2=,m=,seed=]                                              random index-1 pH\n"
    "fixture-index1 | fixture-index2                                               hand-sized fixtures";

inline SystemSource generate_system(const std::string& text, std::uint64_t seed = 1) {
  const GeneratorSpec g = GeneratorSpec::parse(text);
  SystemSource out;
  auto chain_spec = [&]() {
    MassSpringSpec s;
    s.k = static_cast<int>(g.number("k", s.k));
    s.mass = g.number("mass", s.mass);
    s.spring = g.number("spring", s.spring);
    s.damper = g.number("damper", s.damper);
    s.ground_spring = g.number("ground-spring", s.ground_spring);
    s.ground_damper = g.number("ground-damper", s.ground_damper);
    if (s.k < 2) throw ArgumentError("mass-spring: k >= 2 required");
    return s;
  };
  if (g.name == "mass-spring") {
    g.allow_only({"k", "mass", "spring", "damper", "ground-spring", "ground-damper", "amplitude"});
    const MassSpringSpec s = chain_spec();
    out.sparse = mass_spring_chain_sparse(s, g.number("amplitude", 0.0));
    out.n1 = out.sparse.n1;
    out.n2 = out.sparse.n() - out.n1;
    out.index_class = "index2";
  } else if (g.name == "mass-spring-mixed") {
    g.allow_only({"k", "mass", "spring", "damper", "ground-spring", "ground-damper", "relaxation"});
    const MixedBenchmark b = mass_spring_mixed(chain_spec(), g.number("relaxation", 0.1));
    out.sparse = to_sparse(b.system, b.n1);
    out.n1 = b.n1;
    out.n2 = b.n2;
    out.n3 = b.system.n() - b.n1 - b.n2;
    out.index_class = "mixed";
  } else if (g.name == "oseen") {
    g.allow_only({"n", "viscosity", "wind-x", "wind-y", "split"});
    OseenSpec s;
    s.n_grid = static_cast<int>(g.number("n", s.n_grid));
    s.viscosity = g.number("viscosity", s.viscosity);
    s.wind_x = g.number("wind-x", s.wind_x);
    s.wind_y = g.number("wind-y", s.wind_y);
    s.forcing_split = g.number("split", s.forcing_split);
    out.sparse = oseen_grid_sparse(s);
    out.n1 = out.sparse.n1;
    out.n2 = out.sparse.n() - out.n1;
    out.index_class = "index2";
  } else if (g.name == "random-index1") {
    g.allow_only({"n1", "n2", "m", "seed"});
    const auto n1 = static_cast<Eigen::Index>(g.number("n1", 10));
    const auto n2 = static_cast<Eigen::Index>(g.number("n2", 5));
    const auto m = static_cast<Eigen::Index>(g.number("m", 1));
    const auto s = static_cast<std::uint64_t>(g.number("seed", static_cast<double>(seed)));
    const Index1Benchmark b = random_ph_index1(n1, n2, m, s);
    out.sparse = to_sparse(b.system, b.n1);
    out.n1 = n1;
    out.n2 = n2;
    out.index_class = "index1";
  } else if (g.name == "fixture-index1" || g.name == "fixture-index2") {
    g.allow_only({});
    const bool one = g.name == "fixture-index1";
    const PHDAESystem sys = one ? fixture_index1().system : fixture_index2().system;
    out.n1 = one ? 1 : 2;
    out.sparse = to_sparse(sys, out.n1);
    out.n2 = sys.n() - out.n1;
    out.index_class = one ? "index1" : "index2";
  } else {
    throw ArgumentError("unknown generator '" + g.name + "'; available:\n" + kGeneratorHelp);
  }
  return out;
}

inline SystemSource load_container(const fs::path& dir) {
  const Container c = read_container(dir);
  SystemSource out;
  out.sparse = c.system;
  out.n1 = c.manifest.get_int("n1", 0);
  out.n2 = c.manifest.get_int("n2", 0);
  out.n3 = c.manifest.get_int("n3", 0);
  out.index_class = c.index_class();
  return out;
}

/// Owns the dense system so partition views stay valid.
class PartitionedSystem {
 public:
  explicit PartitionedSystem(const SystemSource& src) : sys_(std::make_unique<PHDAESystem>(src.sparse.to_dense())) {
    if (src.index_class == "index1") {
      part_.emplace(Index1Partition(*sys_, src.n1));
    } else if (src.index_class == "index2") {
      part_.emplace(Index2Partition(*sys_, src.n1));
    } else if (src.index_class == "mixed") {
      part_.emplace(MixedPartition(*sys_, src.n1, src.n2));
    } else {
      throw ArgumentError("index_class '" + src.index_class + "' has no reducer (expected index1, index2 or mixed)");
    }
  }

  const PHDAESystem& system() const { return *sys_; }
  const AnyPartition& partition() const { return *part_; }

  /// Default reducer for the partition kind.
  ReductionMethod default_method() const {
    if (std::holds_alternative<Index1Partition>(*part_)) return ReductionMethod::index1_blockdiag;
    if (const auto* p = std::get_if<Index2Partition>(&*part_)) {
      return p->b2_zero() ? ReductionMethod::index2_zero_b2 : ReductionMethod::index2_nonzero_b2;
    }
    return ReductionMethod::mixed;
  }

 private:
  std::unique_ptr<PHDAESystem> sys_;
  std::optional<AnyPartition> part_;
};

// ---------------------------------------------------------------------------
// Experiment configuration

/// "lo:hi:count" with count log-spaced points, or "a:b:step" integer ranges.
struct RangeSpec {
  static std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::vector<long> parts;
    for (std::string tok; std::getline(in, tok, ':');) {
      try {
        parts.push_back(std::stol(tok));
      } catch (const std::exception&) {
        throw ArgumentError("range '" + text + "': '" + tok + "' is not an integer");
      }
    }
    if (parts.size() == 1) parts = {parts[0], parts[0], 1};
    if (parts.size() == 2) parts.push_back(1);
    if (parts.size() != 3 || parts[2] < 1 || parts[1] < parts[0]) {
      throw ArgumentError("range '" + text + "' must be first:last[:step] with first <= last and step >= 1");
    }
    for (long v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(static_cast<int>(v));
    return out;
  }

  static FrequencyGrid parse_grid(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> parts;
    for (std::string tok; std::getline(in, tok, ':');) {
      try {
        parts.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ArgumentError("frequency grid '" + text + "': '" + tok + "' is not a number");
      }
    }
    if (parts.size() != 3) throw ArgumentError("frequency grid must be lo:hi:count");
    return FrequencyGrid::logspace(parts[0], parts[1], static_cast<int>(parts[2]));
  }
};

/// Initial interpolation data: "log:lo:hi" (r log-spaced reals) or "points:s1,s2,..."
/// (complex points as re[+imj]; conjugates must be listed).
struct InitSpec {
  bool log = true;
  double lo = 1e-2, hi = 1e4;
  std::vector<Complex> points;

  static InitSpec parse(const std::string& text) {
    InitSpec s;
    if (text.rfind("log:", 0) == 0) {
      const FrequencyGrid g = RangeSpec::parse_grid(text.substr(4) + ":2");
      s.lo = g.omega.front();
      s.hi = g.omega.back();
      return s;
    }
    if (text.rfind("points:", 0) == 0) {
      s.log = false;
      std::istringstream in(text.substr(7));
      for (std::string tok; std::getline(in, tok, ',');) {
        double re = 0.0, im = 0.0;
        std::size_t used = 0;
        try {
          re = std::stod(tok, &used);
          if (used < tok.size()) {
            std::size_t used2 = 0;
            const std::string tail = tok.substr(used);
            im = std::stod(tail, &used2);
            if (tail.substr(used2) != "j") throw std::invalid_argument(tok);
          }
        } catch (const std::exception&) {
          throw ArgumentError("interpolation point '" + tok + "' is not of the form re[+imj]");
        }
        s.points.emplace_back(re, im);
      }
      if (s.points.empty()) throw ArgumentError("points: list is empty");
      return s;
    }
    throw ArgumentError("initialization '" + text + "' must be log:lo:hi or points:s1,s2,...");
  }

  InterpolationData data(int r, Eigen::Index m) const {
    if (log) return InterpolationData::log_spaced(lo, hi, r, m);
    if (static_cast<int>(points.size()) != r) {
      throw ArgumentError("points: list has " + std::to_string(points.size()) + " entries but r = " + std::to_string(r));
    }
    return InterpolationData::with_ones(points, m);
  }
};

struct ExperimentConfig {
  std::optional<std::string> generator;    // generator spec
  std::optional<fs::path> container;       // container directory
  std::string method = "auto";             // reducer name, "irka-<reducer>", "irka" or "auto"
  std::vector<int> r_values{10};
  FrequencyGrid grid = FrequencyGrid::default_grid();
  InitSpec init;
  fs::path out_dir = "phmor-out";
  std::uint64_t seed = 1;
  bool h2 = false;
  bool write_models = true;
  int max_iterations = 100;
  double tolerance = 1e-6;

  void check() const {
    if (generator.has_value() == container.has_value()) {
      throw ArgumentError("exactly one system source (generator or container) is required");
    }
    if (r_values.empty()) throw ArgumentError("at least one r value is required");
    for (int r : r_values) {
      if (r < 1) throw ArgumentError("r values must be >= 1");
    }
    grid.check();
  }
};

struct ExperimentRow {
  int r = 0;
  double interp_residual_max = 0.0;
  double min_eig_W = 0.0;
  double rel_hinf = 0.0;
  std::optional<double> rel_h2;
  bool converged = true;
  int iterations = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> warnings;
};

inline void write_errors_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << "r,interp_residual_max,min_eig_W,rel_hinf,rel_h2,converged,iterations\n";
  const auto old = os.precision(12);
  for (const auto& row : rows) {
    os << row.r << ',' << row.interp_residual_max << ',' << row.min_eig_W << ',' << row.rel_hinf << ',';
    if (row.rel_h2) os << *row.rel_h2;
    os << ',' << (row.converged ? 1 : 0) << ',' << row.iterations << '\n';
  }
  os.precision(old);
}

namespace detail {

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ParseError(p.string(), 0, "cannot open file for writing");
  return os;
}

}  // namespace detail

/// Runs the configured reductions and writes errors.csv, freq_full.csv and,
/// per r, freq_r<r>.csv, model_r<r>/ and (for IRKA) trace_r<r>.csv.
inline ExperimentResult run(const ExperimentConfig& cfg) {
  detail::stage("config", [&] { cfg.check(); });
  const SystemSource src = detail::stage("load", [&] {
    return cfg.generator ? generate_system(*cfg.generator, cfg.seed) : load_container(*cfg.container);
  });
  const PartitionedSystem ps = detail::stage("partition", [&] { return PartitionedSystem(src); });
  bool irka = false;
  ReductionMethod method = ps.default_method();
  detail::stage("method", [&] {
    std::string name = cfg.method;
    if (name == "irka") {
      irka = true;
      name = "auto";
    } else if (name.rfind("irka-", 0) == 0) {
      irka = true;
      name = name.substr(5);
    }
    if (name != "auto") method = parse_reduction_method(name);
  });
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw StageError("output", "cannot create " + cfg.out_dir.string() + ": " + ec.message());

  const TransferFunction full = transfer_of(ps.system());
  const FrequencyResponse full_resp = detail::stage("full response", [&] { return frequency_response(full, cfg.grid); });
  {
    auto os = detail::open_out(cfg.out_dir / "freq_full.csv");
    write_frequency_response_csv(os, full_resp);
  }
  std::optional<double> full_h2;

  ExperimentResult result;
  const Eigen::Index m = ps.system().m();
  for (int r : cfg.r_values) {
    const std::string tag = "r=" + std::to_string(r);
    ExperimentRow row;
    row.r = r;
    ReducedModel red;
    InterpolationData used;
    if (irka) {
      IRKAConfig ic;
      ic.r = r;
      ic.max_iterations = cfg.max_iterations;
      ic.tolerance = cfg.tolerance;
      ic.initial = cfg.init.data(r, m);
      IRKAResult ir = detail::stage("irka " + tag, [&] { return irka_reduce(ps.partition(), method, ic); });
      red = std::move(ir.model);
      used = std::move(ir.data);
      row.converged = ir.trace.converged;
      row.iterations = static_cast<int>(ir.trace.iterations.size());
      for (auto& w : ir.warnings) result.warnings.push_back(tag + ": " + w);
      auto os = detail::open_out(cfg.out_dir / ("trace_r" + std::to_string(r) + ".csv"));
      write_trace_csv(os, ir.trace);
    } else {
      used = detail::stage("interpolation data " + tag, [&] { return cfg.init.data(r, m); });
      red = detail::stage("reduce " + tag, [&] { return reduce(ps.partition(), method, used, {}); });
    }
    for (const auto& w : red.warnings) result.warnings.push_back(tag + ": " + w);
    const TransferFunction hr = red.transfer();
    row.min_eig_W = red.min_eig_W;
    row.interp_residual_max = detail::stage("interpolation check " + tag, [&] {
      return interpolation_residual(full, hr, used);
    });
    row.rel_hinf = detail::stage("hinf " + tag, [&] { return hinf_error(full_resp, hr).relative; });
    if (cfg.h2) {
      try {
        if (!full_h2) full_h2 = h2_norm(full);
        row.rel_h2 = h2_error(full, hr) / std::max(*full_h2, 1e-300);
      } catch (const PolynomialMismatchError& e) {
        row.rel_h2 = std::numeric_limits<double>::infinity();
        result.warnings.push_back(tag + ": " + e.what());
      }
    }
    detail::stage("write " + tag, [&] {
      auto os = detail::open_out(cfg.out_dir / ("freq_r" + std::to_string(r) + ".csv"));
      write_frequency_response_csv(os, frequency_response(hr, cfg.grid));
      if (cfg.write_models) write_reduced_model(cfg.out_dir / ("model_r" + std::to_string(r)), red);
    });
    result.rows.push_back(row);
  }
  auto os = detail::open_out(cfg.out_dir / "errors.csv");
  write_errors_csv(os, result.rows);
  return result;
}

}  // namespace phmor
