// phmor: generate, validate, reduce, regularize and sweep pH descriptor systems.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "phmor/phmor.hpp"

namespace {

using namespace phmor;

constexpr Eigen::Index kDenseValidationLimit = 3000;
constexpr Eigen::Index kDiagnoseLimit = 1500;

fs::path default_out_dir(const std::string& fallback) {
  if (const char* env = std::getenv("PHMOR_OUT_DIR"); env && *env) return fs::path(env) / fallback;
  return fallback;
}

void print_report(const ValidationReport& rep) {
  for (const auto& e : rep.entries) {
    std::cout << (e.passed ? "pass  " : "FAIL  ") << e.condition << "  (violation " << e.violation << ", measured "
              << e.measured << ")";
    if (!e.detail.empty()) std::cout << "  " << e.detail;
    std::cout << '\n';
  }
}

void print_diagnosis(const DiagnosisReport& d) {
  auto line = [](const char* name, const RankCheck& c) {
    std::cout << (c.passed ? "pass  " : "FAIL  ") << name << "  " << c.detail << '\n';
  };
  std::cout << (d.pencil_regular ? "pass  " : "FAIL  ") << "pencil regular";
  if (d.pencil_regular) std::cout << "  (witness lambda = " << d.witness << ")";
  std::cout << '\n';
  line("C1", d.c1);
  line("O1", d.o1);
  line("C2", d.c2);
  line("O2", d.o2);
  std::cout << (d.index_leq1 ? "yes   " : "no    ") << "index <= 1\n";
  for (const auto& n : d.notes) std::cout << "note: " << n << '\n';
}

int cmd_generate(const std::string& spec, const fs::path& out, std::uint64_t seed) {
  const SystemSource src = generate_system(spec, seed);
  Manifest mf = src.manifest();
  mf.set("generator", spec);
  write_container(out, src.sparse, mf);
  std::cout << "wrote " << out.string() << "  (n = " << src.sparse.n() << ", m = " << src.sparse.m()
            << ", index_class = " << src.index_class << ")\n";
  return 0;
}

int cmd_validate(const fs::path& path, double tol) {
  const Container c = read_container(path);
  for (const auto& name : c.missing) std::cout << "note: " << name << ".mtx absent, taken as zero\n";
  bool ok = true;
  if (c.system.n() <= kDenseValidationLimit) {
    const PHDAESystem sys = c.system.to_dense();
    const ValidationReport rep = validate_structure(sys, tol);
    print_report(rep);
    ok = rep.all_passed();
    if (sys.n() <= kDiagnoseLimit) {
      const DiagnosisReport d = diagnose(sys);
      print_diagnosis(d);
      if (!d.pencil_regular) std::cout << "concern: pencil is singular; transfer function is undefined\n";
    }
  } else {
    const ValidationReport rep = validate_structure_sparse(c.system, std::max(tol, 1e-8));
    print_report(rep);
    ok = rep.all_passed();
    std::cout << "note: sparse validation (n = " << c.system.n() << "); rank diagnostics skipped\n";
  }
  std::cout << (ok ? "valid pHDAE\n" : "NOT a valid pHDAE\n");
  return ok ? 0 : 1;
}

RealMatrix parse_feedback(const std::string& text, Eigen::Index m) {
  std::string v = text;
  if (v.rfind("K=", 0) == 0) v = v.substr(2);
  if (v == "I") return RealMatrix::Identity(m, m);
  std::size_t used = 0;
  double scale = 0.0;
  try {
    scale = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == v.size() && used > 0) return scale * RealMatrix::Identity(m, m);
  if (v.size() > 2 && v.substr(v.size() - 2) == "*I") return std::stod(v.substr(0, v.size() - 2)) * RealMatrix::Identity(m, m);
  if (fs::exists(v)) return RealMatrix(read_matrix_market(fs::path(v)));
  throw ArgumentError("feedback '" + text + "' must be K=I, K=<scalar>, K=<scalar>*I or a Matrix Market file");
}

int cmd_regularize(const fs::path& path, const fs::path& out, bool condensed, const std::string& feedback) {
  const Container c = read_container(path);
  const PHDAESystem sys = c.system.to_dense();
  const SingularPartRemoval rem = remove_singular_part(sys);
  std::cout << "dropped " << rem.dropped << "\n"
            << "n_regular " << rem.n_regular << "\n"
            << "n_input_only " << rem.n_input_only << "\n";
  if (rem.dropped == 0) std::cout << "note: no singular part; system copied unchanged\n";
  PHDAESystem result = rem.system;
  Manifest mf;
  mf.set("source", path.string());
  mf.set("dropped", static_cast<long long>(rem.dropped));
  if (condensed) {
    const CondensedForm form = condensed_form(result);
    std::cout << format_condensed_report(form);
    result = form.system;
    mf.set("n_dyn", static_cast<long long>(form.sizes.n_dyn));
    mf.set("n_alg1_diss", static_cast<long long>(form.sizes.n_alg1_diss));
    mf.set("n_alg1_cons", static_cast<long long>(form.sizes.n_alg1_cons));
    mf.set("n_ind2", static_cast<long long>(form.sizes.n_ind2));
    mf.set("n_sing", static_cast<long long>(form.sizes.n_sing));
  }
  if (!feedback.empty()) {
    result = output_feedback_regularize(result, parse_feedback(feedback, result.m()));
    mf.set("feedback", feedback);
    if (result.n() <= kDiagnoseLimit) {
      const DiagnosisReport d = diagnose(result);
      std::cout << "closed loop: pencil " << (d.pencil_regular ? "regular" : "singular") << ", index <= 1: "
                << (d.index_leq1 ? "yes" : "no") << '\n';
    }
  }
  mf.set("index_class", std::string("unknown"));
  write_container(out, result, mf);
  std::cout << "wrote " << out.string() << "  (n = " << result.n() << ")\n";
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  const ExperimentResult res = run(cfg);
  write_errors_csv(std::cout, res.rows);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "artifacts in " << cfg.out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving interpolatory model reduction for port-Hamiltonian descriptor systems"};
  app.require_subcommand(1);

  std::string gen_spec;
  fs::path gen_out;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("generate", "Write a benchmark system container");
  gen->add_option("spec", gen_spec, std::string("Generator spec:\n") + kGeneratorHelp)->required();
  gen->add_option("--out", gen_out, "Output directory (default $PHMOR_OUT_DIR/<generator>)");
  gen->add_option("--seed", seed, "Seed for random generators");

  fs::path val_path;
  double val_tol = 1e-10;
  auto* val = app.add_subcommand("validate", "Check the pHDAE structure of a container");
  val->add_option("path", val_path, "Container directory")->required();
  val->add_option("--tol", val_tol, "Structural tolerance");

  fs::path reg_path, reg_out;
  bool reg_condensed = false;
  std::string reg_feedback;
  auto* reg = app.add_subcommand("regularize", "Remove the singular part; optionally condense or close a feedback loop");
  reg->add_option("path", reg_path, "Container directory")->required();
  reg->add_option("--out", reg_out, "Output directory (default $PHMOR_OUT_DIR/regularized)");
  reg->add_flag("--condensed", reg_condensed, "Also transform to the condensed staircase form");
  reg->add_option("--feedback", reg_feedback, "Output feedback u = -K y + v: K=I, K=<scalar> or a .mtx file");

  ExperimentConfig cfg;
  std::string system_spec, container_path, r_sweep, freq_grid, init_spec;
  int r_single = 0;
  auto add_common = [&](CLI::App* sub) {
    auto* g = sub->add_option("--system", system_spec, std::string("Generator spec:\n") + kGeneratorHelp);
    auto* c = sub->add_option("--container", container_path, "Container directory");
    g->excludes(c);
    sub->add_option("--method", cfg.method,
                    "index1-shifted | index1-blockdiag | index2 | index2-b2 | mixed, optionally prefixed irka-; "
                    "auto picks by index class")
        ->capture_default_str();
    sub->add_option("--freq-grid", freq_grid, "lo:hi:count log-spaced evaluation grid (default 1e-4:1e4:400)");
    sub->add_option("--init", init_spec, "log:lo:hi or points:s1,s2,... (default log:1e-2:1e4)");
    sub->add_option("--seed", cfg.seed, "Seed for random generators");
    sub->add_option("--out", cfg.out_dir, "Output directory (default $PHMOR_OUT_DIR/<subcommand>)");
    sub->add_flag("--h2", cfg.h2, "Also compute relative H2 errors");
    sub->add_option("--max-iterations", cfg.max_iterations, "IRKA iteration cap")->capture_default_str();
    sub->add_option("--tolerance", cfg.tolerance, "IRKA convergence tolerance")->capture_default_str();
  };
  auto* red = app.add_subcommand("reduce", "Reduce to a single order r");
  add_common(red);
  red->add_option("--r", r_single, "Reduced order")->required();
  auto* sweep = app.add_subcommand("sweep", "Reduce over a range of orders");
  add_common(sweep);
  sweep->add_option("--r-sweep", r_sweep, "first:last[:step]")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_spec, gen_out.empty() ? default_out_dir(GeneratorSpec::parse(gen_spec).name) : gen_out,
                          seed);
    }
    if (val->parsed()) return cmd_validate(val_path, val_tol);
    if (reg->parsed()) {
      return cmd_regularize(reg_path, reg_out.empty() ? default_out_dir("regularized") : reg_out, reg_condensed,
                            reg_feedback);
    }
    CLI::App* sub = red->parsed() ? red : sweep;
    if (!system_spec.empty()) cfg.generator = system_spec;
    if (!container_path.empty()) cfg.container = fs::path(container_path);
    cfg.r_values = red->parsed() ? std::vector<int>{r_single} : RangeSpec::parse_ints(r_sweep);
    if (!freq_grid.empty()) cfg.grid = RangeSpec::parse_grid(freq_grid);
    if (!init_spec.empty()) cfg.init = InitSpec::parse(init_spec);
    if (sub->count("--out") == 0) cfg.out_dir = default_out_dir(sub->get_name());
    return cmd_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
