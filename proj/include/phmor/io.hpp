#pragma once

// Matrix Market files and the on-disk system container:
//
//   <dir>/manifest.txt   key = value lines (n, m, n1, n2, n3, index_class, ...)
//   <dir>/E.mtx ... N.mtx one coordinate Matrix Market file per matrix; absent means zero
//
// Reduced models add theorem, ph_valid, augmented_input, min_eig_W and blocks to
// the manifest, plus P0.mtx, P1.mtx and Drate.mtx.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "phmor/benchmarks.hpp"
#include "phmor/reduced_model.hpp"

namespace phmor {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Matrix Market

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

/// Reads `matrix coordinate|array real|integer general|symmetric|skew-symmetric`.
inline SparseMatrix read_matrix_market(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError(name, 1, "empty file");
  ++lineno;
  std::istringstream banner(detail::lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw ParseError(name, lineno, "missing %%MatrixMarket matrix banner");
  if (format != "coordinate" && format != "array") throw ParseError(name, lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError(name, lineno, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw ParseError(name, lineno, "unsupported symmetry '" + symmetry + "'");
  }
  do {
    if (!std::getline(in, line)) throw ParseError(name, lineno, "missing size line");
    ++lineno;
  } while (detail::blank_or_comment(line));

  std::istringstream size_line(line);
  long rows = -1, cols = -1, nnz = -1;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> nnz;
  if (size_line.fail() || rows < 0 || cols < 0 || (format == "coordinate" && nnz < 0)) {
    throw ParseError(name, lineno, "malformed size line '" + line + "'");
  }
  const bool sym = symmetry == "symmetric", skew = symmetry == "skew-symmetric";
  if ((sym || skew) && rows != cols) throw ParseError(name, lineno, symmetry + " matrix must be square");
  std::vector<Triplet> t;
  auto push = [&](long i, long j, double v) {
    t.emplace_back(i, j, v);
    if (i != j && sym) t.emplace_back(j, i, v);
    if (i != j && skew) t.emplace_back(j, i, -v);
  };
  auto next_data_line = [&]() {
    do {
      if (!std::getline(in, line)) throw ParseError(name, lineno, "unexpected end of file");
      ++lineno;
    } while (detail::blank_or_comment(line));
  };
  if (format == "coordinate") {
    t.reserve(static_cast<std::size_t>(sym || skew ? 2 * nnz : nnz));
    for (long k = 0; k < nnz; ++k) {
      next_data_line();
      std::istringstream ls(line);
      long i = 0, j = 0;
      double v = 0.0;
      ls >> i >> j >> v;
      if (ls.fail()) throw ParseError(name, lineno, "malformed entry '" + line + "'");
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(name, lineno, "index out of range");
      if (!std::isfinite(v)) throw ParseError(name, lineno, "non-finite value");
      push(i - 1, j - 1, v);
    }
  } else {
    for (long j = 0; j < cols; ++j) {
      const long first = sym ? j : (skew ? j + 1 : 0);
      for (long i = first; i < rows; ++i) {
        next_data_line();
        std::istringstream ls(line);
        double v = 0.0;
        ls >> v;
        if (ls.fail()) throw ParseError(name, lineno, "malformed value '" + line + "'");
        if (!std::isfinite(v)) throw ParseError(name, lineno, "non-finite value");
        if (v != 0.0) push(i, j, v);
      }
    }
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

inline SparseMatrix read_matrix_market(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_matrix_market(in, path.string());
}

/// Coordinate real general, nonzeros only, 17 significant digits.
inline void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  const auto old = os.precision(17);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  }
  os.precision(old);
}

inline void write_matrix_market(std::ostream& os, const RealMatrix& m) {
  write_matrix_market(os, SparseMatrix(m.sparseView(0.0, 0.0)));
}

template <typename M>
void write_matrix_market(const fs::path& path, const M& m) {
  std::ofstream os(path);
  if (!os) throw ParseError(path.string(), 0, "cannot open file for writing");
  write_matrix_market(os, m);
  if (!os) throw ParseError(path.string(), 0, "write failed");
}

// ---------------------------------------------------------------------------
// Manifest

/// Ordered key/value list; keys are unique.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& kv : entries_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }
  void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
  void set(const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(17) << value;
    set(key, os.str());
  }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

  bool has(const std::string& key) const {
    for (const auto& kv : entries_) {
      if (kv.first == key) return true;
    }
    return false;
  }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    for (const auto& kv : entries_) {
      if (kv.first == key) return kv.second;
    }
    return fallback;
  }
  long long get_int(const std::string& key, long long fallback = 0) const {
    if (!has(key)) return fallback;
    try {
      return std::stoll(get(key));
    } catch (const std::exception&) {
      throw ParseError(source_, 0, "manifest key '" + key + "' is not an integer");
    }
  }
  double get_double(const std::string& key, double fallback = 0.0) const {
    if (!has(key)) return fallback;
    try {
      return std::stod(get(key));
    } catch (const std::exception&) {
      throw ParseError(source_, 0, "manifest key '" + key + "' is not a number");
    }
  }
  bool get_bool(const std::string& key, bool fallback = false) const {
    if (!has(key)) return fallback;
    const std::string v = detail::lower(get(key));
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(source_, 0, "manifest key '" + key + "' is not a boolean");
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
  }

  static Manifest read(std::istream& in, const std::string& name) {
    Manifest out;
    out.source_ = name;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(name, lineno, "expected 'key = value'");
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ParseError(name, lineno, "empty key");
      out.set(key, trim(line.substr(eq + 1)));
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_ = "manifest.txt";
};

// ---------------------------------------------------------------------------
// System container

inline constexpr const char* kManifestFile = "manifest.txt";
inline constexpr std::array<const char*, 7> kMatrixNames = {"E", "J", "R", "B", "P", "S", "N"};

struct Container {
  SparsePHDAE system;
  Manifest manifest;
  std::vector<std::string> missing;  // matrix files absent on disk, taken as zero

  /// "index1", "index2", "mixed" or "unknown".
  std::string index_class() const { return manifest.get("index_class", "unknown"); }
};

namespace detail {

inline const SparseMatrix& sparse_member(const SparsePHDAE& s, std::size_t k) {
  const SparseMatrix* ms[] = {&s.E, &s.J, &s.R, &s.B, &s.P, &s.S, &s.N};
  return *ms[k];
}

inline SparseMatrix& sparse_member(SparsePHDAE& s, std::size_t k) {
  SparseMatrix* ms[] = {&s.E, &s.J, &s.R, &s.B, &s.P, &s.S, &s.N};
  return *ms[k];
}

}  // namespace detail

inline SparsePHDAE to_sparse(const PHDAESystem& sys, Eigen::Index n1 = 0) {
  SparsePHDAE s;
  s.E = sys.E().sparseView(0.0, 0.0);
  s.J = sys.J().sparseView(0.0, 0.0);
  s.R = sys.R().sparseView(0.0, 0.0);
  s.B = sys.B().sparseView(0.0, 0.0);
  s.P = sys.P().sparseView(0.0, 0.0);
  s.S = sys.S().sparseView(0.0, 0.0);
  s.N = sys.N().sparseView(0.0, 0.0);
  s.n1 = n1;
  return s;
}

/// Writes the seven matrices (all-zero ones omitted) and the manifest. n and m
/// are always written; the caller's manifest supplies the remaining keys.
inline void write_container(const fs::path& dir, const SparsePHDAE& sys, Manifest manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParseError(dir.string(), 0, "cannot create directory: " + ec.message());
  for (std::size_t k = 0; k < kMatrixNames.size(); ++k) {
    const fs::path file = dir / (std::string(kMatrixNames[k]) + ".mtx");
    const SparseMatrix& m = detail::sparse_member(sys, k);
    fs::remove(file, ec);
    if (SparseMatrix(m.pruned(0.0)).nonZeros() > 0) write_matrix_market(file, m);
  }
  Manifest full;
  full.set("n", static_cast<long long>(sys.n()));
  full.set("m", static_cast<long long>(sys.m()));
  for (const auto& [k, v] : manifest.entries()) full.set(k, v);
  std::ofstream os(dir / kManifestFile);
  if (!os) throw ParseError((dir / kManifestFile).string(), 0, "cannot open file for writing");
  full.write(os);
}

inline void write_container(const fs::path& dir, const PHDAESystem& sys, const Manifest& manifest) {
  write_container(dir, to_sparse(sys, manifest.get_int("n1", 0)), manifest);
}

inline Container read_container(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ParseError(dir.string(), 0, "container directory does not exist");
  const fs::path mpath = dir / kManifestFile;
  std::ifstream in(mpath);
  if (!in) throw ParseError(mpath.string(), 0, "cannot open manifest");
  Container c;
  c.manifest = Manifest::read(in, mpath.string());
  if (!c.manifest.has("n") || !c.manifest.has("m")) throw ParseError(mpath.string(), 0, "manifest must define n and m");
  const Eigen::Index n = c.manifest.get_int("n"), m = c.manifest.get_int("m");
  if (n < 0 || m < 0) throw ParseError(mpath.string(), 0, "negative dimension");
  const Eigen::Index rows[] = {n, n, n, n, n, m, m};
  const Eigen::Index cols[] = {n, n, n, m, m, m, m};
  for (std::size_t k = 0; k < kMatrixNames.size(); ++k) {
    const fs::path file = dir / (std::string(kMatrixNames[k]) + ".mtx");
    SparseMatrix& dst = detail::sparse_member(c.system, k);
    if (!fs::exists(file)) {
      dst.resize(rows[k], cols[k]);
      c.missing.emplace_back(kMatrixNames[k]);
      continue;
    }
    dst = read_matrix_market(file);
    if (dst.rows() != rows[k] || dst.cols() != cols[k]) {
      throw ParseError(file.string(), 0, "expected " + std::to_string(rows[k]) + "x" + std::to_string(cols[k]) + ", got " +
                                             std::to_string(dst.rows()) + "x" + std::to_string(dst.cols()));
    }
  }
  c.system.n1 = c.manifest.get_int("n1", 0);
  return c;
}

// ---------------------------------------------------------------------------
// Reduced models

inline void write_reduced_model(const fs::path& dir, const ReducedModel& red) {
  Manifest mf;
  mf.set("theorem", to_string(red.method));
  mf.set("ph_valid", red.ph_valid);
  mf.set("augmented_input", red.augmented_input);
  mf.set("min_eig_W", red.min_eig_W);
  std::string blocks;
  for (std::size_t i = 0; i < red.blocks.size(); ++i) blocks += (i ? "," : "") + std::to_string(red.blocks[i]);
  mf.set("blocks", blocks);
  write_container(dir, red.system, mf);
  const Eigen::Index m = red.ports();
  write_matrix_market(dir / "P0.mtx", red.polynomial.P0.size() ? red.polynomial.P0 : RealMatrix::Zero(m, m));
  write_matrix_market(dir / "P1.mtx", red.polynomial.P1.size() ? red.polynomial.P1 : RealMatrix::Zero(m, m));
  write_matrix_market(dir / "Drate.mtx", red.feedthrough_rate.size() ? red.feedthrough_rate : RealMatrix::Zero(m, m));
  if (red.basis.size() > 0) write_matrix_market(dir / "V.mtx", red.basis);
}

inline ReducedModel read_reduced_model(const fs::path& dir) {
  const Container c = read_container(dir);
  ReducedModel red;
  red.system = c.system.to_dense();
  red.method = parse_reduction_method(c.manifest.get("theorem"));
  red.ph_valid = c.manifest.get_bool("ph_valid");
  red.augmented_input = c.manifest.get_bool("augmented_input");
  red.min_eig_W = c.manifest.get_double("min_eig_W");
  std::istringstream blocks(c.manifest.get("blocks"));
  for (std::string tok; std::getline(blocks, tok, ',');) {
    if (!tok.empty()) red.blocks.push_back(std::stoll(tok));
  }
  auto optional_dense = [&](const char* name) {
    const fs::path f = dir / name;
    return fs::exists(f) ? RealMatrix(read_matrix_market(f)) : RealMatrix();
  };
  red.polynomial.P0 = optional_dense("P0.mtx");
  red.polynomial.P1 = optional_dense("P1.mtx");
  red.feedthrough_rate = optional_dense("Drate.mtx");
  red.basis = optional_dense("V.mtx");
  return red;
}

}  // namespace phmor
