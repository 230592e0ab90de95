#pragma once

// Machine-readable catalog of the deformation models: each entry is a data
// file carrying the transcribed X and printed H expressions, parameter
// ranges, and provenance notes. The code stays entry-agnostic; the diff
// between the engine's e^X H0 e^-X and the printed H is the deliverable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deform.hpp"
#include "json.hpp"
#include "opalg.hpp"
#include "parse.hpp"

#ifndef PBL_CATALOG_DEFAULT_DIR
#define PBL_CATALOG_DEFAULT_DIR "data/catalog"
#endif

namespace pbl {

class CatalogError : public std::runtime_error {
 public:
  explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

struct ParamSpec {
  std::string name;
  double min = -1.0, max = 1.0;
  bool hard_range = false;  // range violation is fatal for wavefunction-level ops
};

struct ModelSpec {
  std::string id;
  std::string kind;  // derived-in-text | listed-only | h-only
  bool detailed = false;
  std::vector<ParamSpec> params;
  std::optional<std::string> x_expr;
  std::optional<std::string> h_expr;
  std::map<std::string, std::string> constraints;  // derived parameter bindings
  std::vector<std::string> nonzero_params;         // printed form singular at zero
  std::string notes;

  bool has_x() const { return x_expr.has_value(); }
};

inline ModelSpec model_from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.id = j.at("id").get<std::string>();
  s.kind = j.at("kind").get<std::string>();
  s.detailed = j.value("detailed", false);
  for (const auto& p : j.value("params", nlohmann::json::array())) {
    s.params.push_back({p.at("name").get<std::string>(), p.at("min").get<double>(),
                        p.at("max").get<double>(), p.value("hard_range", false)});
  }
  if (j.contains("x_expr")) s.x_expr = j.at("x_expr").get<std::string>();
  if (j.contains("h_expr")) s.h_expr = j.at("h_expr").get<std::string>();
  // keep the lookups alive past .items(): the proxy holds a reference
  const nlohmann::json constraints = j.value("constraints", nlohmann::json::object());
  for (const auto& [k, v] : constraints.items()) s.constraints[k] = v.get<std::string>();
  const nlohmann::json nonzero = j.value("nonzero_params", nlohmann::json::array());
  for (const auto& n : nonzero) s.nonzero_params.push_back(n.get<std::string>());
  s.notes = j.value("notes", "");
  return s;
}

class Catalog {
 public:
  static std::string default_dir() {
    if (const char* env = std::getenv("PBL_CATALOG_DIR")) return env;
    return PBL_CATALOG_DEFAULT_DIR;
  }

  static Catalog load(const std::string& dir = default_dir()) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw CatalogError("catalog directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    Catalog cat;
    for (const auto& f : files) {
      std::ifstream in(f);
      nlohmann::json j;
      in >> j;
      cat.entries_.push_back(model_from_json(j));
    }
    if (cat.entries_.empty()) throw CatalogError("catalog is empty: " + dir);
    return cat;
  }

  const std::vector<ModelSpec>& entries() const { return entries_; }

  const ModelSpec& get(const std::string& id) const {
    for (const auto& e : entries_)
      if (e.id == id) return e;
    throw CatalogError("unknown model id: " + id);
  }

 private:
  std::vector<ModelSpec> entries_;
};

struct Instantiated {
  std::optional<OperatorPoly> x;
  std::optional<OperatorPoly> h_printed;
  H0Spec h0;                             // after any per-entry constraints
  std::map<std::string, double> bound;   // full binding used for the expressions
  std::vector<std::string> warnings;
};

// Binds parameters (plus wt1/wt2/wt3 from h0 and any per-entry constraints)
// and parses the transcribed expressions. Out-of-range parameters warn and
// proceed for algebraic use; wavefunction-level callers enforce hard ranges
// themselves. An exactly-zero parameter listed in nonzero_params voids only
// the printed form, never the engine.
inline Instantiated instantiate(const ModelSpec& spec,
                                const std::map<std::string, double>& params,
                                const H0Spec& h0 = {}) {
  Instantiated out;
  std::map<std::string, double> bound = params;
  for (const auto& p : spec.params) {
    auto it = bound.find(p.name);
    if (it == bound.end())
      throw CatalogError(spec.id + ": parameter '" + p.name + "' not supplied");
    if (it->second < p.min || it->second > p.max)
      out.warnings.push_back("parameter " + p.name + "=" + std::to_string(it->second) +
                             " outside range [" + std::to_string(p.min) + ", " +
                             std::to_string(p.max) + "]");
  }
  bound["wt1"] = h0.wt1();
  bound["wt2"] = h0.wt2();
  bound["wt3"] = h0.wt3();
  for (const auto& [name, expr] : spec.constraints) {
    OperatorPoly v = parse(expr, bound);
    if (!v.is_scalar()) throw CatalogError(spec.id + ": constraint for " + name + " not scalar");
    bound[name] = v.scalar_part().real();
  }
  out.h0 = H0Spec::from_tilde(bound["wt1"], bound["wt2"], bound["wt3"]);
  out.bound = bound;

  if (spec.x_expr) out.x = parse(*spec.x_expr, bound);

  bool printed_singular = false;
  for (const auto& n : spec.nonzero_params) {
    auto it = bound.find(n);
    if (it != bound.end() && it->second == 0.0) {
      printed_singular = true;
      out.warnings.push_back("printed form is singular at " + n +
                             " = 0 (the engine itself is not); printed H skipped");
    }
  }
  if (spec.h_expr && !printed_singular) out.h_printed = parse(*spec.h_expr, bound);
  return out;
}

struct DiffRow {
  std::string monomial;
  cplx printed;
  cplx engine;
  double abs_diff;
};

struct DiffReport {
  std::string id;
  std::vector<DiffRow> rows;  // union of monomials present on either side
  double max_abs_diff = 0.0;
  double tol = 1e-10;
  bool match = false;
};

// Engine vs printed Hamiltonian in the phase-space view.
inline DiffReport compare(const ModelSpec& spec, const std::map<std::string, double>& params,
                          const H0Spec& h0, double tol = 1e-10) {
  Instantiated inst = instantiate(spec, params, h0);
  if (!inst.x) throw CatalogError(spec.id + ": compare requires an X expression");
  if (!inst.h_printed)
    throw CatalogError(spec.id + ": printed H unavailable at these parameters");
  PhaseTable engine = to_phase_space(deform_hamiltonian(*inst.x, inst.h0));
  PhaseTable printed = to_phase_space(*inst.h_printed);

  DiffReport rep;
  rep.id = spec.id;
  rep.tol = tol;
  std::map<PhaseMonomial, std::pair<cplx, cplx>> merged;
  for (const auto& [m, c] : printed) merged[m].first = c;
  for (const auto& [m, c] : engine) merged[m].second = c;
  for (const auto& [m, pc] : merged) {
    double d = std::abs(pc.first - pc.second);
    rep.rows.push_back({m.key(), pc.first, pc.second, d});
    rep.max_abs_diff = std::max(rep.max_abs_diff, d);
  }
  rep.match = rep.max_abs_diff <= tol;
  return rep;
}

inline nlohmann::json to_json(const DiffReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"monomial", row.monomial},
                    {"printed", {row.printed.real(), row.printed.imag()}},
                    {"engine", {row.engine.real(), row.engine.imag()}},
                    {"abs_diff", row.abs_diff}});
  return {{"id", r.id},
          {"rows", rows},
          {"max_abs_diff", r.max_abs_diff},
          {"tol", r.tol},
          {"match", r.match}};
}

struct ExchangeSymmetryResult {
  bool symmetric = false;
  double swap_diff = 0.0;            // max coefficient diff X vs swapped X
  double swapped_pb_residual = 0.0;  // pseudo-boson residual of the swapped X
};

// Tests invariance of X under (x1,p1) <-> (x2,p2); for asymmetric entries
// the swapped X must still generate a pseudo-bosonic family.
inline ExchangeSymmetryResult exchange_symmetry_check(const ModelSpec& spec,
                                                      const std::map<std::string, double>& params,
                                                      const H0Spec& h0 = {}) {
  Instantiated inst = instantiate(spec, params, h0);
  if (!inst.x) throw CatalogError(spec.id + ": exchange check requires X");
  OperatorPoly swapped = swap_modes(*inst.x);
  ExchangeSymmetryResult res;
  res.swap_diff = (*inst.x - swapped).max_abs_coeff();
  res.symmetric = res.swap_diff <= 1e-12;
  if (!res.symmetric)
    res.swapped_pb_residual = pseudo_boson_check(deform_ladders(swapped)).max();
  return res;
}

}  // namespace pbl
