// Command-line front end: catalog browsing, model building, verification
// runs, and norm/spectrum data export.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pbl/verify.hpp"

namespace {

using namespace pbl;

struct GlobalOpts {
  int n_max = 16;
  int quad_order = 0;
  double tol_alg = 1e-10;
  double tol_num = 1e-6;
  unsigned seed = 987654321;
  std::string format = "table";
  std::string out;
  std::vector<double> omega = {1.0, 2.0, 0.5};
  std::vector<std::string> param_args;  // name=value pairs

  VerifyConfig verify_config() const {
    VerifyConfig cfg;
    cfg.n_max = n_max;
    cfg.quad_order = quad_order;
    cfg.tol_alg = tol_alg;
    cfg.tol_num = tol_num;
    cfg.seed = seed;
    cfg.w1 = omega[0];
    cfg.w2 = omega[1];
    cfg.w3 = omega[2];
    return cfg;
  }
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::map<std::string, double> parse_params(const std::vector<std::string>& args) {
  std::map<std::string, double> out;
  for (const auto& a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("malformed -P argument '" + a + "', expected name=value");
    std::string name = a.substr(0, eq);
    std::size_t used = 0;
    double value;
    try {
      value = std::stod(a.substr(eq + 1), &used);
    } catch (const std::exception&) {
      throw UsageError("malformed -P argument '" + a + "', value is not a number");
    }
    if (used != a.size() - eq - 1)
      throw UsageError("malformed -P argument '" + a + "', value is not a number");
    out[name] = value;
  }
  return out;
}

void emit(const GlobalOpts& g, const std::string& content) {
  if (g.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw UsageError("cannot open output file: " + g.out);
  f << content;
}

// ---- catalog ----

int cmd_catalog(const GlobalOpts& g, const std::string& kind) {
  if (!kind.empty() && kind != "derived-in-text" && kind != "listed-only" &&
      kind != "h-only")
    throw UsageError("unknown --kind value '" + kind +
                     "' (expected derived-in-text, listed-only, or h-only)");
  Catalog cat = Catalog::load();
  std::vector<const ModelSpec*> rows;
  for (const auto& e : cat.entries())
    if (kind.empty() || e.kind == kind) rows.push_back(&e);

  if (g.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto* e : rows) {
      nlohmann::json params = nlohmann::json::array();
      for (const auto& p : e->params)
        params.push_back({{"name", p.name},
                          {"min", p.min},
                          {"max", p.max},
                          {"hard_range", p.hard_range}});
      j.push_back({{"id", e->id},
                   {"kind", e->kind},
                   {"detailed", e->detailed},
                   {"buildable", e->has_x()},
                   {"params", params},
                   {"notes", e->notes}});
    }
    emit(g, j.dump(2));
    return 0;
  }

  std::ostringstream os;
  if (g.format == "csv") {
    os << "id,kind,detailed,buildable,params\n";
    for (const auto* e : rows) {
      std::string names;
      for (const auto& p : e->params) names += (names.empty() ? "" : " ") + p.name;
      os << e->id << ',' << e->kind << ',' << (e->detailed ? 1 : 0) << ','
         << (e->has_x() ? 1 : 0) << ',' << names << '\n';
    }
  } else {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %-16s %-9s %-10s %s\n", "id", "kind", "detailed",
                  "buildable", "params");
    os << buf;
    for (const auto* e : rows) {
      std::string names;
      for (const auto& p : e->params) names += (names.empty() ? "" : " ") + p.name;
      std::snprintf(buf, sizeof buf, "%-8s %-16s %-9s %-10s %s\n", e->id.c_str(),
                    e->kind.c_str(), e->detailed ? "yes" : "no", e->has_x() ? "yes" : "no",
                    names.c_str());
      os << buf;
    }
    os << rows.size() << " entries\n";
  }
  emit(g, os.str());
  return 0;
}

// ---- build ----

nlohmann::json phase_json(const OperatorPoly& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [m, c] : to_phase_space(p)) j[m.key()] = {c.real(), c.imag()};
  return j;
}

std::string phase_string(const OperatorPoly& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : to_phase_space(p)) {
    if (!first) os << "  +  ";
    first = false;
    os << "(" << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i) " << m.key();
  }
  if (first) os << "0";
  return os.str();
}

int cmd_build(const GlobalOpts& g, const std::string& id, bool engine_only) {
  Catalog cat = Catalog::load();
  const ModelSpec& spec = cat.get(id);
  if (!spec.has_x())
    throw UsageError(id + " has no generator X transcribed; only `spectrum` applies");
  auto params = parse_params(g.param_args);
  H0Spec h0{g.omega[0], g.omega[1], g.omega[2]};
  Instantiated inst = instantiate(spec, params, h0);
  if (!inst.h_printed && !engine_only) {
    std::string why;
    for (const auto& w : inst.warnings) why += "\n  " + w;
    throw UsageError(id + ": the transcribed printed form cannot be evaluated here:" +
                     why + "\nuse --engine-only to build from e^X H0 e^-X alone");
  }

  DeformedLadders lad = deform_ladders(*inst.x);
  OperatorPoly h = deform_hamiltonian(*inst.x, inst.h0);

  if (g.format == "json") {
    nlohmann::json j = {{"id", id},
                        {"params", params},
                        {"omega", g.omega},
                        {"a1", to_json(lad.a1)},
                        {"a2", to_json(lad.a2)},
                        {"b1", to_json(lad.b1)},
                        {"b2", to_json(lad.b2)},
                        {"H", to_json(h)},
                        {"H_phase_space", phase_json(h)},
                        {"warnings", inst.warnings}};
    if (inst.h_printed && !engine_only) {
      j["H_printed"] = to_json(*inst.h_printed);
      j["printed_diff"] = to_json(compare(spec, params, h0, g.tol_alg));
    }
    emit(g, j.dump(2));
    return 0;
  }

  std::ostringstream os;
  os << id << " at";
  for (const auto& [k, v] : params) os << ' ' << k << '=' << v;
  os << "  (omega = " << g.omega[0] << ", " << g.omega[1] << ", " << g.omega[2] << ")\n";
  for (const auto& w : inst.warnings) os << "warning: " << w << '\n';
  os << "a1 = " << lad.a1.to_string() << '\n';
  os << "a2 = " << lad.a2.to_string() << '\n';
  os << "b1 = " << lad.b1.to_string() << '\n';
  os << "b2 = " << lad.b2.to_string() << '\n';
  os << "H (ladder)      = " << h.to_string() << '\n';
  os << "H (phase space) = " << phase_string(h) << '\n';
  if (inst.h_printed && !engine_only) {
    DiffReport diff = compare(spec, params, h0, g.tol_alg);
    os << "printed form " << (diff.match ? "matches" : "differs from") << " the engine"
       << " (max |delta| = " << diff.max_abs_diff << ")\n";
    if (!diff.match)
      for (const auto& row : diff.rows)
        if (row.abs_diff > g.tol_alg)
          os << "  " << row.monomial << ": printed (" << row.printed.real() << ", "
             << row.printed.imag() << "i) vs engine (" << row.engine.real() << ", "
             << row.engine.imag() << "i)\n";
  }
  emit(g, os.str());
  return 0;
}

// ---- verify ----

int cmd_verify(const GlobalOpts& g, const std::string& id) {
  Catalog cat = Catalog::load();
  const ModelSpec& spec = cat.get(id);
  VerificationReport rep = run_suite(spec, parse_params(g.param_args), g.verify_config());

  if (g.format == "json") {
    emit(g, to_json(rep).dump(2));
  } else {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-22s %-8s %-12s %-12s %s\n", "check", "status",
                  "residual", "tolerance", "details");
    os << buf;
    for (const auto& c : rep.checks) {
      const char* status = c.skipped ? "SKIP" : (c.pass ? "pass" : "FAIL");
      std::snprintf(buf, sizeof buf, "%-22s %-8s %-12.3e %-12.3e %s\n", c.name.c_str(),
                    status, c.residual, c.tolerance, c.details.c_str());
      os << buf;
    }
    os << "overall: " << (rep.overall_pass() ? "PASS" : "FAIL") << '\n';
    if (g.out.empty())
      std::cout << os.str();
    else {
      std::cout << os.str();
      std::ofstream f(g.out);
      if (!f) throw UsageError("cannot open output file: " + g.out);
      f << to_json(rep).dump(2);
    }
    return rep.overall_pass() ? 0 : 1;
  }
  return rep.overall_pass() ? 0 : 1;
}

// ---- norms ----

int cmd_norms(const GlobalOpts& g, const std::string& id, double gamma, int n_top) {
  Catalog cat = Catalog::load();
  const ModelSpec& spec = cat.get(id);
  if (!spec.detailed)
    throw UsageError("norms are exported for the detailed models only (model1, model2)");

  struct Row {
    int n;
    double value, bound, ratio;
  };
  std::vector<Row> rows;
  if (id == "model2") {
    double base = std::cosh(2 * gamma);
    for (int n = 0; n <= n_top; ++n) {
      double v = std::pow(base, n);
      rows.push_back({n, v, v, 1.0});
    }
  } else {
    if (std::abs(gamma) >= 0.5)
      throw UsageError("model1 norms require |gamma| < 1/2 (square integrability)");
    if (gamma == 0.0) {
      for (int n = 0; n <= n_top; ++n) rows.push_back({n, kPi, kPi, 1.0});
    } else {
      std::vector<int> ns;
      for (int n = 0; n <= n_top; ++n) ns.push_back(n);
      for (const auto& e : norm_growth(gamma, ns))
        rows.push_back({e.n, e.value, e.lower_bound, e.value / e.lower_bound});
    }
  }

  if (g.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows)
      j.push_back(
          {{"n", r.n}, {"I_n", r.value}, {"lower_bound", r.bound}, {"ratio", r.ratio}});
    emit(g, nlohmann::json{{"id", id}, {"gamma", gamma}, {"rows", j}}.dump(2));
    return 0;
  }
  std::ostringstream os;
  if (g.format == "csv") {
    os << "n,I_n,lower_bound,ratio\n";
    for (const auto& r : rows) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d,%.15g,%.15g,%.15g\n", r.n, r.value, r.bound,
                    r.ratio);
      os << buf;
    }
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-4s %-16s %-16s %s\n", "n", "I_n", "lower_bound",
                  "ratio");
    os << buf;
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%-4d %-16.8e %-16.8e %.8f\n", r.n, r.value, r.bound,
                    r.ratio);
      os << buf;
    }
  }
  emit(g, os.str());
  return 0;
}

// ---- spectrum ----

int cmd_spectrum(const GlobalOpts& g, const std::string& id, int k_max) {
  Catalog cat = Catalog::load();
  const ModelSpec& spec = cat.get(id);
  auto params = parse_params(g.param_args);
  H0Spec h0{g.omega[0], g.omega[1], g.omega[2]};
  Instantiated inst = instantiate(spec, params, h0);
  OperatorPoly h;
  if (inst.x)
    h = deform_hamiltonian(*inst.x, inst.h0);
  else if (inst.h_printed)
    h = *inst.h_printed;
  else
    throw UsageError(id + ": neither generator nor printed form available");
  FockRep rep{g.n_max};
  SpectrumResult s = spectrum(rep, h, inst.h0, k_max);

  if (g.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : s.matches)
      j.push_back({{"n1", m.n1},
                   {"n2", m.n2},
                   {"target", m.target.real()},
                   {"found_re", m.found.real()},
                   {"found_im", m.found.imag()},
                   {"abs_err", m.abs_err}});
    emit(g, nlohmann::json{{"id", id},
                           {"params", params},
                           {"omega", g.omega},
                           {"n_max", g.n_max},
                           {"k_max", k_max},
                           {"max_abs_err", s.max_abs_err},
                           {"max_abs_imag", s.max_abs_imag},
                           {"matches", j}}
                 .dump(2));
    return 0;
  }
  std::ostringstream os;
  if (g.format == "csv") {
    os << "n1,n2,target,found_re,found_im,abs_err\n";
    for (const auto& m : s.matches) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%d,%.15g,%.15g,%.15g,%.15g\n", m.n1, m.n2,
                    m.target.real(), m.found.real(), m.found.imag(), m.abs_err);
      os << buf;
    }
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-3s %-3s %-10s %-16s %-16s %s\n", "n1", "n2",
                  "target", "found_re", "found_im", "abs_err");
    os << buf;
    for (const auto& m : s.matches) {
      std::snprintf(buf, sizeof buf, "%-3d %-3d %-10.4f %-16.10f %-16.3e %.3e\n", m.n1,
                    m.n2, m.target.real(), m.found.real(), m.found.imag(), m.abs_err);
      os << buf;
    }
    os << "max |E - lattice| = " << s.max_abs_err << ", max |Im E| = " << s.max_abs_imag
       << '\n';
  }
  emit(g, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pbl: closed-form deformations H = e^X H0 e^-X of the 2-D harmonic "
      "oscillator, with numeric verification of the pseudo-bosonic structure"};
  app.require_subcommand(1);
  // global flags may appear before or after the subcommand
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--nmax", g.n_max, "per-mode Fock cutoff")->capture_default_str();
  app.add_option("--quad-order", g.quad_order,
                 "Gauss-Hermite nodes per axis (0 = exact-degree policy)")
      ->capture_default_str();
  app.add_option("--tol-alg", g.tol_alg, "tolerance for algebra-only checks")
      ->capture_default_str();
  app.add_option("--tol-num", g.tol_num, "tolerance for truncation/quadrature checks")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed recorded in reports")->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "write output to this file instead of stdout");
  app.add_option("--omega", g.omega, "oscillator frequencies w1 w2 w3")
      ->expected(3)
      ->capture_default_str();

  std::string kind;
  CLI::App* c_catalog = app.add_subcommand("catalog", "list the model catalog");
  c_catalog->add_option("--kind", kind, "filter: derived-in-text, listed-only, h-only");

  std::string id;
  bool engine_only = false;
  CLI::App* c_build =
      app.add_subcommand("build", "print deformed ladder operators and H for one entry");
  c_build->add_option("id", id, "catalog entry id")->required();
  c_build->add_option("-P,--param", g.param_args, "model parameter, name=value");
  c_build->add_flag("--engine-only", engine_only,
                    "skip the transcribed printed form (needed where it is singular)");

  CLI::App* c_verify =
      app.add_subcommand("verify", "run the verification battery for one entry");
  c_verify->add_option("id", id, "catalog entry id")->required();
  c_verify->add_option("-P,--param", g.param_args, "model parameter, name=value");

  double gamma = 0.0;
  int n_top = 15;
  CLI::App* c_norms =
      app.add_subcommand("norms", "export squared norms and divergence bounds");
  c_norms->add_option("id", id, "catalog entry id (model1 or model2)")->required();
  c_norms->add_option("--gamma", gamma, "deformation strength")->required();
  c_norms->add_option("--n", n_top, "largest index")->capture_default_str();

  int k_max = 6;
  CLI::App* c_spectrum =
      app.add_subcommand("spectrum", "export matched eigenvalues vs the lattice");
  c_spectrum->add_option("id", id, "catalog entry id")->required();
  c_spectrum->add_option("-P,--param", g.param_args, "model parameter, name=value");
  c_spectrum->add_option("--kmax", k_max, "largest n1+n2 shell matched")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_catalog) return cmd_catalog(g, kind);
    if (*c_build) return cmd_build(g, id, engine_only);
    if (*c_verify) return cmd_verify(g, id);
    if (*c_norms) return cmd_norms(g, id, gamma, n_top);
    if (*c_spectrum) return cmd_spectrum(g, id, k_max);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CatalogError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NonIntegrableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
