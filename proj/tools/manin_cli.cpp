// Command-line front end. Configuration comes from a JSON document (--config
// FILE, or --config - for stdin) with flag overrides; results go to stdout as
// JSON, or into --out DIR as files. Logs go to stderr.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error,
// 3 point outside the phase space, 4 solver conditioning failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "manin/acceptance.hpp"
#include "manin/boundedness.hpp"
#include "manin/coherent.hpp"
#include "manin/io.hpp"
#include "manin/measure.hpp"
#include "manin/paragrassmann.hpp"
#include "manin/parse.hpp"
#include "manin/radius.hpp"
#include "manin/symbols.hpp"
#include "manin/toeplitz.hpp"

namespace {

using manin::cplx;
using manin::io::json;

struct Flags {
  std::string config_path;
  std::string q, weights, out;
  std::optional<std::size_t> cutoff, order, angles;
  std::optional<double> tol;
  // per-subcommand
  std::string symbol, manin_expr, kind, lambda, mu, solver = "auto";
  std::optional<double> time;
  bool unnormalized = false;
};

/// The merged configuration, with every default made explicit.
json resolve(const Flags& f) {
  json cfg = json::object();
  if (!f.config_path.empty()) {
    std::string text;
    if (f.config_path == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      std::ifstream in(f.config_path);
      if (!in) throw manin::ConfigError("cannot open config file '" + f.config_path + "'");
      text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
      cfg = json::parse(text);
    } catch (const json::parse_error& e) {
      throw manin::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw manin::ConfigError("config must be a JSON object");
  }
  auto set_default = [&](const char* key, json v) {
    if (!cfg.contains(key)) cfg[key] = std::move(v);
  };

  // Weights and q accept the text forms as well as JSON objects.
  if (!f.weights.empty()) cfg["weights"] = manin::io::to_json(manin::parse::weights(f.weights));
  if (cfg.contains("weights") && cfg["weights"].is_string())
    cfg["weights"] = manin::io::to_json(manin::parse::weights(cfg["weights"].get<std::string>()));
  set_default("weights", manin::io::to_json(manin::WeightSequence::factorial()));
  if (!f.q.empty()) cfg["q"] = manin::io::complex(manin::parse::q_value(f.q).value());
  if (cfg.contains("q") && cfg["q"].is_string())
    cfg["q"] = manin::io::complex(manin::parse::q_value(cfg["q"].get<std::string>()).value());
  set_default("q", manin::io::complex(1.0));
  cfg["q"] = manin::io::complex(manin::io::read_complex(cfg["q"]));

  if (f.cutoff) cfg["cutoff"] = *f.cutoff;
  if (f.tol) cfg["tol"] = *f.tol;
  if (f.order) cfg["order"] = *f.order;
  if (f.angles) cfg["angles"] = *f.angles;
  set_default("cutoff", 12);
  set_default("tol", manin::kDefaultTolerance);
  set_default("order", 12);
  set_default("angles", nullptr);
  set_default("horizon", 1000);

  for (auto [flag, key] : {std::pair{&f.lambda, "lambda"}, std::pair{&f.mu, "mu"}})
    if (!flag->empty()) cfg[key] = manin::io::complex(manin::parse::complex_number(*flag));
  set_default("lambda", manin::io::complex(0.5));
  for (const char* key : {"lambda", "mu"})
    if (cfg.contains(key)) {
      if (cfg[key].is_string()) cfg[key] = manin::io::complex(manin::parse::complex_number(cfg[key].get<std::string>()));
      cfg[key] = manin::io::complex(manin::io::read_complex(cfg[key]));
    }
  if (f.time) cfg["time"] = *f.time;
  if (!f.symbol.empty()) cfg["symbol"] = f.symbol;
  if (!f.manin_expr.empty()) cfg["manin"] = f.manin_expr;
  if (!f.kind.empty()) cfg["operator_kind"] = f.kind;
  if (f.unnormalized) cfg["normalized"] = false;
  set_default("normalized", true);
  cfg["solver"] = cfg.value("solver", f.solver);
  set_default("grid", json({{"radius", 1.0}, {"rings", 5}, {"spokes", 10}}));
  set_default("paragrassmann", json({{"l", 3}, {"weights", {1.0, 1.0, 2.0}}}));

  const double tol = cfg["tol"].get<double>();
  if (!(tol > 0.0)) throw manin::ConfigError("tolerance must be positive");
  for (const char* key : {"cutoff", "order", "horizon"})
    if (!cfg[key].is_number_integer() || cfg[key].get<long long>() <= 0)
      throw manin::ConfigError(std::string(key) + " must be a positive integer");
  if (!cfg["angles"].is_null() && (!cfg["angles"].is_number_integer() || cfg["angles"].get<long long>() <= 0))
    throw manin::ConfigError("angles must be a positive integer");
  return cfg;
}

struct Context {
  json cfg;
  manin::WeightSequence w;
  manin::QParam q;
  std::string out_dir;

  std::size_t cutoff() const { return cfg["cutoff"].get<std::size_t>(); }
  std::size_t order() const { return cfg["order"].get<std::size_t>(); }
  double tol() const { return cfg["tol"].get<double>(); }
  std::optional<std::size_t> angles() const {
    if (cfg["angles"].is_null()) return std::nullopt;
    return cfg["angles"].get<std::size_t>();
  }
  cplx lambda() const { return manin::io::read_complex(cfg["lambda"]); }
  std::vector<cplx> grid() const {
    const auto& g = cfg["grid"];
    return manin::polar_grid(g.at("radius").get<double>(), g.at("rings").get<std::size_t>(),
                             g.at("spokes").get<std::size_t>(), g.value("offset", 0.0));
  }

  /// JSON artifact to stdout or DIR/name.json, with the config embedded.
  void emit(const std::string& name, json body) const {
    body["config"] = cfg;
    body["artifact"] = name;
    const std::string text = body.dump(2) + "\n";
    if (out_dir.empty()) {
      std::cout << text;
      return;
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / (name + ".json")) << text;
    std::cerr << "wrote " << (std::filesystem::path(out_dir) / (name + ".json")).string() << "\n";
  }

  /// CSV artifact; only written with --out. The first line carries the config.
  template <class Writer>
  void emit_csv(const std::string& name, Writer&& write) const {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (name + ".csv");
    std::ofstream os(path);
    os << "# config=" << cfg.dump() << "\n";
    write(os);
    std::cerr << "wrote " << path.string() << "\n";
  }
};

manin::RadialQuadrature quadrature(const Context& c) {
  const auto solver = c.cfg["solver"].get<std::string>();
  if (solver == "moments") return manin::gauss_quadrature_for(c.w, c.q, c.order());
  if (solver != "auto") throw manin::ConfigError("solver must be 'auto' or 'moments'");
  return manin::radial_quadrature(c.w, c.q, c.order());
}

int cmd_radius(const Context& c) {
  manin::RadiusOptions opt;
  opt.horizon = c.cfg["horizon"].get<std::size_t>();
  const auto r = manin::radius_of_convergence(c.w, c.q, opt);
  json body = manin::io::to_json(r);
  body["boundedness"] = manin::io::to_json(manin::boundedness_report(c.w, c.q));
  c.emit("radius", body);
  return 0;
}

manin::TruncatedOperator named_operator(const Context& c, const std::string& kind) {
  const std::size_t n = c.cutoff();
  if (kind == "annihilation") return manin::annihilation_matrix(c.w, c.q, n);
  if (kind == "creation") return manin::creation_matrix(c.w, c.q, n);
  if (kind == "adjoint") return manin::adjoint_annihilation_matrix(c.w, c.q, n);
  if (kind == "number") return manin::number_matrix(n);
  throw manin::ConfigError("unknown operator kind '" + kind + "' (annihilation, creation, adjoint, number)");
}

manin::TruncatedOperator requested_operator(const Context& c) {
  if (c.cfg.contains("manin")) {
    const auto& m = c.cfg["manin"];
    const auto g = m.is_string() ? manin::parse::manin(m.get<std::string>(), c.q) : manin::io::manin_from_json(m, c.q);
    return manin::toeplitz_matrix(g, c.w, c.cutoff());
  }
  return named_operator(c, c.cfg.value("operator_kind", std::string("annihilation")));
}

int cmd_operator(const Context& c) {
  const auto a = requested_operator(c);
  c.emit("operator", manin::io::to_json(a));
  c.emit_csv("operator", [&](std::ostream& os) { manin::io::write_csv(os, a); });
  return 0;
}

int cmd_coherent(const Context& c) {
  const cplx lambda = c.lambda();
  auto state = manin::coherent_coefficients(lambda, c.w, c.q, c.tol());
  json body;
  body["state"] = manin::io::to_json(state);
  body["eigen_residual"] = manin::io::to_json(manin::eigen_residual(state, c.w, c.q));
  if (c.cfg.contains("time")) {
    const double t = c.cfg["time"].get<double>();
    const auto ev = manin::evolve_state(state, t);
    body["evolved"] = manin::io::to_json(ev);
    body["evolved_lambda"] = manin::io::complex(manin::evolve(lambda, t));
  }
  c.emit("coherent", body);
  return 0;
}

int cmd_kernel(const Context& c) {
  const cplx lambda = c.lambda();
  const auto pts = c.grid();
  std::vector<cplx> k, norms;
  for (cplx mu : pts) {
    k.push_back(manin::kernel(mu, lambda, c.w, c.q, c.tol()));
    norms.push_back(manin::coherent_norm_sq(mu, c.w, c.q, c.tol()));
  }
  json body;
  body["lambda"] = manin::io::complex(lambda);
  if (c.cfg.contains("mu")) body["value"] = manin::io::complex(manin::kernel(manin::io::read_complex(c.cfg["mu"]), lambda, c.w, c.q, c.tol()));
  json rows = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i)
    rows.push_back({{"mu", manin::io::complex(pts[i])}, {"kernel", manin::io::complex(k[i])}, {"norm_sq", manin::io::number(norms[i].real())}});
  body["grid"] = rows;
  c.emit("kernel", body);
  c.emit_csv("kernel", [&](std::ostream& os) { manin::io::write_grid_csv(os, pts, k); });
  c.emit_csv("norm", [&](std::ostream& os) { manin::io::write_grid_csv(os, pts, norms); });
  return 0;
}

int cmd_measure(const Context& c) {
  const auto quad = quadrature(c);
  const std::size_t basis = std::min(c.cutoff(), quad.exact_degree);
  const std::size_t a = c.angles().value_or(2 * basis + 1);
  json body;
  body["quadrature"] = manin::io::to_json(quad);
  const std::size_t m = std::min<std::size_t>(quad.exact_degree, 2 * quad.order - 1);
  body["moments"] = manin::io::to_json(manin::verify_moments(quad, c.w, c.q, m, 1e-8));
  body["gram"] = manin::io::to_json(manin::verify_resolution_identity(quad, c.w, c.q, basis, {a, 0.0}, 1e-8));
  body["divergence"] = manin::io::to_json(manin::norm_divergence_witness(quad, c.w, c.q, m));
  if (const auto d = manin::closed_form_density(c.w, c.q)) {
    body["density"] = {{"formula", d->formula},
                       {"moments", manin::io::to_json(manin::verify_density_moments(*d, c.w, c.q, 20, 1e-9))}};
  } else {
    body["density"] = nullptr;
  }
  for (const auto& warn : quad.warnings) std::cerr << "warning: " << warn << "\n";
  c.emit("measure", body);
  return 0;
}

int cmd_symbols(const Context& c) {
  json body;
  if (c.cfg.contains("manin") || c.cfg.contains("operator_kind")) {
    const auto a = requested_operator(c);
    const bool normalized = c.cfg["normalized"].get<bool>();
    const auto pts = c.grid();
    // Widen the window to the coherent cut-off of every grid point plus the band.
    std::size_t need = c.cutoff();
    for (cplx l : pts) need = std::max(need, manin::coherent_coefficients(l, c.w, c.q, c.tol()).cutoff() + 2);
    Context wide = c;
    wide.cfg["cutoff"] = need;
    const auto aw = requested_operator(wide);
    const auto g = manin::lower_symbol_grid(aw, pts, c.w, c.q, normalized, c.tol());
    json rows = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i)
      rows.push_back({{"lambda", manin::io::complex(g.lambdas[i])},
                      {"value", manin::io::complex(g.values[i])},
                      {"truncation_error", manin::io::number(g.errors[i])}});
    body["lower_symbol"] = {{"operator", a.meta().symbol}, {"normalized", normalized}, {"window", need}, {"grid", rows}};
    c.emit_csv("lower_symbol", [&](std::ostream& os) { manin::io::write_csv(os, g); });
  }
  if (c.cfg.contains("symbol")) {
    const auto f = manin::parse::symbol(c.cfg["symbol"].get<std::string>());
    const auto quad = quadrature(c);
    const auto qcs = manin::quantize_cs(f, quad, c.w, c.q, c.cutoff(), c.angles());
    const auto sf = manin::secondary_toeplitz(f, quad, c.w, c.q, c.cutoff(), c.angles());
    body["quantize_cs"] = manin::io::to_json(qcs);
    body["secondary_toeplitz"] = manin::io::to_json(sf);
    body["l1_norm_estimate"] = manin::io::number(manin::quantize_cs_norm_bound(f, quad, c.w, c.q, c.cutoff(), c.angles()));
    body["quadrature"] = manin::io::to_json(quad);
    c.emit_csv("quantize_cs", [&](std::ostream& os) { manin::io::write_csv(os, qcs); });
    c.emit_csv("secondary_toeplitz", [&](std::ostream& os) { manin::io::write_csv(os, sf); });
  }
  if (body.empty()) throw manin::ConfigError("symbols needs --symbol (upper symbol) and/or --manin/--kind (operator)");
  c.emit("symbols", body);
  return 0;
}

int cmd_paragrassmann(const Context& c) {
  const auto& p = c.cfg["paragrassmann"];
  manin::ParagrassmannConfig pg;
  pg.l = p.at("l").get<std::size_t>();
  for (const auto& x : p.at("weights")) pg.weights.push_back(manin::io::read_number(x));
  pg.q = c.q;
  const auto report = manin::pg_structure_report(pg);
  json body;
  body["report"] = manin::io::to_json(report);
  body["matrix"] = manin::io::to_json(manin::pg_annihilation(pg));
  json checks = json::array();
  for (const auto& chk : manin::pg_coherent_check(pg, {0.0, c.lambda()}))
    checks.push_back({{"lambda", manin::io::complex(chk.lambda)},
                      {"residual", manin::io::number(chk.residual)},
                      {"eigenvector", chk.eigenvector}});
  body["coherent_check"] = checks;
  c.emit("paragrassmann", body);
  return 0;
}

int cmd_verify(const Context& c) {
  bool all = true;
  json rows = json::array();
  for (const auto& r : manin::acceptance::run_all()) {
    std::cerr << manin::acceptance::format_line(r) << "\n";
    all = all && r.passed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  c.emit("verify", {{"criteria", rows}, {"passed", all}});
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent states and Toeplitz quantization on the Manin plane"};
  app.fallthrough();  // global options may follow the subcommand
  app.require_subcommand(1);
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_path, "JSON config file, or - for stdin");
  app.add_option("--q", f.q, "deformation parameter, e.g. 1, 0.5+0.2i, polar:1,0.628");
  app.add_option("--weights", f.weights, "factorial[:c] | constant[:c] | power-factorial:s[,c] | explicit:w0,w1,...");
  app.add_option("--cutoff", f.cutoff, "truncation index N");
  app.add_option("--tol", f.tol, "tail tolerance");
  app.add_option("--order", f.order, "radial quadrature order M");
  app.add_option("--angles", f.angles, "angular points A");
  app.add_option("--out", f.out, "output directory (default: JSON on stdout)");

  auto* radius = app.add_subcommand("radius", "phase-space radius and boundedness");
  auto* op = app.add_subcommand("operator", "Toeplitz matrix of a Manin symbol");
  op->add_option("--manin", f.manin_expr, "symbol, e.g. \"th tb + 2 tb^2\"");
  op->add_option("--kind", f.kind, "annihilation | creation | adjoint | number");
  auto* coh = app.add_subcommand("coherent", "coherent state vector and eigen residual");
  coh->add_option("--lambda", f.lambda, "eigenvalue");
  coh->add_option("--time", f.time, "evolve by exp(-itN)");
  auto* ker = app.add_subcommand("kernel", "reproducing kernel on a grid");
  ker->add_option("--lambda", f.lambda, "second argument of K(mu, lambda)");
  ker->add_option("--mu", f.mu, "single first argument");
  auto* meas = app.add_subcommand("measure", "radial quadrature and its certification");
  meas->add_option("--solver", f.solver, "auto | moments");
  auto* sym = app.add_subcommand("symbols", "lower symbols, Q_cs and S_f");
  sym->add_option("--symbol", f.symbol, "upper symbol, e.g. \"L + Lc^2\"");
  sym->add_option("--manin", f.manin_expr, "operator for the lower symbol");
  sym->add_option("--kind", f.kind, "named operator for the lower symbol");
  sym->add_flag("--unnormalized", f.unnormalized, "A^# instead of A^flat");
  sym->add_option("--solver", f.solver, "auto | moments");
  auto* pg = app.add_subcommand("paragrassmann", "nilpotent annihilation operator report");
  pg->add_option("--lambda", f.lambda, "extra candidate eigenvalue");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Context c{resolve(f), manin::WeightSequence::factorial(), manin::QParam(1.0), f.out};
    c.w = manin::io::weights_from_json(c.cfg["weights"]);
    c.q = manin::QParam(manin::io::read_complex(c.cfg["q"]));
    if (*radius) return cmd_radius(c);
    if (*op) return cmd_operator(c);
    if (*coh) return cmd_coherent(c);
    if (*ker) return cmd_kernel(c);
    if (*meas) return cmd_measure(c);
    if (*sym) return cmd_symbols(c);
    if (*pg) return cmd_paragrassmann(c);
    if (*verify) return cmd_verify(c);
  } catch (const manin::OutsidePhaseSpace& e) {
    std::cerr << "error: outside the phase space: " << e.what() << "\n";
    return 3;
  } catch (const manin::OrderTooHigh& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const manin::NoPositiveMeasure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const manin::ToleranceUnreachable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const manin::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const manin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
