#pragma once

// JSON and CSV forms of the library's values. JSON objects have sorted keys and
// floats in shortest round-trip form, so equal inputs give byte-identical files.
// Non-finite numbers are written as the strings "inf", "-inf", "nan".

#include <charconv>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "manin/algebra.hpp"
#include "manin/boundedness.hpp"
#include "manin/coherent.hpp"
#include "manin/measure.hpp"
#include "manin/paragrassmann.hpp"
#include "manin/radius.hpp"
#include "manin/symbols.hpp"
#include "manin/toeplitz.hpp"
#include "manin/weights.hpp"

namespace manin::io {

using json = nlohmann::json;

inline json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return kNegInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

inline json complex(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

inline cplx read_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {read_number(j[0]), read_number(j[1])};
  if (j.is_object()) return {read_number(j.value("re", json(0.0))), read_number(j.value("im", json(0.0)))};
  throw ConfigError("expected a complex number as [re, im] or {re, im}, got " + j.dump());
}

template <class Range>
json numbers(const Range& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

/// Shortest round-trip text of a double, for CSV.
inline std::string format(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---- algebra ----

/// [{i, j, re, im}, ...] with each coefficient evaluated.
inline json to_json(const ManinElement& g) {
  json out = json::array();
  for (const auto& [m, series] : g.terms()) {
    const cplx c = g.evaluate(series);
    out.push_back({{"i", m.i}, {"j", m.j}, {"re", number(c.real())}, {"im", number(c.imag())}});
  }
  return out;
}

inline ManinElement manin_from_json(const json& j, const QParam& q) {
  if (!j.is_array()) throw ConfigError("Manin element must be a list of {i, j, re, im}");
  ManinElement g(q);
  for (const auto& t : j)
    g.add({t.at("i").get<std::uint32_t>(), t.at("j").get<std::uint32_t>()},
          {read_number(t.value("re", json(0.0))), read_number(t.value("im", json(0.0)))});
  return g;
}

inline json to_json(const WeightSequence& w) {
  json params = {{"scale", number(w.scale())}};
  if (w.kind() == WeightKind::power_factorial) params["s"] = number(w.exponent());
  json out = {{"kind", to_string(w.kind())}, {"params", params}};
  if (w.kind() == WeightKind::explicit_table) out["table"] = numbers(w.table());
  return out;
}

inline WeightSequence weights_from_json(const json& j) {
  if (j.is_string()) throw ConfigError("weights must be an object {kind, params, table?}");
  const auto kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  const double scale = params.contains("scale") ? read_number(params["scale"]) : 1.0;
  if (kind == "factorial") return WeightSequence::factorial(scale);
  if (kind == "constant") return WeightSequence::constant(scale);
  if (kind == "power-factorial") {
    if (!params.contains("s")) throw ConfigError("power-factorial weights need params.s");
    return WeightSequence::power_factorial(read_number(params["s"]), scale);
  }
  if (kind == "explicit") {
    std::vector<double> table;
    for (const auto& x : j.at("table")) table.push_back(read_number(x));
    auto w = WeightSequence::explicit_table(std::move(table));
    return scale == 1.0 ? w : w.scaled(scale);
  }
  throw ConfigError("unknown weight kind '" + kind + "'");
}

// ---- operators ----

inline json to_json(const OperatorMeta& m) {
  return {{"symbol", m.symbol}, {"weights", m.weights}, {"q", complex(m.q)}, {"exact", m.exact}};
}

/// {dim, entries: rows of [re, im], meta}.
inline json to_json(const TruncatedOperator& a) {
  json rows = json::array();
  for (Eigen::Index m = 0; m < a.dim(); ++m) {
    json row = json::array();
    for (Eigen::Index n = 0; n < a.dim(); ++n) row.push_back(complex(a(m, n)));
    rows.push_back(row);
  }
  return {{"dim", a.dim()}, {"entries", rows}, {"meta", to_json(a.meta())}};
}

inline TruncatedOperator operator_from_json(const json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  Eigen::MatrixXcd m(dim, dim);
  const auto& rows = j.at("entries");
  if (static_cast<Eigen::Index>(rows.size()) != dim) throw ConfigError("operator entries do not match dim");
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = read_complex(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  const auto& meta = j.at("meta");
  return {m, {meta.value("symbol", ""), meta.value("weights", ""), read_complex(meta.value("q", json::array({1.0, 0.0}))),
              meta.value("exact", true)}};
}

/// One matrix row per line, each cell "re,im" in quotes.
inline void write_csv(std::ostream& os, const TruncatedOperator& a) {
  for (Eigen::Index m = 0; m < a.dim(); ++m) {
    for (Eigen::Index n = 0; n < a.dim(); ++n) {
      if (n) os << ',';
      os << '"' << format(a(m, n).real()) << ',' << format(a(m, n).imag()) << '"';
    }
    os << '\n';
  }
}

// ---- reports ----

inline json to_json(const RadiusEstimate& r) {
  return {{"value", number(r.value)},
          {"uncertainty", number(r.uncertainty)},
          {"infinite", r.is_infinite()},
          {"extreme", r.extreme},
          {"boundary_verdict", to_string(r.boundary_verdict)},
          {"finite_horizon_estimate", true},
          {"horizon", r.samples.size()},
          {"samples", numbers(r.samples)}};
}

inline json to_json(const BoundednessReport& b) {
  return {{"bounded", to_string(b.bounded)},
          {"compact", to_string(b.compact)},
          {"sup_estimate", number(b.sup_estimate)},
          {"loglog_slope", number(b.loglog_slope)},
          {"ratio_sequence", numbers(b.ratio_sequence)}};
}

inline json to_json(const CoherentStateVector& s) {
  json coeffs = json::array();
  for (std::size_t n = 0; n <= s.cutoff(); ++n) {
    const auto& c = s.coefficients()[n];
    coeffs.push_back({{"n", n}, {"log_abs", number(c.log_abs)}, {"phase", number(c.phase)}, {"value", complex(c.value())}});
  }
  return {{"lambda", complex(s.lambda())},
          {"cutoff", s.cutoff()},
          {"log_norm_sq", number(s.log_norm_sq())},
          {"log_tail_bound", number(s.log_tail_bound())},
          {"coefficients", coeffs}};
}

inline json to_json(const EigenResidual& e) {
  return {{"residual", number(e.residual)}, {"leakage", number(e.leakage)}, {"edge_bound", number(e.edge_bound)}};
}

inline json to_json(const RadialQuadrature& q) {
  return {{"nodes", numbers(q.nodes)},
          {"masses", numbers(q.masses)},
          {"order", q.order},
          {"exact_degree", q.exact_degree},
          {"provenance", to_string(q.provenance)},
          {"warnings", q.warnings}};
}

inline json to_json(const MomentReport& r) {
  return {{"deviations", numbers(r.deviations)}, {"max_deviation", number(r.max_deviation)}, {"passed", r.passed}};
}

inline json to_json(const GramReport& r) {
  json rows = json::array();
  for (Eigen::Index j = 0; j < r.gram.rows(); ++j) {
    json row = json::array();
    for (Eigen::Index k = 0; k < r.gram.cols(); ++k) row.push_back(complex(r.gram(j, k)));
    rows.push_back(row);
  }
  return {{"gram", rows}, {"max_deviation", number(r.max_deviation)}, {"passed", r.passed}};
}

inline json to_json(const DivergenceWitness& d) {
  return {{"terms", numbers(d.terms)}, {"partial_sums", numbers(d.partial_sums)}, {"slope", number(d.slope)}};
}

inline json to_json(const PgStructureReport& r) {
  json eig = json::array(), phase = json::array();
  for (cplx e : r.eigenvalues) eig.push_back(complex(e));
  for (cplx e : r.phase_space) phase.push_back(complex(e));
  return {{"nilpotency_index", r.nilpotency_index},
          {"eigenvalues", eig},
          {"eigenvector_count", r.eigenvector_count},
          {"phase_space", phase},
          {"extreme", r.extreme},
          {"jordan_similarity_error", number(r.jordan_similarity_error)},
          {"similarity_diagonal", numbers(r.similarity_diagonal)}};
}

/// Columns re_lambda, im_lambda, re, im.
inline void write_grid_csv(std::ostream& os, const std::vector<cplx>& lambdas, const std::vector<cplx>& values) {
  os << "re_lambda,im_lambda,re,im\n";
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    os << format(lambdas[k].real()) << ',' << format(lambdas[k].imag()) << ',' << format(values[k].real()) << ','
       << format(values[k].imag()) << '\n';
}

inline void write_csv(std::ostream& os, const SymbolValueGrid& g) { write_grid_csv(os, g.lambdas, g.values); }

}  // namespace manin::io
