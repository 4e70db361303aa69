#pragma once

// File formats: phi specs (JSON, knot CSV), probability pairs (CSV, JSON),
// the u0 mini-language, and JSON encodings of every report.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "defdiv/core.hpp"
#include "defdiv/deformed_exp.hpp"
#include "defdiv/divergences.hpp"
#include "defdiv/existence.hpp"
#include "defdiv/kappa_solver.hpp"
#include "defdiv/measures.hpp"

namespace defdiv::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// low-level helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, const std::string& where) {
  const std::string s(trim(text));
  if (s.empty()) throw ParseError(where + ": empty number");
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::abs(v) > 1.0))
    throw ParseError(where + ": not a number: '" + s + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

/// Comma-separated values with a header line. Blank lines and lines starting
/// with '#' are skipped; every data row must match the header width.
inline CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto split = [](std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto pos = s.find(',', start);
      out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(source + " line " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size()) + " columns, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw ParseError(source + ": missing header");
  return t;
}

/// Finite values as JSON numbers, non-finite ones as "inf" / "-inf" / "nan".
inline json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

inline double get_num(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>(), what);
  throw ParseError(what + ": expected a number");
}

inline json num_array(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

inline std::vector<double> get_num_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_num(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// phi specs

inline std::vector<std::pair<double, double>> load_knots_csv(const std::string& path) {
  const auto t = parse_csv(read_file(path), path);
  if (t.header.size() != 2 || t.header[0] != "u" || t.header[1] != "phi")
    throw ParseError(path + ": knot files need the header 'u,phi'");
  std::vector<std::pair<double, double>> knots;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = path + " line " + std::to_string(t.line_numbers[r]);
    knots.emplace_back(parse_double(t.rows[r][0], where), parse_double(t.rows[r][1], where));
  }
  return knots;
}

inline json spec_to_json(const DeformedExponential& phi) {
  json params = json::object();
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TsallisQ>) {
          params["q"] = f.q;
        } else if constexpr (std::is_same_v<F, KaniadakisKappa>) {
          params["kappa"] = f.kappa;
        } else if constexpr (std::is_same_v<F, TabulatedMonotone>) {
          json k = json::array();
          for (std::size_t i = 0; i < f.u.size(); ++i) k.push_back(json::array({f.u[i], f.phi[i]}));
          params["knots"] = std::move(k);
        }
      },
      phi.family());
  return json{{"family", phi.name()}, {"params", params}};
}

inline DeformedExponential spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw ParseError("phi spec: expected {\"family\": name, \"params\": {...}}");
  const auto family = j["family"].get<std::string>();
  const json params = j.value("params", json::object());
  auto param = [&](const char* key) {
    if (!params.contains(key)) throw ParseError("phi spec: family '" + family + "' needs params." + key);
    return get_num(params[key], std::string("params.") + key);
  };
  if (family == "exp") return DeformedExponential::classical();
  if (family == "tsallis") return DeformedExponential::tsallis(param("q"));
  if (family == "kaniadakis") return DeformedExponential::kaniadakis(param("kappa"));
  if (family == "counterexample") return DeformedExponential::counterexample();
  if (family == "tabulated") {
    if (!params.contains("knots") || !params["knots"].is_array()) throw ParseError("phi spec: tabulated needs knots");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : params["knots"]) {
      if (!k.is_array() || k.size() != 2) throw ParseError("phi spec: each knot is [u, phi]");
      knots.emplace_back(get_num(k[0], "knot u"), get_num(k[1], "knot phi"));
    }
    return DeformedExponential::tabulated(std::move(knots));
  }
  throw ParseError("phi spec: unknown family '" + family + "'");
}

/// "exp", "tsallis:<q>", "kaniadakis:<kappa>", "counterexample", "tabulated:<knots.csv>".
inline DeformedExponential parse_family(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw ParseError("--family " + name + " needs a parameter, e.g. " + name + ":0.5");
  };
  if (name == "exp" && arg.empty()) return DeformedExponential::classical();
  if (name == "counterexample" && arg.empty()) return DeformedExponential::counterexample();
  if (name == "tsallis") {
    need_arg();
    return DeformedExponential::tsallis(parse_double(arg, "--family tsallis"));
  }
  if (name == "kaniadakis") {
    need_arg();
    return DeformedExponential::kaniadakis(parse_double(arg, "--family kaniadakis"));
  }
  if (name == "tabulated") {
    need_arg();
    return DeformedExponential::tabulated(load_knots_csv(arg));
  }
  throw ParseError("unknown family '" + text + "'");
}

// ---------------------------------------------------------------------------
// probability pairs

inline json measure_to_json(const Measure& m) {
  if (const auto* c = std::get_if<Counting>(&m.kind())) return json{{"kind", "counting"}, {"n_atoms", c->n_atoms}};
  if (const auto* g = std::get_if<QuadGrid>(&m.kind()))
    return json{{"kind", "quad"}, {"nodes", num_array(g->nodes)}, {"weights", num_array(g->weights)}};
  json pieces = json::array();
  for (const auto& p : std::get<SimpleNonAtomic>(m.kind()).pieces) pieces.push_back({{"id", p.id}, {"mass", p.mass}});
  return json{{"kind", "simple"}, {"pieces", pieces}};
}

inline Measure measure_from_json(const json& j) {
  const auto kind = j.value("kind", std::string());
  if (kind == "counting") {
    if (!j.contains("n_atoms") || !j["n_atoms"].is_number_unsigned()) throw ParseError("measure: n_atoms missing");
    return Measure::counting(j["n_atoms"].get<std::size_t>());
  }
  if (kind == "quad") return Measure::quad_grid(get_num_array(j.at("nodes"), "nodes"), get_num_array(j.at("weights"), "weights"));
  if (kind == "simple") {
    std::vector<Piece> pieces;
    for (const auto& p : j.at("pieces")) {
      if (!p.contains("id") || !p["id"].is_number_unsigned()) throw ParseError("measure: piece id missing");
      pieces.push_back({p["id"].get<std::size_t>(), get_num(p.at("mass"), "piece mass")});
    }
    return Measure::simple(std::move(pieces));
  }
  throw ParseError("measure: unknown kind '" + kind + "'");
}

inline json pair_to_json(const ProbabilityPair& pair) {
  if (pair.tail()) throw std::invalid_argument("pairs with an analytic tail cannot be serialized");
  return json{{"measure", measure_to_json(pair.measure())}, {"p", num_array(pair.p())}, {"q", num_array(pair.q())}};
}

inline ProbabilityPair pair_from_json(const json& j) {
  if (!j.is_object() || !j.contains("measure") || !j.contains("p") || !j.contains("q"))
    throw ParseError("pair: expected {\"measure\", \"p\", \"q\"}");
  try {
    return ProbabilityPair::make(measure_from_json(j["measure"]), get_num_array(j["p"], "p"), get_num_array(j["q"], "q"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("pair: ") + e.what());
  }
}

/// `atom,p,q` rows become a counting measure, `node,weight,p,q` a quadrature grid.
inline ProbabilityPair pair_from_csv(const std::string& text, const std::string& source) {
  const auto t = parse_csv(text, source);
  const std::vector<std::string> counting{"atom", "p", "q"};
  const std::vector<std::string> quad{"node", "weight", "p", "q"};
  if (t.rows.empty()) throw ParseError(source + ": no data rows");
  std::vector<double> p, q;
  auto where = [&](std::size_t r) { return source + " line " + std::to_string(t.line_numbers[r]); };
  if (t.header == counting) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double atom = parse_double(t.rows[r][0], where(r));
      if (atom != static_cast<double>(r + 1))
        throw ParseError(where(r) + ": atoms must be numbered 1, 2, ... in order");
      p.push_back(parse_double(t.rows[r][1], where(r)));
      q.push_back(parse_double(t.rows[r][2], where(r)));
    }
    const auto n = p.size();
    return ProbabilityPair::make(Measure::counting(n), std::move(p), std::move(q));
  }
  if (t.header == quad) {
    std::vector<double> nodes, weights;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      nodes.push_back(parse_double(t.rows[r][0], where(r)));
      weights.push_back(parse_double(t.rows[r][1], where(r)));
      p.push_back(parse_double(t.rows[r][2], where(r)));
      q.push_back(parse_double(t.rows[r][3], where(r)));
    }
    return ProbabilityPair::make(Measure::quad_grid(std::move(nodes), std::move(weights)), std::move(p), std::move(q));
  }
  throw ParseError(source + ": header must be 'atom,p,q' or 'node,weight,p,q'");
}

inline std::string pair_to_csv(const ProbabilityPair& pair) {
  std::string out;
  if (std::holds_alternative<Counting>(pair.measure().kind())) {
    out = "atom,p,q\n";
    for (std::size_t i = 0; i < pair.size(); ++i)
      out += std::to_string(i + 1) + "," + format_double(pair.p()[i]) + "," + format_double(pair.q()[i]) + "\n";
    return out;
  }
  if (const auto* g = std::get_if<QuadGrid>(&pair.measure().kind())) {
    out = "node,weight,p,q\n";
    for (std::size_t i = 0; i < pair.size(); ++i)
      out += format_double(g->nodes[i]) + "," + format_double(g->weights[i]) + "," + format_double(pair.p()[i]) + "," +
             format_double(pair.q()[i]) + "\n";
    return out;
  }
  throw std::invalid_argument("simple-measure pairs are saved as JSON only");
}

inline bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

inline ProbabilityPair load_pair(const std::string& path) {
  const auto text = read_file(path);
  if (is_json_path(path)) return pair_from_json(parse_json(text, path));
  return pair_from_csv(text, path);
}

inline void save_pair(const std::string& path, const ProbabilityPair& pair) {
  write_file(path, is_json_path(path) ? pair_to_json(pair).dump(2) + "\n" : pair_to_csv(pair));
}

// ---------------------------------------------------------------------------
// u0 mini-language: const:<x>, seq:<csv>, constructed:<json>

struct U0Spec {
  std::vector<double> values;
  std::string id;
};

inline U0Spec parse_u0(const std::string& text, std::size_t n_atoms) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("u0 must be const:<x>, seq:<csv> or constructed:<json>");
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  U0Spec s;
  s.id = text;
  if (kind == "const") {
    s.values.assign(n_atoms, parse_double(arg, "u0 const"));
  } else if (kind == "seq") {
    const auto t = parse_csv(read_file(arg), arg);
    std::size_t col = t.header.size() - 1;
    if (t.header.back() != "u0") throw ParseError(arg + ": u0 sequences need a 'u0' column last");
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      s.values.push_back(parse_double(t.rows[r][col], arg + " line " + std::to_string(t.line_numbers[r])));
  } else if (kind == "constructed") {
    const auto j = parse_json(read_file(arg), arg);
    if (!j.contains("u0_sequence")) throw ParseError(arg + ": missing u0_sequence");
    s.values = get_num_array(j["u0_sequence"], "u0_sequence");
  } else {
    throw ParseError("unknown u0 kind '" + kind + "'");
  }
  if (s.values.size() < n_atoms)
    throw ValidationError("u0 supplies " + std::to_string(s.values.size()) + " values for " + std::to_string(n_atoms) +
                          " atoms");
  s.values.resize(n_atoms);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (!(s.values[i] > 0.0) || !std::isfinite(s.values[i]))
      throw ValidationError("u0 must be positive and finite (atom " + std::to_string(i + 1) + ")");
  return s;
}

// ---------------------------------------------------------------------------
// report encodings

inline json to_json(const KappaSolveResult& r) {
  return json{{"alpha", num(r.alpha)},
              {"kappa", num(r.kappa)},
              {"residual", num(r.residual)},
              {"bracket", json::array({num(r.bracket_lo), num(r.bracket_hi)})},
              {"iterations", r.iterations},
              {"status", to_string(r.status)},
              {"last_finite_kappa", num(r.last_finite_kappa)},
              {"first_infinite_kappa", num(r.first_infinite_kappa)},
              {"locally_strict", r.locally_strict}};
}

inline json to_json(const DivergenceReport& r) {
  return json{{"alpha", num(r.alpha)}, {"kappa", num(r.kappa)},   {"value", num(r.value)},
              {"family", r.family},    {"u0", r.u0_id},           {"status", to_string(r.status)},
              {"residual", num(r.solve.residual)}};
}

inline json to_json(const LimitEstimate& e) {
  json rows = json::array();
  for (const auto& r : e.table)
    rows.push_back({{"alpha", num(r.alpha)}, {"kappa", num(r.kappa)}, {"value", num(r.value)},
                    {"status", to_string(r.status)}});
  return json{{"endpoint", e.endpoint}, {"estimate", num(e.estimate)}, {"converged", e.converged}, {"table", rows}};
}

inline json to_json(const ConditionProbeReport& r, bool with_samples = false) {
  json j{{"lambda0", num(r.lambda0)},
         {"verdict", to_string(r.verdict)},
         {"sup_estimate", num(r.sup_estimate)},
         {"tail_start", num(r.tail_start)},
         {"tail_ratio", num(r.tail_ratio)},
         {"samples", r.u_samples.size()}};
  if (r.verdict == Verdict::Bounded) {
    j["K"] = num(r.K);
    j["c"] = num(r.c);
    j["alpha_used"] = num(r.alpha_used);
  }
  if (with_samples) {
    j["u_samples"] = num_array(r.u_samples);
    j["ratio_samples"] = num_array(r.ratio_samples);
  }
  return j;
}

inline json to_json(const InequalityEvidence& e) {
  return json{{"holds", e.holds}, {"c_found", num(e.c_found)}, {"violations", e.violations}, {"checked", e.checked}};
}

inline json to_json(const KaniadakisCertificate& c) {
  return json{{"kappa", num(c.kappa)},   {"alpha", num(c.alpha)},
              {"v0", num(c.v0)},         {"v0_closed_form", num(c.v0_closed_form)},
              {"lambda", num(c.lambda)}, {"n", c.n},
              {"unimodal", c.unimodal},  {"step_check", c.step_check},
              {"check", c.check},        {"grid_points", c.grid_points}};
}

inline json to_json(const EnvelopeEvidence& e) {
  json ce = json::array();
  for (const auto& [u, v] : e.counterexamples) ce.push_back(json::array({num(u), num(v)}));
  return json{{"holds", e.holds},
              {"lambda", num(e.lambda)},
              {"checked", e.checked},
              {"worst_log_excess", num(e.worst_log_excess)},
              {"counterexamples", ce}};
}

inline json to_json(const U0Construction& c) {
  json idx = json::array();
  for (auto n : c.selected_indices) idx.push_back(n);
  return json{{"status", c.complete ? "Complete" : "Inconclusive"},
              {"alpha", num(c.alpha)},
              {"eta", num(c.eta)},
              {"epsilon", num(c.epsilon)},
              {"summability_target", num(c.summability_target)},
              {"partial_sum_phi_c", num(c.partial_sum_phi_c)},
              {"tail_bound", num(c.tail_bound)},
              {"certificate_holds", c.certificate_holds()},
              {"u0_sequence", num_array(c.u0_sequence)},
              {"c_sequence", num_array(c.c_sequence)},
              {"phi_c_bounds", num_array(c.phi_c_bounds)},
              {"selected_indices", idx},
              {"c_tilde", num_array(c.c_tilde)},
              {"note", c.note}};
}

inline json to_json(const CounterexampleDemo& d) {
  return json{{"lambda", num(d.lambda)},
              {"scale", num(d.scale)},
              {"critical_shift", num(d.critical_shift)},
              {"certified_lambda_min", num(d.certified_lambda_min)},
              {"diverges", d.diverges},
              {"pieces", d.rows.size()},
              {"base_sum", num(static_cast<double>(d.rows.back().base_partial))},
              {"shifted_sum", num(d.rows.back().shifted_partial)}};
}

inline std::string demo_csv(const CounterexampleDemo& d) {
  std::string out = "n,c,log_mass,base_term,base_partial,shifted_term,shifted_partial\n";
  for (const auto& r : d.rows)
    out += std::to_string(r.n) + "," + format_double(r.c) + "," + format_double(r.log_mass) + "," +
           format_double(r.base_term) + "," + format_double(static_cast<double>(r.base_partial)) + "," +
           format_double(r.shifted_term) + "," + format_double(r.shifted_partial) + "\n";
  return out;
}

inline json to_json(const SpecValidationReport& r) {
  return json{{"ok", r.ok()},
              {"convexity_violations", num_array(r.convexity_violations)},
              {"monotonicity_violations", num_array(r.monotonicity_violations)},
              {"saturated_points", r.saturated_points},
              {"skipped_points", r.skipped_points},
              {"u_min", num(r.u_min)},
              {"u_max", num(r.u_max)},
              {"phi_at_min", num(r.phi_at_min)},
              {"phi_at_max", num(r.phi_at_max)}};
}

}  // namespace defdiv::io
