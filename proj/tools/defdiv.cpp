// defdiv: command-line front end for the deformed-divergence library.
//
// Exit codes: 0 ok, 2 invalid input, 3 kappa does not exist or the solver
// failed, 4 inconclusive probe under --strict, 64 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "defdiv/defdiv.hpp"

namespace {

using defdiv::io::json;
using defdiv::io::num;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitUsage = 64;

struct PhiFlags {
  std::string family = "exp";
  std::string phi_json;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "exp | tsallis:<q> | kaniadakis:<k> | counterexample | tabulated:<csv>")
        ->capture_default_str();
    cmd->add_option("--phi-json", phi_json, "phi spec as JSON {family, params}");
  }

  [[nodiscard]] defdiv::DeformedExponential build() const {
    if (!phi_json.empty())
      return defdiv::io::spec_from_json(defdiv::io::parse_json(defdiv::io::read_file(phi_json), phi_json));
    return defdiv::io::parse_family(family);
  }
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(defdiv::io::parse_double(item, what));
  if (out.empty()) throw defdiv::ParseError(what + ": empty list");
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw defdiv::ValidationError("grid needs at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int solver_exit(defdiv::SolveStatus s) { return s == defdiv::SolveStatus::Converged ? kExitOk : kExitSolver; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Renyi divergences built on deformed exponentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "defdiv 0.1.0");

  PhiFlags phi_flags;
  double tol = 1e-12;
  std::string format = "json";

  // divergence
  auto* div = app.add_subcommand("divergence", "generalized Renyi divergence, endpoint limit, or phi-divergence");
  phi_flags.attach(div);
  std::string pair_path, u0_text = "const:1";
  double alpha = 0.5;
  std::optional<int> endpoint;
  bool want_phi = false;
  div->add_option("--pair", pair_path, "pair file (.csv or .json)")->required();
  div->add_option("--alpha", alpha, "alpha in (0, 1)")->capture_default_str();
  div->add_option("--u0", u0_text, "const:<x> | seq:<csv> | constructed:<json>")->capture_default_str();
  div->add_option("--limit", endpoint, "estimate the alpha -> 0 or alpha -> 1 limit")->check(CLI::IsMember({0, 1}));
  div->add_flag("--phi-divergence", want_phi, "report the phi-divergence instead");
  div->add_option("--tol", tol)->capture_default_str();
  div->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  // kappa
  auto* kap = app.add_subcommand("kappa", "solve the normalization equation for kappa");
  phi_flags.attach(kap);
  kap->add_option("--pair", pair_path)->required();
  kap->add_option("--alpha", alpha)->capture_default_str();
  kap->add_option("--u0", u0_text)->capture_default_str();
  kap->add_option("--tol", tol)->capture_default_str();
  double kappa_max = 1e6;
  kap->add_option("--kappa-max", kappa_max)->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "alpha-grid table (alpha, kappa, D)");
  phi_flags.attach(swp);
  std::string alphas_text;
  std::size_t steps = 9;
  swp->add_option("--pair", pair_path)->required();
  swp->add_option("--u0", u0_text)->capture_default_str();
  swp->add_option("--alphas", alphas_text, "comma-separated alphas; default is an even grid in (0, 1)");
  swp->add_option("--steps", steps, "interior points of the default grid")->capture_default_str();
  swp->add_option("--tol", tol)->capture_default_str();
  std::string sweep_format = "csv";
  swp->add_option("--format", sweep_format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  // probe
  auto* probe = app.add_subcommand("probe", "existence-condition probes");
  probe->require_subcommand(1);
  bool strict = false;

  auto* p_ratio = probe->add_subcommand("ratio", "limsup of phi(u) / phi(u - lambda0)");
  phi_flags.attach(p_ratio);
  defdiv::RatioProbeOptions ratio_opt;
  double lambda0 = 1.0;
  bool with_samples = false;
  p_ratio->add_option("--lambda0", lambda0)->capture_default_str();
  p_ratio->add_option("--umax", ratio_opt.u_max)->capture_default_str();
  p_ratio->add_option("--threshold", ratio_opt.threshold)->capture_default_str();
  p_ratio->add_flag("--samples", with_samples, "include the sampled ratios");
  p_ratio->add_flag("--strict", strict, "exit 4 on an Inconclusive verdict");

  auto* p_ineq = probe->add_subcommand("inequality", "alpha phi(u) <= phi(u - u0) on a grid");
  phi_flags.attach(p_ineq);
  double u0_value = 1.0, umin = -50.0, umax = 50.0;
  std::size_t points = 10001;
  p_ineq->add_option("--alpha", alpha)->required();
  p_ineq->add_option("--u0-value", u0_value)->capture_default_str();
  p_ineq->add_option("--umin", umin)->capture_default_str();
  p_ineq->add_option("--umax", umax)->capture_default_str();
  p_ineq->add_option("--points", points)->capture_default_str();

  auto* p_env = probe->add_subcommand("envelope", "phi(u + v) <= K phi(u) e^{lambda v}");
  phi_flags.attach(p_env);
  std::optional<double> env_k, env_c;
  double vmax = 20.0;
  p_env->add_option("--K", env_k, "ratio bound; taken from the ratio probe when omitted");
  p_env->add_option("--c", env_c, "lower end of the u range; from the ratio probe when omitted");
  p_env->add_option("--lambda0", lambda0)->capture_default_str();
  p_env->add_option("--umax", umax)->capture_default_str();
  p_env->add_option("--vmax", vmax)->capture_default_str();
  p_env->add_option("--points", points)->capture_default_str();
  p_env->add_flag("--strict", strict, "exit 4 when the ratio probe is Inconclusive");

  auto* p_kan = probe->add_subcommand("kaniadakis", "minimizer and (alpha, n, lambda) certificate for exp_kappa");
  double kappa_param = 0.5;
  p_kan->add_option("--kappa", kappa_param)->capture_default_str();
  p_kan->add_option("--alpha", alpha)->capture_default_str();

  // construct-u0
  auto* cons = app.add_subcommand("construct-u0", "u0 sequence for the counting measure");
  phi_flags.attach(cons);
  std::string lambdas_text, out_path;
  double cons_alpha = 0.1, lambda1 = 2.0, ratio = 0.7, target = 1.0;
  std::size_t count = 60, min_terms = 16;
  std::optional<double> eta;
  cons->add_option("--alpha", cons_alpha)->capture_default_str();
  cons->add_option("--lambdas", lambdas_text, "comma-separated strictly decreasing lambdas");
  cons->add_option("--lambda1", lambda1, "first lambda of the default geometric sequence")->capture_default_str();
  cons->add_option("--ratio", ratio, "ratio of the default geometric sequence")->capture_default_str();
  cons->add_option("--count", count, "length of the default geometric sequence")->capture_default_str();
  cons->add_option("--eta", eta, "anchor with alpha phi(eta) < phi(eta - lambda_1)");
  cons->add_option("--target", target, "summability target for sum phi(c_i)")->capture_default_str();
  cons->add_option("--min-terms", min_terms)->capture_default_str();
  cons->add_option("--out", out_path, "also write the construction JSON here");
  cons->add_flag("--strict", strict, "exit 4 when the construction is Inconclusive");

  // demo-counterexample
  auto* demo = app.add_subcommand("demo-counterexample", "divergent shifted integral for the counterexample phi");
  double demo_lambda = 1.0;
  int pieces = 60;
  bool demo_solve = false;
  std::string demo_format = "json";
  demo->add_option("--lambda", demo_lambda)->capture_default_str();
  demo->add_option("--pieces", pieces)->capture_default_str();
  demo->add_flag("--solve", demo_solve, "also solve for kappa on the adversarial pair");
  demo->add_option("--format", demo_format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  // validate-phi
  auto* val = app.add_subcommand("validate-phi", "check convexity and monotonicity on a grid");
  phi_flags.attach(val);
  double vumin = -50.0, vumax = 50.0;
  std::size_t vpoints = 2001;
  val->add_option("--umin", vumin)->capture_default_str();
  val->add_option("--umax", vumax)->capture_default_str();
  val->add_option("--points", vpoints)->capture_default_str();

  // oracle
  auto* orc = app.add_subcommand("oracle", "classical closed forms for a pair");
  std::optional<double> q_param;
  orc->add_option("--pair", pair_path)->required();
  orc->add_option("--alpha", alpha)->capture_default_str();
  orc->add_option("--tsallis-q", q_param, "also report the Tsallis relative entropy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    defdiv::SolverOptions sopt;
    sopt.tol = tol;

    if (*div) {
      const auto phi = phi_flags.build();
      const auto pair = defdiv::io::load_pair(pair_path);
      const auto u0 = defdiv::io::parse_u0(u0_text, pair.size());
      if (want_phi) {
        const double v = defdiv::phi_divergence(phi, pair, u0.values);
        emit({{"command", "divergence"}, {"kind", "phi"}, {"family", phi.id()}, {"u0", u0.id}, {"value", num(v)}});
        return kExitOk;
      }
      if (endpoint) {
        const auto seq = defdiv::dyadic_alpha_sequence(*endpoint);
        const auto est = defdiv::limit_divergence(phi, pair, u0.values, *endpoint, seq, sopt);
        json j = defdiv::io::to_json(est);
        j["command"] = "divergence";
        j["kind"] = "limit";
        j["family"] = phi.id();
        j["u0"] = u0.id;
        emit(j);
        bool solved = true;
        for (const auto& r : est.table) solved = solved && r.status == defdiv::SolveStatus::Converged;
        return solved ? kExitOk : kExitSolver;
      }
      const auto rep = defdiv::generalized_renyi(phi, pair, alpha, u0.values, u0.id, sopt);
      if (format == "csv") {
        std::cout << "alpha,kappa,value,status\n"
                  << defdiv::format_double(rep.alpha) << "," << defdiv::format_double(rep.kappa) << ","
                  << defdiv::format_double(rep.value) << "," << defdiv::to_string(rep.status) << "\n";
      } else {
        json j = defdiv::io::to_json(rep);
        j["command"] = "divergence";
        j["kind"] = "renyi";
        emit(j);
      }
      return solver_exit(rep.status);
    }

    if (*kap) {
      const auto phi = phi_flags.build();
      const auto pair = defdiv::io::load_pair(pair_path);
      const auto u0 = defdiv::io::parse_u0(u0_text, pair.size());
      sopt.kappa_max = kappa_max;
      const auto r = defdiv::solve_kappa(phi, pair, alpha, u0.values, sopt);
      json j = defdiv::io::to_json(r);
      j["command"] = "kappa";
      j["family"] = phi.id();
      j["u0"] = u0.id;
      j["n_at_zero"] = num(defdiv::normalization_functional(phi, pair, alpha, u0.values, 0.0));
      emit(j);
      return solver_exit(r.status);
    }

    if (*swp) {
      const auto phi = phi_flags.build();
      const auto pair = defdiv::io::load_pair(pair_path);
      const auto u0 = defdiv::io::parse_u0(u0_text, pair.size());
      std::vector<double> alphas;
      if (!alphas_text.empty()) {
        alphas = parse_list(alphas_text, "--alphas");
      } else {
        if (steps < 1) throw defdiv::ValidationError("--steps must be positive");
        for (std::size_t i = 1; i <= steps; ++i)
          alphas.push_back(static_cast<double>(i) / static_cast<double>(steps + 1));
      }
      const auto rows = defdiv::divergence_sweep(phi, pair, u0.values, alphas, u0.id, sopt);
      int code = kExitOk;
      if (sweep_format == "csv") {
        std::cout << "alpha,kappa,D,status\n";
        for (const auto& r : rows)
          std::cout << defdiv::format_double(r.alpha) << "," << defdiv::format_double(r.kappa) << ","
                    << defdiv::format_double(r.value) << "," << defdiv::to_string(r.status) << "\n";
      } else {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(defdiv::io::to_json(r));
        emit({{"command", "sweep"}, {"family", phi.id()}, {"u0", u0.id}, {"rows", arr}});
      }
      for (const auto& r : rows)
        if (r.status != defdiv::SolveStatus::Converged) code = kExitSolver;
      return code;
    }

    if (*p_ratio) {
      const auto phi = phi_flags.build();
      const auto rep = defdiv::ratio_limsup_probe(phi, lambda0, ratio_opt);
      json j = defdiv::io::to_json(rep, with_samples);
      j["command"] = "probe ratio";
      j["family"] = phi.id();
      emit(j);
      return strict && rep.verdict == defdiv::Verdict::Inconclusive ? kExitInconclusive : kExitOk;
    }

    if (*p_ineq) {
      const auto phi = phi_flags.build();
      const auto grid = linspace(umin, umax, points);
      const auto ev = defdiv::pointwise_inequality_probe(phi, alpha, u0_value, grid);
      json j = defdiv::io::to_json(ev);
      j["command"] = "probe inequality";
      j["family"] = phi.id();
      j["alpha"] = num(alpha);
      j["u0_value"] = num(u0_value);
      emit(j);
      return kExitOk;
    }

    if (*p_env) {
      const auto phi = phi_flags.build();
      double k = 0.0, c = 0.0;
      if (env_k) {
        k = *env_k;
        c = env_c.value_or(-defdiv::kInf);
      } else {
        const auto rep = defdiv::ratio_limsup_probe(phi, lambda0, std::max(umax, 2.0 * lambda0));
        if (rep.verdict != defdiv::Verdict::Bounded) {
          emit({{"command", "probe envelope"},
                {"family", phi.id()},
                {"holds", false},
                {"ratio_verdict", defdiv::to_string(rep.verdict)}});
          return strict && rep.verdict == defdiv::Verdict::Inconclusive ? kExitInconclusive : kExitOk;
        }
        k = rep.K;
        c = env_c.value_or(rep.c);
      }
      const double lo = std::isfinite(c) ? c : -umax;
      const auto ugrid = linspace(lo, umax, std::max<std::size_t>(2, points / 50));
      const auto vgrid = linspace(0.0, vmax, 201);
      const auto ev = defdiv::growth_envelope_check(phi, k, lambda0, c, ugrid, vgrid);
      json j = defdiv::io::to_json(ev);
      j["command"] = "probe envelope";
      j["family"] = phi.id();
      j["K"] = num(k);
      j["c"] = num(c);
      emit(j);
      return kExitOk;
    }

    if (*p_kan) {
      const auto cert = defdiv::verify_kaniadakis_u0(kappa_param, alpha);
      json j = defdiv::io::to_json(cert);
      j["command"] = "probe kaniadakis";
      emit(j);
      return cert.unimodal ? kExitOk : (strict ? kExitInconclusive : kExitOk);
    }

    if (*cons) {
      const auto phi = phi_flags.build();
      std::vector<double> lambdas;
      if (!lambdas_text.empty()) {
        lambdas = parse_list(lambdas_text, "--lambdas");
      } else {
        if (!(ratio > 0.0 && ratio < 1.0)) throw defdiv::ValidationError("--ratio must lie in (0, 1)");
        for (std::size_t i = 0; i < count; ++i) lambdas.push_back(lambda1 * std::pow(ratio, static_cast<double>(i)));
      }
      defdiv::ConstructionOptions copt;
      copt.eta = eta;
      copt.min_terms = min_terms;
      const auto c = defdiv::construct_u0_sequence(phi, cons_alpha, lambdas, target, copt);
      json j = defdiv::io::to_json(c);
      j["command"] = "construct-u0";
      j["family"] = phi.id();
      if (!out_path.empty()) defdiv::io::write_file(out_path, j.dump(2) + "\n");
      emit(j);
      return strict && !c.complete ? kExitInconclusive : kExitOk;
    }

    if (*demo) {
      const auto d = defdiv::adversarial_nonexistence_demo(demo_lambda, pieces);
      if (demo_format == "csv") {
        std::cout << defdiv::io::demo_csv(d);
        return kExitOk;
      }
      json j = defdiv::io::to_json(d);
      j["command"] = "demo-counterexample";
      json rows = json::array();
      for (const auto& r : d.rows)
        rows.push_back({{"n", r.n},
                        {"c", num(r.c)},
                        {"base_term", num(r.base_term)},
                        {"base_partial", num(static_cast<double>(r.base_partial))},
                        {"shifted_term", num(r.shifted_term)},
                        {"shifted_partial", num(r.shifted_partial)}});
      j["rows"] = rows;
      if (demo_solve) {
        const auto pair = defdiv::adversarial_pair(d);
        const auto phi = defdiv::DeformedExponential::counterexample();
        const auto r = defdiv::solve_kappa(phi, pair, 0.5, defdiv::constant_u0(pair.size()), sopt);
        j["solve"] = defdiv::io::to_json(r);
      }
      emit(j);
      return kExitOk;
    }

    if (*val) {
      const auto phi = phi_flags.build();
      const auto [dlo, dhi] = phi.domain();
      const auto grid = linspace(std::max(vumin, dlo), std::min(vumax, dhi), vpoints);
      const auto rep = defdiv::validate_spec(phi, grid);
      json j = defdiv::io::to_json(rep);
      j["command"] = "validate-phi";
      j["family"] = phi.id();
      emit(j);
      return rep.ok() ? kExitOk : kExitInvalid;
    }

    if (*orc) {
      const auto pair = defdiv::io::load_pair(pair_path);
      json j{{"command", "oracle"},
             {"alpha", num(alpha)},
             {"classical_renyi", num(defdiv::classical_renyi(pair, alpha))},
             {"kl_pq", num(defdiv::kl_divergence(pair))},
             {"kl_qp", num(defdiv::kl_divergence(pair.swapped()))},
             {"shannon_p", num(defdiv::shannon_entropy(pair.measure(), pair.p()))}};
      if (q_param) j["tsallis_relative_entropy"] = num(defdiv::tsallis_relative_entropy(pair, *q_param));
      emit(j);
      return kExitOk;
    }
  } catch (const defdiv::ParseError& e) {
    std::cerr << "defdiv: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "defdiv: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
