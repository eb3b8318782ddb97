#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "clarkbmo/atomic.hpp"
#include "clarkbmo/bmo.hpp"
#include "clarkbmo/error.hpp"
#include "clarkbmo/harness.hpp"
#include "clarkbmo/operators.hpp"

using namespace clarkbmo;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
}

cplx parse_alpha(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ParseError("alpha", "expected RE,IM");
  }
}

cplx unimodular_alpha(const std::string& s) {
  const cplx a = parse_alpha(s);
  if (std::abs(std::abs(a) - 1.0) > 1e-12) throw ParseError("alpha", "alpha must be unimodular");
  return a;
}

/// Accepts {"<key>": [x, ...]} with real entries or [re, im] pairs.
std::vector<cplx> read_values(const std::string& path, const std::string& key) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains(key) || !j[key].is_array()) throw ParseError(key, "missing array \"" + key + "\"");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    const auto& e = j[key][i];
    const std::string field = key + "[" + std::to_string(i) + "]";
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ParseError(field, "expected a number or [re, im]");
    }
  }
  return out;
}

bool has_key(const std::string& path, const std::string& key) {
  try {
    const auto j = json::parse(read_file(path));
    return j.is_object() && j.contains(key);
  } catch (const json::exception&) {
    return false;
  }
}

json arc_json(const Arc& a) { return {{"start", a.start().angle()}, {"extent", a.extent()}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clark measures, discrete BMO and truncated Hankel operators"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string config_path, out_path, format = "json", verify_path;
  std::uint64_t seed = 0;
  int trials = 0;
  std::size_t grid_m = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  auto* trials_opt = app.add_option("--trials", trials, "trials per parameter")->check(CLI::PositiveNumber);
  auto* grid_opt = app.add_option("--grid", grid_m, "quadrature points on the circle (power of two)");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--verify-report", verify_path, "recompute 10 rows of a CSV report")->check(CLI::ExistingFile);

  std::string theta_path, alpha_str = "1,0", measure_path, values_path, symbol_path, matrix_path, mode = "both";
  std::vector<std::size_t> n_values, degree_values;
  double m_bound = 0.0, inject = 1.0;

  auto* clark_cmd = app.add_subcommand("clark-measure", "atoms and masses of the Clark measure");
  clark_cmd->add_option("--theta", theta_path, "Blaschke product JSON")->required()->check(CLI::ExistingFile);
  clark_cmd->add_option("--alpha", alpha_str, "unimodular RE,IM");

  auto* cond_cmd = app.add_subcommand("check-conditions", "neighbour constants, Hilbert bound, kappa and epsilon");
  cond_cmd->add_option("--measure", measure_path, "measure JSON")->check(CLI::ExistingFile);
  cond_cmd->add_option("--theta", theta_path, "Blaschke product JSON")->check(CLI::ExistingFile);
  cond_cmd->add_option("--alpha", alpha_str, "unimodular RE,IM");

  auto* bmo_cmd = app.add_subcommand("bmo-norm", "BMO norm of values on a measure");
  bmo_cmd->add_option("--measure", measure_path, "measure JSON")->required()->check(CLI::ExistingFile);
  bmo_cmd->add_option("--values", values_path, "{\"values\": [...]}")->required()->check(CLI::ExistingFile);

  auto* atomic_cmd = app.add_subcommand("atomic-decompose", "CZ decomposition and LP norm bracket");
  atomic_cmd->add_option("--measure", measure_path, "measure JSON")->required()->check(CLI::ExistingFile);
  atomic_cmd->add_option("--values", values_path, "{\"values\": [...]}")->required()->check(CLI::ExistingFile);
  atomic_cmd->add_option("--mode", mode, "cz, lp or both")->check(CLI::IsMember({"cz", "lp", "both"}));

  auto* hankel_cmd = app.add_subcommand("hankel-matrix", "truncated Hankel matrix in the Clark basis");
  hankel_cmd->add_option("--theta", theta_path, "Blaschke product JSON")->required()->check(CLI::ExistingFile);
  hankel_cmd->add_option("--alpha", alpha_str, "unimodular RE,IM");
  hankel_cmd->add_option("--symbol", symbol_path, "{\"values\"} trace or {\"grid_values\"}")->required()->check(CLI::ExistingFile);

  auto* norm_cmd = app.add_subcommand("op-norm", "operator norm and singular values");
  norm_cmd->add_option("--matrix", matrix_path, "matrix JSON")->required()->check(CLI::ExistingFile);

  auto* ident_cmd = app.add_subcommand("verify-identities", "run the identity suite");
  ident_cmd->add_option("--inject-mass-scale", inject, "multiply Clark masses (fault injection)");

  auto* cor_cmd = app.add_subcommand("corollary1", "Haar-measure Hankel vs BMO ratios");
  auto* thm_cmd = app.add_subcommand("theorem3", "Clark-basis Hankel vs BMO ratios for random inner functions");
  auto* atom_cmd = app.add_subcommand("atom-bound", "L1 norm of extended atoms");
  auto* czlp_cmd = app.add_subcommand("cz-vs-lp", "CZ weight, LP bracket and L1 norm");
  for (auto* c : {cor_cmd, atom_cmd}) c->add_option("--n-values", n_values, "n sweep");
  for (auto* c : {thm_cmd, czlp_cmd}) c->add_option("--degrees", degree_values, "degree sweep");
  cor_cmd->add_option("--m-bound", m_bound, "stand-in for the maximal-operator norm");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = config_from_json(read_file(config_path));
    if (seed_opt->count()) cfg.seed = seed;
    if (trials_opt->count()) cfg.trials = trials;
    if (grid_opt->count()) cfg.grid_M = grid_m;
    if (!n_values.empty()) cfg.n_values = n_values;
    if (!degree_values.empty()) cfg.degree_values = degree_values;
    if (m_bound > 0.0) cfg.m_bound = m_bound;
    if (out_path.empty()) out_path = cfg.output_path;
    const QuadratureGrid grid(cfg.grid_M);

    if (!verify_path.empty()) {
      const auto res = verify_report(read_file(verify_path), 10, cfg.seed);
      json j{{"checked", res.checked}, {"max_deviation", res.max_deviation}, {"failures", res.failures},
             {"passed", res.failures.empty()}};
      emit(j.dump(2), out_path);
      return res.failures.empty() ? 0 : 1;
    }

    if (*clark_cmd) {
      const auto cm = clark_measure(deserialize_blaschke(read_file(theta_path)), unimodular_alpha(alpha_str));
      json j = json::parse(serialize(cm.measure()));
      j["c_alpha"] = {cm.c_alpha.real(), cm.c_alpha.imag()};
      emit(j.dump(), out_path);
    } else if (*cond_cmd) {
      if (measure_path.empty() == theta_path.empty()) throw Error("give exactly one of --measure and --theta");
      const auto rep = measure_path.empty()
                           ? check_conditions(clark_measure(deserialize_blaschke(read_file(theta_path)), unimodular_alpha(alpha_str)))
                           : check_conditions(deserialize_measure(read_file(measure_path)));
      emit(to_json(rep), out_path);
    } else if (*bmo_cmd || *atomic_cmd) {
      auto mu = std::make_shared<const DiscreteMeasure>(deserialize_measure(read_file(measure_path)));
      const SampledFunction f(mu, read_values(values_path, "values"));
      json j;
      if (*bmo_cmd) {
        const auto r = bmo_norm(f);
        j = {{"norm", r.norm}, {"extremal_arc", arc_json(r.extremal_arc)}};
      } else {
        if (mode != "lp") j["cz"] = json::parse(to_json(cz_decompose(f)));
        if (mode != "cz") {
          const auto b = atomic_norm_lp(f);
          j["lp"] = {{"lower", b.lower}, {"upper", b.upper}, {"restricted", b.restricted}, {"rounds", b.rounds}};
        }
      }
      emit(j.dump(), out_path);
    } else if (*hankel_cmd) {
      const auto theta = deserialize_blaschke(read_file(theta_path));
      const cplx alpha = unimodular_alpha(alpha_str);
      OperatorMatrix m;
      if (has_key(symbol_path, "grid_values")) {
        m = truncated_hankel_matrix_grid(theta, alpha, read_values(symbol_path, "grid_values"), grid);
      } else {
        const auto nu = clark_measure(theta.squared(), alpha);
        m = truncated_hankel_matrix(theta, alpha, SampledFunction(nu.base, read_values(symbol_path, "values")), grid);
      }
      emit(to_json(m), out_path);
    } else if (*norm_cmd) {
      const auto m = operator_matrix_from_json(read_file(matrix_path));
      const auto sv = singular_values(m.entries);
      emit(json{{"norm", sv.empty() ? 0.0 : sv.front()}, {"singular_values", sv}}.dump(), out_path);
    } else if (*ident_cmd) {
      const auto rep = run_identity_suite(cfg, inject);
      emit(to_json(rep), out_path);
      return rep.passed() ? 0 : 1;
    } else if (*cor_cmd || *thm_cmd || *atom_cmd || *czlp_cmd) {
      const ExperimentReport rep = *cor_cmd    ? run_corollary1(cfg)
                                   : *thm_cmd  ? run_theorem3(cfg)
                                   : *atom_cmd ? run_atom_extension_bound(cfg)
                                               : run_cz_vs_lp(cfg);
      emit(format == "csv" ? to_csv(rep) : to_json(rep), out_path);
      for (const auto& f : rep.failures) std::cerr << "FAIL " << f << '\n';
      return rep.passed() ? 0 : 1;
    } else {
      std::cout << app.help();
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << (e.field().empty() ? "" : e.field() + ": ") << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
