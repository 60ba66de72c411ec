#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "distort/distort.hpp"

using namespace distort;

namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(out, j);
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + out + "'");
  f << text;
}

json entropy_json(const EntropyOptions& o) {
  return {{"tolerance", o.tolerance}, {"budget", o.budget}, {"method", to_string(o.method)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional tools for Schlumprecht-space norms, entropy maps and distortion experiments"};
  app.require_subcommand(1);
  std::string out;

  // norm
  std::string space = "schlumprecht", input;
  bool analysis = false;
  auto* norm = app.add_subcommand("norm", "Evaluate a norm and its norming functional");
  norm->add_option("--space", space, "lp:<p> | schlumprecht | conv:<p>:<space>");
  norm->add_option("--input", input, "vector JSON")->required();
  norm->add_flag("--analysis", analysis, "emit the Schlumprecht analysis tree");
  norm->add_option("--out", out);

  // mazur
  double p = 2.0;
  auto* mazur = app.add_subcommand("mazur", "Mazur map S(l1) -> S(lp)");
  mazur->add_option("--p", p)->required();
  mazur->add_option("--input", input)->required();
  mazur->add_option("--out", out);

  // factorize
  EntropyOptions eopt;
  auto* fact = app.add_subcommand("factorize", "h = x* o x via entropy maximisation");
  fact->add_option("--space", space);
  fact->add_option("--input", input)->required();
  fact->add_option("--tol", eopt.tolerance);
  fact->add_option("--budget", eopt.budget);
  fact->add_option("--out", out);

  // sweep
  SweepConfig sweep_cfg;
  auto* sweep = app.add_subcommand("sweep", "Property sweep over random sphere pairs");
  sweep->add_option("--check", sweep_cfg.check, "entropy-gap | sandwich | extension-modulus")->required();
  sweep->add_option("--trials", sweep_cfg.trials);
  sweep->add_option("--dim", sweep_cfg.dim);
  sweep->add_option("--seed", sweep_cfg.seed);
  sweep->add_option("--spaces", sweep_cfg.spaces, "oracle tags for entropy-gap");
  sweep->add_option("--exponents", sweep_cfg.exponents, "exponents for sandwich");
  sweep->add_option("--out", out);

  // telescope
  std::size_t m = 2, K = 1;
  double tau = 0.5;
  std::uint64_t seed = 0;
  bool fallback = false;
  auto* tele = app.add_subcommand("telescope", "Telescoping search on m^K blocks of S(l1)+");
  tele->add_option("--m", m);
  tele->add_option("--K", K);
  tele->add_option("--tau", tau);
  tele->add_option("--input", input, "JSON array of blocks")->required();
  tele->add_option("--space", space);
  tele->add_option("--budget", eopt.budget);
  tele->add_option("--tol", eopt.tolerance);
  tele->add_option("--seed", seed, "echoed; the search is deterministic");
  tele->add_flag("--fallback", fallback, "return the best node when none qualifies");
  tele->add_option("--out", out);

  // factor-average
  double eps = 0.5;
  std::optional<std::size_t> relaxed_K;
  std::optional<double> relaxed_tau;
  auto* fa = app.add_subcommand("factor-average", "Block factorisation of an l1^m+ average");
  fa->add_option("--m", m);
  fa->add_option("--eps", eps);
  fa->add_option("--K", relaxed_K, "relaxed depth");
  fa->add_option("--tau", relaxed_tau, "relaxed tau");
  fa->add_option("--input", input)->required();
  fa->add_option("--budget", eopt.budget);
  fa->add_option("--tol", eopt.tolerance);
  fa->add_option("--out", out);

  // ris-check
  std::string mode = "exact", config;
  auto* ris = app.add_subcommand("ris-check", "RIS length and growth conditions");
  ris->add_option("--mode", mode)->check(CLI::IsMember({"exact", "relaxed"}));
  ris->add_option("--config", config)->required();
  ris->add_option("--out", out);

  // make-spec
  SpecFamilyConfig fam;
  double floor_opt = 0.0;
  auto* mkspec = app.add_subcommand("make-spec", "Relaxed sampled D_k family as a distortion-norm spec");
  mkspec->add_option("--k", fam.bk.k);
  mkspec->add_option("--p", fam.p);
  mkspec->add_option("--count", fam.count);
  mkspec->add_option("--dim", fam.dim);
  mkspec->add_option("--seed", fam.bk.seed);
  mkspec->add_option("--pieces", fam.bk.p_k);
  mkspec->add_option("--n", fam.bk.n);
  mkspec->add_option("--inner", fam.bk.inner);
  mkspec->add_option("--C", fam.bk.C);
  mkspec->add_option("--floor", floor_opt, "defaults to eps_k");
  mkspec->add_option("--out", out);

  // distort
  ExperimentConfig exp;
  std::string spec_path;
  bool csv = false;
  auto* dist = app.add_subcommand("distort", "Distortion ratios over random block subspaces");
  dist->add_option("--spec", spec_path)->required();
  dist->add_option("--subspaces", exp.subspaces);
  dist->add_option("--sphere-samples", exp.sphere_samples);
  dist->add_option("--dim", exp.dim);
  dist->add_option("--blocks", exp.blocks);
  dist->add_option("--seed", exp.seed);
  dist->add_flag("--through-samples", exp.through_samples);
  dist->add_flag("--timing", exp.timing, "add wall-clock seconds to the report");
  dist->add_flag("--csv", csv);
  dist->add_option("--out", out);

  // make-gamma
  GammaSampleConfig gcfg;
  std::string target = "summing";
  double gamma_p = 2.0;
  auto* mkgamma = app.add_subcommand("make-gamma", "Random certified Gamma functionals over relaxed levels");
  mkgamma->add_option("--n", gcfg.n);
  mkgamma->add_option("--count", gcfg.count);
  mkgamma->add_option("--dim", gcfg.dim);
  mkgamma->add_option("--seed", gcfg.seed);
  mkgamma->add_option("--p", gamma_p);
  mkgamma->add_option("--target", target);
  mkgamma->add_option("--out", out);

  // gamma
  std::size_t gamma_n = 0;
  auto* gamma = app.add_subcommand("gamma", "Evaluate the Gamma norm");
  gamma->add_option("--target", target);
  gamma->add_option("--n", gamma_n);
  gamma->add_option("--spec", spec_path)->required();
  gamma->add_option("--input", input)->required();
  gamma->add_option("--out", out);

  // chain
  double eps1 = 0.5;
  std::optional<double> chain_eps;
  auto* chain = app.add_subcommand("chain", "Biorthogonality chain for two B_k elements");
  chain->add_option("--p", p);
  chain->add_option("--eps1", eps1);
  chain->add_option("--eps", chain_eps);
  chain->add_option("--input", input, "JSON object with elements k and l")->required();
  chain->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*norm) {
      const auto X = make_oracle(space);
      const auto x = vector_from_json(read_json_file(input));
      json j = {{"space", X->tag()}, {"norm", X->norm(x)}};
      if (!x.empty())
        if (auto f = X->norming_functional(x)) j["functional"] = to_json(*f);
      if (analysis) {
        if (space != "schlumprecht" && space != "S")
          throw Error(ErrorCode::Unavailable, "--analysis needs the schlumprecht space");
        j["analysis"] = to_json(schlumprecht_analysis(x));
      }
      emit(j, out);
    } else if (*mazur) {
      const auto h = vector_from_json(read_json_file(input));
      emit({{"p", p}, {"x", to_json(mazur_map(h, p))}}, out);
    } else if (*fact) {
      const auto X = make_oracle(space);
      const auto h = vector_from_json(read_json_file(input));
      const auto r = entropy_max(h, *X, eopt);
      emit({{"space", X->tag()},
            {"entropy_options", entropy_json(eopt)},
            {"method", to_string(r.method)},
            {"x", to_json(r.x)},
            {"x_star", to_json(r.x_star)},
            {"entropy", r.entropy},
            {"dual_entropy", r.dual_entropy},
            {"residual", r.residual},
            {"iterations", r.iterations}},
           out);
    } else if (*sweep) {
      emit(run_sweep(sweep_cfg), out);
    } else if (*tele) {
      const DualEntropyEstimator est(make_oracle(space), eopt);
      const auto h = vectors_from_json(read_json_file(input));
      const auto r = telescoping_search(h, m, K, tau, est, fallback);
      json visited = json::array();
      for (const auto& v : r.visited)
        visited.push_back({{"level", v.level}, {"node", v.node}, {"deficit", v.deficit}, {"threshold", v.threshold}});
      emit({{"m", m},
            {"K", K},
            {"tau", tau},
            {"seed", seed},
            {"space", est.primal().tag()},
            {"entropy_options", entropy_json(eopt)},
            {"level", r.level},
            {"alpha", r.alpha},
            {"deficit", r.deficit},
            {"threshold", r.threshold},
            {"fallback", r.fallback},
            {"b", to_json(r.b)},
            {"visited", visited}},
           out);
    } else if (*fa) {
      const DualEntropyEstimator est(make_oracle("schlumprecht"), eopt);
      AverageFactorConfig c;
      c.m = m;
      c.eps = eps;
      c.K = relaxed_K;
      c.tau = relaxed_tau;
      json j = to_json(factor_average(vectors_from_json(read_json_file(input)), c, est));
      j["entropy_options"] = entropy_json(eopt);
      emit(j, out);
    } else if (*ris) {
      const json c = read_json_file(config);
      const std::size_t N = c.at("N").get<std::size_t>();
      const double e = c.at("epsilon").get<double>();
      std::vector<double> log2n;
      if (c.contains("log2_lengths"))
        log2n = c["log2_lengths"].get<std::vector<double>>();
      else
        for (const auto& n : c.at("lengths")) log2n.push_back(std::log2(n.get<double>()));
      const auto supp = c.at("support_sizes").get<std::vector<std::size_t>>();
      std::optional<RelaxedRisParams> relaxed;
      if (mode == "relaxed") relaxed = RelaxedRisParams::from_json(c.value("relaxed", json::object()));
      emit(to_json(check_ris_parameters(N, e, log2n, supp, relaxed)), out);
    } else if (*mkspec) {
      if (floor_opt > 0.0) fam.floor = floor_opt;
      const auto f = make_spec_family(fam);
      json j = to_json(f.spec);
      json els = json::array();
      for (const auto& b : f.elements) els.push_back(to_json(b));
      j["elements"] = els;
      emit(j, out);
    } else if (*dist) {
      const auto spec = distortion_spec_from_json(read_json_file(spec_path));
      const auto rep = distortion_experiment(spec, exp);
      if (csv)
        emit_text(to_csv(rep), out);
      else
        emit(to_json(rep), out);
    } else if (*mkgamma) {
      gcfg.target = target_from_string(target);
      std::vector<DistortionNormSpec> levels;
      for (std::size_t i = 1; i <= gcfg.n * gcfg.n; ++i) {
        SpecFamilyConfig lc;
        lc.p = gamma_p;
        lc.bk.k = 1;
        lc.bk.seed = gcfg.seed + i;
        lc.floor = std::exp2(-static_cast<double>(i));
        lc.count = 4;
        lc.dim = gcfg.dim;
        levels.push_back(make_spec_family(lc).spec);
      }
      emit(to_json(sample_gamma_spec(std::move(levels), gcfg)), out);
    } else if (*gamma) {
      const auto spec = gamma_spec_from_json(read_json_file(spec_path));
      if (to_string(spec.target) != target)
        throw Error(ErrorCode::ConfigError, "spec target is '" + std::string(to_string(spec.target)) + "'");
      if (gamma_n != 0 && gamma_n != spec.n) throw Error(ErrorCode::ConfigError, "spec n differs from --n");
      const auto x = vector_from_json(read_json_file(input));
      const auto v = gamma_norm(x, spec);
      json provs = json::array();
      for (const auto& l : spec.levels) provs.push_back(l.provenance.to_json());
      emit({{"target", target},
            {"n", spec.n},
            {"functionals", spec.functionals.size()},
            {"value", v.value},
            {"lower", v.lower},
            {"upper", v.upper},
            {"band_holds", v.band_holds},
            {"level_provenance", provs}},
           out);
    } else if (*chain) {
      const json j = read_json_file(input);
      emit(to_json(biorthogonality_chain(bk_from_json(j.at("k")), bk_from_json(j.at("l")), p, eps1, chain_eps)),
           out);
    }
  } catch (const Error& e) {
    json err = {{"error", to_string(e.code())}, {"message", e.what()}};
    if (e.has_measured()) err["measured"] = e.measured();
    if (e.index() != Error::npos) err["index"] = e.index();
    std::cerr << err.dump() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "ConfigError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 0;
}
