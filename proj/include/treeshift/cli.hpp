#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "treeshift/corpus.hpp"
#include "treeshift/report.hpp"
#include "treeshift/treeshift.hpp"

namespace treeshift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 1;   // unreadable or unparseable data
inline constexpr int kExitContract = 2;   // a hypothesis of the computation is violated
inline constexpr int kExitUsage = 64;     // unknown verb or flag

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Common {
  std::string tree_path;
  std::string output = "json";
  int power = 1;
  int nmax = 10;
  int depth = -1;
  std::string lambda_text;
  std::string f_path;
  std::uint64_t seed = 1;
  int count = 10;
  std::string out_dir = "corpus";
  bool require_hbs = false;
};

inline TreeSpec load_spec(const std::string& path) {
  return TreeSpec::from_text(read_file(path));
}

inline TreeFunction load_function(const std::string& path) {
  return TreeFunction::from_text(read_file(path));
}

inline void emit(std::ostream& out, const Common& opt, const std::string& command,
                 const std::string& fingerprint, const nlohmann::json& payload,
                 const WallClock& clock, const std::string& csv = {},
                 const std::string& plain = {}) {
  if (opt.output == "csv" && !csv.empty()) {
    out << csv;
    return;
  }
  if (opt.output == "plain" && !plain.empty()) {
    out << plain;
    return;
  }
  ExperimentReport report;
  report.command = command;
  report.tree_fingerprint = fingerprint;
  report.payload = payload;
  report.wall_time_ms = clock.elapsed_ms();
  out << report.to_json().dump(2) << "\n";
}

inline std::string echo(const std::string& verb, const Common& opt) {
  std::string s = verb;
  if (!opt.tree_path.empty()) s += " --tree " + opt.tree_path;
  return s;
}

}  // namespace detail

/// Runs one command. All diagnostics for violated hypotheses name the
/// hypothesis itself, so the tool doubles as a theorem-condition checker.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"treeshift: shift operators on Lipschitz spaces of infinite trees"};
  app.require_subcommand(1);
  detail::Common opt;

  auto add_tree = [&](CLI::App* sub) {
    sub->add_option("--tree", opt.tree_path, "tree spec file")->required();
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", opt.output, "json, csv or plain")
        ->check(CLI::IsMember({"json", "csv", "plain"}));
  };

  CLI::App* validate = app.add_subcommand("validate", "check a tree spec");
  add_tree(validate);
  add_output(validate);
  validate->add_flag("--require-hbs", opt.require_hbs,
                     "fail unless the tree is homogeneous by sectors");

  CLI::App* describe = app.add_subcommand("describe", "canonical form and basic facts");
  add_tree(describe);
  add_output(describe);

  CLI::App* norm = app.add_subcommand("norm", "exact norm of B^n");
  add_tree(norm);
  add_output(norm);
  norm->add_option("--power", opt.power, "operator power n")->check(CLI::PositiveNumber);

  CLI::App* bounds = app.add_subcommand("bounds", "norm bounds and witnesses for B");
  add_tree(bounds);
  add_output(bounds);

  CLI::App* diverge = app.add_subcommand("diverge", "divergence certificate for unbounded B");
  add_tree(diverge);
  add_output(diverge);
  diverge->add_option("--depth", opt.depth, "levels to sample (default 50)");

  CLI::App* spectrum = app.add_subcommand("spectrum", "spectral radius estimate from |B^n|");
  add_tree(spectrum);
  add_output(spectrum);
  spectrum->add_option("--nmax", opt.nmax, "largest power (<= 12)");

  CLI::App* eigen = app.add_subcommand("eigen", "eigenfunction check for B");
  add_tree(eigen);
  add_output(eigen);
  eigen->add_option("--lambda", opt.lambda_text, "eigenvalue, \"p/q\" or \"a+bi\"")->required();
  eigen->add_option("--depth", opt.depth, "verification depth (default 8)");

  CLI::App* resolvent = app.add_subcommand("resolvent", "solve (S - lambda) f = chi_root");
  add_tree(resolvent);
  add_output(resolvent);
  resolvent->add_option("--lambda", opt.lambda_text, "0 < |lambda| < 1, or 0 for the kernel case")
      ->required();
  resolvent->add_option("--depth", opt.depth, "verification depth (default 12)");

  CLI::App* hyper = app.add_subcommand("hypercyclic", "hypercyclicity criterion run for B");
  add_tree(hyper);
  add_output(hyper);
  hyper->add_option("--f", opt.f_path, "finitely supported function literal")->required();
  hyper->add_option("--nmax", opt.nmax, "window length");

  CLI::App* obstruct = app.add_subcommand("obstruct", "free-end obstruction witness");
  add_tree(obstruct);
  add_output(obstruct);
  obstruct->add_option("--f", opt.f_path, "function with |f| < 1/2 (default: zero)");
  obstruct->add_option("--nmax", opt.nmax, "orbit time N");

  CLI::App* duality = app.add_subcommand("duality", "seeded check of the adjoint identity");
  add_tree(duality);
  add_output(duality);
  duality->add_option("--seed", opt.seed, "random seed");
  duality->add_option("--nmax", opt.nmax, "number of seeded pairs");

  CLI::App* corpus = app.add_subcommand("corpus", "generate seeded tree specs");
  add_output(corpus);
  corpus->add_option("--seed", opt.seed, "random seed");
  corpus->add_option("--count", opt.count, "number of specs (<= 1000)");
  corpus->add_option("--out", opt.out_dir, "output directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  WallClock clock;
  try {
    if (*validate) {
      TreeSpec spec = detail::load_spec(opt.tree_path);
      TreeView tree(std::move(spec));
      auto hbs = tree.hbs_level();
      if (opt.require_hbs && !hbs)
        throw ContractError("B unbounded: tree not homogeneous by sectors");
      nlohmann::json payload{{"valid", true},
                             {"fingerprint", tree.spec().fingerprint()},
                             {"hbs_level", hbs ? nlohmann::json(*hbs) : nlohmann::json()},
                             {"leafless", tree.is_leafless()},
                             {"free_end", tree.has_free_end()}};
      std::string plain = "valid; hbs_level=" + (hbs ? std::to_string(*hbs) : "none") + "\n";
      detail::emit(out, opt, detail::echo("validate", opt), tree.spec().fingerprint(),
                   payload, clock, {}, plain);
      return kExitOk;
    }

    if (*describe) {
      TreeSpec spec = detail::load_spec(opt.tree_path);
      TreeView tree(std::move(spec));
      std::string canonical = tree.spec().canonical_text();
      nlohmann::json payload{{"canonical", tree.spec().to_json()},
                             {"fingerprint", tree.spec().fingerprint()},
                             {"gamma_root", tree.degree(VertexId::root())},
                             {"hbs_level", tree.hbs_level()
                                               ? nlohmann::json(*tree.hbs_level())
                                               : nlohmann::json()},
                             {"leafless", tree.is_leafless()},
                             {"free_end", tree.has_free_end()}};
      detail::emit(out, opt, detail::echo("describe", opt), tree.spec().fingerprint(),
                   payload, clock, {}, canonical + "\n");
      return kExitOk;
    }

    if (*norm) {
      TreeView tree(detail::load_spec(opt.tree_path));
      NormComputation nc = operator_norm(tree, opt.power);
      detail::emit(out, opt, detail::echo("norm", opt) + " --power " + std::to_string(opt.power),
                   tree.spec().fingerprint(), norm_computation_json(nc), clock,
                   nc.status == NormStatus::diverges ? divergence_csv(nc.divergence) : "",
                   nc.exact_value
                       ? "|B^" + std::to_string(opt.power) + "| = " +
                             rational_to_string(*nc.exact_value) + "\n"
                       : std::string("diverges\n"));
      return kExitOk;
    }

    if (*bounds) {
      TreeView tree(detail::load_spec(opt.tree_path));
      if (!tree.hbs_level())
        throw ContractError("B unbounded: tree not homogeneous by sectors");
      BoundConstants bc = tree.bound_constants();
      NormComputation nc = operator_norm(tree, 1);
      Rational lower(std::max({Integer(2 * bc.gamma_root), Integer(3 * bc.gamma_prime - 2),
                               Integer(bc.gamma_double_prime + 2 * bc.gamma_root - 2)}));
      for (const auto& w : nc.lower_bound_witnesses) lower = std::max(lower, w.achieved);
      nlohmann::json payload = bound_constants_json(bc);
      payload["lower"] = rational_to_string(lower);
      payload["upper"] = rational_to_string(Rational(bc.upper_main()));
      payload["upper_coarse"] = rational_to_string(Rational(bc.upper_coarse()));
      payload["exact"] = rational_to_string(*nc.exact_value);
      nlohmann::json witnesses = nlohmann::json::array();
      for (const auto& w : nc.lower_bound_witnesses)
        witnesses.push_back({{"witness", w.tag}, {"achieved", rational_to_string(w.achieved)}});
      payload["witnesses"] = witnesses;
      std::string plain = "Lambda=" + bc.lambda.str() + " lower=" + rational_to_string(lower) +
                          " upper=" + bc.upper_main().str() +
                          " exact=" + rational_to_string(*nc.exact_value) + "\n";
      detail::emit(out, opt, detail::echo("bounds", opt), tree.spec().fingerprint(), payload,
                   clock, {}, plain);
      return kExitOk;
    }

    if (*diverge) {
      TreeView tree(detail::load_spec(opt.tree_path));
      int levels = opt.depth < 0 ? 50 : opt.depth;
      bool certified = false;
      auto samples = divergence_certificate(tree, levels, &certified);
      detail::emit(out, opt, detail::echo("diverge", opt), tree.spec().fingerprint(),
                   divergence_json(samples, certified), clock, divergence_csv(samples));
      return kExitOk;
    }

    if (*spectrum) {
      TreeView tree(detail::load_spec(opt.tree_path));
      auto rows = spectral_radius_estimate(tree, opt.nmax);
      detail::emit(out, opt, detail::echo("spectrum", opt), tree.spec().fingerprint(),
                   spectral_rows_json(rows), clock, spectral_rows_csv(rows));
      return kExitOk;
    }

    if (*eigen) {
      TreeView tree(detail::load_spec(opt.tree_path));
      Scalar lambda = parse_scalar(opt.lambda_text);
      SpectralVerdict verdict = eigen_check(tree, lambda, opt.depth < 0 ? 8 : opt.depth);
      detail::emit(out, opt, detail::echo("eigen", opt) + " --lambda " + opt.lambda_text,
                   tree.spec().fingerprint(), spectral_verdict_json(verdict), clock,
                   eigen_sweep_csv_header() + eigen_sweep_csv_row(verdict));
      return kExitOk;
    }

    if (*resolvent) {
      TreeView tree(detail::load_spec(opt.tree_path));
      Scalar lambda = parse_scalar(opt.lambda_text);
      ResolventReport report = resolvent_probe(tree, lambda, opt.depth < 0 ? 12 : opt.depth);
      detail::emit(out, opt, detail::echo("resolvent", opt) + " --lambda " + opt.lambda_text,
                   tree.spec().fingerprint(), resolvent_json(report), clock);
      return kExitOk;
    }

    if (*hyper) {
      TreeView tree(detail::load_spec(opt.tree_path));
      TreeFunction f = detail::load_function(opt.f_path);
      if (!f.is_finite_support())
        throw ContractError("criterion runs use the dense set of finitely supported functions");
      CriterionRun run = criterion_run(tree, f, opt.nmax);
      detail::emit(out, opt, detail::echo("hypercyclic", opt) + " --f " + opt.f_path,
                   tree.spec().fingerprint(), criterion_run_json(run), clock,
                   criterion_rows_csv(run));
      return kExitOk;
    }

    if (*obstruct) {
      TreeView tree(detail::load_spec(opt.tree_path));
      TreeFunction f =
          opt.f_path.empty() ? TreeFunction::zero() : detail::load_function(opt.f_path);
      auto end = tree.find_free_end();
      if (!end) throw ContractError("obstruction requires a tree with a free end");
      VertexId v_star = end->child(0);
      ObstructionResult result = free_end_obstruction(tree, v_star, f, opt.nmax);
      detail::emit(out, opt, detail::echo("obstruct", opt), tree.spec().fingerprint(),
                   obstruction_json(result), clock);
      return kExitOk;
    }

    if (*duality) {
      TreeView tree(detail::load_spec(opt.tree_path));
      SeededRng rng(opt.seed);
      int pairs = opt.nmax;
      bool all_equal = true;
      for (int i = 0; i < pairs; ++i) {
        TreeFunction f = random_finite_support(rng, tree, 6, 4);
        TreeFunction g = random_finite_support(rng, tree, 6, 4);
        Scalar lhs = duality_pair(tree, f, apply_forward(tree, g, 1));
        Scalar rhs = duality_pair(tree, apply_backward(tree, f, 1), g);
        if (!lhs.equals(rhs)) all_equal = false;
      }
      nlohmann::json payload{{"pairs", pairs},
                             {"identity", "Phi_f(S g) = Phi_{B f}(g)"},
                             {"all_equal", all_equal}};
      detail::emit(out, opt, detail::echo("duality", opt), tree.spec().fingerprint(), payload,
                   clock, {}, all_equal ? "adjoint identity holds exactly\n"
                                        : "adjoint identity FAILED\n");
      return all_equal ? kExitOk : kExitContract;
    }

    if (*corpus) {
      auto specs = generate_corpus(opt.seed, opt.count);
      std::filesystem::path dir(opt.out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      nlohmann::json manifest{{"seed", opt.seed}, {"count", opt.count}};
      nlohmann::json entries = nlohmann::json::array();
      for (std::size_t i = 0; i < specs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "corpus_%03zu.json", i);
        std::ofstream file(dir / name, std::ios::binary);
        if (!file) {
          err << "error: cannot write to '" << (dir / name).string() << "'\n";
          return kExitBadInput;
        }
        file << specs[i].second.canonical_text() << "\n";
        entries.push_back({{"file", name},
                           {"kind", corpus_kind_name(specs[i].first)},
                           {"fingerprint", specs[i].second.fingerprint()}});
      }
      manifest["entries"] = entries;
      std::ofstream mf(dir / "manifest.json", std::ios::binary);
      if (!mf) {
        err << "error: cannot write manifest\n";
        return kExitBadInput;
      }
      mf << manifest.dump(2) << "\n";
      detail::emit(out, opt, "corpus", "", manifest, clock, {},
                   "wrote " + std::to_string(specs.size()) + " specs to " + opt.out_dir + "\n");
      return kExitOk;
    }
  } catch (const ContractError& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return kExitContract;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}

}  // namespace treeshift::cli
