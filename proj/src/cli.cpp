#include "rankatlas/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "rankatlas/serialization.hpp"

namespace rankatlas {

namespace {

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string sci6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Common {
  std::uint64_t seed = 1;
  std::optional<int> restarts;
  std::optional<double> tol_rankdrop;
  bool json = false;
  bool strict = false;
};

SearchBudget search_budget(const Common& c) {
  SearchBudget b;
  b.seed = c.seed;
  if (c.restarts) b.restarts = *c.restarts;
  if (c.tol_rankdrop) b.tol_rankdrop = *c.tol_rankdrop;
  return b;
}

int cmd_trank(int m, int n, int p, const Common& c, std::ostream& out) {
  const auto r = classify(m, n, p);
  if (c.json) {
    out << to_json(r).dump(2) << '\n';
    return 0;
  }
  out << format_result(r) << '\n';
  if (r.hash_bound) {
    out << "m#n for (" << r.m << "," << r.n << ") in [" << r.hash_bound->lower << ", " << r.hash_bound->upper
        << "] (" << to_string(r.hash_bound->lower_rule) << " / " << to_string(r.hash_bound->upper_rule) << ")\n";
  }
  return 0;
}

int cmd_bounds(int max_dim, const std::string& cache, const Common& c, std::ostream& out) {
  HashBoundsTable table;
  bool loaded = false;
  if (!cache.empty()) {
    std::ifstream probe(cache);
    if (probe) {
      table = bounds_from_json(read_json_file(cache));
      loaded = table.max_dim() == max_dim;
    }
  }
  if (!loaded) {
    table = build_bounds_table(max_dim);
    if (!cache.empty()) {
      std::ofstream cache_out(cache);
      if (!cache_out) throw std::runtime_error("cannot write cache '" + cache + "'");
      cache_out << to_json(table).dump() << '\n';
    }
  }
  if (c.json) {
    out << to_json(table).dump(2) << '\n';
    return 0;
  }
  out << "m n lower upper lower_rule upper_rule\n";
  for (int m = 1; m <= max_dim; ++m) {
    for (int n = m; n <= max_dim; ++n) {
      const auto& e = table.at(m, n);
      out << m << ' ' << n << ' ' << e.lower << ' ' << e.upper << ' ' << to_string(e.lower_rule) << ' '
          << to_string(e.upper_rule) << '\n';
    }
  }
  return 0;
}

int cmd_afcr(const std::string& path, const Common& c, std::ostream& out) {
  const Tensor3 y = read_tensor_file(path);
  if (y.d1() < y.d2()) throw std::invalid_argument("afcr: tensor must be u x n x m with u >= n");
  const auto margin = afcr_margin(y, search_budget(c));
  if (c.json) {
    out << Json{{"afcr", margin.afcr},
                {"margin", margin.margin},
                {"margin_relative", margin.relative},
                {"restarts", margin.restarts_used}}
               .dump(2)
        << '\n';
    return 0;
  }
  out << (margin.afcr ? "AFCR" : "not AFCR") << ", margin " << fixed6(margin.margin) << '\n';
  return 0;
}

int cmd_certify(const std::string& path, const Common& c, std::ostream& out) {
  const Tensor3 t = read_tensor_file(path);
  if (!ProblemDims::valid(t.d3(), t.d1(), t.d2())) {
    throw std::invalid_argument("certify: tensor must be n x p x m with 3 <= m <= n and (m-1)(n-1)+1 <= p <= (m-1)n");
  }
  CertifyBudget budget;
  budget.search = search_budget(c);
  const auto result = certify(t, budget);
  if (c.json) {
    out << to_json(result).dump(2) << '\n';
  } else {
    const auto dims = ProblemDims::of_tensor(t);
    out << to_string(result.verdict) << " (m=" << dims.m() << ", n=" << dims.n() << ", p=" << dims.p() << ")\n";
    out << "margin " << sci6(result.margin.relative) << " (relative), points " << result.points_found << ", span "
        << result.span_dim << "\n";
    if (result.certificate) {
      out << "residual " << sci6(result.certificate->residual) << ", cond(N) " << sci6(result.certificate->cond_N)
          << '\n';
    }
    out << result.diagnostics << '\n';
  }
  return c.strict && result.verdict == Verdict::kInconclusive ? 1 : 0;
}

int cmd_experiment(const std::string& path, const Common& c, bool seed_given, std::ostream& out) {
  ExperimentConfig cfg = experiment_config_from_json(read_json_file(path));
  if (seed_given) cfg.seed = c.seed;
  if (c.restarts) cfg.certify.search.restarts = *c.restarts;
  if (c.tol_rankdrop) cfg.certify.search.tol_rankdrop = *c.tol_rankdrop;
  const auto report = run_experiment(cfg);
  write_experiment_outputs(report);
  if (c.json) {
    out << summary_json(report).dump(2) << '\n';
  } else {
    out << "samples " << report.records.size() << ": RankP " << fixed6(report.frequency(Verdict::kRankP))
        << ", RankExceedsP " << fixed6(report.frequency(Verdict::kRankExceedsP)) << ", Inconclusive "
        << fixed6(report.frequency(Verdict::kInconclusive)) << '\n';
    out << "predicted " << report.predicted << '\n';
  }
  return c.strict && report.inconclusive > 0 ? 1 : 0;
}

struct BilinearArgs {
  std::string kind;
  int d = 4;
  std::string base;
  int m = 1, n = 1;
  int a = 0, b = 0;
  bool tensor = false;
  std::string out;
};

int cmd_make_bilinear(const BilinearArgs& args, std::ostream& out) {
  BilinearMap base = args.base.empty() ? hypercomplex_mult(args.d) : bilinear_from_json(read_json_file(args.base));
  BilinearMap f;
  if (args.kind == "cd") {
    f = hypercomplex_mult(args.d);
  } else if (args.kind == "convolve") {
    f = convolve(base, args.m, args.n);
  } else {
    f = restrict_map(base, args.a > 0 ? args.a : base.a(), args.b > 0 ? args.b : base.b());
  }
  const Json j = args.tensor ? to_json(as_tensor(f)) : to_json(f);
  if (args.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream file(args.out);
    if (!file) throw std::runtime_error("cannot write '" + args.out + "'");
    file << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Typical ranks, nonsingular bilinear maps and rank-p certificates", "rankatlas"};
  app.require_subcommand(1);
  Common common;
  auto* seed_opt = app.add_option("--seed", common.seed, "RNG seed");
  app.add_option("--budget-restarts", common.restarts, "Multi-start restarts")->check(CLI::PositiveNumber);
  app.add_option("--tol-rankdrop", common.tol_rankdrop, "sigma_n / sigma_1 threshold")->check(CLI::PositiveNumber);
  app.add_flag("--json", common.json, "Machine-readable output");
  app.add_flag("--strict", common.strict, "Exit 1 on Inconclusive");

  int tm = 0, tn = 0, tp = 0;
  auto* trank = app.add_subcommand("trank", "Typical ranks of R^{m x n x p}");
  trank->add_option("m", tm)->required()->check(CLI::PositiveNumber);
  trank->add_option("n", tn)->required()->check(CLI::PositiveNumber);
  trank->add_option("p", tp)->required()->check(CLI::PositiveNumber);

  int max_dim = 16;
  std::string cache;
  auto* bounds = app.add_subcommand("bounds", "Bounds on m#n");
  bounds->add_option("--max", max_dim, "Largest dimension")->check(CLI::Range(2, 512));
  bounds->add_option("--cache", cache, "JSON cache file");

  std::string file;
  auto* afcr = app.add_subcommand("afcr", "AFCR margin of a u x n x m tensor");
  afcr->add_option("file", file)->required();

  auto* cert = app.add_subcommand("certify", "Rank p or > p for an n x p x m tensor");
  cert->add_option("file", file)->required();

  auto* exp = app.add_subcommand("experiment", "Monte-Carlo run from a JSON config");
  exp->add_option("config", file)->required();

  BilinearArgs bargs;
  auto* mk = app.add_subcommand("make-bilinear", "Construct a bilinear map");
  mk->add_option("--kind", bargs.kind)->required()->check(CLI::IsMember({"cd", "convolve", "restrict"}));
  mk->add_option("--d", bargs.d, "Hypercomplex dimension")->check(CLI::IsMember({1, 2, 4, 8}));
  mk->add_option("--base", bargs.base, "Base map JSON (default: hypercomplex of --d)");
  mk->add_option("--m", bargs.m, "Blocks of the first argument")->check(CLI::PositiveNumber);
  mk->add_option("--n", bargs.n, "Blocks of the second argument")->check(CLI::PositiveNumber);
  mk->add_option("--a", bargs.a, "Restricted first dimension")->check(CLI::PositiveNumber);
  mk->add_option("--b", bargs.b, "Restricted second dimension")->check(CLI::PositiveNumber);
  mk->add_flag("--tensor", bargs.tensor, "Emit the c x a x b tensor instead of the map");
  mk->add_option("--out", bargs.out, "Output file (default stdout)");

  for (auto* sub : {trank, bounds, afcr, cert, exp, mk}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*trank) return cmd_trank(tm, tn, tp, common, out);
    if (*bounds) return cmd_bounds(max_dim, cache, common, out);
    if (*afcr) return cmd_afcr(file, common, out);
    if (*cert) return cmd_certify(file, common, out);
    if (*exp) return cmd_experiment(file, common, seed_opt->count() > 0, out);
    if (*mk) return cmd_make_bilinear(bargs, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotInV& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace rankatlas
