#include "cli.hpp"

#include "pyraquad/assembly.hpp"
#include "pyraquad/decomposition.hpp"
#include "pyraquad/face_rules.hpp"
#include "pyraquad/io.hpp"
#include "pyraquad/kernels.hpp"
#include "pyraquad/quad1d.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace pyraquad::cli {
namespace {

struct Options {
  std::vector<int> simplex_pair;
  std::vector<int> cube_pair;
  std::vector<std::string> polytopes;
  std::string shared;
  std::string config;
  std::string method = "generic";
  std::optional<double> alpha;
  std::optional<std::string> g;
  int degree = 5;
  std::string degrees = "2..16";
  int reference_degree = 0;
  std::string source = "duffy";
  std::string output;
  std::string dot;
  int threads = 0;
  unsigned long seed = 12345;
  bool unfolded = false;
  std::string suite = "all";
  std::string dims = "1..3";
  int samples = 2000;
};

/// "a..b", "a,b,c" or a mix like "2..6,10".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int a = std::stoi(item.substr(0, dots));
        const int b = std::stoi(item.substr(dots + 2));
        for (int v = a; v <= b; ++v) out.push_back(v);
      }
    }
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse integer list '" + text + "'");
  }
  if (out.empty()) fail(ErrorKind::InvalidArgument, "empty integer list '" + text + "'");
  return out;
}

struct Setup {
  Problem problem;
  std::vector<HullPiece> pieces;
  std::optional<PyramidalLattice> lattice;
};

Json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
}

Setup build_problem(const Options& o, bool need_lattice) {
  Setup s;
  const int chosen = !o.simplex_pair.empty() + !o.cube_pair.empty() + !o.polytopes.empty() + !o.config.empty();
  if (chosen != 1)
    fail(ErrorKind::InvalidArgument, "give exactly one of --simplex-pair, --cube-pair, --polytopes, --config");
  const bool closed = o.method == "closed-form";
  if (!closed && o.method != "generic") fail(ErrorKind::InvalidArgument, "--method must be generic or closed-form");

  std::string g_name = o.g.value_or("one");
  double alpha = o.alpha.value_or(0.0);
  if (!o.simplex_pair.empty()) {
    const int n = o.simplex_pair[0], m = o.simplex_pair[1], k = o.simplex_pair[2];
    auto [sx, sy] = simplex_pair(n, m, k);
    s.problem.px = sx;
    s.problem.py = sy;
    for (int i = 0; i <= k; ++i) s.problem.shared.emplace_back(i, i);
    if (closed) s.pieces = two_simplices_decomp(n, m, k, sx, sy);
  } else if (!o.cube_pair.empty()) {
    const int d = o.cube_pair[0], k = o.cube_pair[1];
    if (d < 1 || k < 0 || k > d) fail(ErrorKind::InvalidArgument, "--cube-pair needs d >= 1 and 0 <= k <= d");
    s.problem.px = cube_pair_x(d);
    s.problem.py = cube_pair_y(d, k);
    s.problem.shared = cube_pair_shared(d, k);
    if (closed) s.pieces = two_cubes_decomp(d, k);
  } else {
    if (closed) fail(ErrorKind::InvalidArgument, "closed-form decompositions exist only for simplex and cube pairs");
    if (!o.polytopes.empty()) {
      s.problem.px = load_polytope(o.polytopes[0]);
      s.problem.py = load_polytope(o.polytopes[1]);
      s.problem.shared = parse_shared_pairs(o.shared);
    } else {
      const Json cfg = read_config(o.config);
      const std::filesystem::path base = std::filesystem::path(o.config).parent_path();
      try {
        s.problem.px = polytope_from_json(cfg.at("px"), base);
        s.problem.py = polytope_from_json(cfg.at("py"), base);
        const Json& sh = cfg.at("shared");
        if (sh.is_string()) {
          s.problem.shared = parse_shared_pairs(sh.get<std::string>());
        } else {
          for (const Json& pair : sh) s.problem.shared.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        }
        if (!o.alpha && cfg.contains("alpha")) alpha = cfg.at("alpha").get<double>();
        if (!o.g && cfg.contains("g")) g_name = cfg.at("g").get<std::string>();
      } catch (const Json::exception& e) {
        fail(ErrorKind::ParseError, o.config + ": " + e.what());
      }
    }
  }
  if (!closed) {
    s.pieces = product_decomp(s.problem.px, s.problem.py, s.problem.shared);
    if (need_lattice) s.lattice = product_lattice(s.problem.px, s.problem.py, s.problem.shared);
  }
  s.problem.kernel = builtin_kernels(g_name);
  s.problem.kernel.alpha = alpha;
  if (!std::isfinite(alpha)) fail(ErrorKind::InvalidExponent, "alpha must be finite");
  if (s.problem.kernel.d > s.problem.px.ambient_dim())
    fail(ErrorKind::DimensionMismatch, "kernel uses coordinates beyond the ambient dimension");
  return s;
}

/// Writes to --output when given, otherwise to `out`.
template <class Writer>
void emit(const Options& o, std::ostream& out, Writer&& write) {
  if (o.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.output);
  if (!file) fail(ErrorKind::InvalidArgument, "cannot write " + o.output);
  write(file);
}

int threads_of(const Options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_decompose(const Options& o, std::ostream& out) {
  Setup s = build_problem(o, !o.dot.empty());
  Json j = pieces_to_json(s.pieces);
  j["method"] = o.method;
  emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!o.dot.empty()) {
    if (!s.lattice) fail(ErrorKind::InvalidArgument, "--dot needs the generic method");
    std::ofstream dot(o.dot);
    if (!dot) fail(ErrorKind::InvalidArgument, "cannot write " + o.dot);
    dot << to_dot(*s.lattice);
  }
  return 0;
}

int cmd_rule(const Options& o, std::ostream& out) {
  Setup s = build_problem(o, false);
  const auto provider = SimplexRuleProvider::from_spec(o.source);
  const PreparedRule rule = prepare_kernel_rule(s.pieces, s.problem.kernel.alpha, points_for_degree(o.degree),
                                                provider, threads_of(o), o.unfolded);
  const KernelRule k = materialize(rule);
  emit(o, out, [&](std::ostream& os) { write_kernel_rule_csv(os, k); });
  return 0;
}

int cmd_integrate(const Options& o, std::ostream& out) {
  Setup s = build_problem(o, false);
  const auto provider = SimplexRuleProvider::from_spec(o.source);
  const int threads = threads_of(o);
  const PreparedRule rule = prepare_kernel_rule(s.pieces, s.problem.kernel.alpha, points_for_degree(o.degree),
                                                provider, threads, o.unfolded);
  const double value = integrate(rule, s.problem.kernel.g, threads);
  Json j{{"value", value},         {"nodes", rule.size()},          {"degree", rule.degree()},
         {"points", rule.points},  {"pieces", rule.pieces.size()},  {"alpha", s.problem.kernel.alpha},
         {"g", s.problem.kernel.name}, {"source", o.source}};
  std::ostringstream text;
  text << std::setprecision(17) << value;
  j["value_text"] = text.str();
  emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!o.output.empty()) out << text.str() << ' ' << rule.size() << '\n';
  return 0;
}

int cmd_convergence(const Options& o, std::ostream& out) {
  Setup s = build_problem(o, false);
  const auto provider = SimplexRuleProvider::from_spec(o.source);
  const auto rows = convergence_sweep(s.pieces, s.problem.kernel, parse_int_list(o.degrees), provider,
                                      threads_of(o), o.reference_degree);
  emit(o, out, [&](std::ostream& os) { write_convergence_csv(os, rows); });
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct Report {
  std::ostream& out;
  int failed = 0;
  int total = 0;
  void check(bool ok, const std::string& name, const std::string& detail) {
    ++total;
    if (!ok) ++failed;
    out << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : "  " + detail) << '\n';
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

std::vector<std::pair<int, int>> diagonal_pairs(int k) {
  std::vector<std::pair<int, int>> s;
  for (int i = 0; i <= k; ++i) s.emplace_back(i, i);
  return s;
}

void suite_volume(Report& rep, const std::vector<int>& dims) {
  const SmoothFn one = builtin_kernels("one").g;
  for (int d : dims) {
    for (int k = 0; k <= d; ++k) {
      auto [sx, sy] = simplex_pair(d, d, k);
      const double vol = volume(sx) * volume(sy);
      const double got = integrate(prepare_kernel_rule(product_decomp(sx, sy, diagonal_pairs(k)), 0.0, 1), one);
      const double err = std::abs(got - vol) / vol;
      rep.check(err <= 1e-9, "volume simplex d=" + std::to_string(d) + " k=" + std::to_string(k), "rel_err=" + fmt(err));
    }
    for (int k = 0; k <= d; ++k) {
      const double got = integrate(
          prepare_kernel_rule(product_decomp(cube_pair_x(d), cube_pair_y(d, k), cube_pair_shared(d, k)), 0.0, 1), one);
      const double err = std::abs(got - 1.0);
      rep.check(err <= 1e-9, "volume cube d=" + std::to_string(d) + " k=" + std::to_string(k), "rel_err=" + fmt(err));
    }
  }
}

void suite_counts(Report& rep, const std::vector<int>& dims) {
  for (int d : dims) {
    for (int k = 0; k <= d; ++k) {
      auto [sx, sy] = simplex_pair(d, d, k);
      const int expect = two_simplices_count(d, d, k);
      const int closed = static_cast<int>(two_simplices_decomp(d, d, k, sx, sy).size());
      const int generic = static_cast<int>(product_decomp(sx, sy, diagonal_pairs(k)).size());
      rep.check(closed == expect && generic == expect,
                "count simplex d=" + std::to_string(d) + " k=" + std::to_string(k),
                "expected=" + std::to_string(expect) + " closed=" + std::to_string(closed) +
                    " generic=" + std::to_string(generic));
    }
    for (int k = 0; k <= d; ++k) {
      const int expect = two_cubes_count(d, k);
      const int closed = static_cast<int>(two_cubes_decomp(d, k).size());
      const int generic =
          static_cast<int>(product_decomp(cube_pair_x(d), cube_pair_y(d, k), cube_pair_shared(d, k)).size());
      rep.check(closed == expect && generic == expect, "count cube d=" + std::to_string(d) + " k=" + std::to_string(k),
                "expected=" + std::to_string(expect) + " closed=" + std::to_string(closed) +
                    " generic=" + std::to_string(generic));
    }
  }
}

void suite_moments(Report& rep) {
  const double exps[] = {-0.9, -0.5, 0.0, 1.0, 2.5, 7.0};
  for (double a : exps) {
    for (double b : exps) {
      const double mass = beta_fn(a + 1.0, b + 1.0);
      double worst = 0.0;
      for (int p = 1; p <= 30; ++p) {
        const Rule1D r = gauss_jacobi(p, a, b);
        for (int m = 0; m <= 2 * p - 1; ++m) {
          double sum = 0.0;
          for (int i = 0; i < p; ++i) sum += r.weights[i] * std::pow(r.nodes[i], m);
          worst = std::max(worst, std::abs(sum - beta_fn(a + 1.0, b + m + 1.0)) / mass);
        }
      }
      std::ostringstream name;
      name << "moments a=" << a << " b=" << b;
      rep.check(worst <= 1e-12, name.str(), "max_scaled_err=" + fmt(worst));
    }
  }
}

void suite_membership(Report& rep, const std::vector<int>& dims, unsigned long seed, int samples) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  auto sample = [&](const Polytope& s) {
    Vector bary(s.num_vertices());
    for (Eigen::Index i = 0; i < bary.size(); ++i) bary(i) = expo(rng);
    bary /= bary.sum();
    return Vector(s.vertices() * bary);
  };
  for (int d : dims) {
    for (int k = 0; k <= d; ++k) {
      auto [sx, sy] = simplex_pair(d, d, k);
      const auto pieces = product_decomp(sx, sy, diagonal_pairs(k));
      int bad = 0;
      for (int t = 0; t < samples; ++t) {
        Vector z(2 * d);
        z << sample(sx), sample(sy);
        int hits = 0;
        for (const auto& p : pieces) hits += contains(p, z) ? 1 : 0;
        if (hits != 1) ++bad;
      }
      rep.check(bad == 0, "membership simplex d=" + std::to_string(d) + " k=" + std::to_string(k),
                std::to_string(samples - bad) + "/" + std::to_string(samples) + " in exactly one piece");
    }
  }
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto dims = parse_int_list(o.dims);
  for (int d : dims)
    if (d < 1 || d > 6) fail(ErrorKind::InvalidArgument, "--dims entries must lie in 1..6");
  Report rep{out};
  const std::string& s = o.suite;
  bool known = false;
  if (s == "volume" || s == "all") known = true, suite_volume(rep, dims);
  if (s == "counts" || s == "all") known = true, suite_counts(rep, dims);
  if (s == "moments" || s == "all") known = true, suite_moments(rep);
  if (s == "membership" || s == "all") known = true, suite_membership(rep, dims, o.seed, o.samples);
  if (!known) fail(ErrorKind::InvalidArgument, "unknown suite '" + s + "' (volume, counts, moments, membership, all)");
  out << (rep.failed == 0 ? "all " : "") << rep.total - rep.failed << "/" << rep.total << " checks passed\n";
  return rep.failed == 0 ? 0 : 1;
}

void error_json(std::ostream& err, std::string_view kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Singular quadrature on products of conforming polytopes"};
  app.require_subcommand(1);

  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--simplex-pair", o.simplex_pair, "n m k: simplices sharing vertices 0..k")->expected(3);
    sub->add_option("--cube-pair", o.cube_pair, "d k: unit cubes sharing a k-face")->expected(2);
    sub->add_option("--polytopes", o.polytopes, "two polytope JSON files")->expected(2);
    sub->add_option("--shared", o.shared, "shared vertex pairs i:j,... for --polytopes");
    sub->add_option("--config", o.config, "JSON file with px, py, shared (and optionally alpha, g)");
    sub->add_option("--method", o.method, "generic or closed-form");
    sub->add_option("--output", o.output, "output file (default: standard output)");
    sub->add_option("--threads", o.threads, "worker threads (default: all cores)");
    sub->add_option("--seed", o.seed, "accepted for a uniform interface; these commands are deterministic");
  };
  auto add_kernel = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "kernel exponent");
    sub->add_option("--g", o.g, "smooth part: one, exp-sum, coord-poly:<poly>");
    sub->add_option("--source", o.source, "simplex rules: duffy or file:<path>");
  };

  CLI::App* decompose = app.add_subcommand("decompose", "list the hull pieces as JSON");
  add_problem(decompose);
  decompose->add_option("--dot", o.dot, "write the pyramidal lattice as Graphviz DOT");

  CLI::App* rule = app.add_subcommand("rule", "write the folded kernel rule as CSV");
  add_problem(rule);
  add_kernel(rule);
  rule->add_option("--degree,--degrees", o.degree, "polynomial degree of the rule");
  rule->add_flag("--unfolded", o.unfolded, "leave |x-y|^(-alpha) out of the weights");

  CLI::App* integ = app.add_subcommand("integrate", "evaluate the integral");
  add_problem(integ);
  add_kernel(integ);
  integ->add_option("--degree,--degrees", o.degree, "polynomial degree of the rule");

  CLI::App* conv = app.add_subcommand("convergence", "errors against the highest degree, as CSV");
  add_problem(conv);
  add_kernel(conv);
  conv->add_option("--degrees", o.degrees, "ascending degrees, e.g. 2..16 or 2,4,8");
  conv->add_option("--reference-degree", o.reference_degree, "degree of the reference value");

  CLI::App* verify = app.add_subcommand("verify", "run invariant suites");
  verify->add_option("--suite", o.suite, "volume, counts, moments, membership or all");
  verify->add_option("--dims", o.dims, "dimensions, e.g. 1..3");
  verify->add_option("--seed", o.seed, "seed for sampled checks");
  verify->add_option("--samples", o.samples, "points per membership case");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(o, out);
    if (rule->parsed()) return cmd_rule(o, out);
    if (integ->parsed()) return cmd_integrate(o, out);
    if (conv->parsed()) return cmd_convergence(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const Error& e) {
    error_json(err, to_string(e.kind()), e.what());
    return 3;
  } catch (const std::exception& e) {
    error_json(err, "InternalError", e.what());
    return 4;
  }
  return 0;
}

}  // namespace pyraquad::cli
