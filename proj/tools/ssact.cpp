// ssact: self-similar groupoid actions on finite graphs -- trace fixed
// points, KMS-state values, and convergence diagnostics.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ssact/diagnostics.hpp"
#include "ssact/instance.hpp"
#include "ssact/kms.hpp"

using namespace ssact;

namespace {

struct Options {
  std::string instance_file;
  std::string discount_text;
  double beta = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;
  std::string init_file;
  std::string tol_text;
  long max_iter = 10000;
  long steps = 30;
  std::string mu_text, g_text, nu_text;
  int depth = 12;
  int k_max = 12;
  std::string out_file;
  bool rates = false;
  std::vector<std::string> words;
  std::size_t max_closure = 0;  // 0: resolve from env/instance
  int validate_depth = -1;
};

std::size_t resolve_closure_bound(const Options& opt,
                                  const InstanceDefaults& defaults) {
  if (opt.max_closure) return opt.max_closure;
  if (const char* env = std::getenv("SSACT_MAX_CLOSURE")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ValidationError("SSACT_MAX_CLOSURE is not a positive integer");
  }
  return defaults.closure_bound;
}

Discount resolve_discount(const Options& opt,
                          const InstanceDefaults& defaults) {
  if (!opt.discount_text.empty())
    return Discount::from_string(opt.discount_text);
  if (!std::isnan(opt.beta)) {
    if (opt.exact)
      throw ValidationError(
          "exact mode requires --discount (a rational); --beta is float "
          "only");
    return Discount::from_beta(opt.beta);
  }
  if (defaults.discount) return *defaults.discount;
  throw ValidationError("no discount given (flag --discount/--beta or "
                        "instance defaults)");
}

template <typename S>
S resolve_tol(const Options& opt, const InstanceDefaults& defaults) {
  std::string text = opt.tol_text;
  if (text.empty()) text = format_scalar(defaults.tol);
  auto q = parse_rational(text);
  if (!q) throw ValidationError("cannot parse tolerance '" + text + "'");
  if constexpr (std::is_same_v<S, double>)
    return to_double(*q);
  else
    return *q;
}

ClosureSet build_closure(const ValidatedInstance& vi,
                         const std::vector<std::string>& extra,
                         std::size_t bound) {
  std::vector<Word> seeds;
  for (int g = 0; g < static_cast<int>(vi.table.generator_count()); ++g) {
    Word w;
    w.letters.push_back(Letter{g, false});
    seeds.push_back(w);
  }
  for (const auto& text : extra) seeds.push_back(vi.table.parse_word(text));
  return closure(vi.table, seeds, bound);
}

template <typename S>
TraceVector<S> initial_trace(const Options& opt, const ClosureSet& cs) {
  if (opt.init_file.empty()) return TraceVector<S>::uniform(cs);
  std::ifstream in(opt.init_file);
  if (!in)
    throw ValidationError("cannot read trace file '" + opt.init_file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_values<S>(parse_trace_file(ss.str()), cs);
}

std::vector<std::string> init_file_keys(const Options& opt) {
  if (opt.init_file.empty()) return {};
  std::ifstream in(opt.init_file);
  if (!in)
    throw ValidationError("cannot read trace file '" + opt.init_file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::vector<std::string> keys;
  for (const auto& [key, value] : parse_trace_file(ss.str()))
    keys.push_back(key);
  return keys;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_file, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write to '" + opt.out_file + "'");
  out << text;
}

int cmd_validate(const Options& opt) {
  Instance inst = load_instance(opt.instance_file);
  int depth = opt.validate_depth >= 0 ? opt.validate_depth
                                      : inst.defaults.validate_depth;
  DirectedMultigraph g = validate_graph(inst.graph);
  ActionTable t = validate_action(g, inst.table, depth);
  std::cout << "instance valid: " << g.vertex_count() << " vertices, "
            << g.edge_count() << " edges, " << t.generator_count()
            << " generators (self-similarity checked to depth " << depth
            << ")\n";
  std::cout << "strongly connected: "
            << (is_strongly_connected(g) ? "yes" : "no") << "\n";
  for (const auto& w : faithfulness_lint(t, depth))
    std::cout << "lint: " << w << "\n";
  return 0;
}

int cmd_closure(const Options& opt) {
  auto vi = validate_instance(load_instance(opt.instance_file));
  std::size_t bound = resolve_closure_bound(opt, vi.defaults);
  ClosureSet cs = opt.words.empty() ? build_closure(vi, {}, bound) : [&] {
    std::vector<Word> seeds;
    for (const auto& w : opt.words) seeds.push_back(vi.table.parse_word(w));
    return closure(vi.table, seeds, bound);
  }();
  std::cout << "classes: " << cs.size() << "\n";
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const auto& info = cs.cls(static_cast<int>(c));
    std::cout << "  " << c << ": " << info.key
              << "  d=" << cs.graph().vertex_label(info.domain)
              << " t=" << cs.graph().vertex_label(info.terminus)
              << " inverse=" << info.inverse
              << (info.is_unit ? "  (unit)" : "") << "\n";
  }
  std::cout << "restriction matrix M (rows/cols in class order):\n";
  const auto& m = cs.M();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    std::cout << "  ";
    for (std::size_t j = 0; j < cs.size(); ++j)
      std::cout << m(i, j) << (j + 1 < cs.size() ? " " : "");
    std::cout << "\n";
  }
  return 0;
}

template <typename S>
int cmd_spectral(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  std::cout << "rho(A_E) = " << format_scalar(sd.rho) << "\n";
  std::cout << "m =";
  for (const auto& v : sd.m) std::cout << " " << format_scalar(v);
  std::cout << "\nm_tilde =";
  for (const auto& v : sd.m_tilde) std::cout << " " << format_scalar(v);
  std::cout << "\n";
  if (!opt.discount_text.empty() || !std::isnan(opt.beta) ||
      vi.defaults.discount) {
    Discount d = resolve_discount(opt, vi.defaults);
    S dv = d.as<S>();
    require_supercritical(dv, sd.rho);
    auto avn = von_neumann_matrix(a, sd, dv);
    std::cout << "discount d = " << format_scalar(dv) << "\n";
    std::cout << "rho(A_vN) = " << format_scalar(S(1) / (S(1) - dv * sd.rho))
              << "\n";
    std::cout << "A_vN (row-major CSV):\n";
    for (std::size_t i = 0; i < avn.rows(); ++i) {
      for (std::size_t j = 0; j < avn.cols(); ++j)
        std::cout << (j ? "," : "") << format_scalar(avn(i, j));
      std::cout << "\n";
    }
  }
  return 0;
}

template <typename S>
int cmd_trace(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  Discount d = resolve_discount(opt, vi.defaults);
  S dv = d.as<S>();
  require_supercritical(dv, sd.rho);
  ClosureSet cs = build_closure(vi, init_file_keys(opt),
                                resolve_closure_bound(opt, vi.defaults));

  TraceVector<S> theta = fixed_point_eigen(cs, sd);
  IterateOptions<S> io;
  io.tol = resolve_tol<S>(opt, vi.defaults);
  io.max_iter = opt.max_iter;
  auto rep = iterate_chi(cs, sd, dv, initial_trace<S>(opt, cs), io);

  S z = compute_Z(sd, cs, dv, theta);
  std::cout << "rho(A_E) = " << format_scalar(sd.rho) << "\n";
  std::cout << "Z(beta, theta) = " << format_scalar(z) << "\n";
  std::cout << "N(beta, theta) = " << format_scalar(compute_N(dv, z)) << "\n";
  std::cout << "theta:\n";
  for (std::size_t c = 0; c < cs.size(); ++c)
    std::cout << "  " << cs.cls(static_cast<int>(c)).key << " = "
              << format_cx(theta.values[c]) << "\n";

  if (!rep.converged) {
    std::cerr << "iteration did not converge within " << opt.max_iter
              << " steps (last sup delta = "
              << format_scalar(rep.last_sup_delta) << ")\n";
    return 3;
  }
  S cross(0);
  const auto& last = rep.iterates.back();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    S v = (last.values[c] - theta.values[c]).cheb();
    if (v > cross) cross = v;
  }
  std::cout << "iteration converged after " << rep.converged_at
            << " steps; eigen/iteration cross-check sup delta = "
            << format_scalar(cross) << "\n";
  if (cross > io.tol * S(100)) {
    std::cerr << "cross-check failure: iteration and eigen solve disagree\n";
    return 3;
  }
  return 0;
}

template <typename S>
int cmd_iterate(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  Discount d = resolve_discount(opt, vi.defaults);
  S dv = d.as<S>();
  require_supercritical(dv, sd.rho);
  ClosureSet cs = build_closure(vi, init_file_keys(opt),
                                resolve_closure_bound(opt, vi.defaults));
  IterateOptions<S> io;
  io.tol = S(0);
  io.max_iter = opt.steps;
  io.stop_early = false;
  auto rep = iterate_chi(cs, sd, dv, initial_trace<S>(opt, cs), io);

  std::ostringstream csv;
  csv << "step,class,value,delta,Z\n";
  for (std::size_t n = 0; n < rep.steps(); ++n)
    for (std::size_t c = 0; c < cs.size(); ++c)
      csv << n << ',' << cs.cls(static_cast<int>(c)).key << ','
          << format_cx(rep.iterates[n].values[c]) << ','
          << format_scalar(rep.deltas[n][c]) << ','
          << format_scalar(rep.Z[n]) << '\n';
  emit(opt, csv.str());
  if (opt.rates) {
    auto conv = convergence_report(rep, sd, cs);
    if (conv.already_converged) std::cerr << "already converged\n";
    for (const auto& r : conv.rates)
      if (!r.constant)
        std::cerr << "class " << r.key << ": fitted ratio "
                  << format_scalar(r.ratio)
                  << (r.flagged ? "  [tail ratio exceeded 1]" : "") << "\n";
  }
  return 0;
}

template <typename S>
int cmd_kms(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  Discount d = resolve_discount(opt, vi.defaults);
  S dv = d.as<S>();
  require_supercritical(dv, sd.rho);
  std::vector<std::string> extra = init_file_keys(opt);
  extra.push_back(opt.g_text);
  ClosureSet cs =
      build_closure(vi, extra, resolve_closure_bound(opt, vi.defaults));
  Word g = vi.table.parse_word(opt.g_text);
  Path mu = parse_path(vi.graph, opt.mu_text, vi.table.terminus(g));
  Path nu = parse_path(vi.graph, opt.nu_text, vi.table.domain(g));
  SpanningElement el = make_spanning_element(vi.table, mu, g, nu);
  ChiEngine<S> eng(cs, sd, dv);
  auto tau = initial_trace<S>(opt, cs);
  std::cout << "Psi(s_mu u_g s_nu^*) = " << format_cx(psi_eval(eng, tau, el))
            << "\n";
  return 0;
}

template <typename S>
int cmd_critical(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  std::vector<std::string> extra{opt.g_text};
  ClosureSet cs =
      build_closure(vi, extra, resolve_closure_bound(opt, vi.defaults));
  Word g = vi.table.parse_word(opt.g_text);
  Path mu = parse_path(vi.graph, opt.mu_text, vi.table.terminus(g));
  Path nu = parse_path(vi.graph, opt.nu_text, vi.table.domain(g));
  SpanningElement el = make_spanning_element(vi.table, mu, g, nu);
  auto cv = critical_psi_eval(cs, sd, el, opt.depth, vi.defaults.depth_guard);
  std::cout << "psi(s_mu u_g s_nu^*) = " << format_scalar(cv.value) << "\n";
  if (cv.theta_value)
    std::cout << "  c_g via eigen fixed point = "
              << format_scalar(*cv.theta_value) << "\n";
  std::cout << "  c_g via census at depth " << opt.depth << " = "
            << format_scalar(cv.census_value) << " (spread "
            << format_scalar(cv.census_spread) << ")\n";
  return 0;
}

template <typename S>
int cmd_diagnose(const Options& opt, const ValidatedInstance& vi) {
  auto a = adjacency_matrix(vi.graph);
  auto sd = perron_frobenius_as<S>(a);
  Discount d = resolve_discount(opt, vi.defaults);
  S dv = d.as<S>();
  require_supercritical(dv, sd.rho);
  std::vector<std::string> extra{opt.g_text};
  ClosureSet cs =
      build_closure(vi, extra, resolve_closure_bound(opt, vi.defaults));
  auto cls = cs.find_class(opt.g_text);
  if (!cls)
    throw ValidationError("class '" + opt.g_text + "' not found in closure");

  std::ostringstream csv;
  csv << "g,k,vertex,G,F\n";
  for (int k = 0; k <= opt.k_max; ++k) {
    auto row = census_GF(cs, sd, *cls, k,
                         std::max(opt.k_max, vi.defaults.depth_guard));
    for (std::size_t v = 0; v < vi.graph.vertex_count(); ++v)
      csv << opt.g_text << ',' << k << ','
          << vi.graph.vertex_label(static_cast<int>(v)) << ','
          << row.g_counts[v].str() << ',' << row.f_counts[v].str() << '\n';
  }
  emit(opt, csv.str());

  auto ab = alpha_bound(cs, sd, dv, *cls, opt.k_max);
  std::cout << "alpha(" << opt.g_text << ", d=" << format_scalar(dv)
            << ") = " << format_scalar(ab.value)
            << (ab.certified ? "  [certified < 1]" : "  [NOT certified]")
            << (ab.tail_exact_zero ? "  (tail exactly 0)" : "") << "\n";
  auto uni = alpha_bound_uniform(cs, sd, dv, opt.k_max);
  std::cout << "alpha(uniform over closure) = " << format_scalar(uni.value)
            << (uni.certified ? "  [certified < 1]" : "  [NOT certified]")
            << "\n";
  auto kw = k_witness(cs, sd, *cls, opt.k_max);
  if (kw)
    std::cout << "k_witness = " << *kw << "\n";
  else
    std::cout << "k_witness: none found up to K = " << opt.k_max << "\n";
  if (!ab.certified || !uni.certified) {
    std::cerr << "contraction bound not certified at this truncation\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{
      "Fixed points of the discounted trace self-mappings induced by "
      "self-similar groupoid actions on finite graphs, with KMS-state "
      "values and convergence diagnostics"};
  app.require_subcommand(1);
  app.add_option("-i,--instance", opt.instance_file,
                 "instance file (JSON: graph, generators, defaults)")
      ->required();
  app.add_option("--max-closure", opt.max_closure,
                 "closure class bound (overrides SSACT_MAX_CLOSURE and "
                 "instance defaults)");

  auto add_scalar_flags = [&](CLI::App* cmd) {
    cmd->add_option("--discount", opt.discount_text,
                    "discount d = e^{-beta} (decimal or p/q)");
    cmd->add_option("--beta", opt.beta,
                    "inverse temperature (float mode only)");
    cmd->add_flag("--exact", opt.exact, "exact rational arithmetic");
  };

  auto* c_validate = app.add_subcommand(
      "validate", "check the graph and action axioms, with lints");
  c_validate->add_option("--depth", opt.validate_depth,
                         "self-similarity coherence check depth");

  auto* c_closure = app.add_subcommand(
      "closure", "print the restriction closure classes and the matrix M");
  c_closure->add_option("words", opt.words,
                        "seed words (default: all generators)");

  auto* c_spectral =
      app.add_subcommand("spectral", "Perron-Frobenius data and A_vN");
  add_scalar_flags(c_spectral);

  auto* c_trace = app.add_subcommand(
      "trace", "the preferred trace via eigen solve and iteration");
  add_scalar_flags(c_trace);
  c_trace->add_option("--init", opt.init_file, "initial trace vector file");
  c_trace->add_option("--tol", opt.tol_text, "convergence tolerance");
  c_trace->add_option("--max-iter", opt.max_iter, "iteration cap");

  auto* c_iterate =
      app.add_subcommand("iterate", "run chi for a fixed number of steps");
  add_scalar_flags(c_iterate);
  c_iterate->add_option("--steps", opt.steps, "number of steps")->required();
  c_iterate->add_option("--init", opt.init_file, "initial trace vector file");
  c_iterate->add_option("--out", opt.out_file, "CSV output file");
  c_iterate->add_flag("--rates", opt.rates, "print fitted geometric rates");

  auto* c_kms = app.add_subcommand(
      "kms", "evaluate the KMS-state formula on s_mu u_g s_nu^*");
  add_scalar_flags(c_kms);
  c_kms->add_option("--mu", opt.mu_text, "left path (dot-separated edges)");
  c_kms->add_option("--g", opt.g_text, "groupoid word")->required();
  c_kms->add_option("--nu", opt.nu_text, "right path");
  c_kms->add_option("--init", opt.init_file, "trace vector file");

  auto* c_critical =
      app.add_subcommand("critical", "evaluate the critical-temperature state");
  c_critical->add_flag("--exact", opt.exact, "exact rational arithmetic");
  c_critical->add_option("--mu", opt.mu_text, "left path");
  c_critical->add_option("--g", opt.g_text, "groupoid word")->required();
  c_critical->add_option("--nu", opt.nu_text, "right path");
  c_critical->add_option("--depth", opt.depth, "census depth");

  auto* c_diagnose = app.add_subcommand(
      "diagnose", "fixed-path censuses and the contraction bound");
  add_scalar_flags(c_diagnose);
  c_diagnose->add_option("--g", opt.g_text, "groupoid word")->required();
  c_diagnose->add_option("--K", opt.k_max, "census truncation depth");
  c_diagnose->add_option("--out", opt.out_file, "census CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(c_validate)) return cmd_validate(opt);
    if (app.got_subcommand(c_closure)) return cmd_closure(opt);
    ValidatedInstance vi =
        validate_instance(load_instance(opt.instance_file));
    if (app.got_subcommand(c_spectral))
      return opt.exact ? cmd_spectral<Rational>(opt, vi)
                       : cmd_spectral<double>(opt, vi);
    if (app.got_subcommand(c_trace))
      return opt.exact ? cmd_trace<Rational>(opt, vi)
                       : cmd_trace<double>(opt, vi);
    if (app.got_subcommand(c_iterate))
      return opt.exact ? cmd_iterate<Rational>(opt, vi)
                       : cmd_iterate<double>(opt, vi);
    if (app.got_subcommand(c_kms))
      return opt.exact ? cmd_kms<Rational>(opt, vi) : cmd_kms<double>(opt, vi);
    if (app.got_subcommand(c_critical))
      return opt.exact ? cmd_critical<Rational>(opt, vi)
                       : cmd_critical<double>(opt, vi);
    if (app.got_subcommand(c_diagnose))
      return opt.exact ? cmd_diagnose<Rational>(opt, vi)
                       : cmd_diagnose<double>(opt, vi);
    std::cerr << "unknown command\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error:\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
