#pragma once

// Command-line front end. run_cli() is the whole program; main() only binds
// it to the standard streams.
//
// Exit codes: 0 success, 2 usage or parameter error, 3 tolerance failure,
// 4 a verification verdict failed, 1 anything unexpected.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dde.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "iterints.hpp"
#include "multfun.hpp"
#include "parallel.hpp"
#include "tuple.hpp"
#include "verify.hpp"
#include "zhang.hpp"

namespace gpysmooth {

inline constexpr const char* kVersion = "1.0.0";

namespace cli {

using Json = nlohmann::ordered_json;
using Meta = std::vector<std::pair<std::string, std::string>>;

enum ExitCode : int { ok = 0, internal = 1, usage = 2, tolerance = 3, verdict = 4 };

class VerdictFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A double rounded to the 15 digits used everywhere else; null if not finite.
inline Json json_real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt_real(v));
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(std::ostream& os, const Meta& meta, const Table& t) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_field(t.header[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

inline Json meta_json(const Meta& meta) {
  Json j = Json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

inline std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParameterError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw ParameterError("bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ParameterError("empty number list");
  return out;
}

inline std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_real(v[i]);
  return s;
}

/// Removes --config <file> from args and appends --key=value for every
/// config entry whose key is not already given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  const std::vector<CLI::ConfigItem> items = CLI::ConfigINI().from_config(in);
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string flag = "--" + item.name;
    bool given = false;
    for (const std::string& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    args.push_back(flag + "=" + value);
  }
  return args;
}

/// The resolved value of every option of `sub` except bookkeeping ones.
inline Meta resolved_options(const CLI::App* sub) {
  Meta meta;
  meta.emplace_back("command", sub->get_name());
  meta.emplace_back("version", kVersion);
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "threads") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() ? (opt->as<bool>() ? "true" : "false") : "false";
    } else if (opt->count()) {
      const auto& r = opt->results();
      for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
    } else {
      value = opt->get_default_str();
    }
    meta.emplace_back(name, value);
  }
  return meta;
}

struct Common {
  std::string format;
  std::string out;
  unsigned threads = 0;

  unsigned thread_count() const { return threads ? threads : default_threads(); }
};

inline void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--out", c.out, "write data here instead of standard output");
  sub->add_option("--threads", c.threads, "worker threads (0: GPYSMOOTH_THREADS or all cores)");
}

inline std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GPYSMOOTH_OUTDIR")) return env;
  return ".";
}

/// Sends `text` to the file named by --out (relative paths land in
/// GPYSMOOTH_OUTDIR when set) or to `out`.
inline void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::filesystem::path p(c.out);
  if (p.is_relative()) {
    if (const char* env = std::getenv("GPYSMOOTH_OUTDIR")) p = std::filesystem::path(env) / p;
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + p.string());
  f << text;
}

inline std::string render(const Common& c, const Meta& meta, const Table& t, const Json& data) {
  std::ostringstream os;
  if (c.format == "json") {
    Json j;
    j["meta"] = meta_json(meta);
    j["data"] = data;
    os << j.dump(2) << '\n';
  } else {
    write_csv(os, meta, t);
  }
  return os.str();
}

/// Generic rows-to-JSON: one object per row keyed by the header.
inline Json rows_json(const Table& t) {
  Json arr = Json::array();
  for (const auto& row : t.rows) {
    Json o = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.header[i]] = row[i];
    arr.push_back(std::move(o));
  }
  return arr;
}

inline std::string report_label(const ConvergenceReport& r) {
  std::string s = r.kind + "_" + r.spec + "_m" + std::to_string(r.m) + "_q" + std::to_string(r.q);
  if (r.u) s += "_u" + fmt_real(*r.u);
  for (char& ch : s) {
    if (ch == ':' || ch == ',' || ch == '/') ch = '-';
  }
  return s;
}

inline void write_report_csv(std::ostream& os, const Meta& meta, const ConvergenceReport& r) {
  Meta m = meta;
  m.emplace_back("report", r.kind);
  m.emplace_back("spec", r.spec);
  m.emplace_back("k", std::to_string(r.k));
  m.emplace_back("m", std::to_string(r.m));
  m.emplace_back("q", std::to_string(r.q));
  if (r.u) m.emplace_back("u", fmt_real(*r.u));
  m.emplace_back("non_monotone_steps", std::to_string(r.non_monotone_steps));
  m.emplace_back("slope_vs_loglog_x", fmt_real(r.slope));
  m.emplace_back("verdict", r.passed ? "pass" : "fail");
  Table t{{"x", "exact", "predicted", "ratio", "residual"}, {}};
  for (const auto& row : r.rows) {
    t.rows.push_back({fmt_real(row.x), fmt_real(row.exact), fmt_real(row.predicted), fmt_real(row.ratio),
                      fmt_real(row.residual)});
  }
  write_csv(os, m, t);
}

/// Specs drawn by the randomized Buchstab suite.
inline const std::vector<std::string>& buchstab_specs() {
  static const std::vector<std::string> names{
      "one_over_n", "one_over_phi", "two_omega_over_n", "k_over_p:3", "nu_over_p:0,2,6",
      "nu_minus1_over_phi:0,2", "signed_mu_times:one_over_n"};
  return names;
}

struct BuchstabCase {
  std::string spec;
  double x = 0.0;
  u64 q = 1;
  double z = 2.0;
  int m = 0;
  BuchstabResult result;
};

inline std::vector<BuchstabCase> buchstab_suite(int cases, std::uint64_t seed, double x_max, unsigned threads) {
  if (cases < 1) throw ParameterError("need at least one case");
  if (!(x_max >= 2.0)) throw ParameterError("x_max must be >= 2");
  std::mt19937_64 rng(seed);
  std::vector<BuchstabCase> out(static_cast<std::size_t>(cases));
  for (auto& c : out) {
    c.spec = buchstab_specs()[rng() % buchstab_specs().size()];
    const double lx = std::log(2.0) + (std::log(x_max) - std::log(2.0)) * (static_cast<double>(rng() >> 11) * 0x1p-53);
    c.x = std::floor(std::exp(lx));
    c.z = 2.0 + (c.x - 2.0) * (static_cast<double>(rng() >> 11) * 0x1p-53);
    c.q = 1 + rng() % 210;
    c.m = static_cast<int>(rng() % 4);
  }
  parallel_for(out.size(), threads, [&](std::size_t i) {
    BuchstabCase& c = out[i];
    c.result = check_buchstab(builtin_spec(c.spec), c.x, c.q, c.z, c.m);
  });
  return out;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted sums over squarefree integers, f(u;k,m), the sieve integrals I_s(t,v) and the "
               "smoothed GPY coefficient."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string config_doc;
  app.add_option("--config", config_doc, "key=value file merged under the flags");

  // sum
  Common c_sum;
  std::string sum_spec = "one_over_n";
  double sum_x = 10, sum_z = 0;
  int sum_m = 0;
  u64 sum_q = 1;
  bool sum_exact = false;
  auto* sum = app.add_subcommand("sum", "M_g(x,m,q) or, with --z, the z-smooth sum");
  sum->add_option("--spec", sum_spec, "builtin spec, e.g. one_over_n, k_over_p:2, nu_over_p:0,2")->capture_default_str();
  sum->add_option("--x", sum_x)->capture_default_str();
  sum->add_option("--m", sum_m)->capture_default_str();
  sum->add_option("--q", sum_q)->capture_default_str();
  sum->add_option("--z", sum_z, "smoothness bound (primes < z)");
  sum->add_flag("--exact", sum_exact, "also sum exactly in rationals (m = 0, rational specs)");
  add_common(sum, c_sum, "csv");

  // sseries
  Common c_ss;
  std::string ss_spec = "one_over_n", ss_variant = "standard";
  u64 ss_q = 1;
  double ss_tol = 1e-8;
  bool ss_uncert = false;
  auto* ss = app.add_subcommand("sseries", "singular series Euler product");
  ss->add_option("--spec", ss_spec)->capture_default_str();
  ss->add_option("--q", ss_q)->capture_default_str();
  ss->add_option("--tol", ss_tol)->capture_default_str();
  ss->add_option("--variant", ss_variant, "standard or A")->check(CLI::IsMember({"standard", "A"}))->capture_default_str();
  ss->add_flag("--allow-uncertified", ss_uncert, "accept specs without a tail bound");
  add_common(ss, c_ss, "csv");

  // f
  Common c_f;
  int f_k = 1, f_m = 1;
  double f_umax = 3, f_step = 0.25, f_tol = 1e-10;
  auto* fc = app.add_subcommand("f", "tabulate f(u;k,m)");
  fc->add_option("--k", f_k)->capture_default_str();
  fc->add_option("--m", f_m)->capture_default_str();
  fc->add_option("--u-max", f_umax)->capture_default_str();
  fc->add_option("--step", f_step)->capture_default_str();
  fc->add_option("--tol", f_tol)->capture_default_str();
  add_common(fc, c_f, "csv");

  // I
  Common c_i;
  int i_s = 1, i_m = 2, i_nt = 17, i_nv = 17;
  double i_u = 1, i_vmax = 0, i_tstep = 0.1, i_vstep = 0.25, i_tol = 1e-6;
  bool i_log = false;
  auto* ic = app.add_subcommand("I", "tabulate I_s(t,v)");
  ic->add_option("--s", i_s)->capture_default_str();
  ic->add_option("--m", i_m)->capture_default_str();
  ic->add_option("--u", i_u, "argument scale of f inside the kernel")->capture_default_str();
  ic->add_option("--v-max", i_vmax, "largest v (0: max(u, 1))")->capture_default_str();
  ic->add_option("--t-step", i_tstep)->capture_default_str();
  ic->add_option("--v-step", i_vstep)->capture_default_str();
  ic->add_option("--tol", i_tol)->capture_default_str();
  ic->add_option("--n-t", i_nt, "Chebyshev points per t-panel")->capture_default_str();
  ic->add_option("--n-v", i_nv, "Chebyshev points per unit v-panel")->capture_default_str();
  ic->add_flag("--log-scale", i_log, "report I * exp(-L)");
  add_common(ic, c_i, "csv");

  // tuple
  Common c_t;
  std::size_t t_first = 0;
  std::string t_offsets;
  bool t_series = false;
  double t_tol = 1e-6;
  auto* tc = app.add_subcommand("tuple", "admissibility and singular series of a tuple");
  auto* t_first_opt = tc->add_option("--first-k", t_first, "first k primes above k");
  auto* t_off_opt = tc->add_option("--offsets", t_offsets, "comma separated offsets");
  t_first_opt->excludes(t_off_opt);
  tc->add_flag("--series", t_series, "compute prod (1-nu_p/p)(1-1/p)^-k");
  tc->add_option("--tol", t_tol)->capture_default_str();
  add_common(tc, c_t, "json");

  // zhang
  Common c_z;
  int z_k = 2, z_m = 3, z_nt = 17, z_nv = 17;
  double z_theta = 1.0, z_delta = 0.5, z_tol = 1e-6;
  bool z_log = false;
  auto* zc = app.add_subcommand("zhang", "coefficient (k theta/2) I_{k-1}(1,u) - I_k(1,u)");
  zc->add_option("--k", z_k)->capture_default_str();
  zc->add_option("--m", z_m)->capture_default_str();
  zc->add_option("--theta", z_theta)->capture_default_str();
  zc->add_option("--delta", z_delta)->capture_default_str();
  zc->add_option("--tol", z_tol)->capture_default_str();
  zc->add_option("--n-t", z_nt)->capture_default_str();
  zc->add_option("--n-v", z_nv)->capture_default_str();
  zc->add_flag("--log-scale", z_log, "log-scaled kernels (experimental)");
  add_common(zc, c_z, "json");

  // scan
  Common c_sc;
  int sc_kmin = 2, sc_kmax = 6, sc_mmin = 3, sc_mmax = 10;
  double sc_theta = 0.95, sc_delta = 0.05, sc_tol = 1e-6;
  bool sc_log = false;
  auto* sc = app.add_subcommand("scan", "coefficient over a (k, m) grid");
  sc->add_option("--k-min", sc_kmin)->capture_default_str();
  sc->add_option("--k-max", sc_kmax)->capture_default_str();
  sc->add_option("--m-min", sc_mmin)->capture_default_str();
  sc->add_option("--m-max", sc_mmax)->capture_default_str();
  sc->add_option("--theta", sc_theta)->capture_default_str();
  sc->add_option("--delta", sc_delta)->capture_default_str();
  sc->add_option("--tol", sc_tol)->capture_default_str();
  sc->add_flag("--log-scale", sc_log, "log-scaled kernels (experimental)");
  add_common(sc, c_sc, "csv");

  // verify
  Common c_v;
  std::string v_report = "all", v_spec = "one_over_n", v_xlist, v_G = "1,-1", v_outdir;
  int v_m = 1, v_cases = 50;
  u64 v_q = 1;
  std::uint64_t v_seed = 1;
  double v_u = 2, v_xmax = 1e5;
  bool v_ext = false;
  auto* vc = app.add_subcommand("verify", "convergence and identity checks, one CSV per report");
  vc->add_option("--report", v_report, "theorem1, theorem2, buchstab, weight or all")
      ->check(CLI::IsMember({"theorem1", "theorem2", "buchstab", "weight", "all"}))
      ->capture_default_str();
  vc->add_option("--spec", v_spec)->capture_default_str();
  vc->add_option("--m", v_m)->capture_default_str();
  vc->add_option("--q", v_q)->capture_default_str();
  vc->add_option("--u", v_u)->capture_default_str();
  vc->add_option("--x-list", v_xlist, "comma separated x ladder (default 1e4,...,1e7)");
  vc->add_flag("--extended", v_ext, "append 1e8 to the default ladder");
  vc->add_option("--G", v_G, "coefficients of G(t) in powers of t")->capture_default_str();
  vc->add_option("--cases", v_cases, "randomized Buchstab cases")->capture_default_str();
  vc->add_option("--seed", v_seed)->capture_default_str();
  vc->add_option("--x-max", v_xmax, "largest x in the Buchstab suite")->capture_default_str();
  vc->add_option("--out-dir", v_outdir, "report directory (default GPYSMOOTH_OUTDIR or .)");
  add_common(vc, c_v, "csv");

  try {
    args = merge_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (sum->parsed()) {
      const MultFuncSpec spec = builtin_spec(sum_spec);
      const bool smooth = sum->count("--z") > 0;
      const SumResult r = smooth ? m_sum_smooth(spec, sum_x, sum_m, sum_q, sum_z, SumOptions{sum_exact})
                                 : m_sum(spec, sum_x, sum_m, sum_q, SumOptions{sum_exact});
      const std::string exact = r.exact_value ? r.exact_value->get_str() : "";
      Table t{{"value", "exact", "terms"}, {{fmt_real(r.value), exact, std::to_string(r.terms)}}};
      Json d{{"value", json_real(r.value)}, {"exact", r.exact_value ? Json(exact) : Json(nullptr)}, {"terms", r.terms}};
      emit(c_sum, out, render(c_sum, resolved_options(sum), t, d));
    } else if (ss->parsed()) {
      SeriesOptions o;
      o.variant = ss_variant == "A" ? SeriesVariant::a_normalization : SeriesVariant::standard;
      o.allow_uncertified = ss_uncert;
      const SeriesResult r = singular_series(builtin_spec(ss_spec), ss_q, ss_tol, o);
      Table t{{"value", "error_bound", "truncation", "certified"},
              {{fmt_real(r.value), fmt_real(r.error_bound), std::to_string(r.truncation), r.certified ? "true" : "false"}}};
      Json d{{"value", json_real(r.value)}, {"error_bound", json_real(r.error_bound)}, {"truncation", r.truncation},
             {"certified", r.certified}};
      emit(c_ss, out, render(c_ss, resolved_options(ss), t, d));
    } else if (fc->parsed()) {
      if (!(f_step > 0.0)) throw ParameterError("--step must be positive");
      const PanelSolution sol = solve_f(f_k, f_m, std::max(1.0, f_umax), f_tol);
      Meta meta = resolved_options(fc);
      meta.emplace_back("achieved_residual", fmt_real(sol.achieved_residual));
      Table t{{"u", "f"}, {}};
      Json d = Json::array();
      for (long i = 1;; ++i) {
        const double u = i * f_step;
        if (u > f_umax * (1 + 1e-12)) break;
        const double v = eval_f(sol, u);
        t.rows.push_back({fmt_real(u), fmt_real(v)});
        d.push_back(Json{{"u", json_real(u)}, {"f", json_real(v)}});
      }
      emit(c_f, out, render(c_f, meta, t, d));
    } else if (ic->parsed()) {
      if (!(i_tstep > 0.0 && i_vstep > 0.0)) throw ParameterError("grid steps must be positive");
      const double vmax = i_vmax > 0.0 ? i_vmax : std::max(1.0, i_u);
      const SieveKernel kernel = make_kernel(i_s, i_m, i_u, i_log);
      TableOptions o;
      o.n_t = i_nt;
      o.n_v = i_nv;
      o.threads = c_i.thread_count();
      const ITable table = build_table(kernel, vmax, i_tol, o);
      Meta meta = resolved_options(ic);
      meta.emplace_back("log_scale_L", fmt_real(kernel.log_scale ? kernel.log_scale_L : 0.0));
      meta.emplace_back("table_scale", fmt_real(table.scale));
      meta.emplace_back("error_estimate", fmt_real(table.error_estimate));
      Table t{{"t", "v", "I"}, {}};
      Json d = Json::array();
      const long nt = std::lround(std::floor(1.0 / i_tstep + 1e-9));
      for (long a = 0; a <= nt; ++a) {
        const double tt = std::min(1.0, a * i_tstep);
        for (long b = 1;; ++b) {
          const double v = b * i_vstep;
          if (v > vmax * (1 + 1e-12)) break;
          const double val = i_eval(table, tt, std::min(v, vmax));
          t.rows.push_back({fmt_real(tt), fmt_real(v), fmt_real(val)});
          d.push_back(Json{{"t", json_real(tt)}, {"v", json_real(v)}, {"I", json_real(val)}});
        }
      }
      emit(c_i, out, render(c_i, meta, t, d));
    } else if (tc->parsed()) {
      if (!t_first_opt->count() && !t_off_opt->count()) throw ParameterError("give --first-k or --offsets");
      const TupleSpec tuple = t_first_opt->count() ? first_k_tuple(t_first) : parse_tuple(t_offsets);
      const bool admissible = is_admissible(tuple);
      Json d;
      d["offsets"] = tuple.offsets;
      d["k"] = tuple.k();
      d["admissible"] = admissible;
      Json nu = Json::object();
      for (u64 p : generate_primes(std::max<u64>(tuple.k(), 13)).primes) nu[std::to_string(p)] = nu_p(tuple, p);
      d["nu_p"] = nu;
      Table t{{"offsets", "k", "admissible"}, {{to_string(tuple), std::to_string(tuple.k()), admissible ? "true" : "false"}}};
      if (t_series) {
        const SeriesResult r = tuple_singular_series(tuple, t_tol);
        d["singular_series"] = json_real(r.value);
        d["error_bound"] = json_real(r.error_bound);
        t.header.push_back("singular_series");
        t.rows[0].push_back(fmt_real(r.value));
      }
      emit(c_t, out, render(c_t, resolved_options(tc), t, d));
    } else if (zc->parsed()) {
      CoefficientOptions o;
      o.log_scale = z_log;
      o.threads = c_z.thread_count();
      o.table.n_t = z_nt;
      o.table.n_v = z_nv;
      const CoefficientReport r = zhang_coefficient(SieveParams{z_k, z_m, z_theta, z_delta}, z_tol, o);
      Json d;
      d["params"] = Json{{"k", z_k}, {"m", z_m}, {"theta", json_real(z_theta)}, {"delta", json_real(z_delta)},
                         {"u", json_real(r.u)}};
      d["I_k"] = json_real(r.I_k);
      d["I_{k-1}"] = json_real(r.I_km1);
      d["coefficient"] = json_real(r.coefficient);
      d["cancellation"] = json_real(r.cancellation);
      d["T1"] = json_real(r.T1);
      d["T2"] = json_real(r.T2);
      d["margin"] = json_real(r.margin);
      d["log_scale"] = json_real(r.log_scale);
      d["error_estimate"] = json_real(r.error_estimate);
      d["experimental"] = r.experimental;
      d["assumption"] = "EH(theta,delta)";
      Table t{{"k", "m", "theta", "delta", "u", "I_k", "I_{k-1}", "T1", "T2", "coefficient", "cancellation", "margin",
               "log_scale", "assumption"},
              {{std::to_string(z_k), std::to_string(z_m), fmt_real(z_theta), fmt_real(z_delta), fmt_real(r.u),
                fmt_real(r.I_k), fmt_real(r.I_km1), fmt_real(r.T1), fmt_real(r.T2), fmt_real(r.coefficient),
                fmt_real(r.cancellation), fmt_real(r.margin), fmt_real(r.log_scale), "EH(theta,delta)"}}};
      emit(c_z, out, render(c_z, resolved_options(zc), t, d));
    } else if (sc->parsed()) {
      ScanOptions o;
      o.threads = c_sc.thread_count();
      o.coefficient.log_scale = sc_log;
      const std::vector<ScanCell> cells = scan({sc_kmin, sc_kmax}, {sc_mmin, sc_mmax}, sc_theta, sc_delta, sc_tol, o);
      Meta meta = resolved_options(sc);
      meta.emplace_back("assumption", "EH(theta,delta)");
      Table t{{"k", "m", "status", "u", "I_k", "I_{k-1}", "T1", "T2", "coefficient", "sign", "margin", "cancellation",
               "log_scale", "error_estimate"},
              {}};
      Json d = Json::array();
      for (const ScanCell& cell : cells) {
        const CoefficientReport& r = cell.report;
        if (!cell.rejected.empty()) {
          t.rows.push_back({std::to_string(cell.k), std::to_string(cell.m), "rejected: " + cell.rejected,
                            fmt_real(r.u), "", "", "", "", "", "", "", "", "", ""});
          d.push_back(Json{{"k", cell.k}, {"m", cell.m}, {"status", "rejected"}, {"reason", cell.rejected}});
          continue;
        }
        const int sign = (r.coefficient > 0) - (r.coefficient < 0);
        t.rows.push_back({std::to_string(cell.k), std::to_string(cell.m), "ok", fmt_real(r.u), fmt_real(r.I_k),
                          fmt_real(r.I_km1), fmt_real(r.T1), fmt_real(r.T2), fmt_real(r.coefficient),
                          std::to_string(sign), fmt_real(r.margin), fmt_real(r.cancellation), fmt_real(r.log_scale),
                          fmt_real(r.error_estimate)});
        d.push_back(Json{{"k", cell.k}, {"m", cell.m}, {"status", "ok"}, {"u", json_real(r.u)},
                         {"I_k", json_real(r.I_k)}, {"I_{k-1}", json_real(r.I_km1)}, {"T1", json_real(r.T1)},
                         {"T2", json_real(r.T2)}, {"coefficient", json_real(r.coefficient)}, {"sign", sign},
                         {"margin", json_real(r.margin)}, {"cancellation", json_real(r.cancellation)},
                         {"log_scale", json_real(r.log_scale)}, {"error_estimate", json_real(r.error_estimate)}});
      }
      emit(c_sc, out, render(c_sc, meta, t, d));
    } else if (vc->parsed()) {
      const unsigned threads = c_v.thread_count();
      const std::filesystem::path dir = output_dir(v_outdir);
      std::filesystem::create_directories(dir);
      std::vector<double> xs = v_xlist.empty() ? default_x_ladder(v_ext) : parse_reals(v_xlist);
      if (!v_xlist.empty() && v_ext) xs.push_back(1e8);
      const Meta meta = resolved_options(vc);
      VerifyOptions vo;
      vo.threads = threads;
      Table summary{{"report", "file", "verdict", "non_monotone_steps", "slope_vs_loglog_x", "last_ratio"}, {}};
      bool all_passed = true;

      auto save = [&](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw ParameterError("cannot write " + (dir / name).string());
        f << text;
      };
      auto convergence = [&](const ConvergenceReport& r) {
        const std::string file = report_label(r) + ".csv";
        std::ostringstream os;
        write_report_csv(os, meta, r);
        save(file, os.str());
        summary.rows.push_back({r.kind, file, r.passed ? "pass" : "fail", std::to_string(r.non_monotone_steps),
                                fmt_real(r.slope), fmt_real(r.rows.back().ratio)});
        all_passed = all_passed && r.passed;
      };

      const bool all = v_report == "all";
      if (all || v_report == "theorem1") convergence(check_theorem1(builtin_spec(v_spec), v_m, v_q, xs, vo));
      if (all || v_report == "theorem2") convergence(check_theorem2(builtin_spec(v_spec), v_m, v_q, v_u, xs, vo));
      if (all || v_report == "weight") {
        convergence(check_weight_lemma(builtin_spec(v_spec), parse_reals(v_G), xs, vo));
      }
      if (all || v_report == "buchstab") {
        const auto cases = buchstab_suite(v_cases, v_seed, v_xmax, threads);
        Table t{{"case", "spec", "x", "q", "z", "m", "smooth", "full", "correction", "residual"}, {}};
        double worst = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
          const auto& c = cases[i];
          worst = std::max(worst, c.result.residual);
          t.rows.push_back({std::to_string(i), c.spec, fmt_real(c.x), std::to_string(c.q), fmt_real(c.z),
                            std::to_string(c.m), fmt_real(c.result.smooth), fmt_real(c.result.full),
                            fmt_real(c.result.correction), fmt_real(c.result.residual)});
        }
        const bool passed = worst < 1e-10;
        Meta m = meta;
        m.emplace_back("report", "buchstab");
        m.emplace_back("max_residual", fmt_real(worst));
        m.emplace_back("verdict", passed ? "pass" : "fail");
        std::ostringstream os;
        write_csv(os, m, t);
        const std::string file = "buchstab_seed" + std::to_string(v_seed) + ".csv";
        save(file, os.str());
        summary.rows.push_back({"buchstab", file, passed ? "pass" : "fail", "", "", ""});
        all_passed = all_passed && passed;
      }
      emit(c_v, out, render(c_v, meta, summary, rows_json(summary)));
      if (!all_passed) throw VerdictFailure("a verification verdict failed");
    }
  } catch (const VerdictFailure& e) {
    err << "error: " << e.what() << '\n';
    return verdict;
  } catch (const ToleranceError& e) {
    err << "tolerance failure: " << e.what() << '\n';
    return tolerance;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal;
  }
  return ok;
}

}  // namespace cli

/// Runs the command line argv[1..argc) with the given output streams.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli::run(std::move(args), out, err);
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return cli::run(args, out, err);
}

}  // namespace gpysmooth
