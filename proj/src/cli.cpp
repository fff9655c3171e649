#include <threeprimes/cli.hpp>

#include <threeprimes/arcs.hpp>
#include <threeprimes/buchstab.hpp>
#include <threeprimes/errors.hpp>
#include <threeprimes/manifest.hpp>
#include <threeprimes/parallel.hpp>
#include <threeprimes/sieve.hpp>
#include <threeprimes/ternary.hpp>
#include <threeprimes/transference.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace threeprimes::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string num(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// CSV built row by row; every value goes through num() or std::to_string so
// the bytes do not depend on stream state.
class Csv {
public:
  explicit Csv(std::initializer_list<std::string_view> header) { row(header); }

  template <class... Ts>
  void add(const Ts&... cells)
  {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

private:
  void row(std::initializer_list<std::string_view> cells)
  {
    bool first = true;
    for (auto c : cells) {
      if (!first)
        text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class T>
    requires std::is_integral_v<T>
  static std::string cell(T v)
  {
    return std::to_string(v);
  }

  std::string text_;
};

struct Globals {
  std::string config;
  u64 seed = 1;
  std::size_t workers = 0;
  bool deterministic = false;
};

class Session {
public:
  Session(std::vector<std::string> argv, std::ostream& out) : argv_(std::move(argv)), out_(out) {}

  // JSON result: to --out when given, else stdout.
  void emit_json(const json& j, const std::string& path)
  {
    const std::string text = j.dump(2) + "\n";
    if (path.empty())
      out_ << text;
    else
      write(path, text);
  }
  // Table result to --out (or stdout), with an optional JSON summary on stdout.
  void emit_table(const Csv& csv, const std::string& path, const json* summary = nullptr)
  {
    if (path.empty()) {
      out_ << csv.text();
      return;
    }
    write(path, csv.text());
    if (summary)
      out_ << summary->dump(2) << "\n";
  }

  void finish(const Globals& g, json config, double seconds)
  {
    if (outputs_.empty())
      return;
    RunManifest m;
    m.command_line = argv_;
    m.config = std::move(config);
    m.config_file = g.config;
    m.seed = g.seed;
    m.workers = worker_count();
    m.deterministic = g.deterministic;
    m.wall_time_seconds = seconds;
    m.outputs = outputs_;
    write_atomic(manifest_path(outputs_.front().path), m.to_json().dump(2) + "\n");
  }

private:
  void write(const std::string& path, const std::string& text)
  {
    write_atomic(path, text);
    outputs_.push_back({path, sha256_hex(text), text.size()});
  }

  std::vector<std::string> argv_;
  std::ostream& out_;
  std::vector<OutputRecord> outputs_;
};

sieve::Convention parse_convention(const std::string& s)
{
  if (s == "strict")
    return sieve::Convention::strict;
  if (s == "inclusive")
    return sieve::Convention::inclusive;
  throw UsageError("convention must be strict or inclusive");
}

std::string option_key(const CLI::Option* opt)
{
  const auto& l = opt->get_lnames();
  return l.empty() ? opt->get_name() : l.front();
}

// Options of the root and every parsed subcommand, after flags and config.
json snapshot(const CLI::App& root)
{
  json j;
  std::function<void(const CLI::App*, const std::string&)> walk = [&](const CLI::App* app,
                                                                      const std::string& prefix) {
    for (const CLI::Option* opt : app->get_options()) {
      const std::string key = option_key(opt);
      if (key == "help" || key == "version" || key.empty())
        continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        for (std::size_t i = 0; i < r.size(); ++i)
          value += (i ? "," : "") + r[i];
      } else {
        value = opt->get_default_str();
      }
      j[prefix + key] = value;
    }
    for (const CLI::App* sub : app->get_subcommands())
      walk(sub, prefix + sub->get_name() + ".");
  };
  walk(&root, "");
  return j;
}

// Flat JSON object; each key names a long option of the selected subcommand
// chain or of the root. Command-line flags take precedence.
void apply_config(CLI::App& root, const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object())
    throw UsageError("config file must hold a flat JSON object");

  std::vector<CLI::App*> chain{&root};
  while (!chain.back()->get_subcommands().empty())
    chain.push_back(chain.back()->get_subcommands().front());

  for (const auto& [key, value] : cfg.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = nullptr;
    for (auto it = chain.rbegin(); it != chain.rend() && !opt; ++it)
      opt = (*it)->get_option_no_throw("--" + name);
    if (!opt)
      throw UsageError("config key '" + key + "' matches no option of this command");
    if (opt->count() > 0)
      continue;
    auto as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array())
      for (const auto& v : value)
        opt->add_result(as_text(v));
    else
      opt->add_result(as_text(value));
    opt->run_callback();
  }
}

json breakdown_json(const buchstab::AlphaPlusResult& r)
{
  json j;
  j["value"] = r.value;
  j["quadrature_error"] = r.quadrature_error;
  j["four_omega_4"] = r.breakdown.term1;
  j["integral"] = r.breakdown.term2;
  j["clamped_arguments"] = r.clamped_arguments;
  j["below_2_9"] = r.value < 2.9;
  return j;
}

DensityFunction read_density_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read " + path);
  std::vector<std::pair<long long, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected index,value");
    try {
      rows.emplace_back(std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      if (rows.empty() && lineno == 1)
        continue;  // header row
      throw UsageError(path + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  long long N = 0;
  for (auto& [i, v] : rows) {
    if (i < 1)
      throw UsageError(path + ": indices start at 1");
    N = std::max(N, i);
  }
  std::vector<double> values(static_cast<std::size_t>(N), 0.0);
  for (auto& [i, v] : rows)
    values[static_cast<std::size_t>(i - 1)] = v;
  return DensityFunction(std::move(values));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Computations around three primes in short intervals", "threeprimes"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(THREEPRIMES_VERSION));

  Globals g;
  app.add_option("--config", g.config, "Flat JSON file of option values; flags win");
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--workers", g.workers, "Worker threads (default: THREEPRIMES_WORKERS or all cores)");
  app.add_flag("--deterministic", g.deterministic, "Single worker, fixed reduction order");

  std::function<void(Session&)> action;

  // buchstab
  auto* bs = app.add_subcommand("buchstab", "Buchstab function");
  bs->require_subcommand(1);
  struct {
    std::vector<double> u;
    double step = 1e-3;
    double umax = 0.0;
    std::string out;
  } be;
  auto* bs_eval = bs->add_subcommand("eval", "omega(u) at the given points");
  bs_eval->add_option("--u", be.u, "Points u >= 1")->required();
  bs_eval->add_option("--step", be.step, "Grid step");
  bs_eval->add_option("--umax", be.umax, "Table range (default: max u, at least 4)");
  bs_eval->add_option("--out", be.out, "JSON output file");
  bs_eval->callback([&] {
    action = [&](Session& s) {
      const double umax = std::max({4.0, be.umax, *std::max_element(be.u.begin(), be.u.end())});
      const auto table = buchstab::build_table(umax, be.step);
      json j;
      j["u"] = be.u;
      j["omega"] = json::array();
      for (double u : be.u)
        j["omega"].push_back(buchstab::eval(table, u));
      j["step"] = table.step;
      j["error_bound"] = table.err_bound;
      s.emit_json(j, be.out);
    };
  });

  struct {
    double tol = 1e-4;
    double step = 1e-3;
    bool omega3_bound = false;
    std::string out;
  } ap;
  auto add_alpha = [&](CLI::App* sub) {
    sub->add_option("--tol", ap.tol, "Target absolute error");
    sub->add_option("--step", ap.step, "Buchstab grid step");
    sub->add_flag("--omega3-bound", ap.omega3_bound, "Bound omega(u) by omega(3) for u >= 3");
    sub->add_option("--out", ap.out, "JSON output file");
    sub->callback([&] {
      action = [&](Session& s) {
        const auto table = buchstab::build_table(10.0, ap.step);
        const auto r = ap.omega3_bound ? buchstab::alpha_plus_upper_bound(table, ap.tol)
                                       : buchstab::alpha_plus(table, ap.tol);
        s.emit_json(breakdown_json(r), ap.out);
      };
    });
  };
  add_alpha(bs->add_subcommand("alpha-plus", "The majorant constant alpha+"));
  add_alpha(app.add_subcommand("alpha-plus", "The majorant constant alpha+"));

  // sieve
  auto* sv = app.add_subcommand("sieve", "Sieve weights and identities");
  sv->require_subcommand(1);
  struct {
    u64 x = 100'000'000;
    double theta = 0.65;
    u64 lo = 0, hi = 0;
    u64 w = 3, z = 100;
    u64 d = 1, c = 1;
    double eps = 0.05;
    std::string convention = "strict";
    std::string out;
  } so;
  auto* sv_maj = sv->add_subcommand("majorant", "rho and rho+ on a window");
  sv_maj->add_option("--x", so.x, "Scale x");
  sv_maj->add_option("--theta", so.theta, "Interval exponent");
  sv_maj->add_option("--lo", so.lo, "Window start (default x)");
  sv_maj->add_option("--hi", so.hi, "Window end, exclusive (default x + 10^5)");
  sv_maj->add_option("--convention", so.convention, "strict or inclusive");
  sv_maj->add_option("--out", so.out, "CSV: n,rho,rho_plus");
  sv_maj->callback([&] {
    action = [&](Session& s) {
      auto params = sieve::SieveParams::defaults(so.x, so.theta);
      params.convention = parse_convention(so.convention);
      const u64 lo = so.lo ? so.lo : so.x;
      const u64 hi = so.hi ? so.hi : lo + 100'000;
      const auto rows = sieve::majorant_window(params, lo, hi);
      Csv csv{"n", "rho", "rho_plus"};
      std::size_t violations = 0, primes = 0;
      double total = 0;
      for (const auto& r : rows) {
        csv.add(r.n, r.rho, r.rho_plus);
        violations += r.rho > r.rho_plus;
        primes += r.rho;
        total += static_cast<double>(r.rho_plus);
      }
      json summary{{"lo", lo}, {"hi", hi}, {"z", params.z}, {"y4", params.y4},
                   {"primes", primes}, {"violations", violations},
                   {"mean_rho_plus", rows.empty() ? 0.0 : total / static_cast<double>(rows.size())}};
      if (so.out.empty())
        s.emit_json(summary, "");
      else
        s.emit_table(csv, so.out, &summary);
    };
  });
  auto* sv_id = sv->add_subcommand("identity-check", "Buchstab identity on a window");
  sv_id->add_option("--lo", so.lo, "Window start")->required();
  sv_id->add_option("--hi", so.hi, "Window end, exclusive")->required();
  sv_id->add_option("--w", so.w, "Inner cutoff w");
  sv_id->add_option("--z", so.z, "Outer cutoff z");
  sv_id->add_option("--convention", so.convention, "strict or inclusive");
  sv_id->add_option("--out", so.out, "JSON output file");
  sv_id->callback([&] {
    action = [&](Session& s) {
      const auto win = sieve::sieve_window(so.lo, so.hi);
      const auto v = sieve::buchstab_identity_check(win, so.w, so.z, parse_convention(so.convention));
      s.emit_json({{"lo", so.lo}, {"hi", so.hi}, {"w", so.w}, {"z", so.z}, {"violations", v}}, so.out);
    };
  });
  auto* sv_den = sv->add_subcommand("density", "Primes n = c (mod d) in a window, scaled");
  sv_den->add_option("--lo", so.lo, "Window start")->required();
  sv_den->add_option("--hi", so.hi, "Window end, exclusive")->required();
  sv_den->add_option("--d", so.d, "Modulus");
  sv_den->add_option("--c", so.c, "Residue");
  sv_den->add_option("--out", so.out, "JSON output file");
  sv_den->callback([&] {
    action = [&](Session& s) {
      const auto win = sieve::sieve_window(so.lo, so.hi);
      const auto r = sieve::short_interval_prime_density(win, so.d, so.c);
      s.emit_json({{"primes", r.prime_count}, {"length", r.length}, {"log_x", r.log_x},
                   {"ratio", r.ratio}},
                  so.out);
    };
  });
  auto* sv_err = sv->add_subcommand("error-scan", "Fundamental-lemma error over a window");
  sv_err->add_option("--x", so.x, "Scale x");
  sv_err->add_option("--theta", so.theta, "Interval exponent");
  sv_err->add_option("--lo", so.lo, "Window start (default x)");
  sv_err->add_option("--hi", so.hi, "Window end, exclusive (default x + 10^4)");
  sv_err->add_option("--eps", so.eps, "Divisor range x^eps, eps in (0, theta/2)");
  sv_err->add_option("--out", so.out, "JSON output file");
  sv_err->callback([&] {
    action = [&](Session& s) {
      const auto params = sieve::SieveParams::defaults(so.x, so.theta);
      const u64 lo = so.lo ? so.lo : so.x;
      const u64 hi = so.hi ? so.hi : lo + 10'000;
      const auto win = sieve::sieve_window(lo, hi);
      const auto r = sieve::fundamental_error_scan(win, params, so.eps);
      json hist = json::object();
      for (auto [k, v] : r.histogram)
        hist[std::to_string(k)] = v;
      s.emit_json({{"omega_cutoff", r.omega_cutoff}, {"divisor_limit", r.divisor_limit},
                   {"total_abs", r.total_abs}, {"ratio", r.ratio}, {"histogram", hist}},
                  so.out);
    };
  });

  // arcs
  auto* ar = app.add_subcommand("arcs", "Exponential sums and arc classification");
  ar->require_subcommand(1);
  struct {
    u64 x = 1'000'000;
    double theta = 0.65;
    std::vector<std::string> gamma;
    u64 d = 1, c = 0;
    std::string kernel = "rho+";
    double A = 0.0;
    u64 qmax = 40;
    std::size_t random = 1000;
    double alpha_plus = 0.0;
    double long_cap = 1e7;
    std::string out;
  } ao;
  auto add_arc_common = [&](CLI::App* sub) {
    sub->add_option("--x", ao.x, "Scale x");
    sub->add_option("--theta", ao.theta, "Interval exponent");
    sub->add_option("--long-cap", ao.long_cap, "Cap on the long window h1");
  };
  auto* ar_cmp = ar->add_subcommand("compare", "Both sides of the major-arc equation");
  add_arc_common(ar_cmp);
  ar_cmp->add_option("--gamma", ao.gamma, "Frequencies: decimal, a/q or a/q+offset")->required();
  ar_cmp->add_option("--d", ao.d, "Modulus d");
  ar_cmp->add_option("--c", ao.c, "Residue c");
  ar_cmp->add_option("--kernel", ao.kernel, "rho or rho+");
  ar_cmp->add_option("--A", ao.A, "Log-power exponent in Q and the major-arc threshold");
  ar_cmp->add_option("--out", ao.out, "CSV: gamma,q,lhs_re,lhs_im,rhs_re,rhs_im,deviation,a,major");
  ar_cmp->callback([&] {
    action = [&](Session& s) {
      if (ao.kernel != "rho" && ao.kernel != "rho+")
        throw UsageError("kernel must be rho or rho+");
      std::vector<arcs::Frequency> freqs;
      for (const auto& t : ao.gamma) {
        try {
          freqs.push_back(arcs::Frequency::parse(t));
        } catch (const std::logic_error&) {
          throw UsageError("cannot parse frequency '" + t + "'");
        }
      }
      const arcs::ArcContext ctx(sieve::SieveParams::defaults(ao.x, ao.theta),
                                 {0.05, ao.long_cap});
      const auto cfg = arcs::ArcConfig::make(ao.x, ao.theta, ao.A);
      const double norm = ctx.x_pow_theta() / ctx.log_x();
      Csv csv{"gamma", "q", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "deviation", "a", "major"};
      json rows = json::array();
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        auto cmp = arcs::saz_compare(ctx, cfg, ao.d, ao.c, freqs[i]);
        if (ao.kernel == "rho") {
          cmp.lhs = arcs::exp_sum(ctx, arcs::Kernel::rho, ao.d, ao.c, freqs[i]);
          cmp.deviation = (cmp.arc.is_major ? std::abs(cmp.lhs - cmp.rhs) : std::abs(cmp.lhs)) / norm;
        }
        csv.add(ao.gamma[i], cmp.arc.q, cmp.lhs.real(), cmp.lhs.imag(), cmp.rhs.real(),
                cmp.rhs.imag(), cmp.deviation, cmp.arc.a, cmp.arc.is_major);
        rows.push_back({{"gamma", ao.gamma[i]}, {"q", cmp.arc.q}, {"major", cmp.arc.is_major},
                        {"deviation", cmp.deviation}});
      }
      json summary{{"Q", cfg.Q}, {"q_threshold", cfg.q_threshold}, {"h1", ctx.h1()},
                   {"long_truncated", ctx.long_truncated()},
                   {"long_density", ctx.long_density()}, {"rows", rows}};
      if (ao.out.empty())
        s.emit_json(summary, "");
      else
        s.emit_table(csv, ao.out, &summary);
    };
  });
  auto* ar_eta = ar->add_subcommand("eta", "Measured eta in the pseudorandomness condition");
  add_arc_common(ar_eta);
  ar_eta->add_option("--qmax", ao.qmax, "Farey denominators up to qmax");
  ar_eta->add_option("--random", ao.random, "Additional uniform random frequencies");
  ar_eta->add_option("--c", ao.c, "Residue class mod W (default 1)");
  ar_eta->add_option("--alpha-plus", ao.alpha_plus, "alpha+ (default: computed)");
  ar_eta->add_option("--out", ao.out, "CSV: gamma,deviation");
  ar_eta->callback([&] {
    action = [&](Session& s) {
      double alpha = ao.alpha_plus;
      if (alpha <= 0.0)
        alpha = buchstab::alpha_plus(buchstab::build_table(10.0, 1e-3)).value;
      const arcs::ArcContext ctx(sieve::SieveParams::defaults(ao.x, ao.theta),
                                 {0.05, ao.long_cap});
      const auto grid = arcs::eta_grid(ao.qmax, ao.random, g.seed);
      const auto rep = arcs::pseudorandom_eta(ctx, alpha, ao.c == 0 ? 1 : ao.c, grid);
      Csv csv{"gamma", "deviation"};
      for (const auto& p : rep.points)
        csv.add(p.gamma.value(), p.deviation);
      json summary{{"eta", rep.eta}, {"alpha_plus", alpha}, {"points", rep.points.size()},
                   {"W", ctx.params().W}, {"long_truncated", ctx.long_truncated()}};
      if (ao.out.empty())
        s.emit_json(summary, "");
      else
        s.emit_table(csv, ao.out, &summary);
    };
  });

  // transfer
  auto* tr = app.add_subcommand("transfer", "Additive combinatorics on [N]");
  tr->require_subcommand(1);
  struct {
    u64 n = 256;
    std::size_t trials = 100;
    double eps = 0.05, eta = 0.05;
    double alpha = 1.0 / 3.0;
    std::string input, majorant;
    double delta = 0.1;
    std::size_t grid = 0;
    double xi = 0.0, length = 0.3, start = 0.0;
    u64 lo = 1'000'000, hi = 1'010'000;
    std::string out;
  } to;
  auto* tr_kd = tr->add_subcommand("kneser-dense", "Positivity of f1*f2*f3 on [N/2, N]");
  tr_kd->add_option("--n", to.n, "N");
  tr_kd->add_option("--trials", to.trials, "Number of trials");
  tr_kd->add_option("--eps", to.eps, "Density slack above 1/3");
  tr_kd->add_option("--eta", to.eta, "Progression length fraction");
  tr_kd->add_option("--out", to.out, "JSON output file");
  tr_kd->callback([&] {
    action = [&](Session& s) {
      const auto r = transference::test_kneser_dense(to.n, to.trials, to.eps, to.eta, g.seed);
      s.emit_json({{"N", r.N}, {"trials", r.trials}, {"generator_failures", r.generator_failures},
                   {"min_ratio", r.min_ratio}, {"min_trial", r.min_trial}, {"min_n", r.min_n},
                   {"bound", r.bound}, {"margin", r.margin}, {"positive", r.min_ratio > 0.0}},
                  to.out);
    };
  });
  auto* tr_d4 = tr->add_subcommand("doubling4", "Popular-sum size against 4 alpha N");
  tr_d4->add_option("--n", to.n, "N");
  tr_d4->add_option("--instances", to.trials, "Number of accepted instances");
  tr_d4->add_option("--eta", to.eta, "Popularity and progression fraction");
  tr_d4->add_option("--alpha", to.alpha, "Density on every long progression");
  tr_d4->add_option("--out", to.out, "JSON output file");
  tr_d4->callback([&] {
    action = [&](Session& s) {
      const auto r = transference::test_doubling4(to.n, to.trials, to.eta, to.alpha, g.seed);
      s.emit_json({{"N", r.N}, {"instances", r.instances}, {"rejected", r.rejected},
                   {"alpha", r.alpha}, {"min_margin", r.min_margin}, {"margins", r.margins}},
                  to.out);
    };
  });
  auto* tr_dec = tr->add_subcommand("decompose", "f = g + h through a Bohr set");
  tr_dec->add_option("--input", to.input, "CSV index,value for f")->required();
  tr_dec->add_option("--majorant", to.majorant, "CSV index,value for nu (default max(1, max f))");
  tr_dec->add_option("--delta", to.delta, "Large-spectrum threshold delta");
  tr_dec->add_option("--grid", to.grid, "Fourier grid size (default 8N)");
  tr_dec->add_option("--out", to.out, "CSV: n,f,g,h on the extended domain");
  tr_dec->callback([&] {
    action = [&](Session& s) {
      const auto f = read_density_csv(to.input);
      DensityFunction nu;
      if (to.majorant.empty()) {
        const double top = std::max(1.0, *std::max_element(f.values.begin(), f.values.end()));
        nu = DensityFunction::constant(f.N(), top);
      } else {
        nu = read_density_csv(to.majorant);
      }
      transference::DecomposeOptions opts;
      opts.grid = to.grid;
      const auto dec = transference::transfer_decompose(f, nu, to.delta, opts);
      Csv csv{"n", "f", "g", "h"};
      for (std::size_t i = 0; i < dec.g.size(); ++i) {
        const auto n = dec.first + static_cast<std::int64_t>(i);
        csv.add(n, f(n), dec.g[i], dec.h[i]);
      }
      const auto& r = dec.report;
      json summary{{"N", f.N()}, {"delta", to.delta}, {"T", dec.T.size()}, {"B", dec.B.size()},
                   {"exact_sum", r.exact_sum}, {"g_max", r.g_max}, {"g_bound", r.g_bound},
                   {"nu_eta", r.nu_eta}, {"h_hat_max", r.h_hat_max}, {"f_hat_max", r.f_hat_max},
                   {"multiplier_excess", r.multiplier_excess}, {"ap_min_f", r.ap_min_f},
                   {"ap_min_g", r.ap_min_g}, {"lq_f", r.lq_f}, {"lq_g", r.lq_g}, {"lq_h", r.lq_h}};
      if (to.out.empty())
        s.emit_json(summary, "");
      else
        s.emit_table(csv, to.out, &summary);
    };
  });
  auto* tr_bohr = tr->add_subcommand("bohr-demo", "Primes in a rotated interval and the triple sumset");
  tr_bohr->add_option("--xi", to.xi, "Rotation xi");
  tr_bohr->add_option("--length", to.length, "Interval length, below 1/3");
  tr_bohr->add_option("--start", to.start, "Interval start");
  tr_bohr->add_option("--lo", to.lo, "Prime window start");
  tr_bohr->add_option("--hi", to.hi, "Prime window end");
  tr_bohr->add_option("--out", to.out, "JSON output file");
  tr_bohr->callback([&] {
    action = [&](Session& s) {
      const auto r = transference::bohr_obstruction_demo(to.xi, to.length, to.lo, to.hi, to.start);
      s.emit_json({{"primes", r.primes}, {"inside_fraction", r.inside_fraction},
                   {"interval_length", r.interval_length}, {"sumset_length", r.sumset_length},
                   {"targets", r.targets}, {"outside_fraction", r.outside_fraction},
                   {"histogram", r.histogram}},
                  to.out);
    };
  });

  // ternary
  auto* te = app.add_subcommand("ternary", "Three primes near n/3");
  te->require_subcommand(1);
  struct {
    u64 lo = 9, hi = 99;
    double theta = 0.55;
    u64 n = 0, H = 0;
    u64 cap = 1'000'000;
    std::string out;
  } tn;
  auto* te_scan = te->add_subcommand("scan", "Every odd n in a range");
  te_scan->add_option("--lo", tn.lo, "First n")->required();
  te_scan->add_option("--hi", tn.hi, "Last n")->required();
  te_scan->add_option("--theta", tn.theta, "Window H = ceil(n^theta)");
  te_scan->add_option("--out", tn.out, "CSV: n,Hmin,theta_min,count_at_theta,H,p1,p2,p3");
  te_scan->callback([&] {
    action = [&](Session& s) {
      const auto r = ternary::scan_range(tn.lo, tn.hi, tn.theta);
      Csv csv{"n", "Hmin", "theta_min", "count_at_theta", "H", "p1", "p2", "p3"};
      for (const auto& row : r.rows)
        csv.add(row.n, row.H_min, row.theta_min, row.count, row.H, row.witness[0],
                row.witness[1], row.witness[2]);
      json summary{{"lo", r.lo}, {"hi", r.hi}, {"theta", r.theta}, {"odd_n", r.rows.size()},
                   {"failures", r.failures}, {"max_theta_min", r.max_theta_min},
                   {"argmax_theta_min", r.argmax_theta_min}, {"histogram", r.histogram},
                   {"window", "[ceil(n/3)-H, floor(n/3)+H] intersected with [2, inf)"}};
      if (tn.out.empty())
        s.emit_json(summary, "");
      else
        s.emit_table(csv, tn.out, &summary);
    };
  });
  auto* te_pred = te->add_subcommand("predict", "Singular-series prediction and the actual count");
  te_pred->add_option("--n", tn.n, "Odd n >= 9")->required();
  te_pred->add_option("--H", tn.H, "Window half-width")->required();
  te_pred->add_option("--cap", tn.cap, "Euler product cutoff");
  te_pred->add_option("--out", tn.out, "JSON output file");
  te_pred->callback([&] {
    action = [&](Session& s) {
      const auto p = ternary::predicted_count(tn.n, tn.H, tn.cap);
      json j{{"n", tn.n}, {"H", tn.H}, {"predicted", p.value}, {"singular_series", p.series},
             {"in_range", p.in_range}};
      if (tn.n % 2 == 1) {
        const u64 count = ternary::count_representations(tn.n, tn.H);
        j["count"] = count;
        j["ratio"] = p.value > 0 ? static_cast<double>(count) / p.value : 0.0;
      }
      s.emit_json(j, tn.out);
    };
  });

  if (args.empty()) {
    err << app.help();
    return usage;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
    if (!g.config.empty())
      apply_config(app, g.config);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }

  if (g.deterministic)
    set_worker_count(1);
  else if (g.workers > 0)
    set_worker_count(g.workers);

  std::vector<std::string> argv{"threeprimes"};
  argv.insert(argv.end(), args.begin(), args.end());
  Session session(argv, out);
  try {
    if (!action)
      throw UsageError("no command selected");
    action(session);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    session.finish(g, snapshot(app), secs);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return numeric;
  } catch (const transference::EmptyBohrSet& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return failure;
  }
  return ok;
}

} // namespace threeprimes::cli
