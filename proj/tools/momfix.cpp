// Batch front end: moment tables, spectrum ledgers, density grids, transform
// trajectories, plot grids, and self-verification, all with deterministic
// 17-significant-digit output.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <momfix/momfix.hpp>

namespace {

using namespace momfix;

std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// stdout unless a path is given
struct sink {
  std::ofstream file;
  std::ostream& out;
  explicit sink(const std::string& path)
      : file(path.empty() ? std::ofstream() : std::ofstream(path)),
        out(path.empty() ? std::cout : file) {
    if (!path.empty() && !file)
      throw std::runtime_error("cannot open output file " + path);
  }
};

int cmd_moments(std::size_t n, const std::string& out_path) {
  sink s(out_path);
  auto m = fixed_point_moments(n);
  auto lam = lambda_sequence(n);
  s.out << "n,m_n,lambda_n,m_scaled,lambda_sq_gap\n";
  for (std::size_t k = 0; k <= n; ++k) {
    double kk = static_cast<double>(k);
    s.out << k << ',' << fmt(m[k]) << ',' << fmt(lam[k]) << ','
          << fmt(m[k] * std::sqrt(2.0 * kk)) << ',' << fmt(lam[k] * lam[k] - 2.0 * kk)
          << '\n';
  }
  return 0;
}

int cmd_spectrum(std::size_t p_max, const std::string& method, std::size_t big_n,
                 std::size_t steps, const std::string& out_path) {
  if (method == "bisect" && (p_max < 1 || p_max > 10)) {
    std::cerr << "spectrum: bisection is capped at p_max = 10 by orbit precision\n";
    return 3;
  }
  if (method == "limit" && p_max > 20) {
    std::cerr << "spectrum: the limit formula is capped at p_max = 20 by level-set size\n";
    return 3;
  }
  spectrum_ledger led;
  if (method == "bisect")
    led = ledger_by_bisection(p_max);
  else if (method == "limit")
    led = ledger_by_limit(p_max, big_n);
  else if (method == "iterate")
    led = ledger_by_iteration(p_max, steps);
  else if (method == "merged")
    led = merged_ledger(p_max);
  else
    throw CLI::ValidationError("--method", "unknown method " + method);
  save_ledger(led, out_path);
  std::cout << "wrote " << out_path << ": p_max=" << led.p_max
            << " atoms=" << led.atom_count() << " rho0=" << fmt(led.rho0)
            << " tail_deficit=" << fmt(led.tail_deficit) << '\n';
  return 0;
}

int cmd_density(const std::string& ledger_path, double from, double to, double step,
                const std::string& out_path) {
  if (!(from > 0.0) || !(to < 1.0) || !(from <= to) || !(step > 0.0))
    throw std::invalid_argument("density: grid must satisfy 0 < from <= to < 1, step > 0");
  auto led = load_ledger(ledger_path);
  sink s(out_path);
  s.out << "t,density,scaled\n";
  double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t i = 0;; ++i) {
    double t = from + step * static_cast<double>(i);
    if (t > to + 1e-12) break;
    auto d = density(led, t);
    s.out << fmt(t) << ',' << fmt(d.value) << ','
          << fmt(d.value * std::sqrt(two_pi * (1.0 - t))) << '\n';
  }
  return 0;
}

int cmd_iterate(const std::string& start, const std::string& file, std::size_t steps,
                std::size_t n, const std::string& out_path) {
  std::vector<double> a(n + 1, 0.0);
  if (start == "delta0") {
    a[0] = 1.0;
  } else if (start == "ones") {
    a.assign(n + 1, 1.0);
  } else if (start == "custom") {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("iterate: cannot open " + file);
    nlohmann::json j;
    in >> j;
    if (!j.is_array()) throw std::invalid_argument("iterate: file must hold a JSON array");
    a = j.get<std::vector<double>>();
    if (a.size() < n + 1)
      throw std::invalid_argument("iterate: need at least n+1 starting moments");
    a.resize(n + 1);
  } else {
    throw CLI::ValidationError("--start", "unknown start " + start);
  }
  auto traj = iterate_t(a, steps);
  auto fixed = fixed_point_moments(n);
  sink s(out_path);
  s.out << "step,side,moments\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    bool above = true, below = true;
    for (std::size_t k = 0; k <= n; ++k) {
      if (traj[i][k] < fixed[k] - 1e-12) above = false;
      if (traj[i][k] > fixed[k] + 1e-12) below = false;
    }
    s.out << (i + 1) << ',' << (above ? "above" : below ? "below" : "mixed");
    for (std::size_t k = 0; k <= n; ++k) s.out << ',' << fmt(traj[i][k]);
    s.out << '\n';
  }
  return 0;
}

int cmd_plot_f(double from, double to, double step, const std::string& out_path) {
  if (!(step > 0.0) || !(from < to))
    throw std::invalid_argument("plot-f: grid must satisfy from < to, step > 0");
  std::size_t p_led = 4;
  if (from < -4.0) p_led = std::min<std::size_t>(12, static_cast<std::size_t>(std::ceil(-from)));
  auto led = ledger_by_iteration(p_led, 12);

  std::vector<double> poles, zeros;
  for (double q = -1.0; q >= from - 1e-12; q -= 1.0) poles.push_back(q);
  if (from <= 0.0 && to >= 0.0) zeros.push_back(0.0);
  for (const auto& shell : led.shells)
    for (const auto& e : shell) {
      if (e.xi >= from && e.xi <= to) zeros.push_back(e.xi);
      for (double l = 1.0; e.xi - l >= from - 1e-12; l += 1.0)
        if (e.xi - l <= to) poles.push_back(e.xi - l);
    }
  std::sort(poles.begin(), poles.end());
  std::sort(zeros.begin(), zeros.end());

  sink s(out_path);
  s.out << "x,f\n";
  for (double q : poles) s.out << "# pole," << fmt(q) << '\n';
  for (double q : zeros) s.out << "# zero," << fmt(q) << '\n';

  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0;; ++i) {
    double x = from + step * static_cast<double>(i);
    if (x > to + 1e-12) break;
    double near_pole = std::numeric_limits<double>::max();
    for (double q : poles) near_pole = std::min(near_pole, std::fabs(x - q));
    double v;
    if (near_pole <= 1e-6) {
      v = std::numeric_limits<double>::quiet_NaN();
    } else {
      try {
        v = f_extended(x, inf).value;
      } catch (const pole_error&) {
        v = std::numeric_limits<double>::quiet_NaN();
      }
    }
    s.out << fmt(x) << ',' << fmt(v) << '\n';
  }
  return 0;
}

// --- verification suites -----------------------------------------------------

struct check_list {
  std::vector<std::pair<std::string, bool>> checks;
  void add(const std::string& name, bool ok) { checks.emplace_back(name, ok); }
};

void suite_asymptotics(check_list& cl) {
  auto m = fixed_point_moments(10000);
  cl.add("m_1 is the golden ratio conjugate",
         std::fabs(m[1] - 0.5 * (std::sqrt(5.0) - 1.0)) < 1e-12);
  double sum = 0.0, comp = 0.0;
  bool identity = true;
  for (double v : m) {
    double y = v - comp, t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    identity = identity && std::fabs(v * sum - 1.0) < 1e-12;
  }
  cl.add("m_n * partial_sum = 1 up to n = 1e4", identity);
  auto rep = asymptotic_report(1000000);
  cl.add("m_n sqrt(2n) -> 1", std::fabs(rep.m_scaled - 1.0) < 0.01);
  cl.add("lambda square gaps -> 2", std::fabs(rep.sq_gap - 2.0) < 1e-4);

  auto a = lambda_anchor::at(1000000);
  double r[3];
  int i = 0;
  for (double sdepth : {1e4, 1e5, 1e6}) {
    double d = f_real_at(sdepth + 0.5, a).value - f_real_at(sdepth - 0.5, a).value;
    r[i++] = d * std::sqrt(2.0 * sdepth);
  }
  cl.add("f' sqrt(2s) -> 1 monotonically",
         std::fabs(r[0] - 1.0) < 0.05 && std::fabs(r[1] - 1.0) < 0.05 &&
             std::fabs(r[2] - 1.0) < 0.05 && r[0] > r[1] && r[1] > r[2]);
}

void suite_functional(check_list& cl) {
  auto a = lambda_anchor::at(300000);
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> ux(0.01, 99.0);
  bool feq = true, dual = true;
  for (int i = 0; i < 200; ++i) {
    double x = ux(rng);
    feq = feq && std::fabs(f_real_at(x, a).value - psi(f_real_at(x + 1.0, a).value)) < 1e-8;
    double xd = ux(rng) - 1.0;
    dual = dual && std::fabs(f_real_at(xd + 1.0, a).value * F_real_at(xd, a).value - 1.0) < 1e-10;
  }
  cl.add("functional equation residual < 1e-8", feq);
  cl.add("mellin duality residual < 1e-10", dual);

  bool logc = true;
  for (double s0 : {0.3, 0.7, 1.0}) {
    std::vector<double> w(21);
    for (int k = 0; k <= 20; ++k) w[k] = f_real_at(s0 + k, a).value;
    for (int k = 1; k < 20; ++k)
      logc = logc && w[k] * w[k] * (1.0 + 1e-10) >= w[k - 1] * w[k + 1];
  }
  cl.add("1/f is log-convex on integer-spaced grids", logc);

  auto y2 = level_set(2);
  double golden = 0.5 * (std::sqrt(5.0) + 1.0);
  cl.add("second level set hits the golden pairs",
         std::fabs(y2[0] + golden) < 1e-12 && std::fabs(y2[1] + 1.0 / golden) < 1e-12 &&
             std::fabs(y2[2] - 1.0 / golden) < 1e-12 && std::fabs(y2[3] - golden) < 1e-12);

  std::uniform_real_distribution<double> uy(-8.0, 8.0);
  bool pre = true;
  for (int i = 0; i < 100; ++i) {
    double y = uy(rng);
    auto pr = preimage_pair(y);
    pre = pre && std::fabs(psi(pr.first) - y) < 1e-13 && std::fabs(psi(pr.second) - y) < 1e-13;
  }
  cl.add("preimage pairs invert psi", pre);
}

void suite_spectrum(check_list& cl) {
  auto bis = ledger_by_bisection(2);
  auto lim = ledger_by_limit(2, 200000);
  auto it4 = ledger_by_iteration(4, 12);
  const spectrum_ledger* leds[3] = {&bis, &lim, &it4};
  bool agree = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      agree = agree && std::fabs(leds[i]->rho0 - leds[j]->rho0) <=
                           leds[i]->rho0_err + leds[j]->rho0_err;
      for (std::size_t p = 1; p <= 2; ++p)
        for (std::size_t q = 0; q < leds[i]->shells[p - 1].size(); ++q) {
          const auto& ei = leds[i]->shells[p - 1][q];
          const auto& ej = leds[j]->shells[p - 1][q];
          agree = agree && std::fabs(ei.xi - ej.xi) <= ei.err + ej.err &&
                  std::fabs(ei.rho - ej.rho) <= ei.err + ej.err;
        }
    }
  cl.add("three methods agree within reported errors", agree);

  auto it8 = ledger_by_iteration(8, 12);
  bool counts = true;
  for (std::size_t p = 1; p <= 8; ++p) {
    counts = counts && it8.shells[p - 1].size() == (std::size_t{1} << (p - 1));
    for (const auto& e : it8.shells[p - 1])
      counts = counts && e.xi > -(static_cast<double>(p) + 1.0) &&
               e.xi < -static_cast<double>(p);
  }
  cl.add("shell counts are 2^(p-1) inside (-p-1,-p)", counts);

  bool dshape = true;
  double prev = 0.0, prev_diff = 0.0;
  for (int i = 1; i <= 200; ++i) {
    double t = static_cast<double>(i) / 201.0;
    double v = density(it8, t).value;
    if (i > 1) {
      dshape = dshape && v > prev;
      if (i > 2) dshape = dshape && (v - prev) > prev_diff - 1e-12;
      prev_diff = v - prev;
    }
    prev = v;
  }
  cl.add("density is increasing and convex", dshape);

  cl.add("partial fractions at 0 equal the retained mass",
         std::fabs(reconstruct_moment(it8, 0) - (1.0 - it8.tail_deficit)) < 1e-12);
}

void suite_divisibility(check_list& cl) {
  std::vector<double> unif(40);
  for (std::size_t n = 0; n < 40; ++n) unif[n] = 1.0 / (n + 1.0);
  cl.add("uniform moments are completely monotone",
         completely_monotone_check(unif, 20, 1e-12).pass);
  cl.add("fixed-point moments are completely monotone",
         completely_monotone_check(fixed_point_moments(79), 20, 1e-9).pass);
  cl.add("fractional powers stay completely monotone",
         infdiv_check(0.5, 60, 15).pass && infdiv_check(3.0, 60, 15).pass);
  std::vector<double> sq(40);
  for (std::size_t n = 0; n < 40; ++n) sq[n] = 1.0 / ((n + 1.0) * (n + 1.0));
  cl.add("reciprocal squares leave the image", !in_image_of_t(sq, 10).pass);
  std::vector<double> poly(32);
  for (std::size_t n = 0; n < 32; ++n) {
    double v = 32.0 - static_cast<double>(n);
    poly[n] = v * v / 1024.0;
  }
  auto rep = completely_monotone_check(poly, 10, 0.0);
  cl.add("difference triangle is exact on dyadic polynomials",
         rep.pass && rep.min_signed_difference == 0.0);
}

int cmd_verify(const std::string& suite) {
  std::vector<std::pair<std::string, std::function<void(check_list&)>>> suites;
  if (suite == "asymptotics" || suite == "all") suites.emplace_back("asymptotics", suite_asymptotics);
  if (suite == "functional" || suite == "all") suites.emplace_back("functional", suite_functional);
  if (suite == "spectrum" || suite == "all") suites.emplace_back("spectrum", suite_spectrum);
  if (suite == "divisibility" || suite == "all") suites.emplace_back("divisibility", suite_divisibility);
  if (suites.empty()) throw CLI::ValidationError("--suite", "unknown suite " + suite);

  bool all_ok = true;
  for (auto& [name, fn] : suites) {
    check_list cl;
    fn(cl);
    bool ok = true;
    for (auto& [cname, cok] : cl.checks) {
      ok = ok && cok;
      std::cout << name << ": " << cname << ": " << (cok ? "ok" : "FAIL") << '\n';
    }
    std::cout << name << ": " << (ok ? "PASS" : "FAIL") << " (" << cl.checks.size()
              << " checks)\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-point moment sequence toolkit"};
  app.require_subcommand(1);

  auto* c_mom = app.add_subcommand("moments", "table of m_n, lambda_n and scalings");
  std::size_t mom_n = 10;
  std::string mom_out;
  c_mom->add_option("--n", mom_n, "largest index")->required();
  c_mom->add_option("--out", mom_out, "output CSV path (default stdout)");

  auto* c_spec = app.add_subcommand("spectrum", "compute a zero/residue ledger");
  std::size_t sp_p = 4, sp_big_n = 1000000, sp_steps = 12;
  std::string sp_method = "merged", sp_out;
  c_spec->add_option("--p-max", sp_p, "deepest shell")->required();
  c_spec->add_option("--method", sp_method, "bisect|limit|iterate|merged");
  c_spec->add_option("--big-n", sp_big_n, "depth for the limit formula");
  c_spec->add_option("--steps", sp_steps, "iteration steps");
  c_spec->add_option("--out", sp_out, "ledger JSON path")->required();

  auto* c_den = app.add_subcommand("density", "density grid from a ledger");
  std::string den_led, den_out;
  double den_from = 0.1, den_to = 0.9, den_step = 0.1;
  c_den->add_option("--ledger", den_led, "ledger JSON path")->required();
  c_den->add_option("--from", den_from, "grid start")->required();
  c_den->add_option("--to", den_to, "grid end")->required();
  c_den->add_option("--step", den_step, "grid step")->required();
  c_den->add_option("--out", den_out, "output CSV path (default stdout)");

  auto* c_it = app.add_subcommand("iterate", "moment-level transform trajectory");
  std::string it_start = "delta0", it_file, it_out;
  std::size_t it_steps = 3, it_n = 10;
  c_it->add_option("--start", it_start, "delta0|ones|custom");
  c_it->add_option("--file", it_file, "JSON array of starting moments (custom)");
  c_it->add_option("--steps", it_steps, "number of transform steps");
  c_it->add_option("--n", it_n, "largest moment index");
  c_it->add_option("--out", it_out, "output CSV path (default stdout)");

  auto* c_plot = app.add_subcommand("plot-f", "grid of f with pole/zero annotations");
  double pl_from = -4.0, pl_to = 3.0, pl_step = 0.05;
  std::string pl_out;
  c_plot->add_option("--from", pl_from, "grid start")->required();
  c_plot->add_option("--to", pl_to, "grid end")->required();
  c_plot->add_option("--step", pl_step, "grid step")->required();
  c_plot->add_option("--out", pl_out, "output CSV path (default stdout)");

  auto* c_ver = app.add_subcommand("verify", "run invariant suites");
  std::string ver_suite = "all";
  c_ver->add_option("--suite", ver_suite, "asymptotics|functional|spectrum|divisibility|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(c_mom)) return cmd_moments(mom_n, mom_out);
    if (app.got_subcommand(c_spec))
      return cmd_spectrum(sp_p, sp_method, sp_big_n, sp_steps, sp_out);
    if (app.got_subcommand(c_den))
      return cmd_density(den_led, den_from, den_to, den_step, den_out);
    if (app.got_subcommand(c_it)) return cmd_iterate(it_start, it_file, it_steps, it_n, it_out);
    if (app.got_subcommand(c_plot)) return cmd_plot_f(pl_from, pl_to, pl_step, pl_out);
    if (app.got_subcommand(c_ver)) return cmd_verify(ver_suite);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    // precision caps, bracket failures, unreadable files
    std::cerr << e.what() << '\n';
    return 3;
  }
  return 2;
}
