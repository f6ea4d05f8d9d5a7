#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "wavedelay/contour.hpp"
#include "wavedelay/error.hpp"
#include "wavedelay/pdesim.hpp"
#include "wavedelay/polyform.hpp"
#include "wavedelay/regions.hpp"
#include "wavedelay/robustness.hpp"

namespace wavedelay::cli {

using nlohmann::json;

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  for (int prec = 1; prec <= 12; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

// JSON numbers go through format_real so the file matches the CSV digits.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format_real(x).c_str(), nullptr);
}

json num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

struct TauArgs {
  std::string tau;
  double tau_real = std::numeric_limits<double>::quiet_NaN();
  bool irrational = false;
};

struct ResolvedTau {
  double value = 0.0;
  std::optional<Rational> rational;
  bool irrational = false;

  std::string label() const { return rational ? rational->str() : format_real(value); }
};

void add_tau(CLI::App* sub, TauArgs& t) {
  auto* a = sub->add_option("--tau", t.tau, "delay as M/N");
  auto* b = sub->add_option("--tau-real", t.tau_real, "delay as a decimal");
  a->excludes(b);
  sub->add_flag("--treat-as-irrational", t.irrational, "take --tau-real as rationally independent of 2")->needs(b);
}

ResolvedTau resolve_tau(const TauArgs& t) {
  ResolvedTau r;
  if (!t.tau.empty()) {
    r.rational = Rational::parse(t.tau);
    r.value = r.rational->value();
    return r;
  }
  if (std::isnan(t.tau_real)) throw Error(ErrorCode::InvalidArgument, "one of --tau or --tau-real is required");
  if (!(t.tau_real > 0.0)) throw Error(ErrorCode::InvalidArgument, "delay must be positive");
  r.value = t.tau_real;
  r.irrational = t.irrational;
  if (!t.irrational) r.rational = Rational::from_double(t.tau_real, 1000000);
  return r;
}

DelaySystem build_system(const std::string& kind, double c1, double c2, const ResolvedTau& tau) {
  if (kind == "direct") {
    if (c1 != 0.0) throw Error(ErrorCode::InvalidArgument, "direct feedback takes its gain from --c2; --c1 must be 0");
    return tau.rational ? DelaySystem::direct(c2, *tau.rational) : DelaySystem::direct(c2, tau.value);
  }
  return tau.rational ? DelaySystem::cascade(c1, c2, *tau.rational) : DelaySystem::cascade(c1, c2, tau.value);
}

CharKind region_kind(const std::string& kind) {
  return kind == "direct" ? CharKind::DirectDelayFeedback : CharKind::CascadeEqualGains;
}

struct Scan {
  double lo = -3.0, hi = 3.0, step = 0.01;
};

Scan parse_scan(const std::string& s) {
  Scan sc;
  std::istringstream in(s);
  char c1 = 0, c2 = 0;
  if (!(in >> sc.lo >> c1 >> sc.hi >> c2 >> sc.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::InvalidArgument, "--scan expects lo:hi:step");
  }
  if (!(sc.hi > sc.lo) || !(sc.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "--scan needs lo < hi, step > 0");
  return sc;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_real(*v) : ""; }
std::string opt_cell(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : ""; }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability, root and simulation tools for a boundary-controlled wave equation with a delayed input"};
  app.name("wavedelay");
  app.require_subcommand(1);

  TauArgs tau_args;
  std::string kind = "cascade";
  double c1 = 0.0, c2 = 0.0, c = 0.0;

  auto* region = app.add_subcommand("region", "stability interval for a single gain (JSON)");
  add_tau(region, tau_args);
  region->add_option("--kind", kind, "cascade | direct")->check(CLI::IsMember({"cascade", "direct"}));
  std::string scan_text = "-3:3:0.01";
  region->add_option("--scan", scan_text, "gain grid lo:hi:step")->capture_default_str();

  auto* roots = app.add_subcommand("roots", "characteristic roots in a rectangle (CSV)");
  add_tau(roots, tau_args);
  roots->add_option("--kind", kind, "cascade | direct")->check(CLI::IsMember({"cascade", "direct"}));
  roots->add_option("--c1", c1, "gain on w(1,t)");
  roots->add_option("--c2", c2, "gain on z_t(1,t) (k for direct)");
  std::vector<double> rect;
  roots->add_option("--rect", rect, "re_min re_max im_min im_max")->expected(4)->required();

  auto* count = app.add_subcommand("count", "root count in the unit disk or a vertical strip (integer)");
  add_tau(count, tau_args);
  count->add_option("--c", c, "equal gain c")->required();
  bool disk = false;
  std::vector<int> strip;
  double re_max = std::numeric_limits<double>::quiet_NaN(), re_min = 0.0;
  auto* disk_opt = count->add_flag("--disk", disk, "polynomial roots with |z| < 1");
  auto* strip_opt = count->add_option("--strip", strip, "a b: Im in [a pi, b pi]")->expected(2);
  disk_opt->excludes(strip_opt);
  count->add_option("--re-max", re_max, "right edge of the strip rectangle (default: dominance bound)");
  count->add_option("--re-min", re_min, "left edge of the strip rectangle")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep-eps", "first unstable frequency under delay perturbations (CSV)");
  double base = 0.0;
  std::vector<double> eps_list;
  sweep_cmd->add_option("--base", base, "unperturbed delay: 0 or an even integer")->capture_default_str();
  sweep_cmd->add_option("--c", c, "equal gain c")->required();
  sweep_cmd->add_option("--eps", eps_list, "comma separated perturbations")->delimiter(',')->required();

  auto* sim = app.add_subcommand("simulate", "exact characteristic simulation (summary JSON)");
  add_tau(sim, tau_args);
  sim->add_option("--c1", c1, "gain on w(1,t)");
  sim->add_option("--c2", c2, "gain on z_t(1,t)");
  int cells = 64;
  double t_final = 40.0, sample_every = 1.0;
  std::string ic_name = "smooth", trace_out, state_out;
  sim->add_option("--K", cells, "cells per unit length")->capture_default_str();
  sim->add_option("--T", t_final, "final time")->capture_default_str();
  sim->add_option("--sample", sample_every, "energy sampling interval")->capture_default_str();
  sim->add_option("--ic", ic_name, "initial condition")->capture_default_str()->check(CLI::IsMember(ic_names()));
  sim->add_option("--trace-out", trace_out, "write the energy trace as CSV");
  sim->add_option("--state-out", state_out, "write the final state as JSON");

  auto* critical = app.add_subcommand("critical", "critical gains of z^{2n} + 2c z^m + 1 (CSV)");
  int m = 0, n = 0;
  critical->add_option("--m", m)->required();
  critical->add_option("--n", n)->required();

  auto* cls = app.add_subcommand("classify", "stability verdict for one system (JSON)");
  add_tau(cls, tau_args);
  cls->add_option("--kind", kind, "cascade | direct")->check(CLI::IsMember({"cascade", "direct"}));
  cls->add_option("--c1", c1, "gain on w(1,t)");
  cls->add_option("--c2", c2, "gain on z_t(1,t) (k for direct)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*region) {
      const ResolvedTau tau = resolve_tau(tau_args);
      const Scan sc = parse_scan(scan_text);
      json j{{"schema", 1}, {"command", "region"}, {"kind", kind}, {"tau", tau.label()}, {"tau_value", num(tau.value)}};
      j["scan"] = {{"lo", num(sc.lo)}, {"hi", num(sc.hi)}, {"step", num(sc.step)}};
      json intervals = json::array();
      if (tau.rational) {
        const RegionSpec cf = stability_region(tau.value, region_kind(kind));
        j["route"] = "polynomial";
        j["closed_form"] = cf.empty ? json{{"empty", true}}
                                    : json{{"empty", false}, {"lower", num(cf.lower)}, {"upper", num(cf.upper)}};
        for (const auto& r : scan_region(region_kind(kind), *tau.rational, sc.lo, sc.hi, sc.step)) {
          intervals.push_back({{"lower", num(r.lower)}, {"upper", num(r.upper)}});
        }
      } else {
        // a1 = -1 makes the two-delay test fail for every gain.
        j["route"] = "two-delay";
        j["closed_form"] = {{"empty", true}};
      }
      j["bisected"] = intervals;
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (*roots) {
      const ResolvedTau tau = resolve_tau(tau_args);
      const DelaySystem sys = build_system(kind, c1, c2, tau);
      const ComplexRect r{rect[0], rect[1], rect[2], rect[3]};
      out << "re,im,residual,multiplicity\n";
      for (const auto& e : isolate_and_refine(sys, r).roots) {
        out << format_real(e.lambda.real()) << ',' << format_real(e.lambda.imag()) << ','
            << format_real(e.residual) << ',' << e.multiplicity << "\n";
      }
      return kOk;
    }

    if (*count) {
      const ResolvedTau tau = resolve_tau(tau_args);
      if (!disk && strip.empty()) throw Error(ErrorCode::InvalidArgument, "count needs --disk or --strip a b");
      if (disk) {
        if (!tau.rational) throw Error(ErrorCode::InvalidArgument, "--disk needs a rational delay");
        out << count_in_disk(reduce_to_polynomial(DelaySystem::equal_gains(c, *tau.rational))) << "\n";
      } else {
        const DelaySystem sys = DelaySystem::equal_gains(c, tau.value);
        out << count_in_strip(sys, strip[0], strip[1], re_max, re_min) << "\n";
      }
      return kOk;
    }

    if (*sweep_cmd) {
      const PerturbationCase tmpl{base, 0.0, c};
      out << "eps,lambda_eps,eps_lambda_eps,low_freq_clear,within_bounds,error\n";
      for (const auto& row : sweep(tmpl, eps_list)) {
        out << format_real(row.eps) << ',' << opt_cell(row.lambda_eps) << ',' << opt_cell(row.scaled) << ','
            << opt_cell(row.low_freq_clear) << ',' << opt_cell(row.within) << ',' << csv_quote(row.error) << "\n";
      }
      return kOk;
    }

    if (*sim) {
      if (tau_args.tau.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "simulation needs --tau M/N; pass a rational convergent of the delay instead of --tau-real");
      }
      SimConfig cfg;
      cfg.tau = Rational::parse(tau_args.tau);
      cfg.gains = {c1, c2};
      cfg.cells_per_unit = cells;
      cfg.t_final = t_final;
      cfg.sample_every = sample_every;
      cfg.ic = make_ic(ic_name);
      const SimResult res = simulate(cfg);

      std::optional<double> two_s;
      try {
        const double s = spectral_abscissa(DelaySystem::cascade(c1, c2, cfg.tau));
        if (std::isfinite(s)) two_s = 2.0 * s;
      } catch (const Error&) {
      }
      const double t0 = std::min(fit_window_start(two_s.value_or(0.0)), t_final);
      std::optional<double> rate;
      try {
        rate = decay_rate(res.trace, t0, t_final);
      } catch (const Error&) {
      }
      json j{{"schema", 1},          {"command", "simulate"}, {"tau", cfg.tau.str()}, {"c1", num(c1)},
             {"c2", num(c2)},        {"K", cells},            {"T", num(t_final)},    {"ic", ic_name},
             {"fit_window", {num(t0), num(t_final)}}};
      j["fitted_rate"] = num(rate);
      j["two_spectral_abscissa"] = num(two_s);
      j["relative_gap"] = rate && two_s && *two_s != 0.0 ? num(std::abs(*rate - *two_s) / std::abs(*two_s)) : json(nullptr);
      j["extinct"] = !rate.has_value() && res.trace.energy.back() == 0.0;
      j["initial_energy"] = num(res.trace.energy.front());
      j["final_energy"] = num(res.trace.energy.back());

      if (!trace_out.empty()) {
        std::ofstream f(trace_out);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + trace_out);
        f << "t,energy\n";
        for (std::size_t i = 0; i < res.trace.t.size(); ++i) {
          f << format_real(res.trace.t[i]) << ',' << format_real(res.trace.energy[i]) << "\n";
        }
      }
      if (!state_out.empty()) {
        std::ofstream f(state_out);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + state_out);
        auto arr = [](const std::vector<double>& v) {
          json a = json::array();
          for (double x : v) a.push_back(num(x));
          return a;
        };
        const SimState& s = res.final_state;
        json st{{"schema", 1}, {"tau", cfg.tau.str()}, {"K", cells},   {"t", num(s.t)},
                {"steps", s.steps}, {"p", arr(s.p)},     {"q", arr(s.q)}, {"w", arr(s.w)}};
        f << st.dump() << "\n";
      }
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (*critical) {
      out << "value\n";
      for (double v : critical_set_E(m, n).values) out << format_real(v) << "\n";
      return kOk;
    }

    if (*cls) {
      const ResolvedTau tau = resolve_tau(tau_args);
      const DelaySystem sys = build_system(kind, c1, c2, tau);
      ClassifyOptions opts;
      opts.treat_as_irrational = tau.irrational;
      const StabilityVerdict v = classify(sys, opts);
      json j{{"schema", 1}, {"command", "classify"}, {"kind", kind}, {"tau", tau.label()}, {"state", to_string(v.state)}};
      j["witness"] = v.witness ? json{{"re", num(v.witness->real())}, {"im", num(v.witness->imag())}} : json(nullptr);
      j["notes"] = v.notes;
      out << j.dump(2) << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? kUsage : kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace wavedelay::cli
