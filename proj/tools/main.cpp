// entfeat: entanglement features of GUE time evolution, as CSV or SVG.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entfeat/observables.hpp"
#include "entfeat/oracle.hpp"
#include "svg.hpp"
#include "table.hpp"

using namespace entfeat;
using namespace entfeat::tools;

namespace {

struct Options {
  std::string command;
  std::string figure;
  std::optional<int> N, d;
  int renyi = 2;
  std::optional<double> t_min, t_max;
  std::optional<int> t_steps;
  std::vector<double> t_log;
  std::optional<int> samples;
  std::uint64_t seed = 0;
  int threads = 0;
  int na = 1, nc = 1, nb = 1, nd = 1, overlap = 0;
  int m = 4;
  long long D = 6;
  std::optional<std::string> mode;
  std::optional<std::string> model;
  bool late = false;
  bool mc = false;
  int points = 200;
  std::string out;
  std::string format = "csv";
  std::string argv;
};

struct Output {
  Table table;
  Metadata meta;
  PlotSpec plot;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

int get_N(const Options& o, int def) { return o.N.value_or(def); }
int get_d(const Options& o, int def) { return o.d.value_or(def); }

std::vector<double> time_grid(const Options& o, double lo, double hi, int steps, bool log) {
  if (!o.t_log.empty()) {
    lo = o.t_log[0];
    hi = o.t_log[1];
    log = true;
  } else if (o.t_min || o.t_max) {
    lo = o.t_min.value_or(lo);
    hi = o.t_max.value_or(hi);
    log = false;
  }
  steps = o.t_steps.value_or(steps);
  if (steps < 1) throw UsageError("--t-steps must be >= 1");
  if (hi < lo) throw UsageError("time range is reversed");
  if (log && !(lo > 0)) throw UsageError("a log time grid needs positive bounds");
  std::vector<double> ts;
  for (int i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    ts.push_back(log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
  }
  return ts;
}

Mode analytic_mode(const Options& o, Mode def) {
  if (!o.mode) return def;
  try {
    return parse_mode(*o.mode);
  } catch (const std::invalid_argument&) {
    throw UsageError("--mode must be exact or leading for " + o.command);
  }
}

SffModel sff_model(const Options& o, SffModel def) {
  if (!o.model) return def;
  try {
    return parse_sff_model(*o.model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string cycle_type_text(const CycleType& c) {
  std::string s;
  for (std::size_t i = 0; i < c.parts.size(); ++i) s += (i ? "+" : "") + std::to_string(c.parts[i]);
  return s;
}

std::string rational_text(const BigInt& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void base_meta(Output& out, const Options& o) {
  out.meta["command"] = o.command;
  out.meta["argv"] = o.argv;
  out.meta["seed"] = std::to_string(o.seed);
  out.meta["version"] = ENTFEAT_VERSION;
}

// Analytic commands -----------------------------------------------------------

Output cmd_weingarten(const Options& o) {
  if (o.m < 1 || o.m > 6) throw UsageError("--m must lie in 1..6");
  if (o.D < o.m) throw UsageError("--D must be >= m");
  const auto t = gram_invert(o.m, BigInt(o.D));
  Output out{Table({"cycle_type", "numerator", "denominator", "value"}), {}, {}};
  for (const auto& c : partitions(o.m)) {
    const Rational& v = t(c);
    out.table.add({cycle_type_text(c), rational_text(numerator(v)), rational_text(denominator(v)),
                   real(static_cast<double>(to_ld(v)))});
  }
  out.meta["m"] = std::to_string(o.m);
  out.meta["D"] = std::to_string(o.D);
  return out;
}

Output cmd_ktable(const Options&) {
  Output out{Table({"h", "K_pp", "K_pm", "K_mp", "K_mm", "c0", "c_s", "c_t", "c_st"}), {}, {}};
  for (const auto& h : all_permutations(4)) {
    std::string img;
    for (int i = 0; i < 4; ++i) img += std::to_string(h(i));
    const auto k = k_pattern(h);
    const auto c = k_affine(k);
    std::vector<std::string> row{img};
    for (int v : k) row.push_back(integer(v));
    for (double v : c) row.push_back(real(v));
    out.table.add(row);
  }
  return out;
}

Output cmd_sff(const Options& o) {
  const SffModel model = sff_model(o, SffModel::closed_form);
  const double D = static_cast<double>(o.D);
  std::vector<std::string> header{"t"};
  for (auto l : kSffLabels) header.push_back(name(l));
  std::vector<Permutation> reps;
  if (o.mc) {
    for (auto l : kSffLabels) {
      header.push_back(std::string(name(l)) + "_mc");
      header.push_back(std::string(name(l)) + "_se");
      for (const auto& g : all_permutations(4))
        if (sff_label_of(g) == l) {
          reps.push_back(g);
          break;
        }
    }
  }
  Output out{Table(header), {}, {}};
  for (double t : time_grid(o, 0.0, 10.0, 101, false)) {
    const auto v = sff_values(model, t, D);
    std::vector<std::string> row{real(t)};
    for (auto l : kSffLabels) row.push_back(real(v[l]));
    for (const auto& g : reps) {
      const auto e = mc_estimate_rg(g, t, static_cast<int>(o.D), o.samples.value_or(200), o.seed, o.threads);
      row.push_back(real(e.value));
      row.push_back(real(e.standard_error));
    }
    out.table.add(row);
  }
  out.meta["D"] = std::to_string(o.D);
  out.meta["model"] = name(model);
  out.plot = {"spectral form factors", "t", {}, "", false, false, false};
  for (auto l : kSffLabels) out.plot.ys.push_back(name(l));
  return out;
}

Output cmd_feature(const Options& o) {
  const EnsembleParams p(get_N(o, 8), get_d(o, 2));
  const RegionSpec r(o.na, o.nc, o.overlap, p);
  const auto sig = mutual_information_signature(r);
  const std::string mode = o.mode.value_or("exact");
  const SffModel model = sff_model(o, SffModel::closed_form);
  if (mode != "exact" && mode != "leading" && mode != "late" && mode != "haar")
    throw UsageError("--mode must be exact, leading, late or haar");
  const auto fc = coefficients(sig, p);
  Output out{Table({"t", "W", "S2"}), {}, {}};
  for (double t : time_grid(o, 0.0, 10.0, 101, false)) {
    double W = 0;
    if (mode == "exact") W = w2_exact(fc, sff_values(model, t, p.D_real()));
    else if (mode == "leading") W = w2_leading(sig, p, sff_values(model, t, p.D_real()));
    else if (mode == "late") W = w2_late(sig, p);
    else W = w2_haar(sig, p);
    out.table.add({real(t), real(W), real(entropy_from_feature(W, 2, p))});
  }
  out.meta["mode"] = mode;
  out.meta["model"] = name(model);
  out.plot = {"entanglement feature", "t", {"S2"}, "", false, false, false};
  return out;
}

Output cmd_mi(const Options& o) {
  const EnsembleParams p(get_N(o, 8), get_d(o, 2));
  const RegionSpec r(o.na, o.nc, o.overlap, p);
  const std::string mode = o.mode.value_or("exact");
  const SffModel model = sff_model(o, SffModel::closed_form);
  Output out{Table({"t", "I"}), {}, {}};
  const auto ts = time_grid(o, 0.0, 10.0, 101, false);
  if (mode == "late") {
    for (double t : ts) out.table.add({real(t), real(mutual_information_late(r))});
  } else {
    const Mode m = analytic_mode(o, Mode::exact);
    for (double t : ts) out.table.add({real(t), real(mutual_information(r, t, m, model))});
  }
  if (o.overlap > 0) out.meta["dip_time"] = real(dip_time(r));
  out.meta["mode"] = mode;
  out.meta["model"] = name(model);
  out.plot = {"mutual information", "t", {"I"}, "", false, !o.t_log.empty(), false};
  return out;
}

Output cmd_hp(const Options& o) {
  const EnsembleParams p(get_N(o, 100), get_d(o, 2));
  const std::string mode = o.mode.value_or("leading");
  if (mode != "leading" && mode != "late") throw UsageError("--mode must be leading or late for hp");
  Output out{Table({"t", "Delta", "F"}), {}, {}};
  for (double t : time_grid(o, 0.1, 100.0, 200, true)) {
    const auto m = mode == "late" ? hp_late(o.na, o.nd, p.d) : hp_metrics(o.na, o.nd, p, t);
    out.table.add({real(t), real(m.Delta), real(m.F)});
  }
  out.meta["mode"] = mode;
  out.plot = {"decoding", "t", {"Delta", "F"}, "", false, true, false};
  return out;
}

Output cmd_otoc(const Options& o) {
  const EnsembleParams p(get_N(o, 200), get_d(o, 2));
  const OtocSpec s(o.na, o.nb, o.overlap, p);
  const Mode mode = analytic_mode(o, Mode::leading);
  const SffModel model = sff_model(o, SffModel::large_d);
  const auto a = otoc_asymptotics(s);
  Output out{Table({"t", "otoc", "envelope"}), {}, {}};
  std::optional<FeatureCoefficients> fc;
  if (mode == Mode::exact) fc = coefficients(otoc_signature(s), p);
  for (double t : time_grid(o, 0.1, 1e7, 400, true)) {
    const double v = fc ? otoc(*fc, s, t, model) : otoc(s, t, mode, model);
    out.table.add({real(t), real(v), real(otoc_envelope(a, t))});
  }
  out.meta["kappa"] = real(a.kappa);
  out.meta["otoc_inf"] = real(a.otoc_inf);
  out.meta["alpha"] = real(a.alpha);
  out.meta["beta"] = real(a.beta);
  out.meta["t_d"] = real(a.t_d);
  out.meta["model"] = name(model);
  out.plot = {"operator-averaged OTOC", "t", {"otoc", "envelope"}, "", false, true, true};
  return out;
}

Output cmd_quench(const Options& o) {
  const EnsembleParams p(get_N(o, 20), get_d(o, 2));
  const QuenchSpec q(o.na, p);
  const Mode mode = analytic_mode(o, Mode::leading);
  const SffModel model = sff_model(o, SffModel::large_d);
  Output out{Table({"t", "S2"}), {}, {}};
  for (double t : time_grid(o, 0.0, 5.0, 101, false)) out.table.add({real(t), real(quench_entropy(q, t, mode, model))});
  out.meta["model"] = name(model);
  out.plot = {"quench entropy", "t", {"S2"}, "", false, false, false};
  return out;
}

Output cmd_crossover(const Options& o) {
  const EnsembleParams p(get_N(o, 20), get_d(o, 2));
  const SffModel model = sff_model(o, SffModel::closed_form);
  Output out{Table({"N", "d", "t_c"}), {}, {}};
  out.table.add({integer(p.N), integer(p.d), real(crossover_time(p, model))});
  out.meta["model"] = name(model);
  return out;
}

Output cmd_bounds(const Options& o) {
  const auto c = bound_curves(o.renyi, o.points);
  Output out{Table({"edge", "t", "W_AC", "W_AD", "S_AC", "S_AD"}), {}, {}};
  auto add = [&](const char* edge, const std::vector<BoundPoint>& pts) {
    for (const auto& b : pts) out.table.add({edge, real(b.t), real(b.W_AC), real(b.W_AD), real(b.S_AC), real(b.S_AD)});
  };
  add("lower", c.lower);
  add("upper", c.upper);
  out.meta["renyi"] = std::to_string(o.renyi);
  out.plot = {"bound curves (dits)", "S_AC", {"S_AD"}, "edge", false, false, false};
  return out;
}

// Monte Carlo commands ----------------------------------------------------------

ScanResult two_qudit_scan(const Options& o, int d, std::vector<double> times, bool late, int samples, int n) {
  ScanConfig cfg;
  cfg.N = 2;
  cfg.d = d;
  cfg.times = std::move(times);
  cfg.late_time = late;
  cfg.samples = samples;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return ensemble_scan(cfg, {"S_AC", "S_AD"}, [&](const MatrixXcd& U) {
    const auto e = two_qudit_entropies(U, d, n);
    return std::vector<double>{e.S_AC, e.S_AD};
  });
}

Output cmd_scatter(const Options& o) {
  const int d = get_d(o, 2);
  const int samples = o.samples.value_or(1000);
  const auto r = two_qudit_scan(o, d, o.late ? std::vector<double>{} : time_grid(o, 1.0, 1.0, 1, false), o.late,
                                samples, o.renyi);
  Output out{Table({"t", "sample", "S_AC", "S_AD"}), {}, {}};
  for (std::size_t ti = 0; ti < r.times.size(); ++ti)
    for (int i = 0; i < samples; ++i)
      out.table.add({real(r.times[ti]), integer(i), real(r.values[ti][0][i]), real(r.values[ti][1][i])});
  out.meta["d"] = std::to_string(d);
  out.meta["renyi"] = std::to_string(o.renyi);
  out.meta["samples"] = std::to_string(samples);
  out.plot = {"two-qudit entropies (dits)", "S_AC", {"S_AD"}, "t", true, false, false};
  return out;
}

// Figures ---------------------------------------------------------------------------

Output fig2(const Options& o) {
  const EnsembleParams p(get_N(o, 20), get_d(o, 2));
  const SffModel model = sff_model(o, SffModel::closed_form);
  Output out{Table({"t", "F_early", "F_late"}), {}, {}};
  for (double t : time_grid(o, 0.05, 5.0, 100, true)) {
    const auto b = bulk_weights(p, t, model);
    out.table.add({real(t), real(b.early), real(b.late)});
  }
  out.meta["crossover_time"] = real(crossover_time(p, model));
  out.meta["model"] = name(model);
  out.plot = {"bulk-averaged weights", "t", {"F_early", "F_late"}, "", false, true, false};
  return out;
}

Output fig3(const Options& o) {
  const EnsembleParams p(get_N(o, 200), get_d(o, 2));
  const Mode mode = analytic_mode(o, Mode::leading);
  const SffModel model = sff_model(o, SffModel::large_d);
  Output out{Table({"N_A", "t", "otoc", "envelope"}), {}, {}};
  const auto ts = time_grid(o, 0.1, 1e7, 400, true);
  for (int na : {1, 2, 5, 10, 20}) {
    const OtocSpec s(na, na, 0, p);
    const auto a = otoc_asymptotics(s);
    for (double t : ts) out.table.add({integer(na), real(t), real(otoc(s, t, mode, model)), real(otoc_envelope(a, t))});
  }
  out.meta["model"] = name(model);
  out.plot = {"OTOC, disjoint supports", "t", {"otoc"}, "N_A", false, true, true};
  return out;
}

Output fig4(const Options& o) {
  const int N = get_N(o, 8), d = get_d(o, 2);
  const EnsembleParams p(N, d);
  const int samples = o.samples.value_or(200);
  std::vector<std::pair<int, int>> pairs;
  for (int na = 1; na < N; ++na)
    for (int nc = 1; na + nc <= N; ++nc) pairs.emplace_back(na, nc);
  std::vector<std::string> names;
  for (const auto& [na, nc] : pairs) names.push_back(std::to_string(na) + ":" + std::to_string(nc));
  ScanConfig cfg;
  cfg.N = N;
  cfg.d = d;
  cfg.late_time = true;
  cfg.samples = samples;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto r = ensemble_scan(cfg, names, [&](const MatrixXcd& U) {
    const auto c = ChoiState::from_unitary(U, N, d);
    std::vector<double> q;
    for (const auto& [na, nc] : pairs) {
      std::vector<int> in, outs;
      for (int i = 0; i < na; ++i) in.push_back(i);
      for (int i = N - nc; i < N; ++i) outs.push_back(i);
      q.push_back(std::pow(static_cast<double>(d), na + nc) * renyi2_purity(c, RegionMask::from_sites(N, in, outs)));
    }
    return q;
  });
  Output out{Table({"N_A", "N_C", "I_formula", "I_large_d", "I_complementary", "I_mc", "I_mc_se"}), {}, {}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [na, nc] = pairs[k];
    const RegionSpec reg(na, nc, 0, p);
    const auto e = log_of_mean(r.stats(0, k, o.seed));
    out.table.add({integer(na), integer(nc), real(mutual_information_late(reg)), real(mutual_information_late_large_d(reg)),
                   na + nc == N ? real(mutual_information_late_complementary(na, d)) : "", real(e.value),
                   real(e.standard_error)});
  }
  out.meta["samples"] = std::to_string(samples);
  out.meta["regions"] = "A = first N_A inputs, C = last N_C outputs";
  out.plot = {"late-time mutual information", "N_A", {"I_formula", "I_mc"}, "N_C", false, false, false};
  return out;
}

Output fig5(const Options& o) {
  const EnsembleParams p(get_N(o, 100), get_d(o, 2));
  const int nd = o.nd > 1 ? o.nd : 40;
  Output out{Table({"N_A", "t", "Delta", "F"}), {}, {}};
  const auto ts = time_grid(o, 0.1, 1e3, 200, true);
  for (int na : {1, 10})
    for (double t : ts) {
      const auto m = hp_metrics(na, nd, p, t);
      out.table.add({integer(na), real(t), real(m.Delta), real(m.F)});
    }
  out.meta["N_D"] = std::to_string(nd);
  out.plot = {"decoding success and fidelity", "t", {"Delta", "F"}, "N_A", false, true, false};
  return out;
}

Output fig6(const Options& o) {
  const int samples = o.samples.value_or(10000);
  const auto r = two_qudit_scan(o, 2, {}, true, samples, o.renyi);
  const auto c = bound_curves(o.renyi, std::max(samples, 2));
  Output out{Table({"sample", "S_AC", "S_AD", "lower_S_AC", "lower_S_AD", "upper_S_AC", "upper_S_AD"}), {}, {}};
  int outside = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = r.values[0][0][i], y = r.values[0][1][i];
    if (!within_bounds(o.renyi, x, y, 1e-9)) ++outside;
    out.table.add({integer(i), real(x), real(y), real(c.lower[i].S_AC), real(c.lower[i].S_AD), real(c.upper[i].S_AC),
                   real(c.upper[i].S_AD)});
  }
  out.meta["renyi"] = std::to_string(o.renyi);
  out.meta["samples"] = std::to_string(samples);
  out.meta["outside_bounds"] = std::to_string(outside);
  out.plot = {"two-qubit late-time entropies (dits)", "S_AC", {"S_AD"}, "", true, false, false};
  return out;
}

Output fig7(const Options& o) {
  const int samples = o.samples.value_or(1000);
  Output out{Table({"d", "t", "sample", "S_AC", "S_AD"}), {}, {}};
  for (int d : {3, 8}) {
    for (bool late : {false, true}) {
      const auto r = two_qudit_scan(o, d, late ? std::vector<double>{} : std::vector<double>{0.0, 0.8}, late, samples,
                                    o.renyi);
      for (std::size_t ti = 0; ti < r.times.size(); ++ti)
        for (int i = 0; i < samples; ++i)
          out.table.add({integer(d), real(r.times[ti]), integer(i), real(r.values[ti][0][i]), real(r.values[ti][1][i])});
    }
  }
  out.meta["renyi"] = std::to_string(o.renyi);
  out.meta["samples"] = std::to_string(samples);
  out.plot = {"two-qudit ensembles (dits)", "S_AC", {"S_AD"}, "t", true, false, false};
  return out;
}

Output fig8(const Options& o) {
  const EnsembleParams p(get_N(o, 20), get_d(o, 2));
  const Mode mode = analytic_mode(o, Mode::leading);
  const SffModel model = sff_model(o, SffModel::large_d);
  Output out{Table({"N_A", "t", "S2"}), {}, {}};
  const auto ts = time_grid(o, 0.0, 5.0, 101, false);
  for (int na = 1; na <= p.N / 2; ++na) {
    const QuenchSpec q(na, p);
    for (double t : ts) out.table.add({integer(na), real(t), real(quench_entropy(q, t, mode, model))});
  }
  out.meta["model"] = name(model);
  out.plot = {"entanglement growth after a quench", "t", {"S2"}, "N_A", false, false, false};
  return out;
}

Output fig9(const Options& o) {
  const int samples = o.samples.value_or(1000);
  const SffModel model = sff_model(o, SffModel::exact_gue);
  const auto ts = time_grid(o, 0.1, 100.0, 25, true);
  Output out{Table({"d", "t", "S_AC_theory", "S_AD_theory", "S_AC_mc", "S_AC_se", "S_AD_mc", "S_AD_se", "S_AC_late",
                    "S_AD_late", "S_AC_haar", "S_AD_haar"}),
             {},
             {}};
  const BipartitionSignature ac(1, 0, 0, 1), ad(0, 1, 1, 0);
  for (int d : {2, 4}) {
    const EnsembleParams p(2, d);
    const double lnd = std::log(static_cast<double>(d));
    auto dits = [&](double W) { return entropy_from_feature(W, 2, p) / lnd; };
    ScanConfig cfg;
    cfg.N = 2;
    cfg.d = d;
    cfg.times = ts;
    cfg.samples = samples;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const auto r = ensemble_scan(cfg, {"W_AC", "W_AD"}, [&](const MatrixXcd& U) {
      return std::vector<double>{w_feature_direct(U, d, {-1, 1}, {-1, 1}), w_feature_direct(U, d, {-1, 1}, {1, -1})};
    });
    const auto fac = coefficients(ac, p), fad = coefficients(ad, p);
    const double D2 = p.D_real() * p.D_real();
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      const auto v = sff_values(model, ts[ti], p.D_real());
      std::vector<std::string> row{integer(d), real(ts[ti]), real(dits(w2_exact(fac, v))), real(dits(w2_exact(fad, v)))};
      for (int q = 0; q < 2; ++q) {
        auto st = r.stats(ti, q, o.seed);
        st.mean /= D2;
        st.standard_error /= D2;
        const auto e = log_of_mean(st);
        row.push_back(real(-e.value / lnd));
        row.push_back(real(e.standard_error / lnd));
      }
      row.push_back(real(dits(w2_late(ac, p))));
      row.push_back(real(dits(w2_late(ad, p))));
      row.push_back(real(dits(w2_haar(ac, p))));
      row.push_back(real(dits(w2_haar(ad, p))));
      out.table.add(row);
    }
  }
  out.meta["model"] = name(model);
  out.meta["samples"] = std::to_string(samples);
  out.meta["estimator"] = "S = -ln(mean W / D^2), in dits";
  out.plot = {"ensemble-averaged Renyi-2 entropies (dits)", "t", {"S_AC_theory", "S_AD_theory", "S_AC_mc", "S_AD_mc"},
              "d", false, true, false};
  return out;
}

Output cmd_figure(const Options& o) {
  if (o.figure == "fig2") return fig2(o);
  if (o.figure == "fig3") return fig3(o);
  if (o.figure == "fig4") return fig4(o);
  if (o.figure == "fig5") return fig5(o);
  if (o.figure == "fig6") return fig6(o);
  if (o.figure == "fig7") return fig7(o);
  if (o.figure == "fig8") return fig8(o);
  if (o.figure == "fig9") return fig9(o);
  throw UsageError("unknown figure: " + o.figure);
}

Output dispatch(const Options& o) {
  if (o.command == "weingarten") return cmd_weingarten(o);
  if (o.command == "ktable") return cmd_ktable(o);
  if (o.command == "sff") return cmd_sff(o);
  if (o.command == "feature") return cmd_feature(o);
  if (o.command == "mi") return cmd_mi(o);
  if (o.command == "hp") return cmd_hp(o);
  if (o.command == "otoc") return cmd_otoc(o);
  if (o.command == "quench") return cmd_quench(o);
  if (o.command == "crossover") return cmd_crossover(o);
  if (o.command == "bounds") return cmd_bounds(o);
  if (o.command == "scatter") return cmd_scatter(o);
  if (o.command == "figure") return cmd_figure(o);
  throw UsageError("no command given");
}

void emit(Output& out, const Options& o) {
  base_meta(out, o);
  if (o.format == "svg") {
    if (o.out.empty()) throw UsageError("--format svg needs --out");
    if (out.plot.x.empty()) throw UsageError(o.command + " has no plot");
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    f << render_svg(out.table, out.plot);
  } else if (o.out.empty()) {
    out.table.write_csv(std::cout);
  } else {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    out.table.write_csv(f);
  }
  if (!o.out.empty()) {
    std::ofstream m(o.out + ".meta");
    for (const auto& [k, v] : out.meta) m << k << "=" << v << "\n";
  }
}

void add_common(CLI::App* s, Options& o) {
  s->add_option("--N", o.N, "number of qudits")->check(CLI::PositiveNumber);
  s->add_option("--d", o.d, "local dimension")->check(CLI::Range(2, 64));
  s->add_option("--out", o.out, "output path (stdout when omitted)");
  s->add_option("--format", o.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
  s->add_option("--seed", o.seed, "Monte Carlo seed");
  s->add_option("--threads", o.threads, "worker threads (default from ENTFEAT_THREADS)")->check(CLI::NonNegativeNumber);
  s->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::Range(2, 100000000));
  s->add_option("--mode", o.mode, "exact, leading, late or haar");
  s->add_option("--model", o.model, "SFF model: closed_form, large_d, late_time, exact_gue");
  s->add_option("--renyi", o.renyi, "Renyi index for two-qudit entropies")->check(CLI::Range(2, 64));
  s->add_option("--t-min", o.t_min, "first time of a linear grid");
  s->add_option("--t-max", o.t_max, "last time of a linear grid");
  s->add_option("--t-steps", o.t_steps, "number of grid points")->check(CLI::PositiveNumber);
  s->add_option("--t-log", o.t_log, "log grid bounds")->expected(2);
}

void add_regions(CLI::App* s, Options& o) {
  s->add_option("--na", o.na, "|A|")->check(CLI::NonNegativeNumber);
  s->add_option("--nc", o.nc, "|C|")->check(CLI::NonNegativeNumber);
  s->add_option("--nb", o.nb, "|B|")->check(CLI::NonNegativeNumber);
  s->add_option("--nd", o.nd, "|D|")->check(CLI::NonNegativeNumber);
  s->add_option("--overlap", o.overlap, "overlap of the two regions")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 0; i < argc; ++i) o.argv += (i ? " " : "") + std::string(argv[i]);
  CLI::App app{"Entanglement features of random Hamiltonian dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ENTFEAT_VERSION);

  struct Sub {
    const char* name;
    const char* help;
    bool regions;
  };
  const Sub subs[] = {
      {"weingarten", "exact Weingarten values for S_m at dimension D", false},
      {"ktable", "K_h energy patterns over S_4", false},
      {"sff", "spectral form factors on a time grid", false},
      {"feature", "W^(2) for the region pair A (inputs), C (outputs)", true},
      {"mi", "mutual information I(A:C)", true},
      {"hp", "Hayden-Preskill decoding metrics", true},
      {"otoc", "operator-averaged OTOC", true},
      {"quench", "entropy after a product-state quench", true},
      {"crossover", "early/late crossover time", false},
      {"bounds", "two-qubit entropy bound curves", false},
      {"scatter", "two-qudit Monte Carlo entropy scatter", false},
      {"figure", "reproduce a figure as CSV", true},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, o);
    if (s.regions) add_regions(sub, o);
    sub->callback([&o, sub] { o.command = sub->get_name(); });
  }
  auto* w = app.get_subcommand("weingarten");
  w->add_option("--m", o.m, "degree")->check(CLI::Range(1, 6));
  w->add_option("--D", o.D, "dimension")->check(CLI::PositiveNumber);
  auto* sf = app.get_subcommand("sff");
  sf->add_option("--D", o.D, "Hilbert-space dimension")->check(CLI::PositiveNumber);
  sf->add_flag("--mc", o.mc, "add Monte Carlo estimates");
  app.get_subcommand("scatter")->add_flag("--late", o.late, "late-time ensemble instead of a time grid");
  app.get_subcommand("bounds")->add_option("--points", o.points, "points per edge")->check(CLI::Range(2, 1000000));
  app.get_subcommand("figure")
      ->add_option("name", o.figure, "fig2 .. fig9")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    Output out = dispatch(o);
    emit(out, o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "entfeat: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedConfiguration& e) {
    std::cerr << "entfeat: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "entfeat: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
