#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "biphoton/analysis.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/spectra.hpp"
#include "biphoton/temporal.hpp"
#include "biphoton/units.hpp"
#include "detail/parallel.hpp"
#include "emit.hpp"

namespace cli {

using namespace biphoton;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kNs = units::kNsPerInverseGamma;

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu", i);
  return stem + buf + ext;
}

ordered_json params_json(const MediumParams& q) {
  return {{"omega_c", q.omega_c}, {"omega_p", q.omega_p},   {"delta_p", q.delta_p},
          {"gamma", q.gamma},     {"gamma_doppler", q.gamma_doppler},
          {"alpha_s", q.alpha_s}, {"alpha_as", q.alpha_as}};
}

ordered_json summary_json(const LorentzianSummary& s) {
  return {{"R", s.R},
          {"A", s.A},
          {"gamma_L", s.gamma_L},
          {"gamma_EIT", s.gamma_EIT},
          {"baseline", s.baseline},
          {"peak", s.peak},
          {"alpha_s_prime", s.alpha_s_prime},
          {"warnings", s.warnings}};
}

ordered_json validity_json(const ValidityMetrics& m) {
  return {{"x", m.x},
          {"premise_ratio", m.premise_ratio},
          {"fwm_peak_separation", m.fwm_peak_separation},
          {"premise_ok", m.premise_ok},
          {"analytic_width_trusted", m.analytic_width_trusted},
          {"fwm_lorentzian_valid", m.fwm_lorentzian_valid}};
}

ordered_json grid_json(const DetuningGrid& g) {
  return {{"span", g.span()}, {"points", g.size()}, {"spacing", g.spacing()}};
}

DetuningGrid grid_or(const RunConfig& rc, DetuningGrid fallback) {
  if (!rc.grid_span) return fallback;
  return DetuningGrid::symmetric(*rc.grid_span, *rc.grid_points);
}

std::vector<double> axis_or(const Config& cfg, const std::string& key, std::vector<double> fallback) {
  if (!cfg.has(key)) return fallback;
  return cfg.list(key);
}

std::vector<double> odd_steps(double from, double to, double step) {
  std::vector<double> v;
  for (double x = from; x <= to + 1e-12; x += step) v.push_back(x);
  return v;
}

}  // namespace

void cmd_spectrum(const RunConfig& rc, const fs::path& out) {
  const std::string kind = rc.raw.word("spectrum", "eit");
  if (kind != "eit" && kind != "fwm" && kind != "biphoton") {
    throw ConfigError(rc.raw.where("spectrum") + "expected eit, fwm or biphoton");
  }
  const bool compare = rc.raw.flag("compare", true);

  struct Curve {
    DetuningGrid grid;
    std::vector<double> exact, analytic;
    ordered_json meta;
  };
  std::vector<Curve> curves(rc.sweep.size());
  detail::parallel_for(curves.size(), [&](std::size_t i) {
    const auto& q = rc.sweep[i];
    auto& c = curves[i];
    c.grid = grid_or(rc, default_spectrum_grid(q));
    const auto quarter = eit_lorentzian_summary(q, PathlengthMode::BiphotonQuarter);
    ordered_json widths;
    std::string form;
    if (kind == "eit") {
      c.exact = eit_exact(q, c.grid, rc.pathlength).values;
      const auto an = eit_analytic(q, c.grid, rc.pathlength);
      c.analytic = an.lorentzian_form.values;
      form = "baseline (1 + (exp(alpha_s' R A) - 1) / (1 + 4 delta^2 / Gamma_EIT^2))";
      widths = {{"numeric_fwhm", numeric_eit_fwhm(q, rc.pathlength)},
                {"analytic_fwhm", an.summary.gamma_EIT}};
    } else {
      const auto fa = fwm_analytic(q, c.grid);
      if (kind == "fwm") {
        c.exact = fwm_exact(q, c.grid, rc.pump).values;
        c.analytic = fa.spectrum.values;
        form = "complex-Lorentzian FWM profile with constant pump ratio";
        widths = {{"numeric_fwhm", numeric_fwm_fwhm(q, rc.pump)}, {"analytic_fwhm", fa.gamma_FWM},
                  {"B", fa.B}, {"lorentzian_valid", fa.lorentzian_valid}};
      } else {
        c.exact = power_spectrum(biphoton_spectrum(q, c.grid, rc.sinc, rc.pump)).values;
        const auto eit = eit_analytic(q, c.grid, PathlengthMode::BiphotonQuarter).lorentzian_form;
        c.analytic.resize(c.grid.size());
        for (std::size_t k = 0; k < c.analytic.size(); ++k) {
          c.analytic[k] = fa.spectrum.values[k] * eit.values[k];
        }
        form = "product of the Lorentzian FWM and biphoton EIT profiles";
        widths = {{"numeric_fwhm", numeric_biphoton_fwhm(q, rc.sinc, rc.pump)},
                  {"analytic_fwhm", quarter.gamma_EIT}};
      }
    }
    c.meta = {{"kind", kind},
              {"sweep_index", i},
              {"params", params_json(q)},
              {"grid", grid_json(c.grid)},
              {"analytic_form", form},
              {"widths", widths},
              {"summary", summary_json(kind == "eit" ? eit_lorentzian_summary(q, rc.pathlength) : quarter)},
              {"validity_metrics", validity_json(validity_metrics(q))}};
  });

  ensure_directory(out);
  const auto config = rc.resolved();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    auto& c = curves[i];
    std::vector<std::string> header{"delta_gamma_units", "value"};
    std::vector<std::vector<double>> cols{c.grid.points(), c.exact};
    if (compare) {
      header.insert(header.end(), {"exact", "analytic"});
      cols.push_back(c.exact);
      cols.push_back(c.analytic);
    }
    write_csv(out / indexed("spectrum", i, ".csv"), header, cols);
    ordered_json j{{"config", config}, {"file", indexed("spectrum", i, ".csv")}, {"columns", header}};
    j.update(c.meta);
    write_json(out / indexed("spectrum", i, ".json"), j);
  }
}

void cmd_wavepacket(const RunConfig& rc, const fs::path& out) {
  const auto& cfg = rc.raw;
  const double window = cfg.number("baseline_window", 0.2);
  if (!(window > 0.0 && window < 1.0)) throw ConfigError(cfg.where("baseline_window") + "must be in (0, 1)");
  if (cfg.has("time_bin") && !(*cfg.number("time_bin") > 0.0)) {
    throw ConfigError(cfg.where("time_bin") + "must be > 0");
  }

  struct Packet {
    std::vector<double> tau_ns, numeric, analytic;
    ordered_json meta;
  };
  std::vector<Packet> packets(rc.sweep.size());
  detail::parallel_for(packets.size(), [&](std::size_t i) {
    const auto& q = rc.sweep[i];
    auto& pk = packets[i];
    const auto grid = grid_or(rc, default_wavepacket_grid(q));
    const auto w = wavepacket_numeric(q, grid, rc.filter, rc.sinc, rc.pump);
    const auto fit = fit_exp_decay(w, window);
    const double gamma_bi = wavepacket_analytic(q, {0.0}).gamma_BI;

    const double dt_ns = w.discretization.time_step * kNs;
    const double t_first = w.times.front() * kNs;
    const double t_last = w.times.back() * kNs;
    const double tau_max = cfg.number("tau_max", 6.0 / gamma_bi * kNs);
    const double tau_min = cfg.number("tau_min", -0.1 * tau_max);
    if (!(tau_max > tau_min)) throw ConfigError(cfg.where("tau_max") + "must exceed tau_min");
    if (tau_min < t_first || tau_max > t_last) {
      throw ConfigError(cfg.where(tau_max > t_last ? "tau_max" : "tau_min") +
                        "outside the transform window [" + format_number(t_first) + ", " +
                        format_number(t_last) + "] ns");
    }
    if (cfg.has("time_bin")) {
      const double bin = *cfg.number("time_bin");
      const double k0 = std::ceil(tau_min / bin), k1 = std::floor(tau_max / bin);
      if (k1 - k0 > 1e7) throw ConfigError(cfg.where("time_bin") + "too many bins");
      for (double k = k0; k <= k1; k += 1.0) pk.tau_ns.push_back(k * bin);
      // linear interpolation of the uniformly sampled transform
      for (double t : pk.tau_ns) {
        const double u = (t - t_first) / dt_ns;
        const auto j = std::min(static_cast<std::size_t>(u), w.values.size() - 2);
        const double f = u - static_cast<double>(j);
        pk.numeric.push_back((1.0 - f) * w.values[j] + f * w.values[j + 1]);
      }
    } else {
      for (std::size_t j = 0; j < w.times.size(); ++j) {
        const double t = w.times[j] * kNs;
        if (t < tau_min || t > tau_max) continue;
        pk.tau_ns.push_back(t);
        pk.numeric.push_back(w.values[j]);
      }
    }
    std::vector<double> tg(pk.tau_ns.size());
    for (std::size_t k = 0; k < tg.size(); ++k) tg[k] = pk.tau_ns[k] / kNs;
    const auto an = wavepacket_analytic(q, tg);
    pk.analytic = an.packet.values;

    const auto& d = w.discretization;
    pk.meta = {
        {"sweep_index", i},
        {"params", params_json(q)},
        {"fit", {{"y0", fit.y0}, {"A", fit.A}, {"t0_ns", fit.t0 * kNs}, {"tau_ns", fit.tau * kNs},
                 {"rms_residual", fit.rms_residual}, {"iterations", fit.iterations},
                 {"baseline_window", window}}},
        {"analytic", {{"gamma_BI", gamma_bi}, {"inverse_gamma_BI_ns", kNs / gamma_bi},
                      {"normalization_note", an.packet.normalization_note},
                      {"raw_scale", an.packet.raw_scale}}},
        {"numeric", {{"normalization_note", w.normalization_note}, {"raw_scale", w.raw_scale},
                     {"negative_time_fraction", w.negative_time_fraction}}},
        {"discretization", {{"span", d.span}, {"count", d.count}, {"spacing", d.spacing},
                            {"time_step_ns", dt_ns}, {"widenings", d.widenings},
                            {"edge_ratio", d.edge_ratio}}},
        {"time_bin_ns", cfg.has("time_bin") ? ordered_json(*cfg.number("time_bin")) : ordered_json("native")},
        {"tau_range_ns", {tau_min, tau_max}}};
  });

  ensure_directory(out);
  const auto config = rc.resolved();
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const auto& pk = packets[i];
    const std::vector<std::string> header{"tau_ns", "g2_numeric", "g2_analytic"};
    write_csv(out / indexed("wavepacket", i, ".csv"), header, {pk.tau_ns, pk.numeric, pk.analytic});
    ordered_json j{{"config", config}, {"file", indexed("wavepacket", i, ".csv")}, {"columns", header}};
    j.update(pk.meta);
    write_json(out / indexed("wavepacket", i, ".json"), j);
  }
}

void cmd_map(const RunConfig& rc, const fs::path& out) {
  const auto& cfg = rc.raw;
  const std::string which = cfg.word("map_kind", "all");
  std::vector<MapKind> kinds;
  if (which == "eit" || which == "all") kinds.push_back(MapKind::EIT);
  if (which == "fwm" || which == "all") kinds.push_back(MapKind::FWM);
  if (which == "overall" || which == "all") kinds.push_back(MapKind::Overall);
  if (kinds.empty()) throw ConfigError(cfg.where("map_kind") + "expected eit, fwm, overall or all");
  const auto oc2 = axis_or(cfg, "omega_c_sq_axis", odd_steps(1.0, 29.0, 4.0));
  const auto gam = axis_or(cfg, "gamma_axis", {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.10});

  std::vector<DiffMap> maps;
  for (auto k : kinds) {
    try {
      maps.push_back(fwhm_diff_map(k, oc2, gam, rc.params));
    } catch (const DomainError& e) {
      rethrow_with_line(cfg, e);
    }
  }

  ensure_directory(out);
  const auto config = rc.resolved();
  for (const auto& m : maps) {
    const std::string stem = "map_" + to_string(m.kind);
    std::vector<std::vector<double>> cols(7);
    ordered_json errors = ordered_json::array();
    int failed_low_x = 0;
    for (std::size_t ig = 0; ig < gam.size(); ++ig) {
      for (std::size_t io = 0; io < oc2.size(); ++io) {
        const auto idx = m.index(ig, io);
        const double x = oc2[io] / (4.0 * gam[ig] * rc.params.gamma_doppler);
        const bool failed = !m.cell_errors[idx].empty();
        for (auto [c, v] : {std::pair{0, gam[ig]}, {1, oc2[io]}, {2, x}, {3, m.numeric_fwhm[idx]},
                            {4, m.analytic_fwhm[idx]}, {5, m.percent_diff[idx]},
                            {6, failed ? 1.0 : 0.0}}) {
          cols[static_cast<std::size_t>(c)].push_back(v);
        }
        if (failed) {
          errors.push_back({{"gamma", gam[ig]}, {"omega_c_sq", oc2[io]}, {"message", m.cell_errors[idx]}});
          if (x <= 1.0) ++failed_low_x;
        }
      }
    }
    const std::vector<std::string> header{"gamma_gamma_units", "omega_c_sq_gamma_units", "x",
                                          "numeric_fwhm", "analytic_fwhm", "percent_diff", "failed"};
    write_csv(out / (stem + ".csv"), header, cols);
    write_json(out / (stem + ".json"), {{"config", config},
                                        {"file", stem + ".csv"},
                                        {"columns", header},
                                        {"kind", to_string(m.kind)},
                                        {"omega_c_sq_axis", oc2},
                                        {"gamma_axis", gam},
                                        {"failed_cells", m.failed_cells},
                                        {"failed_cells_x_le_1", failed_low_x},
                                        {"cell_errors", errors}});
  }
}

void cmd_ratios(const RunConfig& rc, const fs::path& out) {
  const auto& cfg = rc.raw;
  const auto alphas = axis_or(cfg, "alpha_s_axis", {200.0, 350.0, 500.0});
  const auto gammas = axis_or(cfg, "gamma_axis", {0.01, 0.05, 0.1});
  const auto oc2 = axis_or(cfg, "omega_c_sq_axis", odd_steps(1.0, 25.0, 2.0));
  std::vector<RatioCurve> curves;
  try {
    curves = linewidth_ratio_curves(alphas, gammas, oc2, rc.params);
  } catch (const DomainError& e) {
    rethrow_with_line(cfg, e);
  }

  ensure_directory(out);
  const auto config = rc.resolved();
  const std::vector<std::string> header{"omega_c_sq_gamma_units", "gamma_EIT", "gamma_FWM",
                                        "gamma_BI", "eit_over_bi", "fwm_over_bi"};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    write_csv(out / indexed("ratios", i, ".csv"), header,
              {c.omega_c_sq, c.gamma_EIT, c.gamma_FWM, c.gamma_BI, c.eit_over_bi, c.fwm_over_bi});
    ordered_json errors = ordered_json::array();
    for (std::size_t k = 0; k < c.point_errors.size(); ++k) {
      if (!c.point_errors[k].empty()) errors.push_back({{"omega_c_sq", c.omega_c_sq[k]}, {"message", c.point_errors[k]}});
    }
    write_json(out / indexed("ratios", i, ".json"), {{"config", config},
                                                     {"file", indexed("ratios", i, ".csv")},
                                                     {"columns", header},
                                                     {"alpha_s", c.alpha_s},
                                                     {"gamma", c.gamma},
                                                     {"failed_points", c.failed_points},
                                                     {"point_errors", errors}});
  }
}

namespace {

std::string pick_column(const CsvInput& csv, const Config& cfg, std::initializer_list<const char*> names) {
  if (cfg.has("value_column")) return cfg.word("value_column", "");
  for (const char* n : names) {
    if (csv.has_column(n)) return n;
  }
  return *names.begin();  // reported as missing by column()
}

void require_increasing(const CsvInput& csv, const std::string& name, const std::vector<double>& v) {
  for (std::size_t r = 1; r < v.size(); ++r) {
    if (!(v[r] > v[r - 1])) {
      throw ConfigError(csv.path + " data row " + std::to_string(r + 1) + ", column '" + name +
                        "': values must be strictly increasing");
    }
  }
}

}  // namespace

void cmd_fit(const RunConfig& rc, const std::vector<std::string>& inputs, const fs::path& out) {
  const auto& cfg = rc.raw;
  const std::string kind = cfg.word("fit_kind", "wavepacket");
  if (inputs.empty()) throw ConfigError("fit: at least one --input file is required");
  std::vector<CsvInput> csvs;
  for (const auto& path : inputs) csvs.push_back(read_csv(path));
  const auto config = rc.resolved();

  if (kind == "wavepacket") {
    const double window = cfg.number("baseline_window", 0.2);
    if (!(window > 0.0 && window < 1.0)) throw ConfigError(cfg.where("baseline_window") + "must be in (0, 1)");
    std::vector<ordered_json> results;
    for (const auto& csv : csvs) {
      const auto t = csv.column("tau_ns");
      const auto col = pick_column(csv, cfg, {"g2", "g2_numeric", "counts"});
      const auto v = csv.column(col);
      require_increasing(csv, "tau_ns", t);
      const auto fit = fit_exp_decay(t, v, window);
      results.push_back({{"config", config},
                         {"input", csv.provenance()},
                         {"value_column", col},
                         {"fit", {{"y0", fit.y0}, {"A", fit.A}, {"t0_ns", fit.t0}, {"tau_ns", fit.tau},
                                  {"rms_residual", fit.rms_residual}, {"iterations", fit.iterations},
                                  {"baseline_window", window}}}});
    }
    ensure_directory(out);
    for (std::size_t i = 0; i < results.size(); ++i) write_json(out / indexed("fit", i, ".json"), results[i]);
    return;
  }
  if (kind != "eit") throw ConfigError(cfg.where("fit_kind") + "expected wavepacket or eit");

  const auto ratios = cfg.list("power_ratios");
  if (ratios.size() != csvs.size()) {
    throw ConfigError(cfg.where("power_ratios") + "needs one value per input (" +
                      std::to_string(csvs.size()) + " inputs)");
  }
  std::vector<RealSpectrum> spectra;
  ordered_json provenance = ordered_json::array();
  std::vector<std::string> cols;
  for (const auto& csv : csvs) {
    const auto d = csv.column("delta_gamma_units");
    const auto col = pick_column(csv, cfg, {"transmission", "value", "exact"});
    auto v = csv.column(col);
    require_increasing(csv, "delta_gamma_units", d);
    try {
      spectra.push_back({DetuningGrid::from_points(d), std::move(v)});
    } catch (const DomainError& e) {
      throw ConfigError(csv.path + ", column 'delta_gamma_units': " + e.what());
    }
    provenance.push_back(csv.provenance());
    cols.push_back(col);
  }
  EstimateOptions opts;
  opts.base = rc.params;
  opts.mode = cfg.has("pathlength") ? rc.pathlength : PathlengthMode::ClassicalProbeHalf;
  if (cfg.has("omega_c0_guess")) opts.omega_c0_guess = *cfg.number("omega_c0_guess");
  EstimateResult r;
  try {
    r = estimate_params_from_eit(spectra, rc.params.alpha_s, ratios, opts);
  } catch (const DomainError& e) {
    rethrow_with_line(cfg, e);
  }
  ensure_directory(out);
  write_json(out / "estimate.json", {{"config", config},
                                     {"inputs", provenance},
                                     {"value_columns", cols},
                                     {"pathlength", to_string(opts.mode)},
                                     {"power_ratios", ratios},
                                     {"omega_c0", r.omega_c0},
                                     {"gamma_per_spectrum", r.gamma_per_spectrum},
                                     {"residual_rms", r.residual_rms},
                                     {"iterations", r.iterations},
                                     {"warnings", r.warnings}});
}

void cmd_validate(const RunConfig& rc, std::ostream& os) {
  ordered_json j{{"config", rc.resolved()}, {"items", ordered_json::array()}};
  for (const auto& q : rc.sweep) {
    ordered_json item{{"params", params_json(q)}, {"validity_metrics", validity_json(validity_metrics(q))}};
    try {
      item["summary"] = summary_json(eit_lorentzian_summary(q, rc.pathlength));
    } catch (const DomainError& e) {
      item["summary"] = nullptr;
      item["summary_error"] = e.what();
    }
    j["items"].push_back(item);
  }
  os << j.dump(2) << '\n';
}

}  // namespace cli
