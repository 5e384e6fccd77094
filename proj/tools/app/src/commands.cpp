#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "detail.hpp"
#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"
#include "weaklink/films.hpp"
#include "weaklink/flux.hpp"
#include "weaklink/iv.hpp"
#include "weaklink/mwfit.hpp"
#include "weaklink/rcsj.hpp"
#include "weaklink/sns.hpp"
#include "weaklink/transmon.hpp"

namespace weaklink::app::detail {
namespace {

Block root(const Context& ctx) { return Block(ctx.config.document, "config"); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::size_t count(const Block& b, const std::string& key, long fallback, long minimum = 1) {
  const long n = b.integer(key, fallback);
  if (n < minimum) b.fail(key, fmt::format("must be >= {}", minimum));
  return static_cast<std::size_t>(n);
}

// ---- synthetic data

// R_s(T) = R_Q exp(-(d - d_c)/0.3 nm g(T)), g = 1/(1 + T/5 K): every member
// crosses R_Q at d_c, thicker films superconduct and thinner ones insulate.
films::RsTSeries synthetic_film(double d_nm, double dc_nm, double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, noise);
  films::RsTSeries s;
  s.thickness = d_nm * units::nm;
  s.label = fmt::format("d={:.6g}nm", d_nm);
  for (double t : linspace(2.0, 20.0, 73)) {
    const double g = 1.0 / (1.0 + t / 5.0);
    const double rs = kConstants.r_q * std::exp(-(d_nm - dc_nm) / 0.3 * g);
    s.points.push_back({t, rs * (1.0 + (noise > 0.0 ? n(rng) : 0.0))});
  }
  return s;
}

void add_noise(mw::ComplexTrace& t, double sigma, std::mt19937_64& rng) {
  if (!(sigma > 0.0)) return;
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& z : t.s21) z += mw::Complex(n(rng), n(rng));
}

void multiply_noise(mw::ComplexTrace& t, double rel, std::mt19937_64& rng) {
  if (!(rel > 0.0)) return;
  std::normal_distribution<double> n(0.0, rel);
  for (auto& z : t.s21) z *= mw::Complex(1.0 + n(rng), n(rng));
}

io::CsvDocument s21_document(const mw::ComplexTrace& t) {
  io::CsvDocument doc;
  doc.schema = "s21";
  doc.meta = {{"power_dBm", io::format_number(t.power_dbm)}, {"label", t.label}};
  doc.columns = {"frequency_Hz", "re", "im"};
  doc.values.resize(3);
  for (std::size_t i = 0; i < t.frequency.size(); ++i) {
    doc.values[0].push_back(t.frequency[i]);
    doc.values[1].push_back(t.s21[i].real());
    doc.values[2].push_back(t.s21[i].imag());
  }
  return doc;
}

std::vector<rcsj::Rational> fractions(const Block& b) {
  std::vector<rcsj::Rational> out;
  const auto list = b.has("fractions") ? b.texts("fractions")
                                       : std::vector<std::string>{"1", "2", "3", "1/2"};
  for (const auto& f : list) out.push_back(rcsj::Rational::parse(f));
  return out;
}

rcsj::StepPolicy step_policy(const Block& b) {
  rcsj::StepPolicy p;
  p.tolerance_fraction = b.number("tolerance_fraction", p.tolerance_fraction);
  p.min_points = count(b, "min_points", static_cast<long>(p.min_points));
  return p;
}

void emit_steps(Context& ctx, const rcsj::StepReport& report) {
  io::CsvDocument doc;
  doc.schema = "steps";
  doc.meta = {{"unit_voltage_V", io::format_number(report.unit_voltage)},
              {"tolerance_fraction", io::format_number(report.policy.tolerance_fraction)},
              {"min_points", std::to_string(report.policy.min_points)}};
  doc.columns = {"q_num", "q_den", "exists", "voltage_V", "span_A",
                 "points", "i_lo_A", "i_hi_A", "drive_A"};
  doc.values.resize(doc.columns.size());
  Json steps = Json::array();
  for (const auto& s : report.steps) {
    const double row[] = {static_cast<double>(s.q.num), static_cast<double>(s.q.den),
                          s.exists ? 1.0 : 0.0, s.voltage, s.span, static_cast<double>(s.points),
                          s.i_lo, s.i_hi, s.drive};
    for (std::size_t c = 0; c < doc.columns.size(); ++c) doc.values[c].push_back(row[c]);
    steps.push_back({{"q", s.q.str()},
                     {"exists", s.exists},
                     {"voltage_v", s.voltage},
                     {"span_a", s.span},
                     {"points", s.points},
                     {"drive_a", s.drive}});
  }
  ctx.csv("steps.csv", doc);
  ctx.report["unit_voltage_v"] = report.unit_voltage;
  ctx.report["steps"] = steps;
}

iv::FeatureRules feature_rules(const std::optional<Block>& b) {
  iv::FeatureRules r;
  if (!b) return r;
  r.slope_fraction = b->number("slope_fraction", r.slope_fraction);
  r.curvature_fraction = b->number("curvature_fraction", r.curvature_fraction);
  r.top_fraction = b->number("top_fraction", r.top_fraction);
  r.hysteresis_fraction = b->number("hysteresis_fraction", r.hysteresis_fraction);
  r.r_floor = b->number("r_floor_ohm", r.r_floor);
  return r;
}

}  // namespace

void films_classify(Context& ctx) {
  const Block b = root(ctx).child("films");
  films::ClassifyOptions opt;
  opt.window_fraction = b.number("window_fraction", opt.window_fraction);
  opt.tolerance = b.number("tolerance_ohm_per_sq_K", opt.tolerance);
  opt.min_points = count(b, "min_points", static_cast<long>(opt.min_points));

  std::vector<films::RsTSeries> family;
  if (b.has("inputs")) {
    for (const auto& path : b.texts("inputs")) family.push_back(io::to_rs_series(ctx.read(path, "rs_t")));
  } else {
    const Block s = b.child("synthetic");
    const std::size_t n = count(s, "members", 30, 2);
    const double start = s.number("d_start_nm", 1.5);
    const double step = s.number("d_step_nm", 0.1);
    const double dc = s.number("dc_nm", 2.75);
    const double noise = s.number("noise_rel", 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      family.push_back(synthetic_film(start + step * static_cast<double>(i), dc, noise, ctx.rng));
    }
  }

  const auto result = films::critical_thickness(family, opt);
  io::CsvDocument doc;
  doc.schema = "rs_classes";
  doc.meta = {{"window_fraction", io::format_number(opt.window_fraction)},
              {"tolerance_ohm_per_sq_K", io::format_number(opt.tolerance)},
              {"phase_code", "1 superconducting, -1 insulating, 0 flat"}};
  doc.columns = {"thickness_nm", "phase_code", "slope_ohm_per_sq_K", "t_lo_K", "t_hi_K",
                 "window_edge_rs_ohm_per_sq", "window_points"};
  doc.values.resize(doc.columns.size());
  Json classes = Json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& c = result.classes[i];
    const double code = c.phase == films::Phase::Superconducting ? 1.0
                        : c.phase == films::Phase::Insulating    ? -1.0
                                                                  : 0.0;
    const double row[] = {family[i].thickness / units::nm, code, c.slope, c.t_lo, c.t_hi,
                          c.window_edge_rs, static_cast<double>(c.window_points)};
    for (std::size_t k = 0; k < doc.columns.size(); ++k) doc.values[k].push_back(row[k]);
    classes.push_back({{"label", family[i].label}, {"phase", films::to_string(c.phase)}});
  }
  ctx.csv("rs_classes.csv", doc);
  ctx.report["d_c_nm"] = result.d_c / units::nm;
  ctx.report["rs_at_dc_ohm_per_sq"] = result.rs_at_dc;
  ctx.report["bracket_nm"] = {result.insulating_thickness / units::nm,
                              result.superconducting_thickness / units::nm};
  ctx.report["classes"] = classes;
}

void sns_fit(Context& ctx) {
  const Block b = root(ctx).child("sns");
  const Block j = b.child("junction");
  sns::DiffusiveJunction junction;
  junction.length = j.number("length_m");
  junction.r_n = j.number("r_n_ohm");
  const double tc = j.number("tc_k", 12.0);
  junction.gap = j.has("delta0_mev")
                     ? phys::GapModel::strong_phenomenological(tc, j.number("delta0_mev") * units::meV)
                     : phys::GapModel::strong_phenomenological(tc);
  junction.diffusion = b.number("d_init_cm2_s", 0.5) * units::cm2_per_s;

  sns::IcTSeries data;
  if (b.has("input")) {
    data = io::to_ic_series(ctx.read(b.text("input"), "ic_t"));
  } else {
    const Block s = b.child("synthetic");
    auto truth = junction;
    truth.diffusion = s.number("d_cm2_s") * units::cm2_per_s;
    data = sns::ic_curve(truth, s.grid("temperature_k"), s.flag("zero_t", false));
    const double noise = s.number("noise_rel", 0.0);
    std::normal_distribution<double> n(0.0, noise);
    for (auto& p : data.points) {
      if (noise > 0.0) {
        p.ic *= 1.0 + n(ctx.rng);
        p.sigma = noise * p.ic;
      }
    }
  }
  if (!(data.r_n > 0.0)) data.r_n = junction.r_n;
  data.validate();

  const auto fit = sns::fit_diffusion(data, junction);
  auto fitted = junction;
  fitted.r_n = data.r_n;
  fitted.diffusion = fit.diffusion;
  const auto model = sns::ic_curve(
      fitted, b.has("model_temperature_k") ? b.grid("model_temperature_k") : linspace(1.0, tc - 0.5, 100));

  io::CsvDocument doc;
  doc.schema = "ic_t";
  doc.meta = {{"r_n_ohm", io::format_number(fitted.r_n)},
              {"diffusion_m2_s", io::format_number(fit.diffusion)}};
  doc.columns = {"temperature_K", "ic_A"};
  doc.values.resize(2);
  for (const auto& p : model.points) {
    doc.values[0].push_back(p.temperature);
    doc.values[1].push_back(p.ic);
  }
  ctx.csv("ic_model.csv", doc);
  ctx.report["diffusion_cm2_s"] = fit.diffusion / units::cm2_per_s;
  ctx.report["diffusion_sigma_cm2_s"] = fit.diffusion_sigma / units::cm2_per_s;
  ctx.report["thouless_energy_uev"] = fit.thouless_energy / units::ueV;
  ctx.report["validity_ok"] = fit.validity_ok;
  ctx.report["points_used"] = fit.points_used;
  ctx.report["cost"] = fit.cost;
  ctx.report["iterations"] = fit.iterations;
  ctx.report["zero_t_icrn_v"] = sns::zero_temperature_icrn(fitted);
}

void shapiro_sim(Context& ctx) {
  const Block b = root(ctx).child("rcsj");
  rcsj::RcsjConfig cfg;
  cfg.cpr = parse_cpr(b.child("cpr"));
  cfg.resistance = b.number("resistance_ohm");
  cfg.beta_c = b.number("beta_c", 0.0);
  cfg.f_rf = b.number("f_rf_hz");
  cfg.transient_periods = static_cast<int>(count(b, "transient_periods", cfg.transient_periods));
  cfg.average_periods = static_cast<int>(count(b, "average_periods", cfg.average_periods));
  cfg.rel_tol = b.number("rel_tol", cfg.rel_tol);
  const auto i_dc = b.grid("i_dc_a");
  const auto drive = b.grid("drive_a");
  long threads = b.integer("threads", 0);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto frac = fractions(b);
  const auto policy = step_policy(b);

  const auto map = rcsj::shapiro_map(cfg, i_dc, drive, static_cast<unsigned>(threads));
  io::CsvDocument doc;
  doc.schema = "shapiro";
  doc.meta = {{"f_rf_Hz", io::format_number(cfg.f_rf)},
              {"resistance_ohm", io::format_number(cfg.resistance)}};
  doc.columns = {"power_dBm", "current_A", "voltage_V", "drive_A", "dvdi_ohm"};
  doc.values.resize(5);
  for (std::size_t d = 0; d < map.drive.size(); ++d) {
    const double p = io::drive_power_dbm(map.drive[d], cfg.resistance);
    for (std::size_t i = 0; i < map.i_dc.size(); ++i) {
      doc.values[0].push_back(p);
      doc.values[1].push_back(map.i_dc[i]);
      doc.values[2].push_back(map.v(d, i));
      doc.values[3].push_back(map.drive[d]);
      doc.values[4].push_back(map.dvdi[map.index(d, i)]);
    }
  }
  ctx.csv("shapiro.csv", doc);
  const auto norm = rcsj::normalization(cfg);
  ctx.report["cpr"] = describe_cpr(cfg.cpr);
  ctx.report["reduced_frequency"] = norm.drive_frequency;
  ctx.report["voltage_scale_v"] = norm.voltage;
  ctx.report["grid"] = {{"i_dc", map.i_dc.size()}, {"drive", map.drive.size()}};
  emit_steps(ctx, rcsj::detect_steps(map, cfg.f_rf, frac, policy));
}

void shapiro_detect(Context& ctx) {
  const Block b = root(ctx).child("shapiro_detect");
  const auto table = ctx.read(b.text("input"), "shapiro");
  const double f_rf = b.has("f_rf_hz") ? b.number("f_rf_hz") : table.meta_number("f_rf_Hz");
  const auto frac = fractions(b);
  const auto policy = step_policy(b);
  const auto map = io::to_shapiro_map(io::to_shapiro(table));
  ctx.report["f_rf_hz"] = f_rf;
  emit_steps(ctx, rcsj::detect_steps(map, f_rf, frac, policy));
}

void transmon(Context& ctx) {
  const Block b = root(ctx).child("transmon");
  transmon::TransmonParams p;
  if (b.has("c_sigma_f") == b.has("e_c_hz")) b.fail("e_c_hz", "give exactly one of e_c_hz or c_sigma_f");
  p.e_c = b.has("e_c_hz") ? units::energy_of_frequency(b.number("e_c_hz"))
                          : io::charging_energy(b.number("c_sigma_f"));
  if (b.has("cpr")) {
    const auto model = parse_cpr(b.child("cpr"));
    p.potential = cpr::energy_phase(model, static_cast<int>(count(b, "max_harmonic", 12)));
    ctx.report["cpr"] = describe_cpr(model);
  } else {
    p.potential = {{1, units::energy_of_frequency(b.number("e_j_hz"))}};
  }
  p.n_g = b.number("n_g", 0.0);
  p.n_cut = static_cast<int>(b.integer("n_cut", 0));
  p.l_stray = b.number("l_stray_h", 0.0);

  const auto s = transmon::diagonalize(p);
  const double e_j = p.effective_josephson_energy();
  io::CsvDocument doc;
  doc.schema = "transmon_levels";
  doc.columns = {"n_cut", "f01_Hz", "f12_Hz", "f23_Hz", "anharmonicity_Hz", "convergence_shift_Hz"};
  const double row[] = {static_cast<double>(s.n_cut), s.f01, s.f12, s.f23, s.anharmonicity,
                        s.convergence_shift};
  for (double v : row) doc.values.push_back({v});
  ctx.csv("transmon_levels.csv", doc);

  ctx.report["f01_ghz"] = s.f01 / units::GHz;
  ctx.report["f12_ghz"] = s.f12 / units::GHz;
  ctx.report["f23_ghz"] = s.f23 / units::GHz;
  ctx.report["alpha_over_2pi_mhz"] = s.anharmonicity / units::MHz;
  ctx.report["n_cut"] = s.n_cut;
  ctx.report["convergence_shift_hz"] = s.convergence_shift;
  ctx.report["effective_ej_ghz"] = units::frequency_of_energy(e_j) / units::GHz;
  ctx.report["ej_over_ec"] = e_j / p.e_c;
  ctx.report["e_c_ghz"] = units::frequency_of_energy(p.e_c) / units::GHz;
  ctx.report["c_sigma_ff"] = io::total_capacitance(p.e_c) / 1e-15;
  ctx.report["josephson_inductance_nh"] = transmon::josephson_inductance(e_j) / units::nH;
  if (s.f01_asymptotic) ctx.report["f01_asymptotic_ghz"] = *s.f01_asymptotic / units::GHz;
  if (s.anharmonicity_with_stray) {
    ctx.report["alpha_with_stray_mhz"] = *s.anharmonicity_with_stray / units::MHz;
  }
  if (const auto x = b.optional_child("extract_ej")) {
    const std::string method = x->text("method", "numerical");
    if (method != "numerical" && method != "asymptotic") {
      x->fail("method", "expected 'numerical' or 'asymptotic'");
    }
    const auto est = transmon::extract_ej(
        x->number("f_q_hz"), p.e_c,
        method == "numerical" ? transmon::EjMethod::Numerical : transmon::EjMethod::Asymptotic);
    ctx.report["extracted"] = {{"method", method},
                               {"e_j_ghz", units::frequency_of_energy(est.e_j) / units::GHz},
                               {"l_j_nh", est.l_j / units::nH},
                               {"ej_over_ec", est.ratio},
                               {"f01_check_ghz", est.f01_check / units::GHz}};
  }
}

void squash_fit(Context& ctx) {
  const Block b = root(ctx).child("squash");
  std::vector<mw::ComplexTrace> traces;
  if (b.has("inputs")) {
    for (const auto& path : b.texts("inputs")) traces.push_back(io::to_trace(ctx.read(path, "s21")));
    if (b.has("background")) {
      const auto ref = io::to_trace(ctx.read(b.text("background"), "s21"));
      for (auto& t : traces) t = mw::subtract_background(t, ref);
    }
  } else {
    const Block s = b.child("synthetic");
    mw::SquashParams p{s.number("f_q_hz"), s.number("kappa_t_hz"), s.number("kappa_c_hz"), 0.0};
    p.validate();
    const double half = 0.5 * s.number("span_linewidths", 8.0) * p.kappa_t;
    const auto f = linspace(p.f_q - half, p.f_q + half, count(s, "points", 801, 20));
    const double noise = s.number("noise", 0.0) * p.kappa_c / p.kappa_t;
    const double ref_w = mw::dbm_to_watt(s.number("reference_power_dbm", -150.0));
    for (double r : s.numbers("rabi_over_kappa")) {
      auto q = p;
      q.rabi = r * p.kappa_t;
      // Power follows Omega_R^2 so the Rabi rate is linear in sqrt(P).
      auto t = mw::squash_model(q, f, mw::watt_to_dbm(ref_w * r * r));
      t.label = fmt::format("rabi_over_kappa={:.6g}", r);
      add_noise(t, noise, ctx.rng);
      traces.push_back(std::move(t));
    }
  }

  const auto fit = mw::fit_squash(traces);
  io::CsvDocument rabi;
  rabi.schema = "rabi";
  rabi.columns = {"power_dBm", "amplitude_sqrtW", "rabi_Hz"};
  rabi.values.resize(3);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    rabi.values[0].push_back(traces[k].power_dbm);
    rabi.values[1].push_back(fit.amplitude[k]);
    rabi.values[2].push_back(fit.rabi[k]);
    auto q = mw::SquashParams{fit.f_q, fit.kappa_t, fit.kappa_c, fit.rabi[k]};
    auto model = mw::squash_model(q, traces[k].frequency, traces[k].power_dbm);
    model.label = "model:" + traces[k].label;
    ctx.csv(fmt::format("squash_model_{}.csv", k), s21_document(model));
  }
  ctx.csv("rabi.csv", rabi);
  ctx.report["f_q_hz"] = fit.f_q;
  ctx.report["kappa_t_hz"] = fit.kappa_t;
  ctx.report["kappa_c_hz"] = fit.kappa_c;
  ctx.report["depth"] = fit.kappa_c / fit.kappa_t;
  ctx.report["rabi_hz"] = fit.rabi;
  ctx.report["rabi_vs_amplitude"] = {{"slope", fit.rabi_vs_amplitude.slope},
                                     {"intercept", fit.rabi_vs_amplitude.intercept},
                                     {"r_squared", fit.rabi_vs_amplitude.r_squared}};
  ctx.report["iterations"] = fit.iterations;
}

void circle_fit(Context& ctx) {
  const Block b = root(ctx).child("circle");
  mw::ComplexTrace trace;
  if (b.has("input")) {
    trace = io::to_trace(ctx.read(b.text("input"), "s21"));
  } else {
    const Block s = b.child("synthetic");
    mw::NotchResonance r;
    r.f_r = s.number("f_r_hz");
    r.q_internal = s.number("q_i");
    r.q_coupling_abs = s.number("q_c_abs");
    r.phi0 = s.number("phi0_rad", 0.0);
    r.q_loaded = 1.0 / (1.0 / r.q_internal + std::cos(r.phi0) / r.q_coupling_abs);
    r.amplitude = s.number("amplitude", 1.0);
    r.phase = s.number("phase_rad", 0.0);
    r.delay = s.number("delay_s", 0.0);
    const double half = 0.5 * s.number("span_linewidths", 10.0) * r.f_r / r.q_loaded;
    trace.frequency = linspace(r.f_r - half, r.f_r + half, count(s, "points", 801, 20));
    for (double f : trace.frequency) trace.s21.push_back(mw::notch_model(r, f));
    trace.label = "synthetic notch";
    multiply_noise(trace, s.number("noise_rel", 0.0), ctx.rng);
  }

  const auto r = mw::circle_fit(trace);
  auto model = trace;
  model.label = "model";
  for (std::size_t i = 0; i < model.frequency.size(); ++i) {
    model.s21[i] = mw::notch_model(r, model.frequency[i]);
  }
  ctx.csv("circle_model.csv", s21_document(model));
  ctx.report["f_r_hz"] = r.f_r;
  ctx.report["q_loaded"] = r.q_loaded;
  ctx.report["q_coupling_abs"] = r.q_coupling_abs;
  ctx.report["q_internal"] = r.q_internal;
  ctx.report["phi0_rad"] = r.phi0;
  ctx.report["delay_s"] = r.delay;
  ctx.report["amplitude"] = r.amplitude;
  ctx.report["phase_rad"] = r.phase;
  ctx.report["circle_rms"] = r.circle_rms;
}

void at_calibrate(Context& ctx) {
  const Block b = root(ctx).child("autler_townes");
  const double f_q = b.number("f_q_hz");
  const double f01 = b.number("f01_hz", f_q);
  const double kappa = b.number("kappa_hz");
  const std::string mode = b.text("mode", "fit");
  if (mode != "fit" && mode != "forward") b.fail("mode", "expected 'fit' or 'forward'");

  double attenuation = 0.0;
  if (mode == "forward") {
    attenuation = b.number("attenuation_db");
  } else {
    std::vector<mw::Sideband> sidebands;
    if (b.has("input")) {
      sidebands = io::to_sidebands(ctx.read(b.text("input"), "sidebands"));
    } else {
      const Block s = b.child("synthetic");
      const double truth = s.number("attenuation_db");
      const double jitter = s.number("jitter_hz", 0.0);
      std::normal_distribution<double> n(0.0, jitter);
      for (double p : s.grid("applied_dbm")) {
        const auto br = mw::autler_townes(f_q, f01, kappa, p, truth);
        sidebands.push_back({p, br.lower + (jitter > 0.0 ? n(ctx.rng) : 0.0), -1});
        sidebands.push_back({p, br.upper + (jitter > 0.0 ? n(ctx.rng) : 0.0), +1});
      }
    }
    const auto fit =
        mw::fit_attenuation(f_q, f01, kappa, sidebands, b.number("initial_attenuation_db", -120.0));
    attenuation = fit.attenuation_db;
    ctx.report["sigma_db"] = fit.sigma_db;
    ctx.report["rms_residual_hz"] = fit.rms_residual;
    ctx.report["sidebands"] = sidebands.size();
  }

  io::CsvDocument doc;
  doc.schema = "at_branches";
  doc.meta = {{"attenuation_dB", io::format_number(attenuation)}};
  doc.columns = {"applied_dBm", "device_dBm", "lower_Hz", "upper_Hz"};
  doc.values.resize(4);
  const auto grid = b.has("applied_dbm") ? b.grid("applied_dbm") : linspace(-30.0, 0.0, 31);
  for (double p : grid) {
    const auto br = mw::autler_townes(f_q, f01, kappa, p, attenuation);
    doc.values[0].push_back(p);
    doc.values[1].push_back(br.device_power_dbm);
    doc.values[2].push_back(br.lower);
    doc.values[3].push_back(br.upper);
  }
  ctx.csv("at_branches.csv", doc);
  ctx.report["mode"] = mode;
  ctx.report["attenuation_db"] = attenuation;
  if (b.has("reference_applied_dbm")) {
    const double p = b.number("reference_applied_dbm");
    ctx.report["reference_device_dbm"] = mw::device_power_dbm(p, attenuation);
  }
}

void fraunhofer(Context& ctx) {
  const Block b = root(ctx).child("fraunhofer");
  const auto geom = flux::period(b.number("width_m"), b.number("length_m"), b.number("lambda_m"));
  const double ic0 = b.number("ic0_a", 1.0);
  const Block pb = b.child("profile");
  const std::string type = pb.text("type");
  flux::CurrentProfile profile;
  if (type == "uniform") {
    profile = flux::Uniform{};
  } else if (type == "edge_pair") {
    profile = flux::EdgePair{pb.number("left_weight", 0.5)};
  } else if (type == "sampled") {
    profile = io::to_profile(ctx.read(pb.text("input"), "profile"));
  } else {
    pb.fail("type", "expected uniform, edge_pair or sampled");
  }
  flux::validate(profile, geom);

  std::vector<double> fields;
  if (b.has("field_mt")) {
    for (double f : b.grid("field_mt")) fields.push_back(f * units::mT);
  } else {
    for (double f : b.grid("field_periods")) fields.push_back(f * geom.b0);
  }
  const auto pattern = flux::ic_of_field(profile, geom, ic0, fields);
  io::CsvDocument doc;
  doc.schema = "pattern";
  doc.meta = {{"profile", flux::profile_name(profile)},
              {"b0_mT", io::format_number(geom.b0 / units::mT)}};
  doc.columns = {"B_mT", "ic_over_ic0"};
  doc.values.resize(2);
  for (const auto& p : pattern) {
    doc.values[0].push_back(p.field / units::mT);
    doc.values[1].push_back(p.ic / ic0);
  }
  ctx.csv("pattern.csv", doc);
  ctx.report["b0_mt"] = geom.b0 / units::mT;
  ctx.report["area_um2"] = geom.area / (units::um * units::um);
  ctx.report["profile"] = flux::profile_name(profile);
}

void iv_extract(Context& ctx) {
  const Block b = root(ctx).child("iv");
  const auto rules = feature_rules(b.optional_child("rules"));
  const std::optional<double> gap =
      b.has("gap_mev") ? std::optional<double>(b.number("gap_mev") * units::meV) : std::nullopt;

  struct Job {
    std::string name;
    iv::IVCurve up;
    std::optional<iv::IVCurve> down;
  };
  std::vector<Job> jobs;
  if (b.has("curves")) {
    for (const auto& c : b.children("curves")) {
      Job job;
      job.name = c.text("up");
      job.up = io::to_iv_curve(ctx.read(job.name, "iv"));
      if (c.has("down")) job.down = io::to_iv_curve(ctx.read(c.text("down"), "iv"));
      jobs.push_back(std::move(job));
    }
  } else {
    const Block s = b.child("synthetic");
    const double noise = s.number("noise_v", 0.0);
    std::normal_distribution<double> n(0.0, noise);
    for (const auto& c : s.children("rsj")) {
      const double ic = c.number("ic_a");
      const double rn = c.number("r_n_ohm");
      Job job;
      job.name = fmt::format("rsj ic={:.6g}A rn={:.6g}ohm", ic, rn);
      for (double i : linspace(-10.0 * ic, 10.0 * ic, count(c, "points", 2001, 5))) {
        job.up.current.push_back(i);
        const double v = std::abs(i) > ic ? std::copysign(rn * std::sqrt(i * i - ic * ic), i) : 0.0;
        job.up.voltage.push_back(v + (noise > 0.0 ? n(ctx.rng) : 0.0));
      }
      job.up.sweep = iv::Sweep::Up;
      job.up.label = job.name;
      jobs.push_back(std::move(job));
    }
  }

  io::CsvDocument doc;
  doc.schema = "iv_features";
  doc.meta = {{"slope_fraction", io::format_number(rules.slope_fraction)},
              {"curvature_fraction", io::format_number(rules.curvature_fraction)},
              {"top_fraction", io::format_number(rules.top_fraction)},
              {"hysteresis_fraction", io::format_number(rules.hysteresis_fraction)},
              {"rule_code", "0 slope_threshold, 1 curvature_onset, -1 none"}};
  doc.columns = {"curve", "ic_A", "ic_negative_A", "r_n_ohm", "icrn_V", "rule_code",
                 "hysteretic", "insulating", "v_c_V", "r_low_ohm"};
  doc.values.resize(doc.columns.size());
  Json curves = Json::array();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& job = jobs[k];
    auto f = job.down ? iv::extract_features(job.up, *job.down, rules)
                      : iv::extract_features(job.up, rules);
    if (f.insulating && gap) f.insulator = iv::extract_insulating(job.up, f.insulator->r_floor, gap);
    const double rule = f.rule == iv::IcRule::SlopeThreshold   ? 0.0
                        : f.rule == iv::IcRule::CurvatureOnset ? 1.0
                                                                : -1.0;
    const double row[] = {static_cast<double>(k), f.ic, f.ic_negative, f.r_n, f.icrn, rule,
                          f.hysteretic ? 1.0 : 0.0, f.insulating ? 1.0 : 0.0,
                          f.insulator ? f.insulator->v_c : 0.0,
                          f.insulator ? f.insulator->r_low : 0.0};
    for (std::size_t c = 0; c < doc.columns.size(); ++c) doc.values[c].push_back(row[c]);
    Json j = {{"curve", job.name},
              {"ic_a", f.ic},
              {"r_n_ohm", f.r_n},
              {"icrn_v", f.icrn},
              {"rule", iv::to_string(f.rule)},
              {"hysteretic", f.hysteretic},
              {"insulating", f.insulating},
              {"r_n_window_a", {f.r_n_window_lo, f.r_n_window_hi}},
              {"r_n_r_squared", f.r_n_r_squared}};
    if (f.insulator) {
      j["v_c_v"] = f.insulator->v_c;
      j["r_low_ohm"] = f.insulator->r_low;
      j["exceeds_100_mohm"] = f.insulator->exceeds_100_mohm;
      if (f.insulator->above_gap_voltage) j["above_gap_voltage"] = *f.insulator->above_gap_voltage;
    }
    curves.push_back(j);
  }
  ctx.csv("iv_features.csv", doc);
  ctx.report["curves"] = curves;
}

void eth_invert(Context& ctx) {
  const Block b = root(ctx).child("eth");
  const double delta = b.number("delta_mev", 2.03) * units::meV;
  const auto fractions = b.numbers("ab_fractions");
  io::CsvDocument doc;
  doc.schema = "eth";
  doc.meta = {{"delta_meV", io::format_number(delta / units::meV)}};
  doc.columns = {"ab_fraction", "eth_over_delta", "eth_meV"};
  doc.values.resize(3);
  Json rows = Json::array();
  for (double x : fractions) {
    const double eth = cpr::eth_from_icrn(x, delta);
    doc.values[0].push_back(x);
    doc.values[1].push_back(eth / delta);
    doc.values[2].push_back(eth / units::meV);
    rows.push_back({{"ab_fraction", x}, {"eth_over_delta", eth / delta}});
  }
  ctx.csv("eth.csv", doc);
  ctx.report["delta_mev"] = delta / units::meV;
  ctx.report["inversions"] = rows;
}

}  // namespace weaklink::app::detail
