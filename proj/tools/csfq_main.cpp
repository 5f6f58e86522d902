// csfq - command line tools for the three-junction capacitively shunted
// flux circuit model: spectra, fits, decoherence analytics, Monte Carlo
// noise studies, qutrit dynamics, randomized benchmarking, design search.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "csfq/circuit.hpp"
#include "csfq/decoherence.hpp"
#include "csfq/design.hpp"
#include "csfq/device_config.hpp"
#include "csfq/multilevel.hpp"
#include "csfq/noise_mc.hpp"
#include "csfq/parallel.hpp"
#include "csfq/photon_noise.hpp"
#include "csfq/rb.hpp"
#include "csfq/spectro_fit.hpp"

using namespace csfq;

namespace {

struct GlobalOpts {
  std::string device = "data/device_paper.cfg";
  std::string out;
  int threads = 0;
  bool stamp = false;
};

std::string now_string() {
  std::time_t t = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void finish_manifest(RunManifest& m, const GlobalOpts& g) {
  if (g.stamp) m.timestamp = now_string();
}

void emit(const GlobalOpts& g, const RunManifest& m, const Table& t) {
  if (g.out.empty()) {
    write_table(std::cout, m, t);
  } else {
    write_table_file(g.out, m, t);
    std::cerr << "wrote " << g.out << "\n";
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

SequenceSpec parse_sequence(const std::string& s) {
  if (s == "ramsey") return {0};
  if (s.rfind("cpmg:", 0) == 0) {
    const int n = std::stoi(s.substr(5));
    if (n < 1) throw ValidationError("cpmg pulse count must be >= 1");
    return {n};
  }
  throw ValidationError("sequence must be 'ramsey' or 'cpmg:N'");
}

int cmd_spectrum(const GlobalOpts& g, double from, double to, int points,
                 int levels) {
  const DeviceConfig cfg = load_device_config(g.device);
  if (levels < 3) levels = 3;
  Table t;
  t.columns = {"flux", "w01_ghz", "w12_ghz", "w02_ghz"};
  t.data.resize(points, 4);
  std::vector<Eigen::Vector4d> rows(points);
  parallel_for(points, [&](std::size_t i) {
    BiasPoint b;
    b.flux = points == 1 ? from : from + (to - from) * double(i) / (points - 1);
    const Spectrum s = diagonalize(cfg.circuit, b, levels);
    rows[i] << b.flux, transition(s, 0, 1) / ghz_to_rad,
        transition(s, 1, 2) / ghz_to_rad, transition(s, 0, 2) / ghz_to_rad;
  });
  for (int i = 0; i < points; ++i) t.data.row(i) = rows[i].transpose();

  RunManifest m;
  m.subcommand = "spectrum";
  m.params = {{"device", g.device},
              {"flux-from", std::to_string(from)},
              {"flux-to", std::to_string(to)},
              {"points", std::to_string(points)},
              {"levels", std::to_string(levels)}};
  finish_manifest(m, g);
  emit(g, m, t);
  return 0;
}

int cmd_fit(const GlobalOpts& g, const std::string& data_path) {
  const DeviceConfig cfg = load_device_config(g.device);
  const SpectroCsv csv = read_spectroscopy_csv(data_path);
  SpectroscopyDataset data;
  for (std::size_t i = 0; i < csv.flux.size(); ++i)
    data.rows.push_back({csv.flux[i], parse_transition_tag(csv.tag[i]),
                         csv.ghz[i], csv.weight[i]});
  const FitResult fit =
      fit_junctions(data, cfg.circuit.caps, cfg.circuit.jc,
                    cfg.circuit.alpha_j, cfg.circuit.area_large,
                    cfg.circuit.c_tilde);
  std::printf("jc = %.6g uA/um^2\n", fit.jc / 1e6);
  std::printf("alpha_j = %.6g\n", fit.alpha_j);
  std::printf("rms = %.6g GHz\n", fit.rms_ghz);
  std::printf("converged = %s\n", fit.converged ? "yes" : "no");
  std::printf("iterations = %d\n", fit.iterations);

  Table t;
  t.columns = {"flux", "measured_ghz", "residual_ghz"};
  t.data.resize(data.rows.size(), 3);
  for (std::size_t i = 0; i < data.rows.size(); ++i)
    t.data.row(i) << data.rows[i].flux, data.rows[i].ghz,
        fit.residuals_ghz[static_cast<int>(i)];
  RunManifest m;
  m.subcommand = "fit";
  m.params = {{"device", g.device}, {"data", data_path}};
  finish_manifest(m, g);
  if (!g.out.empty()) emit(g, m, t);
  return 0;
}

int cmd_coherence(const GlobalOpts& g, double a, double alpha, int n,
                  double tau_max_us, int points) {
  PowerLawPSD psd;
  psd.a = a;
  psd.alpha = alpha;
  Table t;
  t.columns = {"tau_s", "coherence", "coherence_approx"};
  t.data.resize(points, 3);
  for (int i = 0; i < points; ++i) {
    const double tau = tau_max_us * 1e-6 * (i + 1) / points;
    t.data.row(i) << tau, coherence_numeric(psd, n, tau),
        coherence_approx(psd, n, tau);
  }
  RunManifest m;
  m.subcommand = "coherence";
  m.params = {{"a", std::to_string(a)},
              {"alpha", std::to_string(alpha)},
              {"n", std::to_string(n)},
              {"tau-max", std::to_string(tau_max_us)},
              {"points", std::to_string(points)}};
  finish_manifest(m, g);
  emit(g, m, t);
  return 0;
}

int cmd_psd_extract(const GlobalOpts& g, const std::string& rates_path) {
  (void)g;
  const Eigen::MatrixXd raw = read_numeric_table(rates_path, 2);
  RateSet rates;
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    rates.n_pulses.push_back(int(std::lround(raw(i, 0))));
    rates.gamma.push_back(raw(i, 1));
  }
  const PsdFit fit = fit_powerlaw_psd(rates);
  std::printf("a = %.6e (rad/s)^(alpha+1)\n", fit.a);
  std::printf("alpha = %.6f\n", fit.alpha);
  return 0;
}

int cmd_mc(const GlobalOpts& g, double psd_a, double psd_alpha,
           const std::string& coupling_s, double k, const std::string& seq_s,
           const std::string& tau_list, int traj, std::uint64_t seed,
           int ns_base, int hist_bins) {
  PowerLawPSD psd;
  psd.a = psd_a;
  psd.alpha = psd_alpha;
  CouplingSpec coupling;
  if (coupling_s == "linear") {
    coupling.kind = CouplingSpec::Kind::linear;
    coupling.k1 = k;
  } else if (coupling_s == "quadratic") {
    coupling.kind = CouplingSpec::Kind::quadratic;
    coupling.k2 = k;
  } else {
    throw ValidationError("coupling must be linear or quadratic");
  }
  const SequenceSpec seq = parse_sequence(seq_s);
  const std::vector<double> taus_us = parse_list(tau_list);
  if (taus_us.empty()) throw ValidationError("empty tau list");

  RunManifest m;
  m.subcommand = "mc";
  m.seed = seed;
  m.params = {{"psd-a", std::to_string(psd_a)},
              {"psd-alpha", std::to_string(psd_alpha)},
              {"coupling", coupling_s},
              {"k", std::to_string(k)},
              {"sequence", seq_s},
              {"tau-list", tau_list},
              {"traj", std::to_string(traj)}};
  finish_manifest(m, g);

  if (hist_bins > 0) {
    // histogram of the per-sample frequency shifts at the first tau
    const double tau = taus_us[0] * 1e-6;
    const int ns = std::max(ns_base, 32 * std::max(1, seq.n_pulses));
    const double dt = tau / ns;
    PowerLawPSD banded = psd;
    banded.omega_max = std::min(psd.omega_max, 0.25 * pi / dt);
    const auto corr = correlation_from_psd(banded, dt, ns);
    const auto batch = sample_trajectories(corr, traj, seed, dt);
    const auto h = frequency_histogram(batch, coupling, hist_bins);
    Table t;
    t.columns = {"bin_center_rad_s", "count"};
    t.data.resize(hist_bins, 2);
    for (int i = 0; i < hist_bins; ++i)
      t.data.row(i) << 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]), h.counts[i];
    m.params.push_back({"histogram-bins", std::to_string(hist_bins)});
    m.params.push_back({"mean", std::to_string(h.mean)});
    m.params.push_back({"variance", std::to_string(h.variance)});
    m.params.push_back({"skewness", std::to_string(h.skewness)});
    emit(g, m, t);
    return 0;
  }

  Table t;
  t.columns = {"tau_s", "coherence", "stderr"};
  t.data.resize(taus_us.size(), 3);
  for (std::size_t i = 0; i < taus_us.size(); ++i) {
    const double tau = taus_us[i] * 1e-6;
    const auto pt = mc_coherence(psd, coupling, seq, tau, traj, seed, ns_base);
    t.data.row(i) << tau, pt.coherence, pt.stderr_est;
  }
  emit(g, m, t);
  return 0;
}

RateMatrix rates_from_file(const std::string& path) {
  auto kv = read_keyvalue_file(path);
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("missing rate '" + key + "' in " + path);
    double f = 1.0;
    const std::string& u = it->second.second;
    if (u == "Hz" || u == "1/s" || u.empty()) f = 1.0;
    else if (u == "kHz") f = 1e3;
    else if (u == "MHz") f = 1e6;
    else throw ParseError("bad rate unit '" + u + "' for " + key);
    return it->second.first * f;
  };
  RateMatrix r;
  r.gamma(0, 1) = get("gamma01");
  r.gamma(1, 0) = get("gamma10");
  r.gamma(1, 2) = get("gamma12");
  r.gamma(2, 1) = get("gamma21");
  r.gamma(0, 2) = get("gamma02");
  r.gamma(2, 0) = get("gamma20");
  r.validate();
  return r;
}

int cmd_relax(const GlobalOpts& g, const std::string& rates_path,
              const std::string& p0_s, double t_max_us, int points) {
  const RateMatrix rates = rates_from_file(rates_path);
  const auto p0v = parse_list(p0_s);
  if (p0v.size() != 3) throw ValidationError("p0 must have three entries");
  PopulationVector p0;
  p0.p << p0v[0], p0v[1], p0v[2];
  p0.validate();

  Table t;
  t.columns = {"t_s", "p0", "p1", "p2"};
  t.data.resize(points, 4);
  for (int i = 0; i < points; ++i) {
    const double tt = t_max_us * 1e-6 * i / std::max(1, points - 1);
    const auto p = evolve_populations(rates, p0, tt);
    t.data.row(i) << tt, p.p[0], p.p[1], p.p[2];
  }
  RunManifest m;
  m.subcommand = "relax";
  m.params = {{"rates", rates_path},
              {"p0", p0_s},
              {"t-max", std::to_string(t_max_us)},
              {"points", std::to_string(points)}};
  finish_manifest(m, g);
  emit(g, m, t);
  return 0;
}

int cmd_fit_relax(const GlobalOpts& g, const std::string& traces_path,
                  double gamma10, double gamma01, double temp_mk,
                  double flux) {
  const DeviceConfig cfg = load_device_config(g.device);
  BiasPoint b;
  b.flux = flux;
  const Spectrum s = diagonalize(cfg.circuit, b, 3);
  const double w12 = transition(s, 1, 2);
  const double w02 = transition(s, 0, 2);

  const Eigen::MatrixXd raw = read_numeric_table(traces_path, 4);
  PopulationTrace trace;
  trace.times = raw.col(0);
  trace.populations = raw.rightCols(3);
  const RelaxationFit fit = fit_relaxation(trace, gamma10, gamma01,
                                           temp_mk * 1e-3, w12, w02);
  const RateMatrix r = boltzmann_rate_matrix(gamma10, gamma01, fit.gamma21,
                                             fit.gamma20, w12, w02,
                                             temp_mk * 1e-3);
  std::printf("gamma01 = %.6g Hz\n", r.gamma(0, 1));
  std::printf("gamma10 = %.6g Hz\n", r.gamma(1, 0));
  std::printf("gamma12 = %.6g Hz\n", r.gamma(1, 2));
  std::printf("gamma21 = %.6g Hz\n", r.gamma(2, 1));
  std::printf("gamma02 = %.6g Hz\n", r.gamma(0, 2));
  std::printf("gamma20 = %.6g Hz\n", r.gamma(2, 0));
  std::printf("rms = %.6g\n", fit.rms);
  std::printf("converged = %s\n", fit.converged ? "yes" : "no");
  return 0;
}

int cmd_photon(const GlobalOpts& g, double chi_mhz, double kappa_mhz,
               double temp_mk, const std::string& seq_s,
               const std::string& tau_list, int traj, std::uint64_t seed,
               std::optional<double> omega_r_ghz) {
  double omega_r;
  if (omega_r_ghz) {
    omega_r = 2.0 * pi * (*omega_r_ghz) * 1e9;
  } else {
    const DeviceConfig cfg = load_device_config(g.device);
    if (!cfg.cavity) throw ValidationError("device file has no [cavity] section");
    omega_r = cfg.cavity->omega_r;
  }
  PhotonNoiseParams p;
  p.omega_r = omega_r;
  p.q_factor = omega_r / (2.0 * pi * kappa_mhz * 1e6);
  p.chi = 2.0 * pi * chi_mhz * 1e6;
  p.n_th = n_thermal(temp_mk * 1e-3, omega_r);

  const SequenceSpec seq = parse_sequence(seq_s);
  const auto taus_us = parse_list(tau_list);
  if (taus_us.empty()) throw ValidationError("empty tau list");

  Table t;
  t.columns = {"tau_s", "coherence", "stderr"};
  t.data.resize(taus_us.size(), 3);
  DecayTrace trace;
  trace.times.resize(taus_us.size());
  trace.coherence.resize(taus_us.size());
  for (std::size_t i = 0; i < taus_us.size(); ++i) {
    const double tau = taus_us[i] * 1e-6;
    const auto pt = dephasing_decay(p, seq, tau, traj, seed);
    t.data.row(i) << tau, pt.coherence, pt.stderr_est;
    trace.times[static_cast<int>(i)] = tau;
    trace.coherence[static_cast<int>(i)] = std::min(1.0, pt.coherence);
  }
  RunManifest m;
  m.subcommand = "photon";
  m.seed = seed;
  m.params = {{"chi-mhz", std::to_string(chi_mhz)},
              {"kappa-mhz", std::to_string(kappa_mhz)},
              {"temp-mk", std::to_string(temp_mk)},
              {"n-th", std::to_string(p.n_th)},
              {"sequence", seq_s},
              {"traj", std::to_string(traj)}};
  finish_manifest(m, g);
  emit(g, m, t);

  if (taus_us.size() >= 5) {
    const DecayFit fit = fit_decay(trace, DecayModel::exponential);
    std::printf("fitted_rate = %.6g Hz\n", fit.rate);
  }
  std::printf("analytic_ramsey_rate = %.6g Hz\n", ramsey_rate_analytic(p));
  return 0;
}

int cmd_rb(const GlobalOpts& g, int levels, const std::string& rwa_s,
           const std::string& cr_s, std::uint64_t seed,
           const std::string& fit_table, int randomizations,
           const std::string& lengths_s) {
  if (!fit_table.empty()) {
    const ReadTable t = read_table_file(fit_table);
    RbTable table;
    for (Eigen::Index i = 0; i < t.data.rows(); ++i)
      table.rows.push_back({int(std::lround(t.data(i, 0))),
                            int(std::lround(t.data(i, 1))), t.data(i, 2), 0.0});
    const RbFit fit = fit_rb(table);
    std::printf("a0 = %.6g\n", fit.a0);
    std::printf("b0 = %.6g\n", fit.b0);
    std::printf("p = %.8f\n", fit.p);
    std::printf("f_ave = %.6f %%\n", 100.0 * fit.f_ave);
    std::printf("f_ave_stderr = %.3g %%\n", 100.0 * fit.f_stderr);
    return 0;
  }

  const DeviceConfig cfg = load_device_config(g.device);
  if (!cfg.pulse) throw ValidationError("device file has no [pulse] section");

  RbConfig rb;
  rb.levels = levels;
  rb.rwa = rwa_s == "on";
  rb.counter_rotating = cr_s == "on";
  if (rb.counter_rotating) rb.rwa = false;
  rb.seed = seed;
  rb.randomizations = randomizations;
  if (!lengths_s.empty()) {
    rb.lengths.clear();
    for (double v : parse_list(lengths_s)) rb.lengths.push_back(int(v));
  }
  // measured qubit rates; pure dephasing at the Ramsey rate
  rb.gamma10 = 29.5e3;
  rb.gamma01 = 1.4e3;
  rb.gamma_phi = 1.0 / 4.7e-6;
  rb.gamma21 = 124.3e3;
  rb.gamma12 = 8.8;
  rb.gamma20 = 27.8e3;
  rb.gamma02 = 0.1;

  BiasPoint b;
  const Spectrum s = diagonalize(cfg.circuit, b, 3);
  rb.omega01 = transition(s, 0, 1);
  rb.anharmonicity = transition(s, 1, 2) - transition(s, 0, 1);
  rb.drive_ratio_12 = drive_matrix_element(cfg.circuit, b, 1, 2) /
                      drive_matrix_element(cfg.circuit, b, 0, 1);

  const RbTable table = run_rb(rb, *cfg.pulse);
  Table t;
  t.columns = {"length", "randomization", "survival", "end_p2"};
  t.data.resize(table.rows.size(), 4);
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    t.data.row(i) << table.rows[i].length, table.rows[i].randomization,
        table.rows[i].survival, table.rows[i].end_p2;
  RunManifest m;
  m.subcommand = "rb";
  m.seed = seed;
  m.params = {{"levels", std::to_string(levels)},
              {"rwa", rb.rwa ? "on" : "off"},
              {"counter-rotating", rb.counter_rotating ? "on" : "off"},
              {"randomizations", std::to_string(randomizations)}};
  finish_manifest(m, g);
  emit(g, m, t);

  const RbFit fit = fit_rb(table);
  std::printf("p = %.8f\n", fit.p);
  std::printf("f_ave = %.6f %%\n", 100.0 * fit.f_ave);
  return 0;
}

int cmd_design(const GlobalOpts& g, const std::string& targets_path,
               const std::string& mode_s, std::uint64_t seed) {
  const DeviceConfig cfg = load_device_config(g.device);
  auto kv = read_keyvalue_file(targets_path);
  auto freq = [&](const std::string& key) -> std::optional<double> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    const std::string& u = it->second.second;
    double f;
    if (u == "GHz") f = 2.0 * pi * 1e9;
    else if (u == "MHz") f = 2.0 * pi * 1e6;
    else if (u == "kHz") f = 2.0 * pi * 1e3;
    else if (u == "Hz") f = 2.0 * pi;
    else throw ParseError("bad frequency unit for " + key);
    return it->second.first * f;
  };
  auto current = [&](const std::string& key) -> std::optional<double> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    const std::string& u = it->second.second;
    double f;
    if (u == "nA") f = 1e-9;
    else if (u == "uA") f = 1e-6;
    else if (u == "A") f = 1.0;
    else throw ParseError("bad current unit for " + key);
    return it->second.first * f;
  };

  DesignTargets targets;
  if (auto v = freq("omega01")) targets.omega01 = {*v, 1.0, std::nullopt};
  if (auto v = freq("anharmonicity"))
    targets.anharmonicity = {*v, 1.0, std::nullopt};
  if (auto v = current("persistent_current"))
    targets.persistent_current = {*v, 1.0, std::nullopt};
  if (auto v = freq("charge_mod_bound")) {
    targets.charge_mod_01.hard_bound = *v;
    targets.charge_mod_12.hard_bound = *v;
    targets.charge_mod_02.hard_bound = *v;
  }

  const PadMode mode =
      mode_s == "two_pad" ? PadMode::two_pad : PadMode::three_pad;

  // neutral start derived from the loaded device
  DesignVector init;
  init.lambda3 = cfg.circuit.alpha_j;
  init.lambda2 = cfg.circuit.alpha_j * cfg.circuit.area_large;
  init.lambda1 = cfg.circuit.caps.c32 - init.lambda2 * cfg.circuit.c_tilde;
  init.lambda4 = 0.5 * (cfg.circuit.caps.c21 + cfg.circuit.caps.c13) /
                     init.lambda1 -
                 init.lambda2 * cfg.circuit.c_tilde /
                     (init.lambda3 * init.lambda1);
  init.lambda5 = cfg.circuit.caps.c01 / init.lambda1;
  init.lambda6 =
      0.5 * (cfg.circuit.caps.c02 + cfg.circuit.caps.c03) / init.lambda1;

  const DesignOptResult res = optimize(targets, cfg.circuit.jc,
                                       cfg.circuit.c_tilde, mode, seed, init);
  std::printf("feasible = %s\n", res.feasible ? "yes" : "no");
  std::printf("lambda1 = %.6g fF\n", res.best.lambda1 * 1e15);
  std::printf("lambda2 = %.6g um^2\n", res.best.lambda2 * 1e12);
  std::printf("lambda3 = %.6g\n", res.best.lambda3);
  std::printf("lambda4 = %.6g\n", res.best.lambda4);
  std::printf("lambda5 = %.6g\n", res.best.lambda5);
  std::printf("lambda6 = %.6g\n", res.best.lambda6);
  std::printf("omega01 = %.6g GHz\n", res.best_metrics.omega01 / ghz_to_rad);
  std::printf("anharmonicity = %.6g GHz\n",
              res.best_metrics.anharmonicity / ghz_to_rad);
  std::printf("persistent_current = %.6g nA\n",
              res.best_metrics.persistent_current * 1e9);
  std::printf("charge_mod_01 = %.6g Hz\n",
              res.best_metrics.charge_mod_01 / (2.0 * pi));
  std::printf("charge_mod_12 = %.6g Hz\n",
              res.best_metrics.charge_mod_12 / (2.0 * pi));
  std::printf("charge_mod_02 = %.6g Hz\n",
              res.best_metrics.charge_mod_02 / (2.0 * pi));
  std::printf("objective = %.6g\n", res.objective);

  if (!g.out.empty()) {
    Table t;
    t.columns = {"restart", "objective", "target_error"};
    t.data.resize(res.trace.size(), 3);
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      t.data.row(i) << res.trace[i].restart, res.trace[i].objective,
          res.trace[i].target_error;
    RunManifest m;
    m.subcommand = "design";
    m.seed = seed;
    m.params = {{"targets", targets_path}, {"mode", mode_s}};
    finish_manifest(m, g);
    emit(g, m, t);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-junction capacitively shunted flux circuit toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--device", g.device, "device parameter file");
  app.add_option("--out", g.out, "output table path (default: stdout)");
  app.add_option("--threads", g.threads, "worker thread count");
  app.add_flag("--stamp", g.stamp, "include a wall-clock timestamp in headers");

  // spectrum
  double flux_from = 0.498, flux_to = 0.502;
  int points = 41, levels = 3;
  auto* sp = app.add_subcommand("spectrum", "transition frequencies vs flux");
  sp->add_option("--flux-from", flux_from);
  sp->add_option("--flux-to", flux_to);
  sp->add_option("--points", points);
  sp->add_option("--levels", levels);

  // fit
  std::string fit_data;
  auto* ft = app.add_subcommand("fit", "fit junction parameters to spectroscopy");
  ft->add_option("--data", fit_data)->required();

  // coherence
  double coh_a = 0, coh_alpha = 0.68, coh_tau_max = 10;
  int coh_n = 1, coh_points = 50;
  auto* ch = app.add_subcommand("coherence", "analytic CPMG decay curve");
  ch->add_option("--a", coh_a)->required();
  ch->add_option("--alpha", coh_alpha)->required();
  ch->add_option("--n", coh_n)->required();
  ch->add_option("--tau-max", coh_tau_max, "max tau in us");
  ch->add_option("--points", coh_points);

  // psd-extract
  std::string rates_path;
  auto* pe = app.add_subcommand("psd-extract", "power-law PSD from CPMG rates");
  pe->add_option("--rates", rates_path)->required();

  // mc
  double mc_a = 0, mc_alpha = 0.68, mc_k = 0;
  std::string mc_coupling = "linear", mc_seq = "cpmg:1", mc_taus;
  int mc_traj = 1024, mc_ns = 512, mc_hist = 0;
  std::uint64_t mc_seed = 0;
  auto* mc = app.add_subcommand("mc", "flux-noise Monte Carlo dephasing");
  mc->add_option("--psd-a", mc_a)->required();
  mc->add_option("--psd-alpha", mc_alpha)->required();
  mc->add_option("--coupling", mc_coupling);
  mc->add_option("--k", mc_k)->required();
  mc->add_option("--sequence", mc_seq);
  mc->add_option("--tau-list", mc_taus, "comma list, us")->required();
  mc->add_option("--traj", mc_traj);
  mc->add_option("--seed", mc_seed)->required();
  mc->add_option("--ns-base", mc_ns);
  mc->add_option("--histogram-bins", mc_hist,
                 "emit a frequency-shift histogram instead");

  // relax
  std::string relax_rates, relax_p0 = "0,0,1";
  double relax_tmax = 100;
  int relax_points = 101;
  auto* rx = app.add_subcommand("relax", "qutrit population relaxation");
  rx->add_option("--rates", relax_rates)->required();
  rx->add_option("--p0", relax_p0);
  rx->add_option("--t-max", relax_tmax, "us");
  rx->add_option("--points", relax_points);

  // fit-relax
  std::string fr_traces;
  double fr_g10 = 29.5e3, fr_g01 = 1.4e3, fr_temp = 27, fr_flux = 0.5;
  auto* fr = app.add_subcommand("fit-relax", "fit qutrit relaxation rates");
  fr->add_option("--traces", fr_traces)->required();
  fr->add_option("--gamma10", fr_g10, "1/s");
  fr->add_option("--gamma01", fr_g01, "1/s");
  fr->add_option("--temp", fr_temp, "mK");
  fr->add_option("--flux", fr_flux);

  // photon
  double ph_chi = 0.5, ph_kappa = 0.6, ph_temp = 250;
  std::string ph_seq = "ramsey", ph_taus;
  int ph_traj = 2048;
  std::uint64_t ph_seed = 0;
  std::optional<double> ph_omega_r;
  double ph_omega_r_val = 0;
  auto* ph = app.add_subcommand("photon", "cavity photon-noise dephasing");
  ph->add_option("--chi-mhz", ph_chi);
  ph->add_option("--kappa-mhz", ph_kappa);
  ph->add_option("--temp-mk", ph_temp);
  ph->add_option("--sequence", ph_seq);
  ph->add_option("--tau-list", ph_taus, "comma list, us")->required();
  ph->add_option("--traj", ph_traj);
  ph->add_option("--seed", ph_seed)->required();
  auto* ph_or = ph->add_option("--omega-r-ghz", ph_omega_r_val);

  // rb
  int rb_levels = 2, rb_rand = 32;
  std::string rb_rwa = "on", rb_cr = "off", rb_fit_table, rb_lengths;
  std::uint64_t rb_seed = 0;
  auto* rb = app.add_subcommand("rb", "randomized benchmarking simulation");
  rb->add_option("--levels", rb_levels);
  rb->add_option("--rwa", rb_rwa)->check(CLI::IsMember({"on", "off"}));
  rb->add_option("--counter-rotating", rb_cr)
      ->check(CLI::IsMember({"on", "off"}));
  auto* rb_seed_opt = rb->add_option("--seed", rb_seed);
  rb->add_option("--fit", rb_fit_table, "fit an existing rb table instead");
  rb->add_option("--randomizations", rb_rand);
  rb->add_option("--lengths", rb_lengths, "comma list of sequence lengths");

  // design
  std::string design_targets, design_mode = "three_pad";
  std::uint64_t design_seed = 0;
  auto* dg = app.add_subcommand("design", "six-parameter design search");
  dg->add_option("--targets", design_targets)->required();
  dg->add_option("--mode", design_mode)
      ->check(CLI::IsMember({"three_pad", "two_pad"}));
  dg->add_option("--seed", design_seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (g.threads > 0) set_default_thread_count(g.threads);

  try {
    if (*sp) return cmd_spectrum(g, flux_from, flux_to, points, levels);
    if (*ft) return cmd_fit(g, fit_data);
    if (*ch) return cmd_coherence(g, coh_a, coh_alpha, coh_n, coh_tau_max,
                                  coh_points);
    if (*pe) return cmd_psd_extract(g, rates_path);
    if (*mc) return cmd_mc(g, mc_a, mc_alpha, mc_coupling, mc_k, mc_seq,
                           mc_taus, mc_traj, mc_seed, mc_ns, mc_hist);
    if (*rx) return cmd_relax(g, relax_rates, relax_p0, relax_tmax,
                              relax_points);
    if (*fr) return cmd_fit_relax(g, fr_traces, fr_g10, fr_g01, fr_temp,
                                  fr_flux);
    if (*ph) {
      if (ph_or->count() > 0) ph_omega_r = ph_omega_r_val;
      return cmd_photon(g, ph_chi, ph_kappa, ph_temp, ph_seq, ph_taus, ph_traj,
                        ph_seed, ph_omega_r);
    }
    if (*rb) {
      if (rb_fit_table.empty() && rb_seed_opt->count() == 0)
        throw ValidationError("rb simulation requires an explicit --seed");
      return cmd_rb(g, rb_levels, rb_rwa, rb_cr, rb_seed, rb_fit_table,
                    rb_rand, rb_lengths);
    }
    if (*dg) return cmd_design(g, design_targets, design_mode, design_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
