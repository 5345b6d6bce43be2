#include "ekrylov_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace ekrylov::cli {

namespace {

namespace fs = std::filesystem;

/// Output scaling: times in 1/sigma and frequencies in sigma unless absolute
/// units were asked for or the distribution has no width.
struct Units {
  bool relative = false;
  double scale = 1.0;

  double time(double t) const { return relative ? t * scale : t; }
  double freq(double w) const { return relative ? w / scale : w; }
  std::string name() const { return relative ? "sigma" : "absolute"; }
};

Units units_for(const RunConfig& c, const SpectralDistribution& dist) {
  Units u;
  const double s = width(dist);
  if (c.units == "sigma" && s > 0.0) {
    u.relative = true;
    u.scale = s;
  }
  return u;
}

double t_max_absolute(const RunConfig& c, const Units& u) { return u.relative ? c.t_max / u.scale : c.t_max; }

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
  return f;
}

Metadata base_metadata(const RunConfig& c, const std::string& command, const SpectralDistribution& dist,
                       const Units& u) {
  return {{"config", config_hash(c)},
          {"command", command},
          {"family", family_name(dist)},
          {"units", u.name()},
          {"scale", format_double(u.scale)}};
}

ChainCoefficients rescaled(ChainCoefficients c, const Units& u) {
  for (double& a : c.alphas) a = u.freq(a);
  for (double& b : c.betas) b = u.freq(b);
  c.g_eff = u.freq(c.g_eff);
  c.center = u.freq(c.center);
  return c;
}

std::string resolve_route(const std::string& route, const SpectralDistribution& dist) {
  if (route != "auto") return route;
  if (std::holds_alternative<Discrete>(dist)) return "stieltjes";
  if (std::holds_alternative<TsallisQGaussian>(dist)) return "hankel";
  return "closed-form";
}

ChainCoefficients single_site(const SpectralDistribution& dist, Provenance p) {
  ChainCoefficients c;
  c.center = center(dist);
  c.alphas = {c.center};
  c.provenance = p;
  return c;
}

ChainCoefficients ensemble_coefficients(const SpectralDistribution& dist, const std::string& route, int sites) {
  const auto* discrete = std::get_if<Discrete>(&dist);
  if (route == "closed-form") {
    if (discrete || std::holds_alternative<TsallisQGaussian>(dist))
      throw UnsupportedOperation("route closed-form does not apply to family " + family_name(dist) +
                                 "; valid routes: " + (discrete ? "stieltjes, hankel" : "hankel"));
    return sites == 1 ? single_site(dist, Provenance::ClosedForm) : closed_form_coefficients(dist, sites);
  }
  if (route == "hankel") {
    if (sites == 1) return single_site(dist, Provenance::Hankel);
    return hankel_coefficients(moments(dist, 2 * sites - 2, discrete == nullptr), sites);
  }
  if (route == "stieltjes") {
    if (!discrete)
      throw UnsupportedOperation("route stieltjes needs a discrete ensemble (family discrete or --spins N); valid "
                                 "routes for " + family_name(dist) + ": " +
                                 (std::holds_alternative<TsallisQGaussian>(dist) ? "hankel" : "closed-form, hankel"));
    return stieltjes_coefficients(*discrete, sites);
  }
  throw InvalidArgument("unknown route '" + route + "'");
}

double coupling_for(const RunConfig& c, const SpectralDistribution& dist) {
  if (const auto* d = std::get_if<Discrete>(&dist)) return collective_coupling(*d);
  return c.g_eff;
}

struct Pipeline {
  SpectralDistribution dist;
  Units units;
  ChainCoefficients coeffs;
  KrylovChain chain;
  std::vector<double> times;
};

Pipeline prepare(const RunConfig& c, bool need_chain = true) {
  Pipeline p;
  p.dist = make_distribution(c);
  p.units = units_for(c, p.dist);
  p.coeffs = build_coefficients(c, p.dist, c.route);
  if (need_chain) {
    p.chain = build_chain(p.coeffs, c.M, Frame::Rotating);
    p.times = uniform_grid(t_max_absolute(c, p.units), c.points);
  }
  return p;
}

std::vector<double> scaled_times(const std::vector<double>& t, const Units& u) {
  std::vector<double> out(t.size());
  std::transform(t.begin(), t.end(), out.begin(), [&](double x) { return u.time(x); });
  return out;
}

EvolutionResult run_evolution(const RunConfig& c, const Pipeline& p) {
  if (c.initial < 0 || c.initial >= p.chain.dimension()) {
    std::ostringstream msg;
    msg << "time.initial = " << c.initial << " lies outside the chain of " << p.chain.dimension() << " sites";
    throw InvalidArgument(msg.str());
  }
  const StateVector psi0 = StateVector::basis(p.chain.dimension(), c.initial);
  if (c.method == "laguerre") return evolve_laguerre(p.coeffs, psi0, p.times, p.chain.dimension() - 1);
  if (c.method == "spectral") return evolve_spectral(p.coeffs, p.dist, psi0, p.times);
  return evolve_eig(p.chain, psi0, p.times);
}

std::vector<std::string> reflection_notes(const RunConfig& c, const Pipeline& p) {
  std::vector<std::string> notes;
  const double t_abs = t_max_absolute(c, p.units);
  if (t_abs > 0.8 * p.chain.reflection_time) {
    std::ostringstream msg;
    msg << "warning: t_max = " << format_double(p.units.time(t_abs)) << " exceeds 0.8 t_reflect = "
        << format_double(0.8 * p.units.time(p.chain.reflection_time)) << "; boundary reflections may appear";
    notes.push_back(msg.str());
  }
  if (p.chain.clipped) {
    std::ostringstream msg;
    msg << "note: chain terminated; dimension clipped from " << p.chain.requested_dimension << " to "
        << p.chain.dimension();
    notes.push_back(msg.str());
  }
  return notes;
}

QSLReport scaled_qsl(QSLReport r, const Units& u) {
  for (auto& e : r.entries) e.tau = u.time(e.tau);
  r.tau0 = u.time(r.tau0);
  r.tauL = u.time(r.tauL);
  r.g_ens = u.freq(r.g_ens);
  r.sigma = u.freq(r.sigma);
  for (double& d : r.delta_h) d = u.freq(d);
  return r;
}

std::vector<std::pair<int, int>> pairs_inside(const RunConfig& c, int dimension) {
  std::vector<std::pair<int, int>> kept;
  for (const auto& pr : c.pairs)
    if (pr.first >= 0 && pr.second >= 0 && pr.first < dimension && pr.second < dimension) kept.push_back(pr);
  return kept;
}

ChainCoefficients truncated(ChainCoefficients c, int sites) {
  if (c.size() > sites) {
    c.alphas.resize(static_cast<std::size_t>(sites));
    c.betas.resize(static_cast<std::size_t>(sites - 1));
    c.valid_order = std::min(c.valid_order, sites - 1);
  }
  return c;
}

void write_correlator_file(const RunConfig& c, const Pipeline& p, const Metadata& meta, std::ostream& out) {
  const int r_max = std::min(c.r_max, p.chain.dimension() - 2);
  CorrelatorGrid grid = correlator(p.chain, r_max, p.times);
  grid.times = scaled_times(grid.times, p.units);
  auto f = open_output(c, "correlator.csv");
  write_correlator(f, grid, meta);
  out << "wrote " << (fs::path(c.out) / "correlator.csv").string() << " (r_max = " << r_max << ")\n";
}

void write_qsl_file(const RunConfig& c, const Pipeline& p, const std::vector<std::pair<int, int>>& pairs,
                    const Metadata& meta, std::ostream& out) {
  const ChainCoefficients used = truncated(p.coeffs, p.chain.dimension());
  const QSLReport rep = scaled_qsl(qsl_times(used, c.targets, pairs), p.units);
  auto f = open_output(c, "qsl.csv");
  write_qsl(f, rep, meta);
  out << "wrote " << (fs::path(c.out) / "qsl.csv").string() << " (tau0 = " << format_double(rep.tau0)
      << ", tauL = " << format_double(rep.tauL) << ")\n";
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalFailure*>(&e)) return kToleranceFailure;
  return kValidationError;
}

ChainCoefficients build_coefficients(const RunConfig& c, const SpectralDistribution& dist,
                                     const std::string& route_name) {
  if (c.M < 2) throw InvalidArgument("chain.M must be >= 2");
  const bool cavity = c.mode == "cavity-coupled";
  const int sites = cavity ? c.M - 1 : c.M;
  const std::string route = resolve_route(route_name, dist);
  ChainCoefficients e = ensemble_coefficients(dist, route, sites);
  if (!cavity) return e;
  return assemble(e, c.omega_c, coupling_for(c, dist));
}

int cmd_coefficients(const RunConfig& c, bool cross_check, std::ostream& out) {
  const SpectralDistribution dist = make_distribution(c);
  const Units u = units_for(c, dist);
  const ChainCoefficients coeffs = build_coefficients(c, dist, c.route);
  {
    auto f = open_output(c, "coefficients.csv");
    write_coefficients(f, rescaled(coeffs, u), base_metadata(c, "coefficients", dist, u));
  }
  out << "wrote " << (fs::path(c.out) / "coefficients.csv").string() << " (" << coeffs.size() << " sites, "
      << to_string(coeffs.provenance) << ")\n";
  if (!cross_check) return kSuccess;

  const bool discrete = std::holds_alternative<Discrete>(dist);
  std::vector<std::string> routes;
  if (!discrete && !std::holds_alternative<TsallisQGaussian>(dist)) routes.push_back("closed-form");
  routes.push_back("hankel");
  if (discrete) routes.push_back("stieltjes");

  RunConfig ensemble_only = c;
  ensemble_only.mode = "ensemble-only";
  std::vector<std::pair<std::string, ChainCoefficients>> results;
  for (const auto& r : routes) {
    try {
      results.emplace_back(r, build_coefficients(ensemble_only, dist, r));
    } catch (const ConditioningError& e) {
      out << "route " << r << ": unavailable beyond beta_" << e.valid_order() << " (" << e.what() << ")\n";
    } catch (const DivergentMoment& e) {
      out << "route " << r << ": unavailable (" << e.what() << ")\n";
    }
  }
  if (results.size() < 2) {
    out << "cross-check: fewer than two routes apply; nothing to compare\n";
    return kSuccess;
  }
  const double scale = width(dist);
  double worst = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const double d = max_relative_deviation(results[i].second, results[j].second, scale);
      worst = std::max(worst, d);
      out << "deviation " << results[i].first << " vs " << results[j].first << ": " << format_double(d) << "\n";
    }
  }
  const bool ok = worst <= c.tolerance;
  out << "max deviation: " << format_double(worst) << " (tolerance " << format_double(c.tolerance) << ") "
      << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kSuccess : kToleranceFailure;
}

int cmd_evolve(const RunConfig& c, std::ostream& out) {
  const Pipeline p = prepare(c);
  const EvolutionResult res = run_evolution(c, p);
  Metadata meta = base_metadata(c, "evolve", p.dist, p.units);
  meta.emplace_back("provenance", to_string(p.coeffs.provenance));
  meta.emplace_back("mode", to_string(p.coeffs.mode));
  meta.emplace_back("M", std::to_string(p.chain.dimension()));
  meta.emplace_back("initial", std::to_string(c.initial));
  const auto notes = reflection_notes(c, p);
  for (const auto& n : notes) out << n << "\n";

  EvolutionResult scaled = res;
  scaled.times = scaled_times(res.times, p.units);
  {
    auto f = open_output(c, "amplitudes.csv");
    write_amplitudes(f, scaled, meta, notes);
  }
  {
    auto f = open_output(c, "complexity.csv");
    write_complexity(f, scaled.times, krylov_complexity(res), meta);
  }
  {
    auto f = open_output(c, "coefficients.csv");
    write_coefficients(f, rescaled(truncated(p.coeffs, p.chain.dimension()), p.units),
                       base_metadata(c, "evolve", p.dist, p.units));
  }
  {
    VelocityProfile v = velocity_profile(p.chain, p.dist);
    for (double& x : v.v) x = p.units.freq(x);
    v.v_max = p.units.freq(v.v_max);
    if (v.analytic_bound) v.analytic_bound = p.units.freq(*v.analytic_bound);
    std::vector<double> betas(p.chain.offdiagonal.data(), p.chain.offdiagonal.data() + p.chain.offdiagonal.size());
    for (double& b : betas) b = p.units.freq(b);
    auto f = open_output(c, "velocity.csv");
    write_velocity(f, v, betas, meta);
  }
  out << "wrote amplitudes.csv, complexity.csv, coefficients.csv, velocity.csv to " << c.out
      << " (norm drift " << format_double(res.norm_drift) << ")\n";
  write_correlator_file(c, p, meta, out);
  write_qsl_file(c, p, pairs_inside(c, p.chain.dimension()), meta, out);
  return kSuccess;
}

int cmd_correlator(const RunConfig& c, std::ostream& out) {
  const Pipeline p = prepare(c);
  if (c.r_max + 1 >= p.chain.dimension()) {
    std::ostringstream msg;
    msg << "metrics.r_max = " << c.r_max << " needs r_max + 1 < M = " << p.chain.dimension();
    throw InvalidArgument(msg.str());
  }
  Metadata meta = base_metadata(c, "correlator", p.dist, p.units);
  meta.emplace_back("provenance", to_string(p.coeffs.provenance));
  meta.emplace_back("M", std::to_string(p.chain.dimension()));
  for (const auto& n : reflection_notes(c, p)) out << n << "\n";
  write_correlator_file(c, p, meta, out);
  return kSuccess;
}

int cmd_qsl(const RunConfig& c, std::ostream& out) {
  const Pipeline p = prepare(c);
  Metadata meta = base_metadata(c, "qsl", p.dist, p.units);
  meta.emplace_back("provenance", to_string(p.coeffs.provenance));
  meta.emplace_back("mode", to_string(p.coeffs.mode));
  write_qsl_file(c, p, c.pairs, meta, out);
  return kSuccess;
}

int cmd_oracle_compare(const RunConfig& c, std::ostream& out) {
  const SpectralDistribution source = [&] {
    RunConfig unsampled = c;
    unsampled.spins = 0;
    return make_distribution(unsampled);
  }();
  const SpectralDistribution dist = make_distribution(c);
  const auto* ens = std::get_if<Discrete>(&dist);
  if (!ens) throw InvalidArgument("oracle-compare needs a discrete ensemble: set --spins N or --family discrete");
  const int n_spins = static_cast<int>(ens->spins.size());
  if (n_spins > kOracleMaxSpins) {
    std::ostringstream msg;
    msg << "oracle: " << n_spins << " spins exceed the dense-oracle limit of " << kOracleMaxSpins;
    throw InvalidArgument(msg.str());
  }
  const Units u = units_for(c, dist);
  const double scale = width(dist) > 0.0 ? width(dist) : collective_coupling(*ens);

  if (c.against == "closed-form") {
    if (!is_continuous(source)) throw InvalidArgument("--against closed-form needs a continuous family with --spins");
    const ChainCoefficients sampled = stieltjes_coefficients(*ens, c.orders + 1);
    const ChainCoefficients exact = closed_form_coefficients(source, c.orders + 1);
    const Units su = units_for(c, source);
    double worst = 0.0;
    const std::size_t n = std::min(sampled.betas.size(), exact.betas.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double rel = std::abs(sampled.betas[k] - exact.betas[k]) / exact.betas[k];
      worst = std::max(worst, rel);
      out << "b_" << k + 1 << ": sampled " << format_double(su.freq(sampled.betas[k])) << ", closed form "
          << format_double(su.freq(exact.betas[k])) << ", relative deviation " << format_double(rel) << "\n";
    }
    const bool ok = worst <= c.tolerance;
    out << "max relative deviation: " << format_double(worst) << " (tolerance " << format_double(c.tolerance)
        << ") " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kSuccess : kToleranceFailure;
  }

  const bool cavity = c.mode == "cavity-coupled";
  const ChainCoefficients chain_coeffs = build_coefficients(c, dist, "stieltjes");
  Eigen::MatrixXd full;
  Eigen::VectorXd start;
  if (cavity) {
    const RestrictedHamiltonian h = build_restricted(*ens, c.omega_c);
    full = h.matrix;
    start = photon_state(h);
  } else {
    full = Eigen::MatrixXd::Zero(n_spins, n_spins);
    start.resize(n_spins);
    const double g = collective_coupling(*ens);
    for (int j = 0; j < n_spins; ++j) {
      full(j, j) = ens->spins[j].omega;
      start[j] = ens->spins[j].g / g;
    }
  }
  const int m = std::min<int>(c.M, static_cast<int>(full.rows()));
  const LanczosResult lanczos = explicit_lanczos(full, start, m, chain_coeffs.mode, chain_coeffs.center);
  const double coeff_dev = max_relative_deviation(chain_coeffs, lanczos.coeffs, scale);

  const int dim = std::min(chain_coeffs.size(), lanczos.coeffs.size());
  if (c.initial < 0 || c.initial >= dim) throw InvalidArgument("time.initial lies outside the Krylov space");
  const KrylovChain chain = build_chain(truncated(chain_coeffs, dim), std::max(dim, 2), Frame::Lab);
  const std::vector<double> times = uniform_grid(t_max_absolute(c, u), c.points);
  const EvolutionResult on_chain = evolve_eig(chain, StateVector::basis(chain.dimension(), c.initial), times);
  const Eigen::VectorXd full_start = lanczos.basis.col(c.initial);
  const EvolutionResult exact = evolve_dense(full, StateVector::from(full_start.cast<Complex>()), times);
  const Eigen::MatrixXcd projected = project(exact, lanczos.basis.leftCols(dim));
  const double amp_dev = (projected - on_chain.amplitudes.leftCols(dim)).cwiseAbs().maxCoeff();

  const double worst = std::max(coeff_dev, amp_dev);
  const bool ok = worst <= c.tolerance;
  out << "spins: " << n_spins << ", Krylov dimension: " << dim << ", mode: " << to_string(chain_coeffs.mode) << "\n";
  out << "coefficient deviation (stieltjes vs lanczos): " << format_double(coeff_dev) << "\n";
  out << "amplitude deviation (chain vs full space): " << format_double(amp_dev) << "\n";
  out << "full-space norm drift: " << format_double(exact.norm_drift) << "\n";
  out << "tolerance " << format_double(c.tolerance) << ": " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kSuccess : kToleranceFailure;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("sweep: expected key=start:stop:step or key=v1,v2");
  SweepSpec s;
  s.key = text.substr(0, eq);
  const std::string rhs = text.substr(eq + 1);
  if (rhs.find(':') != std::string::npos) {
    std::stringstream in(rhs);
    std::string a, b, st;
    std::getline(in, a, ':');
    std::getline(in, b, ':');
    std::getline(in, st, ':');
    const double start = parse_double(a), stop = parse_double(b), step = parse_double(st);
    if (!(step > 0.0) || stop < start) throw InvalidArgument("sweep: need step > 0 and stop >= start");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", start + k * step);
      double v = parse_double(buf);
      if (v == 0.0) v = 0.0;
      s.values.push_back(v);
    }
  } else {
    std::stringstream in(rhs);
    std::string cell;
    while (std::getline(in, cell, ',')) s.values.push_back(parse_double(cell));
  }
  if (s.values.empty()) throw InvalidArgument("sweep: no values");
  return s;
}

int cmd_sweep(const RunConfig& c, const SweepSpec& sweep, const std::string& command, int workers,
              std::ostream& out) {
  std::string key;
  for (const auto& k : config_keys()) {
    if (k == sweep.key || k.substr(k.find('.') + 1) == sweep.key) {
      if (!key.empty()) throw InvalidArgument("sweep: key '" + sweep.key + "' is ambiguous");
      key = k;
    }
  }
  if (key.empty()) throw InvalidArgument("sweep: unknown key '" + sweep.key + "'");
  if (command != "coefficients" && command != "evolve" && command != "correlator" && command != "qsl")
    throw InvalidArgument("sweep: command must be coefficients, evolve, correlator or qsl");
  const std::string short_name = key.substr(key.find('.') + 1);

  std::vector<RunConfig> runs;
  for (double v : sweep.values) {
    RunConfig r = c;
    set(r, key, format_double(v));
    r.out = (fs::path(c.out) / (short_name + "=" + format_double(v))).string();
    runs.push_back(std::move(r));
  }
  fs::create_directories(c.out);
  std::vector<std::string> logs(runs.size());
  std::vector<int> codes(runs.size(), kSuccess);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      std::ostringstream log;
      try {
        if (command == "coefficients") codes[i] = cmd_coefficients(runs[i], false, log);
        else if (command == "evolve") codes[i] = cmd_evolve(runs[i], log);
        else if (command == "correlator") codes[i] = cmd_correlator(runs[i], log);
        else codes[i] = cmd_qsl(runs[i], log);
      } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        codes[i] = exit_code_for(e);
      }
      logs[i] = log.str();
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kSuccess;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out << "[" << short_name << "=" << format_double(sweep.values[i]) << "]\n" << logs[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace ekrylov::cli
