#include "medianflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"
#include "medianflow/random.hpp"
#include "medianflow/snapshot.hpp"

namespace medianflow {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string source_arg(const std::string& s) { return s.substr(s.find(':') + 1); }
std::string source_kind(const std::string& s) { return s.substr(0, s.find(':')); }

json field_json(const SpectralField& f) {
  std::vector<double> re, im;
  for (std::size_t idx : f.grid().active_index()) {
    re.push_back(f.at(idx).real());
    im.push_back(f.at(idx).imag());
  }
  return json{{"re", re}, {"im", im}};
}

SpectralField field_from_json(const WaveGrid& g, const json& j) {
  auto re = j.at("re").get<std::vector<double>>();
  auto im = j.at("im").get<std::vector<double>>();
  const auto& idx = g.active_index();
  if (re.size() != idx.size() || im.size() != idx.size()) throw std::runtime_error("checkpoint: field size mismatch");
  SpectralField f(g);
  for (std::size_t a = 0; a < idx.size(); ++a) f.raw()[idx[a]] = Complex(re[a], im[a]);
  return f;
}

}  // namespace

WaveGrid grid_from(const ExperimentConfig& cfg) { return make_grid(cfg.grid.n, Fraction::parse(cfg.grid.dealias)); }

SpectralField annulus_field(const WaveGrid& g, int M0, Rng& rng) {
  if (M0 < 1 || M0 > g.cutoff()) throw std::invalid_argument("annulus radius outside the active set");
  SpectralField f(g);
  const long hi = long(M0) * M0, lo = long(M0 - 1) * (M0 - 1);
  for (std::size_t idx : g.pair_representatives()) {
    long k2 = g.wavenumber(idx).norm2();
    double phase = 2.0 * std::numbers::pi * rng.uniform();
    if (k2 > lo && k2 <= hi) f.set_at(idx, std::polar(1.0, phase));
  }
  f *= 1.0 / sobolev_norm(f, 0.0);
  return f;
}

SpectralField initial_scalar(const ExperimentConfig& cfg, const WaveGrid& g, std::uint64_t seed) {
  const auto kind = source_kind(cfg.scalar.rho0);
  const auto arg = source_arg(cfg.scalar.rho0);
  if (kind == "mode") {
    int m = std::stoi(arg);
    if (m < 1 || m > g.cutoff()) throw std::invalid_argument("scalar.rho0 mode outside the active set");
    SpectralField f(g);
    f.set({m, 0}, 1.0);
    return f;
  }
  if (kind == "annulus") {
    Rng rng(seed_for(seed, 0x0A11u));
    return annulus_field(g, std::stoi(arg), rng);
  }
  if (kind == "file") return read_snapshot(arg, g);
  throw std::invalid_argument("unknown scalar.rho0 '" + cfg.scalar.rho0 + "'");
}

SpectralField initial_vorticity(const ExperimentConfig& cfg, const WaveGrid& g, std::uint64_t seed) {
  const auto kind = source_kind(cfg.flow.u0);
  if (kind == "zero") return SpectralField(g);
  if (kind == "random") {
    Rng rng(seed_for(seed, 0x0B0Bu));
    auto w = random_field(g, rng, std::stod(source_arg(cfg.flow.u0)));
    w *= 1.0 / sobolev_norm(w, 0.0);
    return w;
  }
  if (kind == "file") return read_snapshot(source_arg(cfg.flow.u0), g);
  throw std::invalid_argument("unknown flow.u0 '" + cfg.flow.u0 + "'");
}

// ---------------------------------------------------------------- coupled simulation

CoupledSimulation::CoupledSimulation(const ExperimentConfig& cfg, std::uint64_t seed, const SpectralField& rho0,
                                     double h)
    : grid_(rho0.grid()),
      model_(grid_, cfg.noise.alpha, cfg.noise.sigma, seed, cfg.noise.k_max),
      h_(h),
      flow_stepper_(model_, h, cfg.noise.substeps, cfg.flow.cfl),
      scalar_stepper_(parse_op_kind(cfg.scalar.op), cfg.scalar.kappa, h, parse_scheme(cfg.scalar.scheme), cfg.scalar.cfl),
      rng_(seed),
      flow_(initial_vorticity(cfg, grid_, seed)),
      scalar_(rho0, parse_op_kind(cfg.scalar.op), cfg.scalar.kappa),
      lns_(parse_op_kind(cfg.scalar.op) == OpKind::LNS) {
  now_ = sample_flow(flow_.u, lns_);
}

void CoupledSimulation::burn_in(double t_burn) {
  const long n = std::lround(t_burn / h_);
  for (long i = 0; i < n; ++i) flow_stepper_.step(flow_, rng_, &now_), now_ = sample_flow(flow_.u, lns_);
}

double CoupledSimulation::step() {
  // FK integrands at the left end point; the log increment is added after the step.
  accumulate_fk(fk_, scalar_, now_, h_, 0.0);
  flow_stepper_.step(flow_, rng_, &now_);
  FlowSamples next = sample_flow(flow_.u, lns_);
  double inc = scalar_stepper_.step(scalar_, now_, next);
  fk_.log_growth += inc;
  now_ = std::move(next);
  ++steps_;
  return inc;
}

std::string CoupledSimulation::save_state() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["flow_t"] = flow_.t;
  j["w"] = field_json(flow_.w);
  j["pi"] = field_json(scalar_.pi);
  j["log_amp"] = scalar_.log_amp;
  j["scalar_t"] = scalar_.t;
  j["fk"] = {{"t_accum", fk_.t_accum}, {"int_grad", fk_.int_grad}, {"int_stretch", fk_.int_stretch},
             {"log_growth", fk_.log_growth}, {"n_samples", fk_.n_samples}};
  j["steps"] = steps_;
  j["rng"] = rng_.save();
  return j.dump();
}

void CoupledSimulation::load_state(const std::string& text) {
  auto j = json::parse(text);
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::runtime_error("checkpoint: schema mismatch");
  flow_ = FlowState(field_from_json(grid_, j.at("w")), j.at("flow_t").get<double>());
  scalar_.pi = field_from_json(grid_, j.at("pi"));
  scalar_.log_amp = j.at("log_amp").get<double>();
  scalar_.t = j.at("scalar_t").get<double>();
  const auto& f = j.at("fk");
  fk_.t_accum = f.at("t_accum");
  fk_.int_grad = f.at("int_grad");
  fk_.int_stretch = f.at("int_stretch");
  fk_.log_growth = f.at("log_growth");
  fk_.n_samples = f.at("n_samples");
  steps_ = j.at("steps");
  rng_.restore(j.at("rng").get<std::string>());
  now_ = sample_flow(flow_.u, lns_);
}

// ---------------------------------------------------------------- run

namespace {

struct RunProgress {
  std::vector<double> times, log_amp;
  double median_sum = 0.0, filament_sum = 0.0;
  long rows = 0;
  std::uintmax_t csv_offset = 0;
};

std::string csv_row(const CoupledSimulation& sim) {
  const auto& s = sim.scalar();
  const auto& u = sim.samples();
  const double g = sobolev_norm(s.pi, 1.0);
  const double stretch = s.op == OpKind::LNS ? stretching_term(u, s.pi) : 0.0;
  std::string row;
  row += num(s.t) + "," + num(s.log_amp) + "," + num(log_derivative(s, u)) + "," + num(s.kappa * g * g) + "," +
         num(stretch) + "," + std::to_string(spectral_quantile(s.pi, 1.0)) + "," +
         std::to_string(spectral_quantile(s.pi, 2.0)) + "," + num(filament_scale(s.pi)) + "," +
         num(sobolev_norm(sim.flow().u, 0.0)) + "," + num(sobolev_norm(sim.flow().u, 1.0)) + "\n";
  return row;
}

void write_checkpoint(const std::string& path, const CoupledSimulation& sim, const RunProgress& p,
                      const std::string& hash, std::uint64_t seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["state"] = json::parse(sim.save_state());
  j["times"] = p.times;
  j["log_amp"] = p.log_amp;
  j["median_sum"] = p.median_sum;
  j["filament_sum"] = p.filament_sum;
  j["rows"] = p.rows;
  j["csv_offset"] = p.csv_offset;
  std::string tmp = path + ".tmp";
  write_text(tmp, j.dump());
  std::filesystem::rename(tmp, path);
}

}  // namespace

RunRecord run(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
  const auto wall0 = std::chrono::steady_clock::now();
  auto g = grid_from(cfg);
  const double h = cfg.flow.dt;
  const long total = std::lround(cfg.flow.t_total / h);
  const int every = cfg.experiment.output_every;
  const std::string hash = config_hash(cfg);

  CoupledSimulation sim(cfg, seed, initial_scalar(cfg, g, seed), h);
  RunProgress prog;
  std::ofstream csv;

  auto emit = [&]() {
    const auto& s = sim.scalar();
    prog.median_sum += spectral_quantile(s.pi, 1.0);
    prog.filament_sum += filament_scale(s.pi);
    ++prog.rows;
    if (csv.is_open()) csv << csv_row(sim);
  };

  if (opts.resume) {
    std::ifstream in(opts.checkpoint_path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + opts.checkpoint_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto j = json::parse(ss.str());
    if (j.at("config_hash").get<std::string>() != hash || j.at("seed").get<std::uint64_t>() != seed)
      throw std::runtime_error("checkpoint belongs to a different config or seed");
    sim.load_state(j.at("state").dump());
    prog.times = j.at("times").get<std::vector<double>>();
    prog.log_amp = j.at("log_amp").get<std::vector<double>>();
    prog.median_sum = j.at("median_sum");
    prog.filament_sum = j.at("filament_sum");
    prog.rows = j.at("rows");
    prog.csv_offset = j.at("csv_offset");
    if (!opts.csv_path.empty()) {
      std::filesystem::resize_file(opts.csv_path, prog.csv_offset);
      csv.open(opts.csv_path, std::ios::app | std::ios::binary);
    }
  } else {
    sim.burn_in(cfg.flow.t_burn);
    if (!opts.csv_path.empty()) {
      csv.open(opts.csv_path, std::ios::trunc | std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write '" + opts.csv_path + "'");
      csv << kTimeseriesHeader << "\n" << kTimeseriesColumns << "\n";
    }
    prog.times.push_back(0.0);
    prog.log_amp.push_back(sim.scalar().log_amp);
    emit();
  }

  const bool checkpointing = !opts.checkpoint_path.empty();
  RunRecord rec;
  rec.completed = true;
  while (sim.steps() < total) {
    if (opts.stop_after_steps >= 0 && sim.steps() >= opts.stop_after_steps) {
      rec.completed = false;
      break;
    }
    std::string backup;
    if (checkpointing) backup = sim.save_state();
    try {
      sim.step();
    } catch (const NumericalError&) {
      if (checkpointing) {
        sim.load_state(backup);
        if (csv.is_open()) csv.flush();
        prog.csv_offset = csv.is_open() ? std::uintmax_t(csv.tellp()) : 0;
        write_checkpoint(opts.checkpoint_path, sim, prog, hash, seed);
      }
      throw;
    }
    prog.times.push_back(sim.scalar().t);
    prog.log_amp.push_back(sim.scalar().log_amp);
    if (sim.steps() % every == 0 || sim.steps() == total) emit();
    if (!opts.snapshot_dir.empty() && cfg.experiment.snapshot_every > 0 &&
        sim.steps() % cfg.experiment.snapshot_every == 0) {
      std::filesystem::create_directories(opts.snapshot_dir);
      const std::string stem = opts.snapshot_dir + "/" + std::to_string(seed) + "_" + std::to_string(sim.steps());
      write_snapshot(stem + "_w.mfld", sim.flow().w);
      write_snapshot(stem + "_rho.mfld", sim.scalar().rho());
    }
    if (checkpointing && cfg.experiment.checkpoint_every > 0 && sim.steps() % cfg.experiment.checkpoint_every == 0) {
      csv.flush();
      prog.csv_offset = csv.is_open() ? std::uintmax_t(csv.tellp()) : 0;
      write_checkpoint(opts.checkpoint_path, sim, prog, hash, seed);
    }
  }
  if (csv.is_open()) csv.flush();
  if (!rec.completed && checkpointing) {
    prog.csv_offset = csv.is_open() ? std::uintmax_t(csv.tellp()) : 0;
    write_checkpoint(opts.checkpoint_path, sim, prog, hash, seed);
  }

  const auto& s = sim.scalar();
  const auto& fk = sim.fk();
  rec.config_hash = hash;
  rec.seed = seed;
  rec.kappa = s.kappa;
  rec.op = to_string(s.op);
  rec.t_scalar = s.t;
  rec.steps = sim.steps();
  if (rec.completed && s.t > cfg.scalar.t_discard) {
    auto est = estimate_lambda(prog.times, prog.log_amp, cfg.scalar.t_discard, cfg.experiment.batches);
    rec.lambda_hat = est.lambda;
    rec.lambda_se = est.std_err;
  }
  if (fk.t_accum > 0) {
    rec.fk_grad_mean = fk.int_grad / fk.t_accum;
    rec.fk_stretch_mean = fk.int_stretch / fk.t_accum;
  }
  rec.fk_residual = fk.residual();
  rec.final_median = spectral_quantile(s.pi, 1.0);
  rec.mean_median = prog.median_sum / double(prog.rows);
  rec.mean_filament = prog.filament_sum / double(prog.rows);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rec;
}

std::vector<std::uint64_t> ensemble_seeds(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < cfg.experiment.ensemble_size; ++i) out.push_back(seed_for(cfg.noise.seed, std::uint64_t(i)));
  return out;
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- sweep

SweepResult sweep(const ExperimentConfig& cfg, int threads) {
  auto kappas = cfg.scalar.kappa_list;
  std::sort(kappas.begin(), kappas.end());
  const auto seeds = ensemble_seeds(cfg);
  const int m = int(seeds.size());
  std::vector<RunRecord> recs(kappas.size() * seeds.size());
  parallel_for(int(recs.size()), threads, [&](int i) {
    ExperimentConfig c = cfg;
    c.scalar.kappa = kappas[std::size_t(i / m)];
    recs[std::size_t(i)] = run(c, seeds[std::size_t(i % m)]);
  });
  SweepResult out;
  std::vector<double> ks, fil, decay;
  for (std::size_t a = 0; a < kappas.size(); ++a) {
    std::vector<double> lam, f, med;
    for (int b = 0; b < m; ++b) {
      const auto& r = recs[a * std::size_t(m) + std::size_t(b)];
      lam.push_back(r.lambda_hat);
      f.push_back(r.mean_filament);
      med.push_back(r.mean_median);
    }
    SweepRow row;
    row.kappa = kappas[a];
    auto l = mean_se(lam);
    row.lambda_hat = l.mean;
    row.stderr_ = m > 1 ? l.se : recs[a * std::size_t(m)].lambda_se;
    row.mean_filament = mean_se(f).mean;
    row.mean_median = mean_se(med).mean;
    out.rows.push_back(row);
    ks.push_back(row.kappa);
    fil.push_back(row.mean_filament);
    decay.push_back(-row.lambda_hat);
  }
  try {
    out.filament_fit = fit_loglog(ks, fil);
  } catch (const std::exception& e) {
    out.filament_fit_error = e.what();
  }
  try {
    out.decay_fit = fit_loglog(ks, decay);
  } catch (const std::exception& e) {
    out.decay_fit_error = e.what();
  }
  return out;
}

// ---------------------------------------------------------------- stopping experiments

StoppingResult run_stopping_experiment(const ExperimentConfig& cfg, int M0, std::uint64_t seed, int trace_every) {
  auto g = grid_from(cfg);
  if (2 * M0 > g.cutoff())
    throw std::invalid_argument("M0 = " + std::to_string(M0) + " exceeds half the dealiasing cutoff");
  const double kappa = cfg.scalar.kappa, alpha = cfg.noise.alpha;
  StoppingResult res;
  res.horizon = cfg.experiment.horizon_factor * t_star(kappa, M0, alpha);
  const long horizon_steps = std::max(1L, long(std::ceil(res.horizon / cfg.flow.dt - 1e-9)));
  const double h = res.horizon / double(horizon_steps);

  ExperimentConfig c = cfg;
  c.scalar.rho0 = "annulus:" + std::to_string(M0);
  auto rho0 = initial_scalar(c, g, seed);
  if (spectral_quantile(rho0, 1.0) != M0) throw std::logic_error("annulus datum does not have median M0");
  CoupledSimulation sim(c, seed, rho0, h);
  sim.burn_in(cfg.flow.t_burn);

  StoppingTracker tracker(M0, kappa, alpha, cfg.experiment.delta, cfg.experiment.q);
  auto observe = [&]() {
    const auto& s = sim.scalar();
    int med = spectral_quantile(s.pi, 1.0), q2 = spectral_quantile(s.pi, 2.0);
    tracker.observe(s.t, med, q2);
    if (trace_every > 0 && sim.steps() % trace_every == 0) {
      res.trace.times.push_back(s.t);
      res.trace.median.push_back(med);
      res.trace.quantile2.push_back(q2);
      res.trace.filament.push_back(filament_scale(s.pi));
    }
    return med;
  };
  observe();
  bool at_horizon = false;
  while (!(at_horizon && tracker.eta_done())) {
    sim.step();
    int med = observe();
    if (sim.steps() == horizon_steps) {
      res.median_at_horizon = med;
      at_horizon = true;
    }
  }
  tracker.finish(sim.scalar().t);
  res.record = tracker.record();
  res.record.seed = seed;
  return res;
}

std::vector<MedianSummary> median_experiment(const ExperimentConfig& cfg, int threads) {
  const auto seeds = ensemble_seeds(cfg);
  std::vector<MedianSummary> out;
  for (int M0 : cfg.experiment.M0_list) {
    MedianSummary s;
    s.M0 = M0;
    s.runs.resize(seeds.size());
    parallel_for(int(seeds.size()), threads,
                 [&](int i) { s.runs[std::size_t(i)] = run_stopping_experiment(cfg, M0, seeds[std::size_t(i)]); });
    long hits = 0;
    std::vector<double> med;
    for (const auto& r : s.runs) {
      hits += r.record.hit_within_tstar ? 1 : 0;
      med.push_back(r.median_at_horizon);
      s.eta_mean += r.record.eta / double(s.runs.size());
      s.eta_max = std::max(s.eta_max, r.record.eta);
      s.eta_within_cap = s.eta_within_cap && r.record.eta <= r.record.eta_cap * (1.0 + 1e-12);
    }
    s.hit_probability = wilson_interval(hits, long(s.runs.size()));
    s.median_at_horizon = mean_se(med);
    s.horizon = s.runs.front().horizon;
    s.t_star = s.runs.front().record.t_star;
    s.eta_cap = s.runs.front().record.eta_cap;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- chaos table

std::vector<ChaosRow> chaos_table(const ExperimentConfig& cfg) {
  auto g = make_grid(cfg.chaos.n);
  std::vector<ChaosRow> rows;
  for (double kappa : cfg.chaos.kappa_list) {
    for (double Md : cfg.chaos.M_list) {
      const int M = int(std::lround(Md));
      if (std::abs(Md - M) > 1e-12) throw std::invalid_argument("chaos.M_list entries must be integers");
      Rng rng(seed_for(cfg.noise.seed, std::uint64_t(M)));
      ChaosSpec spec(annulus_field(g, M, rng));
      spec.kappa = kappa;
      spec.t = t_star(kappa, M, cfg.noise.alpha);
      spec.k_max = cfg.chaos.k_max;
      spec.alpha = cfg.noise.alpha;
      spec.sigma = cfg.noise.sigma;
      std::optional<ChaosMcResult> mc;
      if (cfg.chaos.mc) {
        ChaosMcConfig mcc;
        mcc.paths = cfg.chaos.paths;
        mcc.h = cfg.chaos.dt;
        mcc.seed = seed_for(cfg.noise.seed, 0xC4A05u + std::uint64_t(M));
        mc = chaos_monte_carlo(spec, mcc);
      }
      for (OpKind op : {OpKind::ADV, OpKind::LNS}) {
        spec.op = op;
        auto closed = first_chaos_variance(spec);
        const double ratio = lower_bound_ratio(spec, M);
        const ChaosMcEstimate* est = mc ? (op == OpKind::ADV ? &mc->adv : &mc->lns) : nullptr;
        auto add = [&](const std::string& ell, double v, double mv, double se) {
          rows.push_back({ell, kappa, double(M), spec.t, v, mv, se, ratio, to_string(op)});
        };
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < closed.ell.size(); ++i)
          add(std::to_string(closed.ell[i].k1) + ":" + std::to_string(closed.ell[i].k2), closed.per_ell[i],
              est ? est->mean[i] : nan, est ? est->stderr_[i] : nan);
        add("total", closed.total, est ? est->total : nan, est ? est->total_stderr : nan);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------- writers

void write_text(const std::string& path, const std::string& text) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string record_json(const RunRecord& r) {
  json j{{"schema_version", kSchemaVersion},
         {"config_hash", r.config_hash},
         {"seed", r.seed},
         {"kappa", r.kappa},
         {"op", r.op},
         {"lambda_hat", r.lambda_hat},
         {"lambda_stderr", r.lambda_se},
         {"fk_grad_mean", r.fk_grad_mean},
         {"fk_stretch_mean", r.fk_stretch_mean},
         {"fk_residual", r.fk_residual},
         {"t_scalar", r.t_scalar},
         {"steps", r.steps},
         {"final_median", r.final_median},
         {"mean_median", r.mean_median},
         {"mean_filament", r.mean_filament},
         {"wall_seconds", r.wall_seconds},
         {"completed", r.completed}};
  return j.dump(2) + "\n";
}

namespace {

json stopping_obj(const StoppingResult& s) {
  const auto& r = s.record;
  std::vector<json> tau_i, sigma_i;
  for (double v : r.tau_i) tau_i.push_back(finite_or_null(v));
  for (double v : r.sigma_i) sigma_i.push_back(finite_or_null(v));
  return json{{"schema_version", kSchemaVersion},
              {"M0", r.M0},
              {"kappa", r.kappa},
              {"delta", r.delta},
              {"q", r.q},
              {"tau", finite_or_null(r.tau)},
              {"sigma", finite_or_null(r.sigma)},
              {"eta", finite_or_null(r.eta)},
              {"i_fin", r.i_fin},
              {"hit_within_tstar", r.hit_within_tstar},
              {"seed", r.seed},
              {"sigma_bar", finite_or_null(r.sigma_bar)},
              {"L", r.L},
              {"eta_cap", r.eta_cap},
              {"t_star", r.t_star},
              {"tau_i", tau_i},
              {"sigma_i", sigma_i},
              {"horizon", s.horizon},
              {"median_at_horizon", s.median_at_horizon}};
}

}  // namespace

std::string stopping_json(const StoppingResult& r) { return stopping_obj(r).dump(2) + "\n"; }

std::string median_summary_json(const std::vector<MedianSummary>& all, const ExperimentConfig& cfg) {
  json arr = json::array();
  for (const auto& s : all) {
    json runs = json::array();
    for (const auto& r : s.runs) runs.push_back(stopping_obj(r));
    arr.push_back({{"M0", s.M0},
                   {"ensemble_size", s.runs.size()},
                   {"hit_probability", s.hit_probability.estimate},
                   {"hit_wilson_lower", s.hit_probability.lower},
                   {"hit_wilson_upper", s.hit_probability.upper},
                   {"t_star", s.t_star},
                   {"horizon", s.horizon},
                   {"median_at_horizon_mean", s.median_at_horizon.mean},
                   {"median_at_horizon_stderr", s.median_at_horizon.se},
                   {"eta_cap", s.eta_cap},
                   {"eta_mean", s.eta_mean},
                   {"eta_max", s.eta_max},
                   {"eta_within_cap", s.eta_within_cap},
                   {"records", runs}});
  }
  json j{{"schema_version", kSchemaVersion},
         {"config_hash", config_hash(cfg)},
         {"kappa", cfg.scalar.kappa},
         {"sigma", cfg.noise.sigma},
         {"delta", cfg.experiment.delta},
         {"q", cfg.experiment.q},
         {"summaries", arr}};
  return j.dump(2) + "\n";
}

void write_sweep_csv(const SweepResult& s, const std::string& path) {
  std::string text = "# medianflow sweep schema_version=1\nkappa,lambda_hat,stderr,mean_filament,mean_median\n";
  for (const auto& r : s.rows)
    text += num(r.kappa) + "," + num(r.lambda_hat) + "," + num(r.stderr_) + "," + num(r.mean_filament) + "," +
            num(r.mean_median) + "\n";
  write_text(path, text);
}

std::string sweep_summary_json(const SweepResult& s, const ExperimentConfig& cfg) {
  auto fit = [](const std::optional<LineFit>& f, const std::string& err) {
    if (!f) return json{{"error", err}};
    return json{{"slope", f->slope}, {"slope_stderr", f->slope_se}, {"intercept", f->intercept}, {"points", f->points}};
  };
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"kappa", r.kappa},
                    {"lambda_hat", r.lambda_hat},
                    {"stderr", r.stderr_},
                    {"mean_filament", r.mean_filament},
                    {"mean_median", r.mean_median}});
  json j{{"schema_version", kSchemaVersion},
         {"config_hash", config_hash(cfg)},
         {"rows", rows},
         {"filament_vs_kappa", fit(s.filament_fit, s.filament_fit_error)},
         {"decay_vs_kappa", fit(s.decay_fit, s.decay_fit_error)}};
  return j.dump(2) + "\n";
}

void write_chaos_csv(const std::vector<ChaosRow>& rows, const std::string& path) {
  std::string text =
      "# medianflow chaos schema_version=1\nell,kappa,M,t,var_closed,var_mc,mc_stderr,ratio_lower_bound,op\n";
  for (const auto& r : rows)
    text += r.ell + "," + num(r.kappa) + "," + num(r.M) + "," + num(r.t) + "," + num(r.var_closed) + "," +
            num(r.var_mc) + "," + num(r.mc_stderr) + "," + num(r.ratio_lower_bound) + "," + r.op + "\n";
  write_text(path, text);
}

}  // namespace medianflow
