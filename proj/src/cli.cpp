#include "photoauth/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "photoauth/alpha_map.hpp"
#include "photoauth/errors.hpp"
#include "photoauth/format.hpp"
#include "photoauth/optimizer.hpp"
#include "photoauth/photon_stats.hpp"
#include "photoauth/protocol_math.hpp"
#include "photoauth/session.hpp"

namespace photoauth::cli {

namespace {

/// Malformed flag value; maps to the parse exit code like CLI11's own errors.
class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_value(const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

struct Range {
  double lo;
  double hi;
};

Range parse_range(const std::string& text, const char* flag) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) throw FlagError(std::string(flag) + ": expected <lo>..<hi>, got '" + text + "'");
  const auto lo = parse_value<double>(trim(text.substr(0, sep)));
  const auto hi = parse_value<double>(trim(text.substr(sep + 2)));
  if (!lo || !hi) throw FlagError(std::string(flag) + ": expected <lo>..<hi>, got '" + text + "'");
  return {*lo, *hi};
}

SourceKind parse_source(const std::string& text) {
  if (text == "coherent") return SourceKind::coherent;
  if (text == "single-photon" || text == "single_photon" || text == "single") {
    return SourceKind::single_photon;
  }
  throw FlagError("--source: expected coherent or single-photon, got '" + text + "'");
}

EveStrategy parse_strategy(const std::string& text) {
  if (text == "uniform") return UniformRandom{};
  if (text.rfind("fixed:", 0) == 0) {
    const auto m = parse_value<int>(text.substr(6));
    if (!m) throw FlagError("--eve-strategy: bad fixed answer in '" + text + "'");
    return FixedMode{*m};
  }
  if (text.rfind("modes:", 0) == 0) {
    ModeSet set;
    std::stringstream list(text.substr(6));
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto m = parse_value<int>(trim(item));
      if (!m) throw FlagError("--eve-strategy: bad mode '" + item + "'");
      set.modes.push_back(*m);
    }
    return set;
  }
  throw FlagError("--eve-strategy: expected uniform, fixed:<m> or modes:<m1,m2,...>");
}

// Output goes to --output when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  body(f);
}

void write_u_curve(std::ostream& out, const UMinimum& m) {
  out << "nbar,u\n";
  for (const auto& p : m.curve) out << fmt_coord(p.nbar) << ',' << fmt_prob(p.u) << '\n';
}

void write_time_curve(std::ostream& out, const TimeMinimum& t) {
  out << "N,S_plus,S_minus,P_A,T_A\n";
  for (const auto& p : t.curve) {
    out << p.n_spots << ',' << p.s_plus << ',' << p.s_minus << ',' << fmt_prob(p.p_alice) << ','
        << fmt_prob(p.t_alice) << '\n';
  }
}

AlphaMap read_map(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return load(in);
  return load(path);
}

// Smallest checkerboard that can light N spots of either class.
AlphaMap default_map(int n_spots, const RunConfig& cfg) {
  int side = 5;
  while ((side * side) / 2 < n_spots) ++side;
  return checkerboard_map(side, cfg.alpha_high, cfg.alpha_low);
}

void warn_if_flat(const UMinimum& m, std::ostream& err) {
  if (m.flat) {
    err << "warning: " << to_string(m.kind) << " u curve is flat (u_min = " << fmt_prob(m.u_min)
        << " > " << kFlatCurveThreshold << "); alpha_H and alpha_L barely differ\n";
  }
}

}  // namespace

void RunConfig::validate() const {
  PerceptionModel{k_threshold}.validate();
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(alpha_high) || !unit(alpha_low)) throw DomainError("alpha_H and alpha_L must lie in [0,1]");
  if (!(alpha_low < alpha_high)) throw DomainError("alpha_L must be below alpha_H");
  if (!(std::isfinite(theta_high) && std::isfinite(theta_low) && theta_low < theta_high)) {
    throw DomainError("theta_L must be below theta_H");
  }
  if (!(p_fp > 0.0 && p_fp < 1.0)) throw DomainError("p_fp must lie in (0,1)");
  if (!(p_fn > 0.0 && p_fn < 1.0)) throw DomainError("p_fn must lie in (0,1)");
  if (!(photon_budget_cap > 0.0 && std::isfinite(photon_budget_cap))) {
    throw DomainError("photon budget cap must be positive");
  }
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto bad = [&] { return ParseError(line_no, "bad value '" + value + "' for " + key); };
    const auto real = [&](double& field) {
      const auto v = parse_value<double>(value);
      if (!v) throw bad();
      field = *v;
    };
    if (key == "k_threshold") {
      const auto v = parse_value<int>(value);
      if (!v) throw bad();
      cfg.k_threshold = *v;
    } else if (key == "alpha_H") {
      real(cfg.alpha_high);
    } else if (key == "alpha_L") {
      real(cfg.alpha_low);
    } else if (key == "theta_H") {
      real(cfg.theta_high);
    } else if (key == "theta_L") {
      real(cfg.theta_low);
    } else if (key == "p_fp") {
      real(cfg.p_fp);
    } else if (key == "p_fn") {
      real(cfg.p_fn);
    } else if (key == "photon_budget_cap") {
      real(cfg.photon_budget_cap);
    } else if (key == "master_seed") {
      const auto v = parse_value<std::uint64_t>(value);
      if (!v) throw bad();
      cfg.master_seed = *v;
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Photon-counting biometric authentication: statistics, design and simulation",
               "photoauth"};
  app.require_subcommand(1);
  app.fallthrough();

  // Shared settings; each doubles as an override of the config file.
  RunConfig flags;
  std::string config_path;
  app.add_option("--config", config_path, "key = value settings file");
  auto* o_seed = app.add_option("--seed", flags.master_seed, "Master random seed");
  auto* o_output = app.add_option("--output", flags.output_path, "Write results to this file");
  auto* o_k = app.add_option("--k", flags.k_threshold, "Perception threshold K");
  auto* o_ah = app.add_option("--alpha-h", flags.alpha_high, "High-class alpha");
  auto* o_al = app.add_option("--alpha-l", flags.alpha_low, "Low-class alpha");
  auto* o_th = app.add_option("--theta-h", flags.theta_high, "High-class threshold");
  auto* o_tl = app.add_option("--theta-l", flags.theta_low, "Low-class threshold");
  auto* o_fp = app.add_option("--p-fp", flags.p_fp, "False-positive target");
  auto* o_fn = app.add_option("--p-fn", flags.p_fn, "False-negative target");
  auto* o_cap = app.add_option("--budget-cap", flags.photon_budget_cap, "Photon budget cap");

  // psee
  auto* psee = app.add_subcommand("psee", "Probability of seeing versus photon number");
  std::vector<double> psee_alphas{0.10};
  std::vector<int> psee_ks;
  std::string psee_nbar = "1..300";
  double psee_step = 1.0;
  std::string psee_source = "coherent";
  psee->add_option("--alphas", psee_alphas, "Comma-separated alpha values")->delimiter(',');
  psee->add_option("--ks", psee_ks, "Comma-separated K values (default: --k)")->delimiter(',');
  psee->add_option("--nbar", psee_nbar, "Photon range lo..hi");
  psee->add_option("--step", psee_step, "Photon step");
  psee->add_option("--source", psee_source, "coherent or single-photon");

  // detect-dist
  auto* dist = app.add_subcommand("detect-dist", "Detected-photon distributions for both sources");
  std::optional<double> dist_alpha;
  double dist_nbar = 60.0;
  dist->add_option("--alpha", dist_alpha, "Spot alpha (default: alpha_H)");
  dist->add_option("--nbar", dist_nbar, "Incident photons (integer for the single-photon column)");

  // u-curve
  auto* ucurve = app.add_subcommand("u-curve", "u = p_H + p_L versus photon number");
  std::string ucurve_source = "coherent";
  std::string ucurve_nbar;
  double ucurve_res = kMaxCoherentResolution;
  ucurve->add_option("--source", ucurve_source, "coherent or single-photon");
  ucurve->add_option("--nbar", ucurve_nbar, "Photon range lo..hi (default 1..cap)");
  ucurve->add_option("--resolution", ucurve_res, "Coherent grid step (<= 0.1)");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Optimal photon budget and spot count, both sources");
  std::string opt_nrange = "2..20";
  std::string opt_nbar;
  double opt_res = kMaxCoherentResolution;
  std::string opt_curves;
  opt->add_option("--n-range", opt_nrange, "Spot-count range lo..hi");
  opt->add_option("--nbar", opt_nbar, "Photon range lo..hi (default 1..cap)");
  opt->add_option("--resolution", opt_res, "Coherent grid step (<= 0.1)");
  opt->add_option("--emit-curves", opt_curves, "Directory for u and T_A curve CSVs");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo authentication sessions");
  std::string sim_subject = "alice";
  int sim_n = 6;
  std::optional<int> sim_splus;
  std::optional<int> sim_sminus;
  std::uint64_t sim_sessions = 1000;
  unsigned sim_threads = 1;
  std::string sim_source = "coherent";
  std::optional<double> sim_nbar;
  std::string sim_map;
  std::string sim_script;
  std::string sim_strategy = "uniform";
  std::string sim_trace;
  std::int64_t sim_max_rounds = 1'000'000;
  sim->add_option("--subject", sim_subject, "alice, eve or scripted");
  sim->add_option("--n", sim_n, "Spots lit per round");
  sim->add_option("--s-plus", sim_splus, "Accept barrier (default: from p_fp)");
  sim->add_option("--s-minus", sim_sminus, "Reject barrier (default: from p_fn)");
  sim->add_option("--sessions", sim_sessions, "Number of sessions");
  sim->add_option("--threads", sim_threads, "Worker threads");
  sim->add_option("--source", sim_source, "coherent or single-photon");
  sim->add_option("--nbar", sim_nbar, "Photons per pulse (default: the u-optimal value)");
  sim->add_option("--map", sim_map, "Alpha-map file (default: two-class checkerboard)");
  sim->add_option("--script", sim_script, "Response script for --subject scripted");
  sim->add_option("--eve-strategy", sim_strategy, "uniform, fixed:<m> or modes:<m1,...>");
  sim->add_option("--trace", sim_trace, "Write per-round trace CSV here");
  sim->add_option("--max-rounds", sim_max_rounds, "Round cap per session");

  // alphamap
  auto* amap = app.add_subcommand("alphamap", "Alpha-map generation and checks");
  amap->require_subcommand(1);
  auto* gen = amap->add_subcommand("gen", "Generate a synthetic map");
  SyntheticMapParams gen_params;
  std::optional<double> gen_high;
  std::optional<double> gen_low;
  gen->add_option("--rows", gen_params.rows, "Grid rows");
  gen->add_option("--cols", gen_params.cols, "Grid columns");
  gen->add_option("--alpha-high-mean", gen_high, "High-class mean (default: alpha_H)");
  gen->add_option("--alpha-low-mean", gen_low, "Low-class mean (default: alpha_L)");
  gen->add_option("--jitter", gen_params.jitter, "Half-width of the uniform alpha spread");
  gen->add_option("--fraction-high", gen_params.fraction_high, "Probability a spot is high");
  gen->add_option("--subject", gen_params.subject_id, "Subject label");
  auto* cls = amap->add_subcommand("classify", "Partition a map into high and low spots");
  std::string cls_file = "-";
  std::size_t cls_min = 1;
  bool cls_spots = false;
  cls->add_option("file", cls_file, "Map file, '-' for standard input");
  cls->add_option("--min-per-class", cls_min, "Minimum spots per class");
  cls->add_flag("--spots", cls_spots, "Emit row,col,alpha,class CSV instead of the summary");
  auto* val = amap->add_subcommand("validate", "Check a map file");
  std::string val_file = "-";
  val->add_option("file", val_file, "Map file, '-' for standard input");

  std::vector<const char*> argv{"photoauth"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: parse: " << e.what() << '\n';
      return kExitParse;
    }

    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    const auto take = [](CLI::Option* o, auto& dst, const auto& src) {
      if (o->count() > 0) dst = src;
    };
    take(o_seed, cfg.master_seed, flags.master_seed);
    take(o_output, cfg.output_path, flags.output_path);
    take(o_k, cfg.k_threshold, flags.k_threshold);
    take(o_ah, cfg.alpha_high, flags.alpha_high);
    take(o_al, cfg.alpha_low, flags.alpha_low);
    take(o_th, cfg.theta_high, flags.theta_high);
    take(o_tl, cfg.theta_low, flags.theta_low);
    take(o_fp, cfg.p_fp, flags.p_fp);
    take(o_fn, cfg.p_fn, flags.p_fn);
    take(o_cap, cfg.photon_budget_cap, flags.photon_budget_cap);
    cfg.validate();

    const PerceptionParams params{cfg.alpha_high, cfg.alpha_low, cfg.k_threshold};
    const std::string default_nbar = "1.." + fmt_coord(cfg.photon_budget_cap);

    if (psee->parsed()) {
      const SourceKind kind = parse_source(psee_source);
      const Range r = parse_range(psee_nbar, "--nbar");
      if (!(psee_step > 0.0) || !(r.lo >= 0.0 && r.lo <= r.hi)) throw DomainError("bad photon range or step");
      if (psee_ks.empty()) psee_ks.push_back(cfg.k_threshold);
      Sink sink(cfg.output_path, out);
      auto& os = sink.get();
      os << "nbar,alpha,K,p_see\n";
      const auto steps = static_cast<long>(std::floor((r.hi - r.lo) / psee_step + 1e-9));
      for (double alpha : psee_alphas) {
        for (int k : psee_ks) {
          PerceptionModel{k}.validate();
          for (long i = 0; i <= steps; ++i) {
            const double nbar = r.lo + static_cast<double>(i) * psee_step;
            os << fmt_coord(nbar) << ',' << fmt_coord(alpha) << ',' << k << ','
               << fmt_prob(p_see(LightSource::of_kind(kind, nbar), alpha, k)) << '\n';
          }
        }
      }
      return kExitOk;
    }

    if (dist->parsed()) {
      const double alpha = dist_alpha.value_or(cfg.alpha_high);
      const auto coherent = detection_distribution(LightSource::coherent(dist_nbar), alpha);
      const auto single =
          detection_distribution(LightSource::of_kind(SourceKind::single_photon, dist_nbar), alpha);
      Sink sink(cfg.output_path, out);
      auto& os = sink.get();
      os << "n,p_coherent,p_single_photon\n";
      const std::size_t rows = std::max(coherent.pmf.size(), single.pmf.size());
      for (std::size_t n = 0; n < rows; ++n) {
        const double pc = n < coherent.pmf.size() ? coherent.pmf[n] : 0.0;
        const double pq = n < single.pmf.size() ? single.pmf[n] : 0.0;
        os << n << ',' << fmt_prob(pc) << ',' << fmt_prob(pq) << '\n';
      }
      return kExitOk;
    }

    if (ucurve->parsed()) {
      const Range r = parse_range(ucurve_nbar.empty() ? default_nbar : ucurve_nbar, "--nbar");
      const UMinimum m =
          minimize_u(parse_source(ucurve_source), params, r.lo, r.hi, ucurve_res, cfg.photon_budget_cap);
      warn_if_flat(m, err);
      Sink sink(cfg.output_path, out);
      write_u_curve(sink.get(), m);
      return kExitOk;
    }

    if (opt->parsed()) {
      const Range nr = parse_range(opt_nrange, "--n-range");
      const Range br = parse_range(opt_nbar.empty() ? default_nbar : opt_nbar, "--nbar");
      if (nr.lo != std::floor(nr.lo) || nr.hi != std::floor(nr.hi)) {
        throw FlagError("--n-range: bounds must be integers");
      }
      OptimizeRequest req;
      req.params = params;
      req.p_fp = cfg.p_fp;
      req.p_fn = cfg.p_fn;
      req.nbar_lo = br.lo;
      req.nbar_hi = br.hi;
      req.resolution = opt_res;
      req.budget_cap = cfg.photon_budget_cap;
      req.n_lo = static_cast<int>(nr.lo);
      req.n_hi = static_cast<int>(nr.hi);
      const auto coherent = optimize_protocol(SourceKind::coherent, req);
      const auto quantum = optimize_protocol(SourceKind::single_photon, req);
      warn_if_flat(coherent.u, err);
      warn_if_flat(quantum.u, err);
      const auto adv = advantage_report(coherent, quantum);

      Sink sink(cfg.output_path, out);
      auto& os = sink.get();
      os << "alpha_H = " << fmt_coord(cfg.alpha_high) << '\n'
         << "alpha_L = " << fmt_coord(cfg.alpha_low) << '\n'
         << "K = " << cfg.k_threshold << '\n'
         << "p_fp = " << fmt_coord(cfg.p_fp) << '\n'
         << "p_fn = " << fmt_coord(cfg.p_fn) << '\n'
         << "targets_inferred = "
         << (cfg.p_fp == kDefaultFalsePositive && cfg.p_fn == kDefaultFalseNegative ? "true" : "false")
         << '\n';
      for (const auto* r : {&coherent, &quantum}) {
        const std::string p = std::string(to_string(r->kind)) + ".";
        const auto& d = r->time.design;
        os << p << "nbar_opt = " << fmt_prob(r->nbar_opt()) << '\n'
           << p << "u_min = " << fmt_prob(r->u_min()) << '\n'
           << p << "n_opt = " << r->n_opt() << '\n'
           << p << "s_plus = " << d.s_plus << '\n'
           << p << "s_minus = " << d.s_minus << '\n'
           << p << "p_alice = " << fmt_prob(alice_round_success(r->n_opt(), r->u_min())) << '\n'
           << p << "p_eve = " << fmt_prob(eve_round_success(r->n_opt())) << '\n'
           << p << "p_fp_exact = " << fmt_prob(d.p_fp_exact) << '\n'
           << p << "p_fn_exact = " << fmt_prob(d.p_fn_exact) << '\n'
           << p << "t_alice = " << fmt_prob(d.t_alice) << '\n'
           << p << "t_alice_bound = " << fmt_prob(d.t_alice_bound) << '\n'
           << p << "photons_per_auth = " << fmt_prob(r->photons_per_auth()) << '\n';
      }
      os << "time_advantage = " << fmt_prob(adv.time_advantage) << '\n'
         << "photon_advantage = " << fmt_prob(adv.photon_advantage) << '\n';

      if (!opt_curves.empty()) {
        const std::filesystem::path dir(opt_curves);
        std::filesystem::create_directories(dir);
        for (const auto* r : {&coherent, &quantum}) {
          const std::string kind = to_string(r->kind);
          write_file(dir / ("u_curve_" + kind + ".csv"), [&](std::ostream& f) { write_u_curve(f, r->u); });
          write_file(dir / ("time_curve_" + kind + ".csv"),
                     [&](std::ostream& f) { write_time_curve(f, r->time); });
        }
      }
      return kExitOk;
    }

    if (sim->parsed()) {
      const SourceKind kind = parse_source(sim_source);
      const double nbar = sim_nbar ? *sim_nbar
                                   : minimize_u(kind, params, 1.0, cfg.photon_budget_cap,
                                                kMaxCoherentResolution, cfg.photon_budget_cap)
                                         .nbar_opt;
      const LightSource source = LightSource::of_kind(kind, nbar);
      const AlphaMap map = sim_map.empty() ? default_map(sim_n, cfg) : read_map(sim_map, in);
      const ClassifiedMap device_map =
          classify(map, cfg.theta_high, cfg.theta_low, static_cast<std::size_t>(std::max(sim_n, 1)));

      SessionOptions opts;
      opts.n_spots = sim_n;
      opts.max_rounds = sim_max_rounds;
      if (!sim_splus || !sim_sminus) {
        const double u = miss_and_false_probs(source, device_map.alpha_high_rep,
                                              device_map.alpha_low_rep, cfg.k_threshold)
                             .u;
        const RoundModel round = RoundModel::make(sim_n, u);
        if (!sim_splus) opts.s_plus = s_plus_threshold(sim_n, cfg.p_fp);
        if (!sim_sminus) opts.s_minus = s_minus_threshold(round.p_alice, cfg.p_fn);
      }
      if (sim_splus) opts.s_plus = *sim_splus;
      if (sim_sminus) opts.s_minus = *sim_sminus;

      std::optional<SubjectModel> subject;
      if (sim_subject == "alice") {
        subject.emplace(SimAlice(map, source, PerceptionModel{cfg.k_threshold}));
      } else if (sim_subject == "eve") {
        subject.emplace(SimEve{parse_strategy(sim_strategy)});
      } else if (sim_subject == "scripted") {
        if (sim_script.empty()) throw FlagError("--subject scripted needs --script");
        subject.emplace(Scripted::load(sim_script));
      } else {
        throw FlagError("--subject: expected alice, eve or scripted");
      }

      MonteCarloSummary summary{};
      if (!sim_trace.empty()) {
        const auto records = simulate_sessions(*subject, opts, device_map, sim_sessions,
                                               cfg.master_seed, sim_threads);
        SessionStats stats;
        for (const auto& rec : records) stats.add(rec);
        summary = MonteCarloSummary::from(stats);
        write_file(sim_trace, [&](std::ostream& f) { write_trace_csv(f, records); });
      } else {
        summary = monte_carlo(*subject, opts, device_map, sim_sessions, cfg.master_seed, sim_threads);
      }
      Sink sink(cfg.output_path, out);
      write_summary_csv(sink.get(), summary);
      return kExitOk;
    }

    if (gen->parsed()) {
      gen_params.alpha_high_mean = gen_high.value_or(cfg.alpha_high);
      gen_params.alpha_low_mean = gen_low.value_or(cfg.alpha_low);
      gen_params.seed = cfg.master_seed;
      const AlphaMap map = generate_synthetic(gen_params);
      Sink sink(cfg.output_path, out);
      save(map, sink.get());
      return kExitOk;
    }

    if (cls->parsed()) {
      const ClassifiedMap c = classify(read_map(cls_file, in), cfg.theta_high, cfg.theta_low, cls_min);
      Sink sink(cfg.output_path, out);
      auto& os = sink.get();
      if (cls_spots) {
        os << "row,col,alpha,class\n";
        for (std::size_t i = 0; i < c.source.size(); ++i) {
          const SpotClass sc = c.class_of(i);
          os << c.source.row_of(i) << ',' << c.source.col_of(i) << ',' << fmt_prob(c.source.alpha(i))
             << ',' << (sc == SpotClass::high ? "high" : sc == SpotClass::low ? "low" : "excluded")
             << '\n';
        }
      } else {
        os << "subject = " << c.source.subject_id() << '\n'
           << "rows = " << c.source.rows() << '\n'
           << "cols = " << c.source.cols() << '\n'
           << "theta_H = " << fmt_coord(c.theta_high) << '\n'
           << "theta_L = " << fmt_coord(c.theta_low) << '\n'
           << "high_count = " << c.high_spots.size() << '\n'
           << "low_count = " << c.low_spots.size() << '\n'
           << "excluded_count = " << c.source.size() - c.high_spots.size() - c.low_spots.size() << '\n'
           << "alpha_high_rep = " << fmt_prob(c.alpha_high_rep) << '\n'
           << "alpha_low_rep = " << fmt_prob(c.alpha_low_rep) << '\n';
      }
      return kExitOk;
    }

    if (val->parsed()) {
      const AlphaMap map = read_map(val_file, in);
      Sink sink(cfg.output_path, out);
      sink.get() << "ok subject=" << map.subject_id() << " rows=" << map.rows()
                 << " cols=" << map.cols() << '\n';
      return kExitOk;
    }
    err << "error: parse: no command given\n";
    return kExitParse;
  } catch (const FlagError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kExitParse;
  } catch (const DomainError& e) {
    err << "error: domain: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NonAbsorptionError& e) {
    err << "error: domain: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ScriptExhaustedError& e) {
    err << "error: domain: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace photoauth::cli
