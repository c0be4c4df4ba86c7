#include "photoauth/session.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "photoauth/errors.hpp"
#include "photoauth/format.hpp"

namespace photoauth {

namespace {

constexpr std::uint64_t kDeviceStream = 0;
constexpr std::uint64_t kSubjectStream = 1;
constexpr std::uint64_t kWorkBlock = 1024;

std::vector<double> cumulative(const DetectionDistribution& dist) {
  std::vector<double> cdf(dist.pmf.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < cdf.size(); ++n) cdf[n] = (acc += dist.pmf[n]);
  return cdf;
}

// Inverse-CDF draw; a uniform beyond the (truncated) table lands one past it.
int draw_from(const std::vector<double>& cdf, SplitMix64& rng) {
  const double u = rng.uniform01();
  return static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

void check_strategy(const EveStrategy& strategy, int n_spots) {
  const auto in_range = [n_spots](int m) { return m >= 0 && m <= n_spots; };
  if (const auto* f = std::get_if<FixedMode>(&strategy)) {
    if (!in_range(f->m)) throw DomainError("fixed answer " + std::to_string(f->m) + " outside {0..N}");
  } else if (const auto* s = std::get_if<ModeSet>(&strategy)) {
    if (s->modes.empty()) throw DomainError("mode set is empty");
    for (int m : s->modes) {
      if (!in_range(m)) throw DomainError("mode " + std::to_string(m) + " outside {0..N}");
    }
  }
}

// Partial Fisher-Yates: moves a uniform k-subset of pool to its front. The
// pool stays a permutation, so it can be reused for the next round.
void choose_front(std::vector<std::size_t>& pool, int k, SplitMix64& rng) {
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

class Responder {
 public:
  Responder(const SubjectModel& subject, int n_spots, std::uint64_t seed)
      : subject_(subject), n_spots_(n_spots), rng_(derive_seed(seed, kSubjectStream)) {}

  // `h` is handed to the scripted responder only; Eve gets an EveView.
  int respond(std::span<const std::size_t> lit, int h) {
    if (const auto* alice = std::get_if<SimAlice>(&subject_)) return alice->respond(lit, rng_);
    if (const auto* eve = std::get_if<SimEve>(&subject_)) {
      return eve_response(EveView{n_spots_}, eve->strategy, rng_);
    }
    const auto& script = std::get<Scripted>(subject_);
    if (cursor_ >= script.steps.size()) {
      throw ScriptExhaustedError("script exhausted after " + std::to_string(cursor_) + " responses");
    }
    const ScriptStep& step = script.steps[cursor_++];
    switch (step.kind) {
      case ScriptStep::Kind::correct:
        return h;
      case ScriptStep::Kind::wrong:
        return (h + 1) % (n_spots_ + 1);
      case ScriptStep::Kind::literal:
        break;
    }
    return step.value;
  }

 private:
  const SubjectModel& subject_;
  int n_spots_;
  SplitMix64 rng_;
  std::size_t cursor_ = 0;
};

}  // namespace

int sample_h(int n_spots, SplitMix64& rng) {
  if (n_spots < 1) throw DomainError("N must be >= 1");
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_spots) + 1));
}

int eve_response(const EveView& view, const EveStrategy& strategy, SplitMix64& rng) {
  if (view.n_spots < 1) throw DomainError("N must be >= 1");
  check_strategy(strategy, view.n_spots);
  if (const auto* f = std::get_if<FixedMode>(&strategy)) return f->m;
  if (const auto* s = std::get_if<ModeSet>(&strategy)) {
    return s->modes[static_cast<std::size_t>(rng.below(s->modes.size()))];
  }
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(view.n_spots) + 1));
}

int alice_response(std::span<const double> lit_alphas, const LightSource& source,
                   const PerceptionModel& perception, SplitMix64& rng) {
  perception.validate();
  int seen = 0;
  for (double alpha : lit_alphas) {
    const auto cdf = cumulative(detection_distribution(source, alpha));
    if (draw_from(cdf, rng) >= perception.k_threshold) ++seen;
  }
  return seen;
}

SimAlice::SimAlice(AlphaMap map, LightSource source, PerceptionModel perception)
    : map_(std::move(map)), source_(source), perception_(perception) {
  perception_.validate();
  cdf_.reserve(map_.size());
  for (double alpha : map_.alphas()) cdf_.push_back(cumulative(detection_distribution(source_, alpha)));
}

int SimAlice::draw_detected(std::size_t spot, SplitMix64& rng) const {
  return draw_from(cdf_.at(spot), rng);
}

int SimAlice::respond(std::span<const std::size_t> lit_spots, SplitMix64& rng) const {
  int seen = 0;
  for (std::size_t spot : lit_spots) {
    if (draw_detected(spot, rng) >= perception_.k_threshold) ++seen;
  }
  return seen;
}

Scripted Scripted::parse(std::istream& in) {
  Scripted script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto start = line.find_first_not_of(" \t\r", pos);
      if (start == std::string::npos) break;
      const auto end = std::min(line.find_first_of(" \t\r", start), line.size());
      const std::string token = line.substr(start, end - start);
      pos = end;
      if (token == "correct") {
        script.steps.push_back({ScriptStep::Kind::correct, 0});
      } else if (token == "wrong") {
        script.steps.push_back({ScriptStep::Kind::wrong, 0});
      } else {
        std::size_t used = 0;
        int value = 0;
        try {
          value = std::stoi(token, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != token.size()) throw ParseError(line_no, "bad script token '" + token + "'");
        if (value < 0) throw ParseError(line_no, "negative response '" + token + "'");
        script.steps.push_back({ScriptStep::Kind::literal, value});
      }
    }
  }
  return script;
}

Scripted Scripted::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return parse(in);
}

void SessionOptions::validate() const {
  if (n_spots < 1) throw DomainError("N must be >= 1, got " + std::to_string(n_spots));
  if (!(s_minus < 0 && 0 < s_plus)) throw DomainError("barriers must satisfy S- < 0 < S+");
  if (max_rounds < 1) throw DomainError("round cap must be >= 1");
}

SessionRecord run_session(const SubjectModel& subject, const SessionOptions& options,
                          const ClassifiedMap& device_map, std::uint64_t session_seed) {
  options.validate();
  const auto n = static_cast<std::size_t>(options.n_spots);
  if (device_map.high_spots.size() < n || device_map.low_spots.size() < n) {
    throw InsufficientSpotsError(device_map.high_spots.size(), device_map.low_spots.size(), n);
  }
  if (const auto* alice = std::get_if<SimAlice>(&subject)) {
    if (alice->map().size() != device_map.source.size()) {
      throw DomainError("subject map and device map differ in spot count");
    }
  }
  if (const auto* eve = std::get_if<SimEve>(&subject)) check_strategy(eve->strategy, options.n_spots);

  SplitMix64 device(derive_seed(session_seed, kDeviceStream));
  Responder responder(subject, options.n_spots, session_seed);
  std::vector<std::size_t> high_pool = device_map.high_spots;
  std::vector<std::size_t> low_pool = device_map.low_spots;
  std::vector<std::size_t> lit(n);

  SessionRecord record;
  record.s_trajectory.push_back(0);
  int s = 0;
  while (s > options.s_minus && s < options.s_plus) {
    if (record.round_count >= options.max_rounds) {
      throw NonAbsorptionError("no barrier reached within " + std::to_string(options.max_rounds) +
                               " rounds");
    }
    const int h = sample_h(options.n_spots, device);
    choose_front(high_pool, h, device);
    choose_front(low_pool, options.n_spots - h, device);
    std::copy_n(high_pool.begin(), h, lit.begin());
    std::copy_n(low_pool.begin(), options.n_spots - h, lit.begin() + h);
    std::sort(lit.begin(), lit.end());

    const int response = responder.respond(lit, h);
    const bool correct = response == h;
    s += correct ? 1 : -1;
    ++record.round_count;
    record.s_trajectory.push_back(s);

    if (options.record_rounds) {
      Interrogation round{h, {}, response, correct};
      round.lit_spots.reserve(n);
      for (std::size_t spot : lit) round.lit_spots.push_back({spot, device_map.class_of(spot)});
      record.rounds.push_back(std::move(round));
    }
  }
  record.outcome = s == options.s_plus ? Outcome::authenticated : Outcome::rejected;
  return record;
}

void SessionStats::add(const SessionRecord& record) {
  ++sessions;
  if (record.outcome == Outcome::authenticated) {
    ++accepted;
  } else {
    ++rejected;
  }
  const auto r = static_cast<std::uint64_t>(record.round_count);
  sum_rounds += r;
  sum_sq_rounds += static_cast<unsigned __int128>(r) * r;
}

void SessionStats::merge(const SessionStats& other) {
  sessions += other.sessions;
  accepted += other.accepted;
  rejected += other.rejected;
  sum_rounds += other.sum_rounds;
  sum_sq_rounds += other.sum_sq_rounds;
}

MonteCarloSummary MonteCarloSummary::from(const SessionStats& st) {
  MonteCarloSummary out{};
  out.sessions = st.sessions;
  out.accepted = st.accepted;
  out.rejected = st.rejected;
  if (st.sessions == 0) return out;
  const auto n = static_cast<double>(st.sessions);
  out.acceptance_rate = static_cast<double>(st.accepted) / n;
  out.acceptance_stderr = std::sqrt(out.acceptance_rate * (1.0 - out.acceptance_rate) / n);
  out.mean_rounds = static_cast<double>(st.sum_rounds) / n;
  if (st.sessions > 1) {
    // n * sum(x^2) - (sum x)^2, exact in 128-bit integers.
    const unsigned __int128 sum = st.sum_rounds;
    const unsigned __int128 spread = st.sum_sq_rounds * st.sessions - sum * sum;
    out.sd_rounds = std::sqrt(static_cast<double>(spread) / (n * (n - 1.0)));
  }
  const double half = 1.959963984540054 * out.sd_rounds / std::sqrt(n);
  out.ci95_low = out.mean_rounds - half;
  out.ci95_high = out.mean_rounds + half;
  return out;
}

namespace {

// Runs body(i) for i in [0, count) across `threads` workers; blocks are
// claimed from a shared counter. Rethrows the first worker exception.
template <class PerWorker, class Body>
void parallel_for(std::uint64_t count, unsigned threads, PerWorker& per_worker, Body body) {
  threads = std::max(1u, threads);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (;;) {
        const std::uint64_t begin = next.fetch_add(kWorkBlock);
        if (begin >= count) break;
        const std::uint64_t end = std::min(count, begin + kWorkBlock);
        for (std::uint64_t i = begin; i < end; ++i) body(per_worker[w], i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

MonteCarloSummary monte_carlo(const SubjectModel& subject, const SessionOptions& options,
                              const ClassifiedMap& device_map, std::uint64_t n_sessions,
                              std::uint64_t master_seed, unsigned threads) {
  if (n_sessions < 1) throw DomainError("n_sessions must be >= 1");
  SessionOptions opts = options;
  opts.record_rounds = false;
  threads = std::max(1u, threads);
  std::vector<SessionStats> partial(threads);
  parallel_for(n_sessions, threads, partial, [&](SessionStats& acc, std::uint64_t i) {
    acc.add(run_session(subject, opts, device_map, derive_seed(master_seed, i)));
  });
  SessionStats total;
  for (const auto& p : partial) total.merge(p);
  return MonteCarloSummary::from(total);
}

std::vector<SessionRecord> simulate_sessions(const SubjectModel& subject,
                                             const SessionOptions& options,
                                             const ClassifiedMap& device_map,
                                             std::uint64_t n_sessions, std::uint64_t master_seed,
                                             unsigned threads) {
  SessionOptions opts = options;
  opts.record_rounds = true;
  std::vector<SessionRecord> records(n_sessions);
  threads = std::max(1u, threads);
  std::vector<int> unused(threads);
  parallel_for(n_sessions, threads, unused, [&](int&, std::uint64_t i) {
    records[i] = run_session(subject, opts, device_map, derive_seed(master_seed, i));
  });
  return records;
}

void write_trace_csv(std::ostream& out, std::span<const SessionRecord> records) {
  out << "session_id,round,H,response,correct,S\n";
  for (std::size_t id = 0; id < records.size(); ++id) {
    const auto& rec = records[id];
    for (std::size_t r = 0; r < rec.rounds.size(); ++r) {
      const auto& round = rec.rounds[r];
      out << id << ',' << (r + 1) << ',' << round.h << ',' << round.response << ','
          << (round.correct ? 1 : 0) << ',' << rec.s_trajectory[r + 1] << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const MonteCarloSummary& s) {
  out << "sessions,accepted,rejected,mean_rounds,sd_rounds,ci95_low,ci95_high\n"
      << s.sessions << ',' << s.accepted << ',' << s.rejected << ',' << fmt_prob(s.mean_rounds)
      << ',' << fmt_prob(s.sd_rounds) << ',' << fmt_prob(s.ci95_low) << ','
      << fmt_prob(s.ci95_high) << '\n';
}

}  // namespace photoauth
