// Interrogation state machine and Monte Carlo harness.
//
// Each round the device draws H uniformly on {0..N}, lights H random high
// spots and N-H random low spots (a fresh subset every round, never the same
// spot twice in one round), asks the subject how many were seen, and moves
// the score S by +1 on R == H and -1 otherwise. The session ends the first
// time S reaches S+ (authenticated) or S- (rejected).
//
// Every session owns two random streams derived from its seed: one for the
// device and one for the subject. Session i of a run uses
// derive_seed(master_seed, i), so results do not depend on how sessions are
// spread over worker threads.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "photoauth/alpha_map.hpp"
#include "photoauth/photon_stats.hpp"
#include "photoauth/rng.hpp"

namespace photoauth {

struct LitSpot {
  std::size_t index;
  SpotClass spot_class;

  friend bool operator==(const LitSpot&, const LitSpot&) = default;
};

struct Interrogation {
  int h;
  std::vector<LitSpot> lit_spots;  // sorted by index
  int response;
  bool correct;

  friend bool operator==(const Interrogation&, const Interrogation&) = default;
};

enum class Outcome { authenticated, rejected };

struct SessionRecord {
  std::vector<Interrogation> rounds;  // empty when round recording is off
  std::vector<int> s_trajectory;      // starts at 0, one entry per round after that
  Outcome outcome = Outcome::rejected;
  int round_count = 0;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

/// Uniform on {0..n_spots}.
int sample_h(int n_spots, SplitMix64& rng);

// ---- impostor ----------------------------------------------------------

/// Everything the impostor observes about a round: how many spots are lit.
struct EveView {
  int n_spots;
};

struct UniformRandom {};
struct FixedMode {
  int m;
};
struct ModeSet {
  std::vector<int> modes;  // answered uniformly among these
};
using EveStrategy = std::variant<UniformRandom, FixedMode, ModeSet>;

int eve_response(const EveView& view, const EveStrategy& strategy, SplitMix64& rng);

struct SimEve {
  EveStrategy strategy = UniformRandom{};
};

// ---- legitimate subject ----------------------------------------------------

/// Draws a detected-photon count for each lit spot from the source's
/// detection distribution at that spot's alpha, and counts the spots whose
/// draw reaches K.
int alice_response(std::span<const double> lit_alphas, const LightSource& source,
                   const PerceptionModel& perception, SplitMix64& rng);

/// Simulated Alice with her true alpha-map. Detection tables are built once
/// per spot so rounds are cheap; draws match alice_response exactly.
class SimAlice {
 public:
  SimAlice(AlphaMap map, LightSource source, PerceptionModel perception);

  int respond(std::span<const std::size_t> lit_spots, SplitMix64& rng) const;
  int draw_detected(std::size_t spot, SplitMix64& rng) const;

  const AlphaMap& map() const noexcept { return map_; }
  const LightSource& source() const noexcept { return source_; }
  const PerceptionModel& perception() const noexcept { return perception_; }

 private:
  AlphaMap map_;
  LightSource source_;
  PerceptionModel perception_;
  std::vector<std::vector<double>> cdf_;  // per spot
};

// ---- scripted responder -------------------------------------------------

struct ScriptStep {
  enum class Kind { literal, correct, wrong };
  Kind kind = Kind::literal;
  int value = 0;  // used by literal steps

  friend bool operator==(const ScriptStep&, const ScriptStep&) = default;
};

/// Replays a fixed response list; running out is an error. `correct`
/// answers H and `wrong` answers (H+1) mod (N+1), for state-machine tests.
struct Scripted {
  std::vector<ScriptStep> steps;

  /// One token per line or whitespace-separated: an integer, `correct` or
  /// `wrong`. '#' starts a comment. Throws ParseError.
  static Scripted parse(std::istream& in);
  static Scripted load(const std::string& path);
};

using SubjectModel = std::variant<SimAlice, SimEve, Scripted>;

// ---- sessions ----------------------------------------------------------------

struct SessionOptions {
  int n_spots = 6;
  int s_plus = 13;
  int s_minus = -13;
  std::int64_t max_rounds = 1'000'000;
  bool record_rounds = true;

  void validate() const;
};

/// Throws InsufficientSpotsError when the device map cannot light N spots of
/// one class, NonAbsorptionError at the round cap, ScriptExhaustedError when a
/// script runs dry.
SessionRecord run_session(const SubjectModel& subject, const SessionOptions& options,
                          const ClassifiedMap& device_map, std::uint64_t session_seed);

/// Merge-only accumulator. All sums are integers, so merging is exactly
/// associative and commutative.
struct SessionStats {
  std::uint64_t sessions = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t sum_rounds = 0;
  unsigned __int128 sum_sq_rounds = 0;

  void add(const SessionRecord& record);
  void merge(const SessionStats& other);
};

struct MonteCarloSummary {
  std::uint64_t sessions;
  std::uint64_t accepted;
  std::uint64_t rejected;
  double acceptance_rate;
  double acceptance_stderr;  // binomial standard error of acceptance_rate
  double mean_rounds;
  double sd_rounds;
  double ci95_low;  // normal-approximation interval for mean_rounds
  double ci95_high;

  static MonteCarloSummary from(const SessionStats& stats);
};

MonteCarloSummary monte_carlo(const SubjectModel& subject, const SessionOptions& options,
                              const ClassifiedMap& device_map, std::uint64_t n_sessions,
                              std::uint64_t master_seed, unsigned threads = 1);

/// Full records of sessions [0, n_sessions), in session order.
std::vector<SessionRecord> simulate_sessions(const SubjectModel& subject,
                                             const SessionOptions& options,
                                             const ClassifiedMap& device_map,
                                             std::uint64_t n_sessions,
                                             std::uint64_t master_seed, unsigned threads = 1);

/// `session_id,round,H,response,correct,S`
void write_trace_csv(std::ostream& out, std::span<const SessionRecord> records);
/// `sessions,accepted,rejected,mean_rounds,sd_rounds,ci95_low,ci95_high`
void write_summary_csv(std::ostream& out, const MonteCarloSummary& summary);

}  // namespace photoauth
