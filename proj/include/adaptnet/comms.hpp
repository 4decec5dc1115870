#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adaptnet/config.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/trajectory.hpp"

namespace adaptnet {

enum class QueueDiscipline { Fcfs, LcfsS, LcfsW, Priority };

inline constexpr QueueDiscipline kAllDisciplines[] = {QueueDiscipline::Fcfs, QueueDiscipline::LcfsS,
                                                      QueueDiscipline::LcfsW, QueueDiscipline::Priority};

/// Accepts "fcfs", "lcfs_s", "lcfs_w", "priority".
QueueDiscipline parse_discipline(std::string_view name);
const char* to_string(QueueDiscipline d);

struct Packet {
  std::uint64_t id = 0;
  int source_uav = 0;
  int track_id = -1;
  double gen_time = 0.0;   ///< seconds
  double size_bits = 0.0;  ///< > 0
  RelevanceScore relevance;
  double delivered_at = std::numeric_limits<double>::quiet_NaN();  ///< set on delivery
};

/// One sender's queue and server. Preempted or displaced packets are
/// discarded (never resumed) and counted in dropped().
///
///  - FCFS: newcomers join the tail.
///  - LCFS_S: a newcomer evicts the packet in service and is served at once.
///  - LCFS_W: a newcomer replaces any waiting packet; service is never interrupted.
///  - PRIORITY: waiting line ordered by descending priority key, ties by
///    earlier gen_time then lower id; service is non-preemptive.
///
/// The priority key is w * distance / distance_scale + (1 - w) * age / age_scale.
/// With the default w = 1 it is the relevance distance alone. Because all
/// packets age at the same rate the order between two packets never changes
/// with time, only with w.
class PacketQueue {
 public:
  explicit PacketQueue(QueueDiscipline discipline, std::size_t capacity = 0);

  /// Throws InvalidInput if the packet is generated after `now` or has no size.
  void enqueue(Packet packet, double now);

  QueueDiscipline discipline() const noexcept { return discipline_; }
  const std::optional<Packet>& in_service() const noexcept { return in_service_; }
  double served_bits() const noexcept { return served_bits_; }
  const std::deque<Packet>& waiting() const noexcept { return waiting_; }
  std::size_t size() const noexcept { return waiting_.size() + (in_service_ ? 1 : 0); }
  bool idle() const noexcept { return !in_service_ && waiting_.empty(); }
  std::size_t dropped() const noexcept { return dropped_; }

  void set_priority_weight(double weight, double distance_scale = 1.0, double age_scale = 1.0);
  double priority_weight() const noexcept { return weight_; }

  // Used by serve_step.
  void add_service(double bits) noexcept { served_bits_ += bits; }
  /// Removes the packet in service and starts the next waiting one.
  Packet complete_service();

 private:
  double key(const Packet& p) const noexcept;
  bool before(const Packet& a, const Packet& b) const noexcept;
  void start_next();

  QueueDiscipline discipline_;
  std::size_t capacity_;  ///< max waiting packets, 0 = unbounded
  std::optional<Packet> in_service_;
  double served_bits_ = 0.0;
  std::deque<Packet> waiting_;
  std::size_t dropped_ = 0;
  double weight_ = 1.0;
  double distance_scale_ = 1.0;
  double age_scale_ = 1.0;
};

enum class WaveformKind { HighThroughput, EnergySaving };

const char* to_string(WaveformKind k);

struct Waveform {
  WaveformKind kind = WaveformKind::EnergySaving;
  double rate_bps = 0.0;
  double power_w = 0.0;
};

/// Throws InvalidInput unless high outranks low in both rate and power.
struct WaveformSet {
  Waveform high;
  Waveform low;

  WaveformSet(Waveform high_throughput, Waveform energy_saving);
};

WaveformSet waveform_set(const ScenarioConfig& config);

/// HIGH_THROUGHPUT iff distance > threshold.
Waveform select_waveform(const RelevanceScore& score, double threshold, const WaveformSet& set);

struct ChannelParams {
  double snr_floor = 0.0;
  double snr_ref = 20.0;
  double erasure_prob = 0.0;  ///< probability a completed packet is lost
};

ChannelParams channel_params(const ScenarioConfig& config);

/// clamp((snr - floor) / (ref - floor), 0, 1)
double success_factor(double snr_db, const ChannelParams& channel);

struct ServeResult {
  std::vector<Packet> delivered;
  double energy_j = 0.0;
  double bits_sent = 0.0;
  double busy_time = 0.0;
  std::size_t erased = 0;
  double high_bits_sub_threshold = 0.0;  ///< bits of non-novel packets sent on HIGH_THROUGHPUT
};

using WaveformChooser = std::function<Waveform(const Packet&)>;

/// Serves the queue over [now, now + dt]. The packet in service accumulates
/// rate * success_factor(snr) bits per second; a completed packet is
/// delivered at its exact completion instant and the next one starts within
/// the same interval. Energy is power times transmitting time.
ServeResult serve_step(PacketQueue& queue, const WaveformChooser& choose, double snr_db, double dt, double now,
                       Rng& rng, const ChannelParams& channel);
ServeResult serve_step(PacketQueue& queue, const Waveform& waveform, double snr_db, double dt, double now, Rng& rng,
                       const ChannelParams& channel);

/// Per-source Age of Information. Age at time t is t minus the generation
/// time of the freshest delivered update; the integral of that sawtooth is
/// accumulated exactly.
class AoiTracker {
 public:
  explicit AoiTracker(std::size_t sources = 1, double start_time = 0.0);

  /// Integrates over [now, now + dt], applying deliveries at their
  /// `delivered_at` (end of interval if unset). Throws InvalidInput for a
  /// delivery generated after it was delivered or from an unknown source.
  void update(std::span<const Packet> deliveries, double now, double dt);

  std::size_t sources() const noexcept { return last_gen_.size(); }
  double last_generation(std::size_t source) const { return last_gen_.at(source); }
  double age(std::size_t source) const { return clock_ - last_gen_.at(source); }
  double integral(std::size_t source) const { return integral_.at(source); }
  double horizon() const noexcept { return horizon_; }
  double clock() const noexcept { return clock_; }
  /// integral / horizon (0 before any time has elapsed).
  double average(std::size_t source) const;
  double average() const;

 private:
  std::vector<double> last_gen_;
  std::vector<double> integral_;
  double horizon_ = 0.0;
  double clock_ = 0.0;
};

/// Per-UAV uplink with the relevance gate. Novel updates (distance >
/// threshold) become full packets in the main queue; sub-threshold updates
/// become summary packets in a deferred store holding at most one packet per
/// track (a newer one supersedes the older). The deferred store is flushed
/// into the main queue only when the server is idle and it holds at least
/// `deferred_batch` packets. The waveform follows select_waveform per packet.
/// With gating disabled every update is a full packet on HIGH_THROUGHPUT.
class GatedUplink {
 public:
  GatedUplink(const ScenarioConfig& config, int uav_id);
  GatedUplink(const ScenarioConfig& config, int uav_id, double threshold);

  /// `score.is_novel` is recomputed against this uplink's threshold.
  void submit(int track_id, RelevanceScore score, double now);
  ServeResult step(double snr_db, double dt, double now, Rng& rng);

  const PacketQueue& queue() const noexcept { return queue_; }
  std::size_t deferred_size() const noexcept { return deferred_.size(); }
  std::size_t superseded() const noexcept { return superseded_; }
  double threshold() const noexcept { return threshold_; }

 private:
  bool gating_;
  int uav_id_;
  double threshold_;
  std::size_t batch_;
  double novel_bits_;
  double summary_bits_;
  WaveformSet waveforms_;
  ChannelParams channel_;
  PacketQueue queue_;
  std::vector<Packet> deferred_;
  std::size_t superseded_ = 0;
  std::uint64_t next_id_ = 0;
};

struct AoiBenchResult {
  double lambda = 0.0;
  double mu = 0.0;
  QueueDiscipline discipline = QueueDiscipline::Fcfs;
  double avg_aoi = 0.0;
  std::size_t generated = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
};

/// Single-source queue with Poisson(lambda) arrivals and exponential(mu)
/// service driven through PacketQueue / serve_step / AoiTracker. Time is
/// advanced from arrival to arrival, so service completions land at their
/// exact instants. PRIORITY packets carry uniform random relevance.
AoiBenchResult run_aoi_bench(double lambda, double mu, QueueDiscipline discipline, double horizon,
                             std::uint64_t seed);

/// Closed-form M/M/1 average AoI where one is known: FCFS
/// (1/mu)(1 + 1/rho + rho^2/(1 - rho)) for rho < 1, LCFS_S 1/lambda + 1/mu.
std::optional<double> analytic_aoi(double lambda, double mu, QueueDiscipline discipline);

}  // namespace adaptnet
