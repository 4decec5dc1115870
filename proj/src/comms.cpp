#include "adaptnet/comms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptnet/error.hpp"
#include "adaptnet/radar.hpp"

namespace adaptnet {

QueueDiscipline parse_discipline(std::string_view name) {
  if (name == "fcfs") return QueueDiscipline::Fcfs;
  if (name == "lcfs_s") return QueueDiscipline::LcfsS;
  if (name == "lcfs_w") return QueueDiscipline::LcfsW;
  if (name == "priority") return QueueDiscipline::Priority;
  throw InvalidInput("unknown queue discipline '" + std::string(name) + "'");
}

const char* to_string(QueueDiscipline d) {
  switch (d) {
    case QueueDiscipline::Fcfs: return "fcfs";
    case QueueDiscipline::LcfsS: return "lcfs_s";
    case QueueDiscipline::LcfsW: return "lcfs_w";
    case QueueDiscipline::Priority: return "priority";
  }
  return "unknown";
}

const char* to_string(WaveformKind k) {
  return k == WaveformKind::HighThroughput ? "HIGH_THROUGHPUT" : "ENERGY_SAVING";
}

// ---------------------------------------------------------------------------
// PacketQueue

PacketQueue::PacketQueue(QueueDiscipline discipline, std::size_t capacity)
    : discipline_(discipline), capacity_(capacity) {}

double PacketQueue::key(const Packet& p) const noexcept {
  // Age difference between two packets is their gen_time difference, so
  // -gen_time stands in for age.
  return weight_ * p.relevance.distance / distance_scale_ - (1.0 - weight_) * p.gen_time / age_scale_;
}

bool PacketQueue::before(const Packet& a, const Packet& b) const noexcept {
  const double ka = key(a);
  const double kb = key(b);
  if (ka != kb) return ka > kb;
  if (a.gen_time != b.gen_time) return a.gen_time < b.gen_time;
  return a.id < b.id;
}

void PacketQueue::set_priority_weight(double weight, double distance_scale, double age_scale) {
  if (!(distance_scale > 0.0) || !(age_scale > 0.0)) throw InvalidInput("priority scales must be positive");
  weight_ = std::clamp(weight, 0.0, 1.0);
  distance_scale_ = distance_scale;
  age_scale_ = age_scale;
  if (discipline_ == QueueDiscipline::Priority) {
    std::stable_sort(waiting_.begin(), waiting_.end(), [this](const Packet& a, const Packet& b) { return before(a, b); });
  }
}

void PacketQueue::start_next() {
  served_bits_ = 0.0;
  if (waiting_.empty()) {
    in_service_.reset();
    return;
  }
  in_service_ = std::move(waiting_.front());
  waiting_.pop_front();
}

Packet PacketQueue::complete_service() {
  if (!in_service_) throw UsageError("complete_service: nothing in service");
  Packet done = std::move(*in_service_);
  start_next();
  return done;
}

void PacketQueue::enqueue(Packet packet, double now) {
  if (packet.gen_time > now) throw InvalidInput("enqueue: packet generated in the future");
  if (!(packet.size_bits > 0.0)) throw InvalidInput("enqueue: packet size must be positive");
  if (!in_service_) {
    in_service_ = std::move(packet);
    served_bits_ = 0.0;
    return;
  }
  switch (discipline_) {
    case QueueDiscipline::Fcfs:
      if (capacity_ != 0 && waiting_.size() >= capacity_) {
        ++dropped_;
        return;
      }
      waiting_.push_back(std::move(packet));
      return;
    case QueueDiscipline::LcfsS:
      ++dropped_;
      in_service_ = std::move(packet);
      served_bits_ = 0.0;
      return;
    case QueueDiscipline::LcfsW:
      dropped_ += waiting_.size();
      waiting_.clear();
      waiting_.push_back(std::move(packet));
      return;
    case QueueDiscipline::Priority: {
      auto pos = std::upper_bound(waiting_.begin(), waiting_.end(), packet,
                                  [this](const Packet& a, const Packet& b) { return before(a, b); });
      waiting_.insert(pos, std::move(packet));
      if (capacity_ != 0 && waiting_.size() > capacity_) {
        waiting_.pop_back();
        ++dropped_;
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Waveforms and service

WaveformSet::WaveformSet(Waveform high_throughput, Waveform energy_saving)
    : high(high_throughput), low(energy_saving) {
  high.kind = WaveformKind::HighThroughput;
  low.kind = WaveformKind::EnergySaving;
  if (!(high.rate_bps > low.rate_bps) || !(high.power_w > low.power_w) || !(low.rate_bps > 0.0)) {
    throw InvalidInput("waveforms: HIGH_THROUGHPUT must exceed ENERGY_SAVING in rate and power");
  }
}

WaveformSet waveform_set(const ScenarioConfig& config) {
  return {{WaveformKind::HighThroughput, config.high_rate_bps, config.high_power_w},
          {WaveformKind::EnergySaving, config.low_rate_bps, config.low_power_w}};
}

Waveform select_waveform(const RelevanceScore& score, double threshold, const WaveformSet& set) {
  return score.distance > threshold ? set.high : set.low;
}

ChannelParams channel_params(const ScenarioConfig& config) {
  return {config.snr_floor_db, config.snr_ref_db, config.channel_erasure_prob};
}

double success_factor(double snr_db, const ChannelParams& channel) {
  return snr_quality(snr_db, channel.snr_floor, channel.snr_ref);
}

ServeResult serve_step(PacketQueue& queue, const WaveformChooser& choose, double snr_db, double dt, double now,
                       Rng& rng, const ChannelParams& channel) {
  if (!(dt > 0.0)) throw InvalidInput("serve_step: dt must be positive");
  ServeResult result;
  const double quality = success_factor(snr_db, channel);
  double remaining = dt;
  double elapsed = 0.0;
  while (queue.in_service() && remaining > 0.0) {
    const Packet& head = *queue.in_service();
    const Waveform w = choose(head);
    const double rate = w.rate_bps * quality;
    const bool sub_high = w.kind == WaveformKind::HighThroughput && !head.relevance.is_novel;
    if (!(rate > 0.0)) {
      // Transmitting into a dead channel: energy spent, nothing gets through.
      result.energy_j += w.power_w * remaining;
      result.busy_time += remaining;
      break;
    }
    const double need = head.size_bits - queue.served_bits();
    const double t_need = need / rate;
    // Relative slack absorbs (rate * dt) / rate != dt rounding.
    if (t_need <= remaining * (1.0 + 1e-12)) {
      const double used = std::min(t_need, remaining);
      result.energy_j += w.power_w * used;
      result.busy_time += used;
      result.bits_sent += need;
      if (sub_high) result.high_bits_sub_threshold += need;
      remaining = std::max(0.0, remaining - t_need);
      elapsed += used;
      Packet done = queue.complete_service();
      done.delivered_at = now + elapsed;
      if (channel.erasure_prob > 0.0 && rng.uniform() < channel.erasure_prob) {
        ++result.erased;
      } else {
        result.delivered.push_back(std::move(done));
      }
    } else {
      const double bits = rate * remaining;
      queue.add_service(bits);
      result.energy_j += w.power_w * remaining;
      result.busy_time += remaining;
      result.bits_sent += bits;
      if (sub_high) result.high_bits_sub_threshold += bits;
      elapsed += remaining;
      remaining = 0.0;
    }
  }
  return result;
}

ServeResult serve_step(PacketQueue& queue, const Waveform& waveform, double snr_db, double dt, double now, Rng& rng,
                       const ChannelParams& channel) {
  return serve_step(queue, [&waveform](const Packet&) { return waveform; }, snr_db, dt, now, rng, channel);
}

// ---------------------------------------------------------------------------
// AoiTracker

AoiTracker::AoiTracker(std::size_t sources, double start_time)
    : last_gen_(sources, start_time), integral_(sources, 0.0), clock_(start_time) {
  if (sources == 0) throw InvalidInput("AoiTracker: at least one source required");
}

void AoiTracker::update(std::span<const Packet> deliveries, double now, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("aoi_update: dt must be positive");
  const double end = now + dt;
  struct Event {
    double at;
    double gen;
  };
  std::vector<std::vector<Event>> events(last_gen_.size());
  for (const auto& p : deliveries) {
    if (p.source_uav < 0 || static_cast<std::size_t>(p.source_uav) >= last_gen_.size()) {
      throw InvalidInput("aoi_update: delivery from unknown source");
    }
    const double at = std::isnan(p.delivered_at) ? end : std::clamp(p.delivered_at, now, end);
    if (p.gen_time > at) throw InvalidInput("aoi_update: delivery generated in the future");
    events[static_cast<std::size_t>(p.source_uav)].push_back({at, p.gen_time});
  }
  for (std::size_t s = 0; s < last_gen_.size(); ++s) {
    auto& ev = events[s];
    std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
    double t = now;
    double g = last_gen_[s];
    for (const auto& e : ev) {
      integral_[s] += (e.at - t) * ((t - g) + (e.at - g)) / 2.0;
      t = e.at;
      g = std::max(g, e.gen);
    }
    integral_[s] += (end - t) * ((t - g) + (end - g)) / 2.0;
    last_gen_[s] = g;
  }
  horizon_ += dt;
  clock_ = end;
}

double AoiTracker::average(std::size_t source) const {
  return horizon_ > 0.0 ? integral_.at(source) / horizon_ : 0.0;
}

double AoiTracker::average() const {
  double total = 0.0;
  for (std::size_t s = 0; s < last_gen_.size(); ++s) total += average(s);
  return total / static_cast<double>(last_gen_.size());
}

// ---------------------------------------------------------------------------
// GatedUplink

GatedUplink::GatedUplink(const ScenarioConfig& config, int uav_id)
    : GatedUplink(config, uav_id, config.frechet_threshold) {}

GatedUplink::GatedUplink(const ScenarioConfig& config, int uav_id, double threshold)
    : gating_(config.gating),
      uav_id_(uav_id),
      threshold_(threshold),
      batch_(static_cast<std::size_t>(config.deferred_batch)),
      novel_bits_(config.packet_bits_novel),
      summary_bits_(config.packet_bits_summary),
      waveforms_(waveform_set(config)),
      channel_(channel_params(config)),
      queue_(parse_discipline(config.queue_discipline), static_cast<std::size_t>(config.queue_capacity)) {
  if (!(threshold > 0.0)) throw InvalidInput("GatedUplink: threshold must be positive");
  queue_.set_priority_weight(1.0, threshold_, config.aoi_norm_s);
}

void GatedUplink::submit(int track_id, RelevanceScore score, double now) {
  score.is_novel = score.distance > threshold_;
  Packet p;
  p.id = next_id_++;
  p.source_uav = uav_id_;
  p.track_id = track_id;
  p.gen_time = now;
  p.relevance = score;
  if (!gating_ || score.is_novel) {
    p.size_bits = novel_bits_;
    queue_.enqueue(std::move(p), now);
    return;
  }
  p.size_bits = summary_bits_;
  auto it = std::find_if(deferred_.begin(), deferred_.end(), [&](const Packet& d) { return d.track_id == track_id; });
  if (it != deferred_.end()) {
    deferred_.erase(it);
    ++superseded_;
  }
  deferred_.push_back(std::move(p));
}

ServeResult GatedUplink::step(double snr_db, double dt, double now, Rng& rng) {
  if (gating_ && queue_.idle() && deferred_.size() >= batch_) {
    // deferred_ is in submission order, which is gen_time order.
    for (auto& p : deferred_) queue_.enqueue(std::move(p), now);
    deferred_.clear();
  }
  if (!gating_) return serve_step(queue_, waveforms_.high, snr_db, dt, now, rng, channel_);
  return serve_step(
      queue_, [this](const Packet& p) { return select_waveform(p.relevance, threshold_, waveforms_); }, snr_db, dt,
      now, rng, channel_);
}

// ---------------------------------------------------------------------------
// AoI bench

AoiBenchResult run_aoi_bench(double lambda, double mu, QueueDiscipline discipline, double horizon,
                             std::uint64_t seed) {
  if (!(lambda > 0.0) || !(mu > 0.0) || !(horizon > 0.0)) throw InvalidInput("aoi bench: rates and horizon must be positive");
  Rng rng(seed);
  PacketQueue queue(discipline);
  AoiTracker tracker(1);
  // Unit-rate channel: a packet of s bits takes s seconds.
  const Waveform wave{WaveformKind::HighThroughput, 1.0, 1.0};
  const ChannelParams channel{0.0, 1.0, 0.0};
  const double snr = 1.0;

  AoiBenchResult out{lambda, mu, discipline, 0.0, 0, 0, 0};
  double now = 0.0;
  std::uint64_t next_id = 0;
  while (now < horizon) {
    const double gap = rng.exponential(lambda);
    const double dt = std::min(gap, horizon - now);
    auto served = serve_step(queue, wave, snr, dt, now, rng, channel);
    out.delivered += served.delivered.size();
    tracker.update(served.delivered, now, dt);
    now += dt;
    if (dt < gap) break;
    Packet p;
    p.id = next_id++;
    p.gen_time = now;
    p.size_bits = std::max(rng.exponential(mu), 1e-12);
    p.relevance.distance = rng.uniform();
    queue.enqueue(std::move(p), now);
    ++out.generated;
  }
  out.avg_aoi = tracker.average(0);
  out.dropped = queue.dropped();
  return out;
}

std::optional<double> analytic_aoi(double lambda, double mu, QueueDiscipline discipline) {
  const double rho = lambda / mu;
  switch (discipline) {
    case QueueDiscipline::Fcfs:
      if (rho >= 1.0) return std::nullopt;
      return (1.0 / mu) * (1.0 + 1.0 / rho + rho * rho / (1.0 - rho));
    case QueueDiscipline::LcfsS:
      return 1.0 / lambda + 1.0 / mu;
    default:
      return std::nullopt;
  }
}

}  // namespace adaptnet
