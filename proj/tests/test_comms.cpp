#include <cmath>

#include <doctest.h>

#include "adaptnet/comms.hpp"
#include "adaptnet/error.hpp"

using namespace adaptnet;

namespace {

Packet pkt(std::uint64_t id, double gen, double bits = 100.0, double distance = 0.0) {
  Packet p;
  p.id = id;
  p.gen_time = gen;
  p.size_bits = bits;
  p.relevance.distance = distance;
  return p;
}

const ChannelParams kClean{0.0, 20.0, 0.0};
const Waveform kUnit{WaveformKind::HighThroughput, 100.0, 2.0};

// Independent event-driven M/M/1 FCFS simulation; returns the time-average age.
double fcfs_aoi_oracle(double lambda, double mu, double horizon, std::uint64_t seed) {
  Rng rng(seed);
  double arrival = 0.0;
  double server_free = 0.0;
  double last_delivery = 0.0;
  double freshest = 0.0;
  double area = 0.0;
  while (true) {
    arrival += rng.exponential(lambda);
    if (arrival >= horizon) break;
    const double depart = std::max(arrival, server_free) + rng.exponential(mu);
    server_free = depart;
    if (depart >= horizon) break;
    area += (depart - last_delivery) * ((last_delivery - freshest) + (depart - freshest)) / 2.0;
    last_delivery = depart;
    freshest = arrival;
  }
  area += (horizon - last_delivery) * ((last_delivery - freshest) + (horizon - freshest)) / 2.0;
  return area / horizon;
}

}  // namespace

TEST_SUITE("comms") {
  TEST_CASE("discipline names") {
    for (auto d : kAllDisciplines) CHECK(parse_discipline(to_string(d)) == d);
    CHECK_THROWS_AS(parse_discipline("lifo"), InvalidInput);
  }

  TEST_CASE("an empty queue serves the newcomer") {
    PacketQueue q(QueueDiscipline::Fcfs);
    q.enqueue(pkt(1, 0), 0);
    REQUIRE(q.in_service());
    CHECK(q.in_service()->id == 1);
    CHECK(q.waiting().empty());
  }

  TEST_CASE("FCFS appends to the tail") {
    PacketQueue q(QueueDiscipline::Fcfs);
    for (std::uint64_t i = 1; i <= 4; ++i) q.enqueue(pkt(i, 0), 0);
    CHECK(q.in_service()->id == 1);
    CHECK(q.waiting()[0].id == 2);
    CHECK(q.waiting()[2].id == 4);
  }

  TEST_CASE("LCFS_S preempts service") {
    PacketQueue q(QueueDiscipline::LcfsS);
    q.enqueue(pkt(1, 0), 0);
    q.enqueue(pkt(2, 1), 1);
    CHECK(q.in_service()->id == 2);
    CHECK(q.dropped() == 1);
    CHECK(q.size() == 1);
  }

  TEST_CASE("LCFS_W replaces the waiter only") {
    PacketQueue q(QueueDiscipline::LcfsW);
    q.enqueue(pkt(1, 0), 0);
    q.enqueue(pkt(2, 1), 1);
    q.enqueue(pkt(3, 2), 2);
    CHECK(q.in_service()->id == 1);
    REQUIRE(q.waiting().size() == 1);
    CHECK(q.waiting()[0].id == 3);
    CHECK(q.dropped() == 1);
  }

  TEST_CASE("PRIORITY orders by distance then age") {
    PacketQueue q(QueueDiscipline::Priority);
    q.enqueue(pkt(0, 0, 100, 0.5), 0);
    q.enqueue(pkt(1, 1, 100, 2.0), 1);
    q.enqueue(pkt(2, 2, 100, 9.0), 2);
    q.enqueue(pkt(3, 3, 100, 2.0), 3);
    q.enqueue(pkt(4, 3, 100, 4.0), 3);
    CHECK(q.in_service()->id == 0);
    std::vector<std::uint64_t> order;
    for (const auto& p : q.waiting()) order.push_back(p.id);
    CHECK(order == std::vector<std::uint64_t>{2, 4, 1, 3});
  }

  TEST_CASE("PRIORITY weight zero reduces to oldest first") {
    PacketQueue q(QueueDiscipline::Priority);
    q.enqueue(pkt(0, 0, 100, 0.0), 0);
    q.enqueue(pkt(1, 1, 100, 9.0), 1);
    q.enqueue(pkt(2, 2, 100, 1.0), 2);
    q.set_priority_weight(0.0, 1.0, 1.0);
    CHECK(q.waiting()[0].id == 1);
    q.enqueue(pkt(3, 0.5, 100, 0.0), 3);
    CHECK(q.waiting()[0].id == 3);
  }

  TEST_CASE("queue discipline length bounds under random load") {
    Rng rng(6);
    for (auto d : kAllDisciplines) {
      PacketQueue q(d);
      double now = 0.0;
      std::size_t max_len = 0;
      for (int i = 0; i < 2000; ++i) {
        now += rng.exponential(1.0);
        q.enqueue(pkt(i, now, 1.0, rng.uniform()), now);
        max_len = std::max(max_len, q.size());
        auto r = serve_step(q, Waveform{WaveformKind::HighThroughput, 0.9, 1.0}, 20.0, rng.exponential(1.0), now, rng, kClean);
        if (!q.idle()) CHECK(r.busy_time > 0.0);
      }
      if (d == QueueDiscipline::LcfsS) CHECK(max_len <= 1);
      if (d == QueueDiscipline::LcfsW) CHECK(max_len <= 2);
    }
  }

  TEST_CASE("PRIORITY emits co-resident packets by relevance") {
    PacketQueue q(QueueDiscipline::Priority);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) q.enqueue(pkt(i, 0, 100, rng.uniform(0, 10)), 0);
    q.complete_service();
    double last = 1e300;
    while (!q.idle()) {
      const Packet p = q.complete_service();
      CHECK(p.relevance.distance <= last);
      last = p.relevance.distance;
    }
  }

  TEST_CASE("enqueue preconditions") {
    PacketQueue q(QueueDiscipline::Fcfs);
    CHECK_THROWS_AS(q.enqueue(pkt(1, 5), 4), InvalidInput);
    CHECK_THROWS_AS(q.enqueue(pkt(1, 0, 0.0), 4), InvalidInput);
  }

  TEST_CASE("a packet of rate times dt is delivered in one step") {
    PacketQueue q(QueueDiscipline::Fcfs);
    q.enqueue(pkt(1, 0, kUnit.rate_bps * 0.5), 0);
    Rng rng(0);
    const auto r = serve_step(q, kUnit, 20.0, 0.5, 0.0, rng, kClean);
    REQUIRE(r.delivered.size() == 1);
    CHECK(r.delivered[0].delivered_at == doctest::Approx(0.5));
    CHECK(r.energy_j == doctest::Approx(kUnit.power_w * 0.5));
    CHECK(q.idle());
  }

  TEST_CASE("an idle queue costs nothing") {
    PacketQueue q(QueueDiscipline::Fcfs);
    Rng rng(0);
    const auto r = serve_step(q, kUnit, 20.0, 0.5, 0.0, rng, kClean);
    CHECK(r.delivered.empty());
    CHECK(r.energy_j == 0.0);
    CHECK_THROWS_AS(serve_step(q, kUnit, 20.0, 0.0, 0.0, rng, kClean), InvalidInput);
  }

  TEST_CASE("halving the success factor doubles the step count") {
    for (double size : {50.0, 120.0, 333.0}) {
      int steps_clean = 0, steps_half = 0;
      for (double snr : {20.0, 10.0}) {
        PacketQueue q(QueueDiscipline::Fcfs);
        q.enqueue(pkt(1, 0, size), 0);
        Rng rng(0);
        int steps = 0;
        while (!q.idle()) {
          serve_step(q, kUnit, snr, 0.5, steps * 0.5, rng, kClean);
          ++steps;
        }
        (snr == 20.0 ? steps_clean : steps_half) = steps;
      }
      CHECK(steps_clean == static_cast<int>(std::ceil(size / 50.0)));
      CHECK(steps_half == static_cast<int>(std::ceil(size / 25.0)));
    }
    CHECK(success_factor(10.0, kClean) == 0.5);
    CHECK(success_factor(-3.0, kClean) == 0.0);
    CHECK(success_factor(40.0, kClean) == 1.0);
  }

  TEST_CASE("the next packet starts within the same step") {
    PacketQueue q(QueueDiscipline::Fcfs);
    q.enqueue(pkt(1, 0, 20), 0);
    q.enqueue(pkt(2, 0, 20), 0);
    q.enqueue(pkt(3, 0, 20), 0);
    Rng rng(0);
    const auto r = serve_step(q, kUnit, 20.0, 0.5, 0.0, rng, kClean);
    CHECK(r.delivered.size() == 2);
    CHECK(r.delivered[0].delivered_at == doctest::Approx(0.2));
    CHECK(r.delivered[1].delivered_at == doctest::Approx(0.4));
    CHECK(q.served_bits() == doctest::Approx(10.0));
    CHECK(r.energy_j == doctest::Approx(1.0));
  }

  TEST_CASE("a dead channel burns power and moves nothing") {
    PacketQueue q(QueueDiscipline::Fcfs);
    q.enqueue(pkt(1, 0, 20), 0);
    Rng rng(0);
    const auto r = serve_step(q, kUnit, -5.0, 0.5, 0.0, rng, kClean);
    CHECK(r.delivered.empty());
    CHECK(r.energy_j == doctest::Approx(1.0));
    CHECK(r.bits_sent == 0.0);
  }

  TEST_CASE("waveform selection") {
    const WaveformSet set = waveform_set(ScenarioConfig{});
    CHECK(select_waveform({0.0, false}, 10.0, set).kind == WaveformKind::EnergySaving);
    CHECK(select_waveform({10.0, false}, 10.0, set).kind == WaveformKind::EnergySaving);
    CHECK(select_waveform({20.0, true}, 10.0, set).kind == WaveformKind::HighThroughput);
    CHECK(set.high.rate_bps > set.low.rate_bps);
    CHECK(set.high.power_w > set.low.power_w);
    CHECK_THROWS_AS(WaveformSet({WaveformKind::HighThroughput, 1e6, 1.0}, {WaveformKind::EnergySaving, 2e6, 4.0}), InvalidInput);
  }

  TEST_CASE("age ramps without deliveries") {
    AoiTracker t(1, 0.0);
    t.update({}, 0.0, 3.0);
    const double a0 = t.age(0);
    CHECK(a0 == 3.0);
    const double before = t.integral(0);
    t.update({}, 3.0, 4.0);
    CHECK(t.age(0) == a0 + 4.0);
    CHECK(t.integral(0) - before == doctest::Approx(a0 * 4.0 + 16.0 / 2.0));
  }

  TEST_CASE("a fresh delivery drops age to zero") {
    AoiTracker t(1, 0.0);
    t.update({}, 0.0, 5.0);
    Packet p = pkt(1, 6.0);
    p.delivered_at = 6.0;
    t.update(std::vector<Packet>{p}, 5.0, 1.0);
    CHECK(t.age(0) == 0.0);
    Packet stale = pkt(2, 1.0);
    t.update(std::vector<Packet>{stale}, 6.0, 1.0);
    CHECK(t.age(0) == 1.0);
  }

  TEST_CASE("aoi preconditions") {
    AoiTracker t(2, 0.0);
    Packet future = pkt(1, 9.0);
    future.delivered_at = 1.0;
    CHECK_THROWS_AS(t.update(std::vector<Packet>{future}, 0.0, 1.0), InvalidInput);
    Packet foreign = pkt(1, 0.0);
    foreign.source_uav = 5;
    CHECK_THROWS_AS(t.update(std::vector<Packet>{foreign}, 0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(t.update({}, 0.0, 0.0), InvalidInput);
  }

  TEST_CASE("the sawtooth integral is non-decreasing with unit slope") {
    AoiTracker t(1, 0.0);
    Rng rng(9);
    double now = 0.0;
    double last_integral = 0.0;
    for (int i = 0; i < 500; ++i) {
      const double dt = rng.uniform(0.1, 2.0);
      const double age_before = t.age(0);
      std::vector<Packet> ds;
      if (rng.bernoulli(0.3)) {
        Packet p = pkt(i, rng.uniform(std::max(0.0, now - 5.0), now + dt));
        p.delivered_at = now + dt;
        ds.push_back(p);
      }
      t.update(ds, now, dt);
      now += dt;
      CHECK(t.integral(0) >= last_integral);
      last_integral = t.integral(0);
      if (ds.empty()) CHECK(t.age(0) == doctest::Approx(age_before + dt));
      else CHECK(t.age(0) <= age_before + dt + 1e-12);
      CHECK(t.age(0) >= 0.0);
    }
  }

  TEST_CASE("M/M/1 FCFS average age against the closed form and an event oracle") {
    const double horizon = 2e5;
    const auto r = run_aoi_bench(0.5, 1.0, QueueDiscipline::Fcfs, horizon, 42);
    CHECK(std::abs(r.avg_aoi - 3.5) / 3.5 <= 0.05);
    const double oracle = fcfs_aoi_oracle(0.5, 1.0, horizon, 43);
    CHECK(std::abs(oracle - 3.5) / 3.5 <= 0.05);
    CHECK(std::abs(r.avg_aoi - oracle) / oracle <= 0.05);
    CHECK(analytic_aoi(0.5, 1.0, QueueDiscipline::Fcfs).value() == doctest::Approx(3.5));
    CHECK(analytic_aoi(0.5, 1.0, QueueDiscipline::LcfsS).value() == doctest::Approx(3.0));
    CHECK_FALSE(analytic_aoi(0.5, 1.0, QueueDiscipline::LcfsW).has_value());
  }

  TEST_CASE("LCFS_S beats FCFS at rho one half") {
    double fcfs = 0.0, lcfs = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      fcfs += run_aoi_bench(0.5, 1.0, QueueDiscipline::Fcfs, 5e4, seed).avg_aoi;
      lcfs += run_aoi_bench(0.5, 1.0, QueueDiscipline::LcfsS, 5e4, seed).avg_aoi;
    }
    CHECK(lcfs < fcfs);
    CHECK(lcfs / 3.0 == doctest::Approx(3.0).epsilon(0.05));
  }

  TEST_CASE("gated uplink defers sub-threshold updates") {
    ScenarioConfig config;
    config.deferred_batch = 2;
    GatedUplink up(config, 0, 10.0);
    Rng rng(0);
    up.submit(1, {3.0, false}, 0.0);
    CHECK(up.deferred_size() == 1);
    CHECK(up.queue().idle());
    up.submit(1, {4.0, false}, 0.5);
    CHECK(up.deferred_size() == 1);
    CHECK(up.superseded() == 1);
    up.submit(2, {50.0, false}, 0.5);
    CHECK(up.queue().size() == 1);
    CHECK(up.queue().in_service()->relevance.is_novel);
    up.submit(3, {1.0, false}, 0.5);
    CHECK(up.deferred_size() == 2);
    const auto r = up.step(config.snr_base_db, 0.5, 0.5, rng);
    CHECK(r.delivered.size() == 1);
    CHECK(r.delivered[0].track_id == 2);
    CHECK(up.deferred_size() == 2);
    const auto flush = up.step(config.snr_base_db, 0.5, 1.0, rng);
    CHECK(up.deferred_size() == 0);
    CHECK(flush.delivered.size() == 2);
    for (const auto& p : flush.delivered) CHECK(p.size_bits == config.packet_bits_summary);
    CHECK(flush.high_bits_sub_threshold == 0.0);
  }

  TEST_CASE("ungated uplink sends everything on HIGH_THROUGHPUT") {
    ScenarioConfig config;
    config.gating = false;
    GatedUplink up(config, 0, 10.0);
    Rng rng(0);
    up.submit(1, {0.0, false}, 0.0);
    CHECK(up.queue().size() == 1);
    const auto r = up.step(config.snr_base_db, 0.5, 0.0, rng);
    CHECK(r.high_bits_sub_threshold == doctest::Approx(config.packet_bits_novel));
  }
}
