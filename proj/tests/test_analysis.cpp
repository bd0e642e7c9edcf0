#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "gridwave/analysis.hpp"
#include "gridwave/errors.hpp"
#include "gridwave/grid.hpp"
#include "gridwave/simulate.hpp"

using namespace gridwave;

namespace {

// Hand-built decomposition: every channel gets zero components except the ones the
// test fills in. fs = 10 Hz, 5 levels, so component index 0 is D1, 4 is D5, 5 is A5.
DecompositionSet make_decomp(const std::vector<std::string>& labels, std::size_t length) {
  DecompositionSet d;
  d.sample_rate = 10.0;
  d.start_time = 0.0;
  d.levels = 5;
  d.extension = Extension::symmetric;
  d.band_map = band_frequencies(10.0, 5);
  for (const auto& label : labels)
    d.channels.push_back({label, std::vector<std::vector<double>>(
                                     6, std::vector<double>(length, 0.0))});
  return d;
}

DecompositionSet decompose_ring_event(int n, int origin, double delta_p, double duration) {
  BenchmarkSpec spec;
  spec.topology = Topology::ring;
  spec.nodes = n;
  spec.line_susceptance = 0.35;
  const SystemModel m = build_benchmark(spec);
  const SimulationResult r = simulate(m, {origin, 1.0, delta_p}, {duration, 1e-3, 10.0});
  return decompose_set(r.signals, 5, Extension::symmetric);
}

}  // namespace

TEST_CASE("D1 energy over a window") {
  SUBCASE("zero record has zero energy everywhere") {
    const auto d = make_decomp({"a", "b"}, 100);
    const EnergyProfile p = d1_energy(d, 1.0, 2.0);
    CHECK(p.energies == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("doubling a channel quadruples its energy") {
    auto d = make_decomp({"a"}, 100);
    for (std::size_t i = 20; i < 40; ++i) d.channels[0].components[0][i] = 0.01;
    const double e1 = d1_energy(d, 0.0, 9.9).energies[0];
    for (std::size_t i = 20; i < 40; ++i) d.channels[0].components[0][i] *= 2.0;
    const double e2 = d1_energy(d, 0.0, 9.9).energies[0];
    CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-12));
  }
  SUBCASE("window sampling is inclusive and respects bounds") {
    auto d = make_decomp({"a"}, 100);
    d.channels[0].components[0][10] = 1.0;  // t = 1.0 exactly
    CHECK(d1_energy(d, 1.0, 1.4).energies[0] == 1.0);
    CHECK(d1_energy(d, 1.05, 1.4).energies[0] == 0.0);
    CHECK_THROWS_WITH_AS(d1_energy(d, 2.0, 1.0), doctest::Contains("empty window"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(d1_energy(d, 5.0, 20.0), doctest::Contains("outside record"),
                         ValidationError);
  }
}

TEST_CASE("localization ranks by energy and reports arrivals") {
  auto d = make_decomp({"a", "b", "c"}, 100);
  // b sees the disturbance first and strongest; a later and weaker; c never
  for (std::size_t i = 12; i < 20; ++i) d.channels[1].components[0][i] = 0.02;
  for (std::size_t i = 16; i < 20; ++i) d.channels[0].components[0][i] = 0.01;

  const LocalizationReport r = localize(d, 1.0, 3.0, 1e-4);
  REQUIRE(r.disturbance_found);
  REQUIRE(r.ranking.size() == 3);
  CHECK(r.ranking[0].label == "b");
  CHECK(r.ranking[1].label == "a");
  CHECK(r.ranking[2].label == "c");
  CHECK(*r.ranking[0].arrival_time == doctest::Approx(1.2));
  CHECK(*r.ranking[1].arrival_time == doctest::Approx(1.6));
  CHECK_FALSE(r.ranking[2].arrival_time.has_value());
}

TEST_CASE("localization tie-breaks by label and flags silent records") {
  SUBCASE("equal energies order by label") {
    auto d = make_decomp({"z", "a"}, 50);
    d.channels[0].components[0][10] = 0.01;
    d.channels[1].components[0][10] = 0.01;
    const LocalizationReport r = localize(d, 0.0, 4.9, 1e-4);
    CHECK(r.ranking[0].label == "a");
    CHECK(r.ranking[1].label == "z");
  }
  SUBCASE("an all-zero record reports no disturbance") {
    const auto d = make_decomp({"a", "b"}, 50);
    const LocalizationReport r = localize(d, 0.0, 4.9, 1e-4);
    CHECK_FALSE(r.disturbance_found);
    CHECK(r.ranking.empty());
  }
  SUBCASE("threshold must be positive") {
    const auto d = make_decomp({"a"}, 50);
    CHECK_THROWS_AS(localize(d, 0.0, 4.9, 0.0), ValidationError);
  }
}

TEST_CASE("simulated ring event localizes to the disturbed node") {
  const auto d = decompose_ring_event(20, 7, -0.05, 12.0);
  const LocalizationReport r = localize(d, 1.0, 1.4, 1e-4);
  REQUIRE(r.disturbance_found);
  CHECK(r.ranking.front().label == "bus07");
  CHECK(*r.ranking.front().arrival_time == doctest::Approx(1.0));
  // the zero-phase anti-alias filter smears the onset symmetrically, so the free
  // first crossing may precede the event by up to the filter half-span (3.3 s here)
  const auto arrival = first_arrival(d, 1e-4);
  REQUIRE(arrival.has_value());
  CHECK(*arrival <= 1.0 + 1e-9);
  CHECK(*arrival >= 1.0 - 3.3);
}

TEST_CASE("two simultaneous equal events rank their two origins on top") {
  BenchmarkSpec spec;
  spec.topology = Topology::ring;
  spec.nodes = 20;
  spec.line_susceptance = 0.35;
  const SystemModel m = build_benchmark(spec);
  const SimulationOptions opts{12.0, 1e-3, 10.0};
  const SignalSet a = simulate(m, {3, 1.0, -0.05}, opts).signals;
  const SignalSet b = simulate(m, {13, 1.0, -0.05}, opts).signals;

  // superposition of the two single-event records
  SignalSet sum = a;
  for (std::size_t c = 0; c < sum.channel_count(); ++c)
    for (std::size_t i = 0; i < sum.length(); ++i) sum.channels[c][i] += b.channels[c][i];

  const auto d = decompose_set(sum, 5, Extension::symmetric);
  const LocalizationReport r = localize(d, 1.0, 1.4, 1e-4);
  REQUIRE(r.ranking.size() >= 2);
  const std::set<std::string> top2 = {r.ranking[0].label, r.ranking[1].label};
  CHECK(top2 == std::set<std::string>{"bus03", "bus13"});
}

TEST_CASE("scaling every channel by a common factor changes no ranking") {
  auto d = decompose_ring_event(12, 4, -0.05, 10.0);
  const LocalizationReport before = localize(d, 1.0, 1.4, 1e-4);
  auto scaled = d;
  for (auto& ch : scaled.channels)
    for (auto& comp : ch.components)
      for (double& v : comp) v *= 7.25;
  const LocalizationReport after = localize(scaled, 1.0, 1.4, 1e-4);
  REQUIRE(before.ranking.size() == after.ranking.size());
  for (std::size_t i = 0; i < before.ranking.size(); ++i)
    CHECK(before.ranking[i].label == after.ranking[i].label);
}

TEST_CASE("coherency grouping from the deepest detail band") {
  const std::size_t len = 200;
  auto fill_d5 = [](DecompositionSet& d, int ch, double amp, double phase) {
    for (std::size_t i = 0; i < d.length(); ++i)
      d.channels[ch].components[4][i] =
          amp * std::sin(2.0 * std::numbers::pi * 0.2 * static_cast<double>(i) / 10.0 + phase);
  };

  SUBCASE("identical channels form one group with no opposition") {
    auto d = make_decomp({"a", "b", "c"}, len);
    for (int c = 0; c < 3; ++c) fill_d5(d, c, 1.0, 0.0);
    const CoherencyPartition p = coherency_groups(d, 0.0, 19.9);
    REQUIRE(p.groups.size() == 1);
    CHECK(p.groups[0] == std::vector<int>{0, 1, 2});
    CHECK(p.opposing_pairs.empty());
    CHECK(p.weakly_participating.empty());
  }
  SUBCASE("a negated copy makes two singleton groups marked opposing") {
    auto d = make_decomp({"a", "b"}, len);
    fill_d5(d, 0, 1.0, 0.0);
    fill_d5(d, 1, 1.0, std::numbers::pi);
    const CoherencyPartition p = coherency_groups(d, 0.0, 19.9);
    REQUIRE(p.groups.size() == 2);
    REQUIRE(p.opposing_pairs.size() == 1);
    CHECK(p.opposing_pairs[0] == std::pair<int, int>{0, 1});
  }
  SUBCASE("constant channels land in the weakly participating set") {
    auto d = make_decomp({"a", "b", "flat"}, len);
    fill_d5(d, 0, 1.0, 0.0);
    fill_d5(d, 1, 1.0, 0.0);
    const CoherencyPartition p = coherency_groups(d, 0.0, 19.9);
    CHECK(p.groups.size() == 1);
    CHECK(p.weakly_participating == std::vector<int>{2});
  }
  SUBCASE("low-amplitude channels are weak by the 0.25x rule") {
    auto d = make_decomp({"a", "b", "tiny"}, len);
    fill_d5(d, 0, 1.0, 0.0);
    fill_d5(d, 1, 1.0, 0.0);
    fill_d5(d, 2, 0.1, 0.7);  // correlates with nothing strongly, amplitude 10x down
    const CoherencyPartition p = coherency_groups(d, 0.0, 19.9);
    CHECK(p.groups.size() == 1);
    CHECK(p.weakly_participating == std::vector<int>{2});
  }
  SUBCASE("window and threshold validation") {
    auto d = make_decomp({"a", "b"}, len);
    CHECK_THROWS_WITH_AS(coherency_groups(d, 0.0, 0.5), doctest::Contains("too short"),
                         ValidationError);
    CHECK_THROWS_AS(coherency_groups(d, 0.0, 19.9, 0.5, 0.8), ValidationError);
    CHECK_THROWS_AS(coherency_groups(d, 0.0, 19.9, 0.8, 0.0), ValidationError);
  }
}

TEST_CASE("two-area event splits the machines into opposing area groups") {
  BenchmarkSpec spec;
  spec.topology = Topology::two_area;
  spec.nodes = 2;
  spec.line_susceptance = 1.0;
  spec.weak_tie_susceptance = 0.05;
  const SystemModel m = build_benchmark(spec);
  const SimulationResult r = simulate(m, {0, 1.0, -0.02}, {48.0, 1e-3, 10.0});
  const auto d = decompose_set(r.signals, 5, Extension::symmetric);
  const CoherencyPartition p = coherency_groups(d, 14.0, 44.0);

  REQUIRE(p.groups.size() == 2);
  std::set<std::set<int>> groups;
  for (const auto& g : p.groups) groups.insert(std::set<int>(g.begin(), g.end()));
  CHECK(groups == std::set<std::set<int>>{{0, 1}, {2, 3}});
  REQUIRE(p.opposing_pairs.size() == 1);
  CHECK(p.weakly_participating.empty());
}

TEST_CASE("coherency partition symmetries") {
  BenchmarkSpec spec;
  spec.topology = Topology::two_area;
  spec.nodes = 2;
  spec.line_susceptance = 1.0;
  spec.weak_tie_susceptance = 0.05;
  const SystemModel m = build_benchmark(spec);
  const SimulationResult r = simulate(m, {0, 1.0, -0.02}, {48.0, 1e-3, 10.0});
  const auto d = decompose_set(r.signals, 5, Extension::symmetric);
  const CoherencyPartition base = coherency_groups(d, 14.0, 44.0);

  auto partition_sets = [](const CoherencyPartition& p) {
    std::set<std::set<std::string>> sets;
    for (const auto& g : p.groups) {
      std::set<std::string> names;
      for (int c : g) names.insert(p.labels[c]);
      sets.insert(names);
    }
    return sets;
  };

  SUBCASE("negating every channel leaves the partition identical") {
    auto neg = d;
    for (auto& ch : neg.channels)
      for (auto& comp : ch.components)
        for (double& v : comp) v = -v;
    const CoherencyPartition p = coherency_groups(neg, 14.0, 44.0);
    CHECK(partition_sets(p) == partition_sets(base));
    CHECK(p.opposing_pairs.size() == base.opposing_pairs.size());
  }
  SUBCASE("scaling every channel leaves the partition identical") {
    auto sc = d;
    for (auto& ch : sc.channels)
      for (auto& comp : ch.components)
        for (double& v : comp) v *= 12.5;
    const CoherencyPartition p = coherency_groups(sc, 14.0, 44.0);
    CHECK(partition_sets(p) == partition_sets(base));
  }
  SUBCASE("relabelling channels permutes the groups identically") {
    auto perm = d;
    std::rotate(perm.channels.begin(), perm.channels.begin() + 1, perm.channels.end());
    const CoherencyPartition p = coherency_groups(perm, 14.0, 44.0);
    CHECK(partition_sets(p) == partition_sets(base));
  }
}

TEST_CASE("every channel lands in exactly one group or the weak set") {
  std::mt19937 rng(11);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> amp(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int nch = 2 + static_cast<int>(rng() % 9);
    std::vector<std::string> labels;
    for (int c = 0; c < nch; ++c) labels.push_back("ch" + std::to_string(c));
    auto d = make_decomp(labels, 150);
    for (int c = 0; c < nch; ++c) {
      const double a = amp(rng);
      const double phase = noise(rng);
      for (std::size_t i = 0; i < 150; ++i)
        d.channels[c].components[4][i] =
            a * std::sin(2.0 * std::numbers::pi * 0.2 * static_cast<double>(i) / 10.0 + phase) +
            0.05 * noise(rng);
    }
    const CoherencyPartition p = coherency_groups(d, 0.0, 14.9);
    std::vector<int> seen(nch, 0);
    for (const auto& g : p.groups) {
      CHECK_FALSE(g.empty());
      for (int c : g) ++seen[c];
    }
    for (int c : p.weakly_participating) ++seen[c];
    for (int c = 0; c < nch; ++c) CHECK(seen[c] == 1);
    REQUIRE(p.reference_channel.size() == p.groups.size());
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      CHECK(std::find(p.groups[g].begin(), p.groups[g].end(), p.reference_channel[g]) !=
            p.groups[g].end());
    }
  }
}

TEST_CASE("ROCOF estimation by least squares on the approximation band") {
  SUBCASE("an exact line is recovered exactly") {
    auto d = make_decomp({"a"}, 120);
    for (std::size_t i = 0; i < 120; ++i)
      d.channels[0].components[5][i] = 0.4 - 0.75 * d.time_at(i);
    const RocofEstimate e = estimate_rocof(d, nullptr, 1.0, 11.0);
    CHECK(e.slopes[0] == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(e.residuals[0] < 1e-12);
  }
  SUBCASE("bounded noise perturbs the slope by less than 1e-5") {
    auto d = make_decomp({"a"}, 200);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> noise(-1e-6, 1e-6);
    for (std::size_t i = 0; i < 200; ++i)
      d.channels[0].components[5][i] = 0.1 + 0.03 * d.time_at(i) + noise(rng);
    const RocofEstimate e = estimate_rocof(d, nullptr, 0.0, 19.9);
    CHECK(std::abs(e.slopes[0] - 0.03) < 1e-5);
  }
  SUBCASE("a zero record fits zero slopes") {
    const auto d = make_decomp({"a", "b"}, 100);
    const RocofEstimate e = estimate_rocof(d, nullptr, 0.0, 9.9);
    CHECK(e.slopes == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("windows below 10 samples are rejected") {
    const auto d = make_decomp({"a"}, 100);
    CHECK_THROWS_WITH_AS(estimate_rocof(d, nullptr, 0.0, 0.5), doctest::Contains("too short"),
                         ValidationError);
  }
}

TEST_CASE("system ROCOF on a uniform ring matches the aggregate closed form") {
  BenchmarkSpec spec;
  spec.topology = Topology::ring;
  spec.nodes = 10;
  spec.line_susceptance = 0.35;
  const SystemModel m = build_benchmark(spec);
  // 10 machines, H = 4 s, S = 100 MVA, f0 = 60 Hz; a 50 MW loss on the 100 MVA base
  const double delta_p = -0.5;
  const SimulationResult r = simulate(m, {3, 1.0, delta_p}, {30.0, 1e-3, 10.0});
  const auto d = decompose_set(r.signals, 5, Extension::symmetric);
  const RocofEstimate e = estimate_rocof(d, &m, 4.0, 27.0);

  double hs = 0.0;
  for (const auto& g : m.generators) hs += g.inertia_h * g.rating_s;
  const double analytic = delta_p * m.nominal_frequency * m.base_power / (2.0 * hs);
  CHECK(analytic == doctest::Approx(-0.375).epsilon(1e-12));

  REQUIRE(e.system_slope.has_value());
  CHECK(std::abs(*e.system_slope - analytic) < 0.05 * std::abs(analytic));
  for (double slope : e.slopes)
    CHECK(std::abs(slope - *e.system_slope) < 0.10 * std::abs(*e.system_slope));
}

TEST_CASE("system ROCOF requires matching channel and generator counts") {
  BenchmarkSpec spec;
  spec.topology = Topology::ring;
  spec.nodes = 4;
  const SystemModel m = build_benchmark(spec);
  const auto d = make_decomp({"a", "b"}, 100);
  CHECK_THROWS_AS(estimate_rocof(d, &m, 0.0, 9.9), ValidationError);
}
