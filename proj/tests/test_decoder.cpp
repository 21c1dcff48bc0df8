#include "tbt/decoder.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "doctest.h"
#include "tbt/codebook.hpp"
#include "tbt/oracle.hpp"
#include "tbt/sim.hpp"

using namespace tbt;

namespace {

struct Closure {
  int trellis;
  std::size_t node;
  int layer;
  double metric;
};

std::vector<double> random_received(int n, double snr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_variance(snr)));
  std::vector<double> r(n);
  for (auto& v : r) v = 1.0 + gauss(rng);  // all-zero codeword transmitted
  return r;
}

// Independent forward DP restricted to one subtrellis.
std::vector<double> constrained_prefix_costs(const UnrolledTrellis& u,
                                             const SoftInput& s, int j) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(u.num_nodes(), inf);
  cost[u.start_node(j)] = 0.0;
  for (int layer = 1; layer <= u.depth(); ++layer)
    for (const auto& e : u.edges_into_layer(layer)) {
      if (!u.in_subtrellis(e.from, j) || !u.in_subtrellis(e.to, j)) continue;
      if (cost[e.from] == inf) continue;
      cost[e.to] = std::min(cost[e.to], cost[e.from] + s.edge_cost(layer - 1, e.label));
    }
  return cost;
}

}  // namespace

TEST_CASE("zero-noise frames return the transmitted codeword from phase 1") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  auto code = row_space(g.rows());
  for (const auto& c : code) {
    auto s = branch_costs(t, modulate(c));
    for (Mode m : {Mode::exact, Mode::approx1, Mode::approx2, Mode::phase1_only}) {
      auto res = decode(u, s, m);
      CHECK(res.codeword == c);
      CHECK(res.cost == doctest::Approx(0.0));
      CHECK(res.stats.winner_source == WinnerSource::phase1);
      CHECK(res.stats.phase2_expansions == 0);
      CHECK(res.stats.node_computations == 36);
    }
  }
}

TEST_CASE("phase 1 survivor costs lower-bound constrained prefix costs") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  for (std::uint64_t f = 0; f < 25; ++f) {
    auto r = random_received(7, 0.0, 100 + f);
    auto s = branch_costs(t, r);
    auto p1 = phase1(u, s);
    CHECK(p1.node_updates == 36);
    for (int i = 0; i < 4; ++i) CHECK(p1.cost1[u.start_node(i)] == 0.0);
    for (int j = 0; j < 4; ++j) {
      auto cj = constrained_prefix_costs(u, s, j);
      for (std::size_t v = 0; v < u.num_nodes(); ++v)
        if (u.in_subtrellis(v, j))
          CHECK(p1.cost1[v] <= cj[v] + kCostEps);
    }
  }
}

TEST_CASE("estimate is admissible and consistent on every frame tried") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  for (std::uint64_t f = 0; f < 40; ++f) {
    auto r = random_received(7, 1.0, 500 + f);
    auto s = branch_costs(t, r);
    auto p1 = phase1(u, s);
    for (int j = 0; j < 4; ++j) {
      auto comp = completion_costs(u, s, j);
      for (std::size_t v = 0; v < u.num_nodes(); ++v) {
        if (!u.in_subtrellis(v, j)) continue;
        const double est = completion_estimate(u, p1, j, v);
        CHECK(est <= comp[v] + kCostEps);
        for (const auto& e : u.edges_from(v)) {
          if (!u.in_subtrellis(e.to, j)) continue;
          const double l = s.edge_cost(u.layer_of(v), e.label);
          CHECK(l + completion_estimate(u, p1, j, e.to) >= est - kCostEps);
        }
      }
    }
  }
}

TEST_CASE("exact mode equals enumeration over random frames") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  std::mt19937_64 rng(9);
  int phase2_wins = 0;
  for (int f = 0; f < 3000; ++f) {
    const double snr = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    auto code = row_space(g.rows());
    const BitVec& sent = code[rng() % code.size()];
    auto r = add_awgn(modulate(sent), snr, rng());
    auto s = branch_costs(t, r);
    auto res = decode(u, s, Mode::exact);
    auto ml = brute_force_ml(g, r);
    REQUIRE(std::abs(res.cost - ml.cost) <= kCostEps);

    // When the runner-up is clearly worse the codewords must agree too.
    double runner_up = 1e300;
    for (const auto& c : code)
      if (c != ml.codeword) {
        double cost = 0.0;
        auto x = modulate(c);
        for (int i = 0; i < 7; ++i) cost += (r[i] - x[i]) * (r[i] - x[i]);
        runner_up = std::min(runner_up, cost);
      }
    if (runner_up > ml.cost + 1e-6) CHECK(res.codeword == ml.codeword);
    if (res.stats.winner_source == WinnerSource::phase2) ++phase2_wins;
  }
  CHECK(phase2_wins > 0);  // the search phase actually ran
}

TEST_CASE("closure metrics never decrease and never pass the final cost") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  for (std::uint64_t f = 0; f < 400; ++f) {
    auto r = random_received(7, 0.5, 900 + f);
    auto s = branch_costs(t, r);
    std::vector<Closure> trace;
    auto res = decode(u, s, Mode::exact,
                      [&](int trellis, std::size_t node, int layer, double metric) {
                        trace.push_back({trellis, node, layer, metric});
                      });
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i].metric >= trace[i - 1].metric - kCostEps);
    for (const auto& c : trace) CHECK(c.metric <= res.cost + kCostEps);
    CHECK(res.stats.max_closed_metric <= res.cost + kCostEps);

    // First closure of a shared node carries the smallest metric.
    std::map<std::size_t, double> first;
    for (const auto& c : trace) {
      auto [it, inserted] = first.emplace(c.node, c.metric);
      if (!inserted) CHECK(it->second <= c.metric + kCostEps);
    }
  }
}

TEST_CASE("after a closure at the winning cost the search stays in one subtrellis") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  int exercised = 0;
  for (std::uint64_t f = 0; f < 500; ++f) {
    auto r = random_received(7, 1.0, 4000 + f);
    auto s = branch_costs(t, r);
    auto p1 = phase1(u, s);
    auto oracle = per_subtrellis_viterbi(u, s);

    // Skip near-ties between subtrellises; the property is about a strict
    // winner.
    std::vector<double> sorted = oracle.best_cost;
    std::sort(sorted.begin(), sorted.end());
    if (sorted[1] - sorted[0] < 1e-6) continue;

    std::vector<Closure> trace;
    auto res = phase2(u, s, p1, Mode::exact,
                      [&](int trellis, std::size_t node, int layer, double metric) {
                        trace.push_back({trellis, node, layer, metric});
                      });
    if (res.stats.winner_source != WinnerSource::phase2) continue;
    bool critical_seen = false;
    for (const auto& c : trace) {
      if (!critical_seen && c.metric >= res.cost - kCostEps) critical_seen = true;
      if (critical_seen) CHECK(c.trellis == res.subtrellis);
    }
    if (critical_seen) ++exercised;
  }
  CHECK(exercised > 20);
}

TEST_CASE("work bounds for the approx modes") {
  Code code = make_code("conv35_31_L20");
  UnrolledTrellis u(code.trellis);
  const std::int64_t V = code.trellis.total_states();
  std::mt19937_64 rng(13);
  for (int f = 0; f < 150; ++f) {
    BitVec info(code.k());
    for (int b = 0; b < code.k(); ++b)
      info.set(b, std::uniform_int_distribution<int>(0, 1)(rng));
    auto r = add_awgn(modulate(code.info_map.encode(info)), 0.0, rng());
    auto s = branch_costs(code.trellis, r);
    auto p1 = phase1(u, s);

    auto a1 = phase2(u, s, p1, Mode::approx1);
    CHECK(a1.stats.phase2_expansions <= V);
    CHECK(a1.stats.node_computations <= 2 * V);

    auto a2 = phase2(u, s, p1, Mode::approx2);
    CHECK(a2.stats.phase2_expansions <= 2 * V);
    CHECK(a2.stats.node_computations <= 3 * V);

    auto ex = phase2(u, s, p1, Mode::exact);
    CHECK(ex.cost <= a1.cost + kCostEps);
    CHECK(ex.cost <= a2.cost + kCostEps);
    CHECK(a2.cost <= a1.cost + kCostEps);
  }
}

TEST_CASE("approx modes rarely lose on the hamming trellis") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  int misses1 = 0, misses2 = 0;
  const int frames = 30000;
  for (std::uint64_t f = 0; f < frames; ++f) {
    auto r = random_received(7, 2.0, 7000 + f);
    auto s = branch_costs(t, r);
    auto p1 = phase1(u, s);
    auto ex = phase2(u, s, p1, Mode::exact);
    auto a1 = phase2(u, s, p1, Mode::approx1);
    auto a2 = phase2(u, s, p1, Mode::approx2);
    CHECK(ex.cost <= a1.cost + kCostEps);
    CHECK(ex.cost <= a2.cost + kCostEps);
    if (a1.cost > ex.cost + kCostEps) ++misses1;
    if (a2.cost > ex.cost + kCostEps) ++misses2;
  }
  // Measured loss rate for the single-closure cap at this SNR is ~6e-4 of
  // frames; the double cap has produced none at all.
  CHECK(misses1 >= 2);
  CHECK(misses1 <= 90);
  CHECK(misses2 <= 30);
}

TEST_CASE("phase1_only falls back to a constrained search when no survivor is a codeword") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  int fallbacks = 0;
  for (std::uint64_t f = 0; f < 300; ++f) {
    auto r = random_received(7, -2.0, 1234 + f);
    auto s = branch_costs(t, r);
    auto p1 = phase1(u, s);
    auto res = decode(u, s, Mode::phase1_only);
    auto ml = brute_force_ml(g, r);
    CHECK(res.cost >= ml.cost - kCostEps);
    auto space = row_space(g.rows());
    CHECK(std::binary_search(space.begin(), space.end(), res.codeword));
    if (p1.low_trellis < 0) ++fallbacks;
  }
  CHECK(fallbacks > 0);
}

TEST_CASE("convenience overload matches the unrolled path") {
  auto [g, t] = hamming74();
  UnrolledTrellis u(t);
  auto r = random_received(7, 1.0, 77);
  auto direct = decode(t, r, Mode::exact);
  auto via = decode(u, branch_costs(t, r), Mode::exact);
  CHECK(direct.codeword == via.codeword);
  CHECK(direct.cost == doctest::Approx(via.cost));
}
