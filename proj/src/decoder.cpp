#include "tbt/decoder.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace tbt {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::exact: return "exact";
    case Mode::approx1: return "approx1";
    case Mode::approx2: return "approx2";
    case Mode::phase1_only: return "phase1_only";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  if (name == "exact") return Mode::exact;
  if (name == "approx1") return Mode::approx1;
  if (name == "approx2") return Mode::approx2;
  if (name == "phase1_only") return Mode::phase1_only;
  throw std::invalid_argument("unknown mode: " + name);
}

Phase1Result phase1(const UnrolledTrellis& u, const SoftInput& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t total = u.num_nodes();
  Phase1Result p;
  p.cost1.assign(total, inf);
  p.parent.assign(total, -1);
  p.parent_label.assign(total, 0);
  p.origin.assign(total, -1);

  const int L = u.num_subtrellises();
  for (int i = 0; i < L; ++i) {
    p.cost1[u.start_node(i)] = 0.0;
    p.origin[u.start_node(i)] = i;
  }
  for (int layer = 1; layer <= u.depth(); ++layer) {
    for (const auto& e : u.edges_into_layer(layer)) {
      const double c = p.cost1[e.from] + s.edge_cost(layer - 1, e.label);
      if (c < p.cost1[e.to]) {
        p.cost1[e.to] = c;
        p.parent[e.to] = e.from;
        p.parent_label[e.to] = e.label;
        p.origin[e.to] = p.origin[e.from];
      }
    }
    p.node_updates += u.layer_size(layer);
  }

  p.trellis_metric.resize(L);
  p.codeword_survivor.resize(L);
  for (int j = 0; j < L; ++j) {
    p.trellis_metric[j] = p.cost1[u.final_node(j)];
    p.codeword_survivor[j] = p.origin[u.final_node(j)] == j;
    if (p.codeword_survivor[j] && p.trellis_metric[j] < p.low) {
      p.low = p.trellis_metric[j];
      p.low_trellis = j;
    }
  }
  return p;
}

double completion_estimate(const UnrolledTrellis& u, const Phase1Result& p1,
                           int trellis, std::size_t node) {
  (void)u;
  return p1.trellis_metric[trellis] - p1.cost1[node];
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Slot {
  double cost = kInf;
  std::int64_t parent = -1;
  std::uint32_t label = 0;
  bool closed = false;
};

struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    return std::tie(a.metric, a.trellis, a.node) > std::tie(b.metric, b.trellis, b.node);
  }
};

BitVec labels_along(const UnrolledTrellis& u,
                    const std::function<std::pair<std::int64_t, std::uint32_t>(std::int64_t)>& step,
                    std::int64_t final_node) {
  const auto& widths = u.base().section_widths;
  BitVec word(u.base().total_symbols());
  std::vector<int> bit_offset(u.depth() + 1, 0);
  for (int t = 0; t < u.depth(); ++t) bit_offset[t + 1] = bit_offset[t] + widths[t];
  std::int64_t v = final_node;
  while (u.layer_of(v) > 0) {
    auto [prev, label] = step(v);
    const int sec = u.layer_of(v) - 1;
    for (int b = 0; b < widths[sec]; ++b)
      word.set(bit_offset[sec] + b, (label >> (widths[sec] - 1 - b)) & 1u);
    v = prev;
  }
  return word;
}

BitVec phase1_winner_word(const UnrolledTrellis& u, const Phase1Result& p1, int j) {
  return labels_along(
      u,
      [&](std::int64_t v) {
        return std::pair<std::int64_t, std::uint32_t>(p1.parent[v], p1.parent_label[v]);
      },
      static_cast<std::int64_t>(u.final_node(j)));
}

}  // namespace

DecodeResult phase2(const UnrolledTrellis& u, const SoftInput& s,
                    const Phase1Result& p1, Mode mode, const ClosureTrace& trace) {
  if (mode == Mode::phase1_only)
    throw std::invalid_argument("phase2 requires a search mode");

  DecodeResult res;
  res.mode = mode;
  res.stats.node_computations = p1.node_updates;

  const int L = u.num_subtrellises();
  const double low = p1.low;

  auto phase1_return = [&](int j) {
    res.codeword = phase1_winner_word(u, p1, j);
    res.cost = p1.trellis_metric[j];
    res.subtrellis = j;
    res.stats.winner_source = WinnerSource::phase1;
    return res;
  };

  // Step 1: if the globally lowest metric already belongs to a codeword
  // survivor, it is the ML path.
  double min_metric = kInf;
  for (int j = 0; j < L; ++j) min_metric = std::min(min_metric, p1.trellis_metric[j]);
  if (low <= min_metric + kCostEps) return phase1_return(p1.low_trellis);

  // Steps 2-4: discard subtrellises whose metric cannot beat the best
  // codeword survivor; the rest are the residual trellises.
  std::vector<int> residual;
  for (int j = 0; j < L; ++j)
    if (p1.trellis_metric[j] < low - kCostEps) residual.push_back(j);
  res.stats.residual_trellises = static_cast<int>(residual.size());

  // Per-(subtrellis, node) search state, allocated on first touch.
  std::unordered_map<std::uint64_t, Slot> slots;
  slots.reserve(residual.size() * 64);
  auto key = [](int trellis, std::int64_t node) {
    return (static_cast<std::uint64_t>(trellis) << 40) |
           static_cast<std::uint64_t>(node);
  };
  std::vector<std::uint8_t> closed_count(u.num_nodes(), 0);
  const int close_cap = mode == Mode::approx1 ? 1 : 2;

  auto blocked = [&](int trellis, std::int64_t node) {
    if (mode != Mode::exact && closed_count[node] >= close_cap) return true;
    auto it = slots.find(key(trellis, node));
    return it != slots.end() && it->second.closed;
  };

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
  auto heap_push = [&](double metric, int trellis, std::int64_t node) {
    heap.push({metric, trellis, node});
    ++res.stats.heap_inserts;
    res.stats.max_heap_size =
        std::max(res.stats.max_heap_size, static_cast<std::int64_t>(heap.size()));
  };

  // Step 5: open the residual start nodes at their initial metrics.
  for (int j : residual) {
    slots[key(j, u.start_node(j))].cost = 0.0;
    heap_push(p1.trellis_metric[j], j, static_cast<std::int64_t>(u.start_node(j)));
  }

  auto close_node = [&](int trellis, std::int64_t node, double metric) {
    slots[key(trellis, node)].closed = true;
    ++closed_count[node];
    res.stats.max_closed_metric = std::max(res.stats.max_closed_metric, metric);
    if (trace) trace(trellis, static_cast<std::size_t>(node), u.layer_of(node), metric);
  };

  auto phase2_return = [&](int trellis, std::int64_t goal) {
    res.codeword = labels_along(
        u,
        [&](std::int64_t v) {
          const Slot& sl = slots.at(key(trellis, v));
          return std::pair<std::int64_t, std::uint32_t>(sl.parent, sl.label);
        },
        goal);
    res.cost = slots.at(key(trellis, goal)).cost;
    res.subtrellis = trellis;
    res.stats.winner_source = WinnerSource::phase2;
    res.stats.node_computations = p1.node_updates + res.stats.phase2_expansions;
    res.stats.phase2_slots = static_cast<std::int64_t>(slots.size());
    return res;
  };

  struct Frame {
    std::int64_t node;
    double cost;
    double metric;
    std::span<const UnrolledTrellis::Edge> edges;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;

  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    if (blocked(top.trellis, top.node)) continue;  // stale or capped entry
    close_node(top.trellis, top.node, top.metric);
    if (u.layer_of(top.node) == u.depth())
      return phase2_return(top.trellis, top.node);
    ++res.stats.phase2_expansions;

    const int trellis = top.trellis;
    stack.clear();
    stack.push_back(Frame{top.node, slots.at(key(trellis, top.node)).cost,
                          top.metric, u.edges_from(top.node)});
    // Successors whose metric does not rise are closed and expanded
    // depth-first before returning to the heap.
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == f.edges.size()) {
        stack.pop_back();
        continue;
      }
      const auto& e = f.edges[f.next++];
      if (!u.in_subtrellis(e.to, trellis)) continue;
      if (blocked(trellis, e.to)) continue;

      const int section = u.layer_of(f.node);
      const double newcost = f.cost + s.edge_cost(section, e.label);
      Slot& sl = slots[key(trellis, e.to)];
      if (newcost <= sl.cost) {
        sl.cost = newcost;
        sl.parent = f.node;
        sl.label = e.label;
      }
      const double metric =
          sl.cost + p1.trellis_metric[trellis] - p1.cost1[e.to];
      if (metric <= f.metric + kCostEps) {
        close_node(trellis, e.to, metric);
        if (u.layer_of(e.to) == u.depth())
          return phase2_return(trellis, e.to);
        ++res.stats.phase2_expansions;
        const double child_cost = slots.at(key(trellis, e.to)).cost;
        stack.push_back(Frame{e.to, child_cost, metric, u.edges_from(e.to)});
      } else if (metric < low - kCostEps) {
        heap_push(metric, trellis, e.to);
      }
    }
  }

  // Step 7: open set exhausted; the best codeword survivor stands.
  if (p1.low_trellis < 0)
    throw std::logic_error("search exhausted with no codeword survivor");
  res.stats.node_computations = p1.node_updates + res.stats.phase2_expansions;
  res.stats.phase2_slots = static_cast<std::int64_t>(slots.size());
  auto out = phase1_return(p1.low_trellis);
  return out;
}

namespace {

// Fallback for phase1_only frames with no codeword survivor: cheapest cycle
// of the subtrellis with the best phase-1 metric, by membership-restricted
// forward DP.
DecodeResult constrained_best(const UnrolledTrellis& u, const SoftInput& s,
                              const Phase1Result& p1, int j, DecodeResult res) {
  const std::size_t total = u.num_nodes();
  std::vector<double> cost(total, kInf);
  std::vector<std::int64_t> parent(total, -1);
  std::vector<std::uint32_t> label(total, 0);
  cost[u.start_node(j)] = 0.0;
  std::int64_t updates = 0;
  for (int layer = 1; layer <= u.depth(); ++layer) {
    for (const auto& e : u.edges_into_layer(layer)) {
      if (!u.in_subtrellis(e.from, j) || !u.in_subtrellis(e.to, j)) continue;
      const double c = cost[e.from] + s.edge_cost(layer - 1, e.label);
      if (c < cost[e.to]) {
        cost[e.to] = c;
        parent[e.to] = e.from;
        label[e.to] = e.label;
      }
    }
    for (int v = 0; v < u.layer_size(layer); ++v)
      if (u.in_subtrellis(u.node_id(layer, v), j)) ++updates;
  }
  res.codeword = labels_along(
      u,
      [&](std::int64_t v) {
        return std::pair<std::int64_t, std::uint32_t>(parent[v], label[v]);
      },
      static_cast<std::int64_t>(u.final_node(j)));
  res.cost = cost[u.final_node(j)];
  res.subtrellis = j;
  res.stats.winner_source = WinnerSource::phase1;
  res.stats.node_computations = p1.node_updates + updates;
  return res;
}

}  // namespace

DecodeResult decode(const UnrolledTrellis& u, const SoftInput& s, Mode mode,
                    const ClosureTrace& trace) {
  Phase1Result p1 = phase1(u, s);
  if (mode == Mode::phase1_only) {
    DecodeResult res;
    res.mode = mode;
    res.stats.node_computations = p1.node_updates;
    if (p1.low_trellis >= 0) {
      res.codeword = phase1_winner_word(u, p1, p1.low_trellis);
      res.cost = p1.low;
      res.subtrellis = p1.low_trellis;
      res.stats.winner_source = WinnerSource::phase1;
      return res;
    }
    int best = 0;
    for (int j = 1; j < u.num_subtrellises(); ++j)
      if (p1.trellis_metric[j] < p1.trellis_metric[best]) best = j;
    return constrained_best(u, s, p1, best, std::move(res));
  }
  return phase2(u, s, p1, mode, trace);
}

DecodeResult decode(const TailBitingTrellis& t, std::span<const double> r, Mode mode) {
  UnrolledTrellis u(t);
  return decode(u, branch_costs(t, r), mode);
}

}  // namespace tbt
