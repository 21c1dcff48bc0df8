#include "tbt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace tbt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MlResult brute_force_ml(const std::vector<BitVec>& generator,
                        std::span<const double> r) {
  const int k = static_cast<int>(generator.size());
  if (k > 24) throw std::invalid_argument("k too large for enumeration");
  const std::size_t n = generator.empty() ? r.size() : generator[0].size();
  if (n != r.size()) throw std::invalid_argument("received vector length mismatch");

  auto direct_cost = [&](const BitVec& c) {
    double cost = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = r[p] - (c[p] ? -1.0 : 1.0);
      cost += d * d;
    }
    return cost;
  };

  BitVec cur(n);
  double cost = direct_cost(cur);
  BitVec best = cur;
  double best_cost = cost;
  std::vector<double> sign(n);
  for (std::size_t p = 0; p < n; ++p) sign[p] = 1.0;
  for (std::uint32_t m = 1; m < (1u << k); ++m) {
    const std::uint32_t gray = m ^ (m >> 1);
    const std::uint32_t prev = (m - 1) ^ ((m - 1) >> 1);
    const int bit = std::countr_zero(gray ^ prev);
    // Flipping one generator row changes the cost by 4*r.s on its support.
    for (std::size_t p = 0; p < n; ++p)
      if (generator[bit][p]) {
        cost += 4.0 * r[p] * sign[p];
        sign[p] = -sign[p];
      }
    cur ^= generator[bit];
    if (cost < best_cost || (cost == best_cost && cur < best)) {
      best_cost = cost;
      best = cur;
    }
  }
  return {best, direct_cost(best)};
}

MlResult brute_force_ml(const SpannedMatrix& gen, std::span<const double> r) {
  return brute_force_ml(gen.rows(), r);
}

SubtrellisViterbiResult per_subtrellis_viterbi(const UnrolledTrellis& u,
                                               const SoftInput& s) {
  SubtrellisViterbiResult res;
  const int L = u.num_subtrellises();
  const std::size_t total = u.num_nodes();
  res.best_cost.assign(L, kInf);

  std::vector<double> cost(total);
  std::vector<std::int64_t> parent(total);
  std::vector<std::uint32_t> label(total);

  auto sweep = [&](int i, bool keep_path) {
    std::fill(cost.begin(), cost.end(), kInf);
    cost[u.start_node(i)] = 0.0;
    for (int layer = 1; layer <= u.depth(); ++layer) {
      for (const auto& e : u.edges_into_layer(layer)) {
        if (!u.in_subtrellis(e.from, i) || !u.in_subtrellis(e.to, i)) continue;
        if (cost[e.from] == kInf) continue;
        const double c = cost[e.from] + s.edge_cost(layer - 1, e.label);
        if (c < cost[e.to]) {
          cost[e.to] = c;
          if (keep_path) {
            parent[e.to] = e.from;
            label[e.to] = e.label;
          }
        }
      }
      if (!keep_path)
        for (int v = 0; v < u.layer_size(layer); ++v)
          if (u.in_subtrellis(u.node_id(layer, v), i)) ++res.updates;
    }
    return cost[u.final_node(i)];
  };

  for (int i = 0; i < L; ++i) {
    res.best_cost[i] = sweep(i, false);
    if (res.subtrellis < 0 || res.best_cost[i] < res.cost) {
      res.cost = res.best_cost[i];
      res.subtrellis = i;
    }
  }

  sweep(res.subtrellis, true);
  const auto& widths = u.base().section_widths;
  std::vector<int> bit_offset(u.depth() + 1, 0);
  for (int t = 0; t < u.depth(); ++t) bit_offset[t + 1] = bit_offset[t] + widths[t];
  res.codeword = BitVec(u.base().total_symbols());
  std::int64_t v = static_cast<std::int64_t>(u.final_node(res.subtrellis));
  while (u.layer_of(v) > 0) {
    const int sec = u.layer_of(v) - 1;
    for (int b = 0; b < widths[sec]; ++b)
      res.codeword.set(bit_offset[sec] + b, (label[v] >> (widths[sec] - 1 - b)) & 1u);
    v = parent[v];
  }
  return res;
}

std::vector<double> completion_costs(const UnrolledTrellis& u, const SoftInput& s,
                                     int subtrellis) {
  std::vector<double> comp(u.num_nodes(), kInf);
  comp[u.final_node(subtrellis)] = 0.0;
  for (int layer = u.depth(); layer >= 1; --layer) {
    for (const auto& e : u.edges_into_layer(layer)) {
      if (!u.in_subtrellis(e.from, subtrellis) || !u.in_subtrellis(e.to, subtrellis))
        continue;
      if (comp[e.to] == kInf) continue;
      comp[e.from] = std::min(comp[e.from], comp[e.to] + s.edge_cost(layer - 1, e.label));
    }
  }
  return comp;
}

std::vector<PathLabel> enumerate_path_labels(const UnrolledTrellis& u) {
  constexpr std::size_t kGuard = 1u << 20;
  const auto& widths = u.base().section_widths;
  std::vector<int> bit_offset(u.depth() + 1, 0);
  for (int t = 0; t < u.depth(); ++t) bit_offset[t + 1] = bit_offset[t] + widths[t];

  std::vector<PathLabel> out;
  for (int i = 0; i < u.num_subtrellises(); ++i) {
    std::vector<std::pair<std::int64_t, BitVec>> frontier;
    frontier.emplace_back(u.start_node(i), BitVec(u.base().total_symbols()));
    for (int layer = 0; layer < u.depth(); ++layer) {
      std::vector<std::pair<std::int64_t, BitVec>> next;
      for (auto& [node, prefix] : frontier)
        for (const auto& e : u.edges_from(node)) {
          BitVec ext = prefix;
          for (int b = 0; b < widths[layer]; ++b)
            ext.set(bit_offset[layer] + b, (e.label >> (widths[layer] - 1 - b)) & 1u);
          next.emplace_back(e.to, std::move(ext));
          if (next.size() > kGuard) throw std::invalid_argument("guard exceeded");
        }
      frontier = std::move(next);
    }
    for (auto& [node, word] : frontier)
      out.push_back({i, u.local_of(node), std::move(word)});
  }
  return out;
}

namespace {

// Node sequence of a minimum-cost path in one subtrellis whose label equals
// the given codeword.
std::vector<std::int64_t> path_of_codeword(const UnrolledTrellis& u, int trellis,
                                           const BitVec& codeword) {
  const auto& widths = u.base().section_widths;
  std::vector<int> bit_offset(u.depth() + 1, 0);
  for (int t = 0; t < u.depth(); ++t) bit_offset[t + 1] = bit_offset[t] + widths[t];

  std::vector<std::int64_t> parent(u.num_nodes(), -2);
  parent[u.start_node(trellis)] = -1;
  for (int layer = 1; layer <= u.depth(); ++layer) {
    const std::uint32_t want =
        pack_section_bits(codeword, bit_offset[layer - 1], widths[layer - 1]);
    for (const auto& e : u.edges_into_layer(layer)) {
      if (e.label != want) continue;
      if (!u.in_subtrellis(e.from, trellis) || !u.in_subtrellis(e.to, trellis)) continue;
      if (parent[e.from] == -2 || parent[e.to] != -2) continue;
      parent[e.to] = e.from;
    }
  }
  std::vector<std::int64_t> path;
  std::int64_t v = static_cast<std::int64_t>(u.final_node(trellis));
  if (parent[v] == -2)
    throw std::logic_error("codeword does not trace a path in its subtrellis");
  while (v != -1) {
    path.push_back(v);
    v = parent[v];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

BitVec survivor_word_at_final(const UnrolledTrellis& u, const Phase1Result& p1, int j) {
  const auto& widths = u.base().section_widths;
  std::vector<int> bit_offset(u.depth() + 1, 0);
  for (int t = 0; t < u.depth(); ++t) bit_offset[t + 1] = bit_offset[t] + widths[t];
  BitVec word(u.base().total_symbols());
  std::int64_t v = static_cast<std::int64_t>(u.final_node(j));
  while (u.layer_of(v) > 0) {
    const int sec = u.layer_of(v) - 1;
    for (int b = 0; b < widths[sec]; ++b)
      word.set(bit_offset[sec] + b, (p1.parent_label[v] >> (widths[sec] - 1 - b)) & 1u);
    v = p1.parent[v];
  }
  return word;
}

}  // namespace

Discrepancy diagnose_discrepancy(const FrameRef& frame, const DecodeResult& exact,
                                 const DecodeResult& approx, const Phase1Result& p1) {
  if (!(exact.cost < approx.cost - kCostEps))
    throw std::invalid_argument("not a true miss: exact cost must be lower");

  Discrepancy d;
  d.frame_seed = frame.seed;
  d.exact_cost = exact.cost;
  d.approx_cost = approx.cost;
  d.exact_codeword = exact.codeword.to_string();
  d.approx_codeword = approx.codeword.to_string();
  d.ml_trellis = exact.subtrellis;

  // Re-run the approx search recording closure order.
  struct Event {
    int trellis;
    std::size_t node;
  };
  std::vector<Event> events;
  DecodeResult replay = phase2(frame.u, frame.s, p1, frame.approx_mode,
                               [&](int trellis, std::size_t node, int, double) {
                                 events.push_back({trellis, node});
                               });
  if (std::abs(replay.cost - approx.cost) > kCostEps ||
      replay.codeword != approx.codeword)
    throw std::invalid_argument("inputs not from the same frame");

  const auto ml_path = path_of_codeword(frame.u, d.ml_trellis, exact.codeword);
  std::set<std::pair<int, std::size_t>> closed;
  for (const Event& e : events) closed.insert({e.trellis, e.node});
  for (std::int64_t node : ml_path) {
    if (closed.count({d.ml_trellis, static_cast<std::size_t>(node)})) continue;
    for (const Event& e : events)
      if (e.node == static_cast<std::size_t>(node)) {
        d.thief_trellis = e.trellis;
        d.attributed = true;
        break;
      }
    if (d.attributed) break;
  }

  if (d.attributed) {
    BitVec survivor = survivor_word_at_final(frame.u, p1, d.thief_trellis);
    d.survivor_label = survivor.to_string();
    BitVec shifted = survivor ^ exact.codeword;
    d.survivor_vs_ml = shifted.to_string();
    if (frame.gen != nullptr) {
      SpannedMatrix gs = split_heads_tails(*frame.gen);
      RowBasis basis(gs.rows());
      if (auto coords = basis.decompose(shifted)) {
        d.decomposed = true;
        for (int i = 0; i < frame.gen->linear_count(); ++i)
          if ((*coords)[i]) d.uses_linear_row = true;
      }
    }
  }
  return d;
}

std::string to_jsonl(const Discrepancy& d) {
  nlohmann::json j{{"frame_seed", d.frame_seed},
                   {"exact_cost", d.exact_cost},
                   {"approx_cost", d.approx_cost},
                   {"exact_codeword", d.exact_codeword},
                   {"approx_codeword", d.approx_codeword},
                   {"ml_trellis", d.ml_trellis},
                   {"thief_trellis", d.thief_trellis},
                   {"attributed", d.attributed},
                   {"survivor_label", d.survivor_label},
                   {"survivor_vs_ml", d.survivor_vs_ml},
                   {"decomposed", d.decomposed},
                   {"uses_linear_row", d.uses_linear_row}};
  return j.dump();
}

}  // namespace tbt
