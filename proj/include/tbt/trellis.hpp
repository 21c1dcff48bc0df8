// Tail-biting trellises: elementary trellises, the trellis product, the
// unrolled decoding graph and per-subtrellis membership.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tbt/gf2.hpp"

namespace tbt {

// Edge in section t: from is a node of V_t, to a node of V_{t+1 mod n}.
// label holds the section's symbols packed MSB-first.
struct TbtEdge {
  std::int32_t from = 0;
  std::int32_t to = 0;
  std::uint32_t label = 0;

  auto operator<=>(const TbtEdge&) const = default;
};

struct TailBitingTrellis {
  int n = 0;                                // sections
  std::vector<int> section_widths;          // symbols emitted per section
  std::vector<int> v_counts;                // nodes per vertex class
  std::vector<std::vector<TbtEdge>> sections;

  int num_subtrellises() const { return v_counts.empty() ? 0 : v_counts[0]; }
  std::int64_t total_states() const;
  std::int64_t total_edges() const;
  int total_symbols() const;

  // Structural checks (partition, id ranges, label widths); reducedness is
  // checked separately when the trellis is unrolled.
  void validate() const;
  // Sorts every section's edges by (from, label, to).
  void canonicalize();

  bool operator==(const TailBitingTrellis&) const = default;
};

std::uint32_t pack_section_bits(const BitVec& v, int first_symbol, int width);
std::string label_to_string(std::uint32_t label, int width);
std::uint32_t label_from_string(const std::string& s);

// Two-codeword trellis for {0, row}: doubled states along the span interior,
// single states elsewhere. The multi-section overload groups symbols into
// sections of the given widths.
TailBitingTrellis elementary_trellis(const BitVec& row, const Span& span, int n);
TailBitingTrellis elementary_trellis(const BitVec& row, const Span& span,
                                     const std::vector<int>& section_widths);

// One-node trellis emitting all-zero labels of the given widths.
TailBitingTrellis trivial_trellis(const std::vector<int>& section_widths);

TailBitingTrellis product(const TailBitingTrellis& a, const TailBitingTrellis& b);

// Product of the elementary trellises of all rows, in row order. Start node
// ids encode the circular-row coefficients: bit r of the id is the r-th
// circular row's coefficient, so s_0 carries the all-zero codeword.
TailBitingTrellis from_spanned_matrix(const SpannedMatrix& g);
TailBitingTrellis from_spanned_matrix(const SpannedMatrix& g,
                                      const std::vector<int>& section_widths);

class UnrolledTrellis;

// One subtrellis of an unrolled tail-biting trellis: the paths from its
// start node to the matching final copy.
struct SubtrellisView {
  const UnrolledTrellis* trellis = nullptr;
  int index = 0;
  std::size_t start = 0;
  std::size_t final = 0;

  bool contains(std::size_t node) const;
};

// Per-node subtrellis membership: bit i set iff the node lies on some cycle
// through start node s_i.
struct MembershipTable {
  int L = 0;
  int words = 0;
  std::vector<std::vector<std::uint64_t>> masks;  // [t][node * words + w]

  bool test(int t, int node, int i) const {
    return (masks[t][static_cast<std::size_t>(node) * words + i / 64] >>
            (i % 64)) & 1u;
  }
  bool any(int t, int node) const;
};

MembershipTable membership(const TailBitingTrellis& t);

// Maximal circular interval of time indices at which subtrellises i and j
// share states; nullopt if they share none.
std::optional<Interval> merging_interval(const TailBitingTrellis& t, int i, int j);
std::optional<Interval> merging_interval(const TailBitingTrellis& t,
                                         const MembershipTable& m, int i, int j);

// Depth-(n+1) layered DAG: layer 0 holds the start nodes s_0..s_{L-1}, layer
// n their final copies f_0..f_{L-1}. Node ids are global across layers.
class UnrolledTrellis {
public:
  struct Edge {
    std::int32_t from = 0;
    std::int32_t to = 0;
    std::uint32_t label = 0;
  };

  explicit UnrolledTrellis(TailBitingTrellis base);

  const TailBitingTrellis& base() const { return base_; }
  int depth() const { return base_.n; }
  int num_subtrellises() const { return L_; }
  int mask_words() const { return words_; }

  std::size_t num_nodes() const { return layer_offset_.back() + L_; }
  int layer_size(int t) const;
  std::size_t node_id(int layer, int local) const { return layer_offset_[layer] + local; }
  int layer_of(std::size_t node) const { return node_layer_[node]; }
  int local_of(std::size_t node) const {
    return static_cast<int>(node - layer_offset_[node_layer_[node]]);
  }
  std::size_t start_node(int i) const { return node_id(0, i); }
  std::size_t final_node(int i) const { return node_id(depth(), i); }
  SubtrellisView subtrellis(int i) const {
    return {this, i, start_node(i), final_node(i)};
  }

  bool in_subtrellis(std::size_t node, int i) const {
    return (member_[node * words_ + i / 64] >> (i % 64)) & 1u;
  }
  bool shares_any(std::size_t node) const;

  // Edges of section t (into layer t+1), sorted by destination id.
  std::span<const Edge> edges_into_layer(int t_plus_1) const;
  // Outgoing edges of a node, sorted by (to, label).
  std::span<const Edge> edges_from(std::size_t node) const;

  MembershipTable to_membership_table() const;

private:
  TailBitingTrellis base_;
  int L_ = 0;
  int words_ = 0;
  std::vector<std::size_t> layer_offset_;
  std::vector<std::int32_t> node_layer_;
  std::vector<std::uint64_t> member_;
  std::vector<std::vector<Edge>> by_dest_;      // per section
  std::vector<Edge> by_src_;                    // CSR over global node ids
  std::vector<std::size_t> by_src_offset_;
};

UnrolledTrellis unroll(const TailBitingTrellis& t);

// Interchange format: "n", "section_widths", "V_counts" headers, then one
// edge per line as "t from label to" with the label as a bit string.
void save_trellis(const TailBitingTrellis& t, std::ostream& out);
TailBitingTrellis parse_trellis(std::istream& in);

}  // namespace tbt
