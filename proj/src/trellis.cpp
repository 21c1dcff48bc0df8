#include "tbt/trellis.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tbt {

std::int64_t TailBitingTrellis::total_states() const {
  std::int64_t s = 0;
  for (int v : v_counts) s += v;
  return s;
}

std::int64_t TailBitingTrellis::total_edges() const {
  std::int64_t e = 0;
  for (const auto& sec : sections) e += static_cast<std::int64_t>(sec.size());
  return e;
}

int TailBitingTrellis::total_symbols() const {
  int s = 0;
  for (int w : section_widths) s += w;
  return s;
}

void TailBitingTrellis::validate() const {
  if (n <= 0) throw std::invalid_argument("trellis depth must be positive");
  if (static_cast<int>(section_widths.size()) != n ||
      static_cast<int>(v_counts.size()) != n ||
      static_cast<int>(sections.size()) != n)
    throw std::invalid_argument("trellis arrays must all have n entries");
  for (int t = 0; t < n; ++t) {
    if (section_widths[t] < 1 || section_widths[t] > 16)
      throw std::invalid_argument("section width out of range");
    if (v_counts[t] < 1) throw std::invalid_argument("empty vertex class");
    if (sections[t].empty()) throw std::invalid_argument("empty edge section");
    const int to_count = v_counts[(t + 1) % n];
    for (const TbtEdge& e : sections[t]) {
      if (e.from < 0 || e.from >= v_counts[t] || e.to < 0 || e.to >= to_count)
        throw std::invalid_argument("edge references a missing node");
      if (e.label >> section_widths[t])
        throw std::invalid_argument("edge label wider than its section");
    }
  }
}

void TailBitingTrellis::canonicalize() {
  for (auto& sec : sections)
    std::sort(sec.begin(), sec.end(), [](const TbtEdge& a, const TbtEdge& b) {
      return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });
}

std::uint32_t pack_section_bits(const BitVec& v, int first_symbol, int width) {
  std::uint32_t out = 0;
  for (int b = 0; b < width; ++b) out = (out << 1) | v[first_symbol + b];
  return out;
}

std::string label_to_string(std::uint32_t label, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if ((label >> (width - 1 - b)) & 1u) s[b] = '1';
  return s;
}

std::uint32_t label_from_string(const std::string& s) {
  std::uint32_t out = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad label bit: " + s);
    out = (out << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return out;
}

TailBitingTrellis elementary_trellis(const BitVec& row, const Span& span, int n) {
  return elementary_trellis(row, span, std::vector<int>(n, 1));
}

TailBitingTrellis elementary_trellis(const BitVec& row, const Span& span,
                                     const std::vector<int>& section_widths) {
  const int symbols = static_cast<int>(row.size());
  validate_span(row, span, symbols);

  const int n = static_cast<int>(section_widths.size());
  std::vector<int> first_symbol(n, 0), sec_of(symbols, 0);
  {
    int pos = 0;
    for (int t = 0; t < n; ++t) {
      first_symbol[t] = pos;
      for (int b = 0; b < section_widths[t]; ++b) sec_of[pos + b] = t;
      pos += section_widths[t];
    }
    if (pos != symbols)
      throw std::invalid_argument("section widths do not sum to the row length");
  }

  const int sa = sec_of[span.lo];
  const int sb = sec_of[span.hi];
  // Boundaries where the nonzero path occupies the doubled state.
  std::vector<char> dbl(n, 0);
  if (span.kind == SpanKind::linear) {
    for (int t = sa + 1; t <= sb; ++t) dbl[t] = 1;
  } else {
    if (sa <= sb)
      throw std::invalid_argument("circular span does not wrap at section granularity");
    for (int t = sa + 1; t < n; ++t) dbl[t] = 1;
    for (int t = 0; t <= sb; ++t) dbl[t] = 1;
  }

  TailBitingTrellis out;
  out.n = n;
  out.section_widths = section_widths;
  out.v_counts.resize(n);
  out.sections.resize(n);
  for (int t = 0; t < n; ++t) out.v_counts[t] = dbl[t] ? 2 : 1;
  for (int t = 0; t < n; ++t) {
    const std::int32_t s0 = 0, s1 = dbl[t] ? 1 : 0;
    const std::int32_t e1 = dbl[(t + 1) % n] ? 1 : 0;
    const std::uint32_t lv = pack_section_bits(row, first_symbol[t], section_widths[t]);
    out.sections[t].push_back({0, 0, 0});
    if (s1 != 0 || e1 != 0 || lv != 0) out.sections[t].push_back({s1, e1, lv});
  }
  out.canonicalize();
  out.validate();
  return out;
}

TailBitingTrellis trivial_trellis(const std::vector<int>& section_widths) {
  TailBitingTrellis out;
  out.n = static_cast<int>(section_widths.size());
  out.section_widths = section_widths;
  out.v_counts.assign(out.n, 1);
  out.sections.assign(out.n, {TbtEdge{0, 0, 0}});
  out.validate();
  return out;
}

TailBitingTrellis product(const TailBitingTrellis& a, const TailBitingTrellis& b) {
  if (a.n != b.n) throw std::invalid_argument("trellis product: depth mismatch");
  if (a.section_widths != b.section_widths)
    throw std::invalid_argument("trellis product: section width mismatch");

  TailBitingTrellis out;
  out.n = a.n;
  out.section_widths = a.section_widths;
  out.v_counts.resize(a.n);
  out.sections.resize(a.n);
  for (int t = 0; t < a.n; ++t)
    out.v_counts[t] = a.v_counts[t] * b.v_counts[t];
  for (int t = 0; t < a.n; ++t) {
    const int t1 = (t + 1) % a.n;
    auto& sec = out.sections[t];
    sec.reserve(a.sections[t].size() * b.sections[t].size());
    for (const TbtEdge& eb : b.sections[t])
      for (const TbtEdge& ea : a.sections[t])
        // Right-major ids keep the left operand's state in the low digits.
        sec.push_back({eb.from * a.v_counts[t] + ea.from,
                       eb.to * a.v_counts[t1] + ea.to,
                       ea.label ^ eb.label});
  }
  out.canonicalize();
  out.validate();
  return out;
}

TailBitingTrellis from_spanned_matrix(const SpannedMatrix& g) {
  return from_spanned_matrix(g, std::vector<int>(g.n(), 1));
}

TailBitingTrellis from_spanned_matrix(const SpannedMatrix& g,
                                      const std::vector<int>& section_widths) {
  TailBitingTrellis acc = trivial_trellis(section_widths);
  for (int i = 0; i < g.k(); ++i)
    acc = product(acc, elementary_trellis(g.row(i), g.span(i), section_widths));
  // Unrolling validates reducedness as a side effect.
  UnrolledTrellis check(acc);
  return acc;
}

bool SubtrellisView::contains(std::size_t node) const {
  return trellis->in_subtrellis(node, index);
}

bool MembershipTable::any(int t, int node) const {
  for (int w = 0; w < words; ++w)
    if (masks[t][static_cast<std::size_t>(node) * words + w]) return true;
  return false;
}

UnrolledTrellis::UnrolledTrellis(TailBitingTrellis base) : base_(std::move(base)) {
  base_.validate();
  base_.canonicalize();
  const int n = base_.n;
  L_ = base_.v_counts[0];
  words_ = (L_ + 63) / 64;

  layer_offset_.resize(n + 1);
  std::size_t off = 0;
  for (int t = 0; t <= n; ++t) {
    layer_offset_[t] = off;
    off += (t == n) ? L_ : base_.v_counts[t];
  }
  const std::size_t total = off;
  node_layer_.resize(total);
  for (int t = 0; t <= n; ++t) {
    const std::size_t end = (t == n) ? total : layer_offset_[t + 1];
    for (std::size_t v = layer_offset_[t]; v < end; ++v) node_layer_[v] = t;
  }

  by_dest_.resize(n);
  for (int t = 0; t < n; ++t) {
    auto& sec = by_dest_[t];
    sec.reserve(base_.sections[t].size());
    for (const TbtEdge& e : base_.sections[t])
      sec.push_back({static_cast<std::int32_t>(layer_offset_[t] + e.from),
                     static_cast<std::int32_t>(layer_offset_[t + 1] + e.to),
                     e.label});
    std::sort(sec.begin(), sec.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.to, a.from, a.label) < std::tie(b.to, b.from, b.label);
    });
  }

  by_src_offset_.assign(total + 1, 0);
  for (int t = 0; t < n; ++t)
    for (const Edge& e : by_dest_[t]) ++by_src_offset_[e.from + 1];
  for (std::size_t i = 1; i <= total; ++i) by_src_offset_[i] += by_src_offset_[i - 1];
  by_src_.resize(base_.total_edges());
  {
    std::vector<std::size_t> cursor(by_src_offset_.begin(), by_src_offset_.end() - 1);
    for (int t = 0; t < n; ++t)
      for (const Edge& e : by_dest_[t]) by_src_[cursor[e.from]++] = e;
    for (std::size_t v = 0; v < total; ++v)
      std::sort(by_src_.begin() + by_src_offset_[v],
                by_src_.begin() + by_src_offset_[v + 1],
                [](const Edge& a, const Edge& b) {
                  return std::tie(a.to, a.label) < std::tie(b.to, b.label);
                });
  }

  // Forward start-reachability and backward final-reachability masks; their
  // conjunction is the membership relation.
  std::vector<std::uint64_t> fwd(total * words_, 0), bwd(total * words_, 0);
  for (int i = 0; i < L_; ++i) {
    fwd[start_node(i) * words_ + i / 64] |= 1ull << (i % 64);
    bwd[final_node(i) * words_ + i / 64] |= 1ull << (i % 64);
  }
  for (int t = 0; t < n; ++t)
    for (const Edge& e : by_dest_[t])
      for (int w = 0; w < words_; ++w)
        fwd[e.to * static_cast<std::size_t>(words_) + w] |=
            fwd[e.from * static_cast<std::size_t>(words_) + w];
  for (int t = n - 1; t >= 0; --t)
    for (const Edge& e : by_dest_[t])
      for (int w = 0; w < words_; ++w)
        bwd[e.from * static_cast<std::size_t>(words_) + w] |=
            bwd[e.to * static_cast<std::size_t>(words_) + w];

  member_.resize(total * words_);
  for (std::size_t i = 0; i < member_.size(); ++i) member_[i] = fwd[i] & bwd[i];

  for (std::size_t v = 0; v < total; ++v)
    if (!shares_any(v)) throw std::invalid_argument("trellis is not reduced");
  for (int t = 0; t < n; ++t)
    for (const Edge& e : by_dest_[t]) {
      bool live = false;
      for (int w = 0; w < words_ && !live; ++w)
        live = (fwd[e.from * static_cast<std::size_t>(words_) + w] &
                bwd[e.to * static_cast<std::size_t>(words_) + w]) != 0;
      if (!live) throw std::invalid_argument("trellis is not reduced");
    }
}

int UnrolledTrellis::layer_size(int t) const {
  return (t == depth()) ? L_ : base_.v_counts[t];
}

bool UnrolledTrellis::shares_any(std::size_t node) const {
  for (int w = 0; w < words_; ++w)
    if (member_[node * words_ + w]) return true;
  return false;
}

std::span<const UnrolledTrellis::Edge> UnrolledTrellis::edges_into_layer(
    int t_plus_1) const {
  return by_dest_[t_plus_1 - 1];
}

std::span<const UnrolledTrellis::Edge> UnrolledTrellis::edges_from(
    std::size_t node) const {
  return {by_src_.data() + by_src_offset_[node],
          by_src_offset_[node + 1] - by_src_offset_[node]};
}

MembershipTable UnrolledTrellis::to_membership_table() const {
  MembershipTable m;
  m.L = L_;
  m.words = words_;
  m.masks.resize(depth());
  for (int t = 0; t < depth(); ++t) {
    m.masks[t].assign(static_cast<std::size_t>(base_.v_counts[t]) * words_, 0);
    for (int v = 0; v < base_.v_counts[t]; ++v)
      for (int w = 0; w < words_; ++w)
        m.masks[t][static_cast<std::size_t>(v) * words_ + w] =
            member_[(layer_offset_[t] + v) * words_ + w];
  }
  return m;
}

MembershipTable membership(const TailBitingTrellis& t) {
  return UnrolledTrellis(t).to_membership_table();
}

std::optional<Interval> merging_interval(const TailBitingTrellis& t, int i, int j) {
  return merging_interval(t, membership(t), i, j);
}

std::optional<Interval> merging_interval(const TailBitingTrellis& t,
                                         const MembershipTable& m, int i, int j) {
  if (i == j) throw std::invalid_argument("merging interval needs two distinct subtrellises");
  if (i < 0 || j < 0 || i >= m.L || j >= m.L)
    throw std::invalid_argument("subtrellis index out of range");
  std::vector<char> shared(t.n, 0);
  int count = 0;
  for (int time = 0; time < t.n; ++time) {
    for (int v = 0; v < t.v_counts[time]; ++v)
      if (m.test(time, v, i) && m.test(time, v, j)) {
        shared[time] = 1;
        ++count;
        break;
      }
  }
  if (count == 0) return std::nullopt;
  if (count == t.n) return Interval{0, t.n - 1};
  for (int lo = 0; lo < t.n; ++lo) {
    if (!shared[lo] || shared[(lo - 1 + t.n) % t.n]) continue;
    int hi = lo;
    int len = 1;
    while (shared[(hi + 1) % t.n]) {
      hi = (hi + 1) % t.n;
      ++len;
    }
    if (len != count)
      throw std::logic_error("shared time indices do not form one interval");
    return Interval{lo, hi};
  }
  return std::nullopt;  // unreachable
}

UnrolledTrellis unroll(const TailBitingTrellis& t) { return UnrolledTrellis(t); }

void save_trellis(const TailBitingTrellis& t, std::ostream& out) {
  TailBitingTrellis c = t;
  c.validate();
  c.canonicalize();
  out << "n " << c.n << "\n";
  out << "section_widths";
  for (int w : c.section_widths) out << ' ' << w;
  out << "\nV_counts";
  for (int v : c.v_counts) out << ' ' << v;
  out << "\n";
  for (int time = 0; time < c.n; ++time)
    for (const TbtEdge& e : c.sections[time])
      out << time << ' ' << e.from << ' '
          << label_to_string(e.label, c.section_widths[time]) << ' ' << e.to << "\n";
}

TailBitingTrellis parse_trellis(std::istream& in) {
  TailBitingTrellis t;
  std::string line;
  int header = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (header < 3) {
      std::string key;
      ss >> key;
      if (key == "n" && header == 0) {
        if (!(ss >> t.n) || t.n <= 0)
          throw std::invalid_argument("malformed trellis file: bad n header");
      } else if (key == "section_widths" && header == 1) {
        int w;
        while (ss >> w) t.section_widths.push_back(w);
        if (static_cast<int>(t.section_widths.size()) != t.n)
          throw std::invalid_argument("malformed trellis file: section_widths count");
      } else if (key == "V_counts" && header == 2) {
        int v;
        while (ss >> v) t.v_counts.push_back(v);
        if (static_cast<int>(t.v_counts.size()) != t.n)
          throw std::invalid_argument("malformed trellis file: V_counts count");
        t.sections.resize(t.n);
      } else {
        throw std::invalid_argument("malformed trellis file: expected header, got " + key);
      }
      ++header;
      continue;
    }
    int time, from, to;
    std::string label;
    if (!(ss >> time >> from >> label >> to))
      throw std::invalid_argument("malformed trellis file: edge line \"" + line + '"');
    if (time < 0 || time >= t.n)
      throw std::invalid_argument("malformed trellis file: section index out of range");
    if (static_cast<int>(label.size()) != t.section_widths[time])
      throw std::invalid_argument("malformed trellis file: label width mismatch");
    if (from < 0 || from >= t.v_counts[time] || to < 0 ||
        to >= t.v_counts[(time + 1) % t.n])
      throw std::invalid_argument("edge references a missing node");
    t.sections[time].push_back(
        {from, to, label_from_string(label)});
  }
  if (header < 3) throw std::invalid_argument("malformed trellis file: truncated header");
  t.validate();
  t.canonicalize();
  return t;
}

}  // namespace tbt
