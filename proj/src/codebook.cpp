#include "tbt/codebook.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace tbt {

ConvCodeSpec conv_spec_from_octal(const std::vector<std::string>& octal,
                                  int memory, int circle) {
  ConvCodeSpec s;
  s.memory = memory;
  s.circle = circle;
  for (const auto& o : octal)
    s.taps.push_back(static_cast<std::uint32_t>(std::stoul(o, nullptr, 8)));
  return s;
}

namespace {

int tap(const ConvCodeSpec& s, int poly, int j) {
  return (s.taps[poly] >> (s.memory - j)) & 1u;
}

void check_conv(const ConvCodeSpec& s) {
  if (s.circle <= s.memory) throw std::invalid_argument("circle too short");
  if (s.taps.empty()) throw std::invalid_argument("need at least one polynomial");
  bool head = false, tail = false;
  for (std::size_t i = 0; i < s.taps.size(); ++i) {
    if (s.taps[i] >> (s.memory + 1))
      throw std::invalid_argument("polynomial degree exceeds memory");
    head = head || tap(s, static_cast<int>(i), 0);
    tail = tail || tap(s, static_cast<int>(i), s.memory);
  }
  if (!head || !tail)
    throw std::invalid_argument("polynomials must span degrees 0 and memory");
}

}  // namespace

BitVec conv_encode(const ConvCodeSpec& s, const BitVec& info) {
  check_conv(s);
  if (static_cast<int>(info.size()) != s.circle)
    throw std::invalid_argument("information word length must equal the circle");
  const int nu = s.nu();
  BitVec out(static_cast<std::size_t>(s.circle) * nu);
  for (int t = 0; t < s.circle; ++t)
    for (int i = 0; i < nu; ++i) {
      int v = 0;
      for (int j = 0; j <= s.memory; ++j)
        v ^= tap(s, i, j) & info[(t - j + s.circle) % s.circle];
      out.set(static_cast<std::size_t>(t) * nu + i, v);
    }
  return out;
}

SpannedMatrix conv_spanned(const ConvCodeSpec& s) {
  check_conv(s);
  const int nu = s.nu();
  const int n_sym = s.circle * nu;
  std::vector<BitVec> rows;
  std::vector<Span> spans;
  for (int p = 0; p < s.circle; ++p) {
    BitVec unit(s.circle);
    unit.set(p, 1);
    BitVec row = conv_encode(s, unit);
    auto first_nz_in = [&](int section) {
      for (int b = 0; b < nu; ++b)
        if (row[section * nu + b]) return section * nu + b;
      return -1;
    };
    auto last_nz_in = [&](int section) {
      for (int b = nu - 1; b >= 0; --b)
        if (row[section * nu + b]) return section * nu + b;
      return -1;
    };
    Span sp;
    sp.lo = first_nz_in(p);
    sp.hi = last_nz_in((p + s.memory) % s.circle);
    sp.kind = p + s.memory < s.circle ? SpanKind::linear : SpanKind::circular;
    rows.push_back(std::move(row));
    spans.push_back(sp);
  }
  return SpannedMatrix(std::move(rows), std::move(spans), n_sym);
}

TailBitingTrellis conv_tbt(const ConvCodeSpec& s) {
  return from_spanned_matrix(conv_spanned(s), std::vector<int>(s.circle, s.nu()));
}

std::pair<SpannedMatrix, TailBitingTrellis> hamming74() {
  std::vector<BitVec> rows = {
      BitVec::from_string("1000110"),
      BitVec::from_string("0010111"),
      BitVec::from_string("0100011"),
      BitVec::from_string("0111001"),
  };
  std::vector<Span> spans = {
      {0, 5, SpanKind::linear},
      {2, 6, SpanKind::linear},
      {5, 1, SpanKind::circular},
      {6, 3, SpanKind::circular},
  };
  SpannedMatrix g(std::move(rows), std::move(spans), 7);
  TailBitingTrellis t = from_spanned_matrix(g);
  return {std::move(g), std::move(t)};
}

TailBitingTrellis load_trellis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  TailBitingTrellis t = parse_trellis(in);
  UnrolledTrellis reduced_check(t);
  return t;
}

void save_trellis_file(const TailBitingTrellis& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_trellis(t, out);
}

InfoMap::InfoMap(std::vector<BitVec> generator_rows) : rows_(std::move(generator_rows)) {
  const int k = static_cast<int>(rows_.size());
  if (k == 0) throw std::invalid_argument("empty generator");
  const int n = static_cast<int>(rows_[0].size());
  std::vector<BitVec> work = rows_;
  std::vector<std::vector<std::uint8_t>> u(k, std::vector<std::uint8_t>(k, 0));
  for (int i = 0; i < k; ++i) u[i][i] = 1;
  int next = 0;
  for (int col = 0; col < n && next < k; ++col) {
    int pivot = next;
    while (pivot < k && !work[pivot][col]) ++pivot;
    if (pivot == k) continue;
    std::swap(work[next], work[pivot]);
    std::swap(u[next], u[pivot]);
    for (int r = 0; r < k; ++r)
      if (r != next && work[r][col]) {
        work[r] ^= work[next];
        for (int j = 0; j < k; ++j) u[r][j] ^= u[next][j];
      }
    pivots_.push_back(col);
    ++next;
  }
  if (next != k) throw std::invalid_argument("generator rows are linearly dependent");
  // work = u . rows_ is the RREF, so u is the inverse of the pivot-column
  // square of the generator: info_i = sum_j codeword[pivot_j] * u[j][i].
  inv_ = std::move(u);
}

BitVec InfoMap::encode(const BitVec& info) const {
  if (info.size() != rows_.size()) throw std::invalid_argument("info length mismatch");
  BitVec c(rows_[0].size());
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (info[i]) c ^= rows_[i];
  return c;
}

BitVec InfoMap::info_bits(const BitVec& codeword) const {
  const int k = static_cast<int>(rows_.size());
  BitVec u(k);
  for (int i = 0; i < k; ++i) {
    int bit = 0;
    for (int j = 0; j < k; ++j) bit ^= codeword[pivots_[j]] & inv_[j][i];
    u.set(i, bit);
  }
  return u;
}

namespace {

// Codeword basis of a trellis without a known generator: enumerate the
// cycle labels per start node and Gaussian-reduce.
std::vector<BitVec> derive_basis(const TailBitingTrellis& t) {
  UnrolledTrellis u(t);
  const int n = u.depth();
  std::vector<int> bit_offset(n + 1, 0);
  for (int s = 0; s < n; ++s)
    bit_offset[s + 1] = bit_offset[s] + t.section_widths[s];

  std::vector<BitVec> words;
  constexpr std::size_t kGuard = 1u << 20;
  for (int i = 0; i < u.num_subtrellises(); ++i) {
    std::vector<std::pair<std::size_t, BitVec>> frontier;
    frontier.emplace_back(u.start_node(i), BitVec(bit_offset[n]));
    for (int layer = 0; layer < n; ++layer) {
      std::vector<std::pair<std::size_t, BitVec>> next;
      for (auto& [node, prefix] : frontier)
        for (const auto& e : u.edges_from(node)) {
          if (!u.in_subtrellis(e.to, i)) continue;
          BitVec ext = prefix;
          for (int b = 0; b < t.section_widths[layer]; ++b)
            ext.set(bit_offset[layer] + b,
                    (e.label >> (t.section_widths[layer] - 1 - b)) & 1u);
          next.emplace_back(e.to, std::move(ext));
          if (next.size() > kGuard) throw std::runtime_error("enumeration limit");
        }
      frontier = std::move(next);
    }
    for (auto& [node, word] : frontier)
      if (node == u.final_node(i)) words.push_back(std::move(word));
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  // Echelon basis keyed by leading position.
  auto lead_of = [](const BitVec& v) {
    std::size_t p = 0;
    while (p < v.size() && !v[p]) ++p;
    return p;
  };
  std::map<std::size_t, BitVec> by_lead;
  for (BitVec w : words) {
    for (;;) {
      if (w.is_zero()) break;
      auto it = by_lead.find(lead_of(w));
      if (it == by_lead.end()) {
        by_lead.emplace(lead_of(w), std::move(w));
        break;
      }
      w ^= it->second;
    }
  }
  std::vector<BitVec> basis;
  for (auto& [lead, row] : by_lead) basis.push_back(row);
  if (basis.size() >= 64 || (std::size_t{1} << basis.size()) != words.size())
    throw std::runtime_error("cycle labels of the loaded trellis are not a linear code");
  return basis;
}

}  // namespace

Code make_code(const std::string& name) {
  if (name == "hamming74") {
    auto [g, t] = hamming74();
    std::vector<BitVec> gen = g.rows();
    return Code{name, std::move(t), gen, std::move(g), std::nullopt, InfoMap(gen)};
  }
  if (name == "conv133_171_L48" || name == "conv35_31_L20") {
    ConvCodeSpec spec = name == "conv133_171_L48"
                            ? conv_spec_from_octal({"133", "171"}, 6, 48)
                            : conv_spec_from_octal({"35", "31"}, 4, 20);
    SpannedMatrix g = conv_spanned(spec);
    TailBitingTrellis t =
        from_spanned_matrix(g, std::vector<int>(spec.circle, spec.nu()));
    std::vector<BitVec> gen = g.rows();
    return Code{name, std::move(t), gen, std::move(g), spec, InfoMap(gen)};
  }
  if (name.rfind("file:", 0) == 0) {
    TailBitingTrellis t = load_trellis(name.substr(5));
    std::vector<BitVec> gen = derive_basis(t);
    return Code{name, std::move(t), gen, std::nullopt, std::nullopt, InfoMap(gen)};
  }
  if (name.rfind("matrix:", 0) == 0) {
    SpannedMatrix g = load_spanned_matrix_file(name.substr(7));
    TailBitingTrellis t = from_spanned_matrix(g);
    std::vector<BitVec> gen = g.rows();
    return Code{name, std::move(t), gen, std::move(g), std::nullopt, InfoMap(gen)};
  }
  throw std::invalid_argument("unknown code: " + name);
}

}  // namespace tbt
