#include "tbt/gf2.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tbt {

BitVec BitVec::from_string(const std::string& s) {
  BitVec v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '0') continue;
    if (s[i] == '1')
      v.bits_[i] = 1;
    else
      throw std::invalid_argument("bit string may contain only 0 and 1: " + s);
  }
  return v;
}

int BitVec::weight() const {
  int w = 0;
  for (auto b : bits_) w += b;
  return w;
}

std::string BitVec::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

BitVec& BitVec::operator^=(const BitVec& o) {
  if (bits_.size() != o.bits_.size())
    throw std::invalid_argument("length mismatch in GF(2) addition");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= o.bits_[i];
  return *this;
}

bool Interval::contains(int t, int n) const {
  t = ((t % n) + n) % n;
  if (lo <= hi) return lo <= t && t <= hi;
  return t >= lo || t <= hi;
}

int Interval::length(int n) const { return (hi - lo + n) % n + 1; }

void validate_span(const BitVec& row, const Span& s, int n) {
  if (s.lo < 0 || s.lo >= n || s.hi < 0 || s.hi >= n)
    throw std::invalid_argument("span endpoint out of range");
  if (s.kind == SpanKind::linear && s.lo > s.hi)
    throw std::invalid_argument("linear span requires lo <= hi");
  if (s.kind == SpanKind::circular && s.lo <= s.hi)
    throw std::invalid_argument("circular span requires lo > hi");
  if (row.is_zero()) throw std::invalid_argument("spanned row must be nonzero");
  if (!row[s.lo] || !row[s.hi])
    throw std::invalid_argument("span endpoints must be nonzero positions");
  Interval cover{s.lo, s.hi};
  for (int i = 0; i < n; ++i)
    if (row[i] && !cover.contains(i, n))
      throw std::invalid_argument("row has support outside its span");
}

SpannedMatrix::SpannedMatrix(std::vector<BitVec> rows, std::vector<Span> spans, int n)
    : rows_(std::move(rows)), spans_(std::move(spans)), n_(n) {
  if (n_ <= 0) throw std::invalid_argument("code length must be positive");
  if (rows_.size() != spans_.size())
    throw std::invalid_argument("row/span count mismatch");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (static_cast<int>(rows_[i].size()) != n_)
      throw std::invalid_argument("row length differs from code length");
    validate_span(rows_[i], spans_[i], n_);
    if (spans_[i].kind == SpanKind::linear) ++linear_count_;
  }
  if (gf2_rank(rows_) != static_cast<int>(rows_.size()))
    throw std::invalid_argument("generator rows are linearly dependent");
}

std::vector<int> SpannedMatrix::linear_row_indices() const {
  std::vector<int> out;
  for (int i = 0; i < k(); ++i)
    if (spans_[i].kind == SpanKind::linear) out.push_back(i);
  return out;
}

std::vector<int> SpannedMatrix::circular_row_indices() const {
  std::vector<int> out;
  for (int i = 0; i < k(); ++i)
    if (spans_[i].kind == SpanKind::circular) out.push_back(i);
  return out;
}

std::optional<Interval> doubled_interval(const Span& s, int n) {
  if (s.kind == SpanKind::linear) {
    if (s.lo == s.hi) return std::nullopt;
    return Interval{s.lo + 1, s.hi};
  }
  return Interval{(s.lo + 1) % n, s.hi};
}

Interval zero_run(const BitVec& row, const Span& span, int n) {
  if (span.kind != SpanKind::circular)
    throw std::invalid_argument("zero run defined only for circular spans");
  validate_span(row, span, n);
  return Interval{(span.hi + 1) % n, span.lo};
}

SpannedMatrix split_heads_tails(const SpannedMatrix& g) {
  std::vector<BitVec> rows;
  std::vector<Span> spans;
  for (int i : g.linear_row_indices()) {
    rows.push_back(g.row(i));
    spans.push_back(g.span(i));
  }
  const int n = g.n();
  for (int i : g.circular_row_indices()) {
    const BitVec& v = g.row(i);
    const Span& s = g.span(i);
    BitVec head(n), tail(n);
    for (int p = 0; p <= s.hi; ++p) head.set(p, v[p]);
    for (int p = s.lo; p < n; ++p) tail.set(p, v[p]);
    int head_lo = 0;
    while (!head[head_lo]) ++head_lo;
    int tail_hi = n - 1;
    while (!tail[tail_hi]) --tail_hi;
    rows.push_back(head);
    spans.push_back(Span{head_lo, s.hi, SpanKind::linear});
    rows.push_back(tail);
    spans.push_back(Span{s.lo, tail_hi, SpanKind::linear});
  }
  return SpannedMatrix(std::move(rows), std::move(spans), n);
}

std::vector<BitVec> row_space(const std::vector<BitVec>& rows) {
  if (rows.size() > 24) throw std::invalid_argument("enumeration limit");
  std::size_t n = rows.empty() ? 0 : rows[0].size();
  std::vector<BitVec> out;
  out.reserve(std::size_t{1} << rows.size());
  BitVec cur(n);
  out.push_back(cur);
  // Gray-code walk: one row toggled per step.
  for (std::uint32_t m = 1; m < (1u << rows.size()); ++m) {
    std::uint32_t gray = m ^ (m >> 1);
    std::uint32_t prev = (m - 1) ^ ((m - 1) >> 1);
    int bit = std::countr_zero(gray ^ prev);
    cur ^= rows[bit];
    out.push_back(cur);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IntersectionResult intersection_property(const SpannedMatrix& g) {
  IntersectionResult res;
  const int n = g.n();
  std::vector<char> common(n, 1);
  auto circ = g.circular_row_indices();
  if (circ.empty()) {
    res.holds = true;
    res.no_circular_rows = true;
    res.arcs.push_back(Interval{0, n - 1});
    return res;
  }
  for (int i : circ) {
    Interval zr = zero_run(g.row(i), g.span(i), n);
    for (int t = 0; t < n; ++t)
      if (!zr.contains(t, n)) common[t] = 0;
  }
  int count = 0;
  for (int t = 0; t < n; ++t) count += common[t];
  res.holds = count > 0;
  if (count == n) {
    res.arcs.push_back(Interval{0, n - 1});
    return res;
  }
  // Collect maximal circular arcs of the common set.
  for (int t = 0; t < n; ++t) {
    if (!common[t] || common[(t - 1 + n) % n]) continue;
    int hi = t;
    while (common[(hi + 1) % n]) hi = (hi + 1) % n;
    res.arcs.push_back(Interval{t, hi});
  }
  return res;
}

int gf2_rank(std::vector<BitVec> rows) {
  int rank = 0;
  std::size_t n = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (rows[r][col]) {
        pivot = static_cast<int>(r);
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (static_cast<int>(r) != rank && rows[r][col]) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

RowBasis::RowBasis(std::vector<BitVec> rows) : rows_(std::move(rows)) {
  std::size_t n = rows_.empty() ? 0 : rows_[0].size();
  std::vector<BitVec> work = rows_;
  std::vector<std::vector<std::uint8_t>> combo(rows_.size(),
                                               std::vector<std::uint8_t>(rows_.size(), 0));
  for (std::size_t i = 0; i < rows_.size(); ++i) combo[i][i] = 1;
  std::size_t next = 0;
  for (std::size_t col = 0; col < n && next < work.size(); ++col) {
    std::size_t pivot = next;
    while (pivot < work.size() && !work[pivot][col]) ++pivot;
    if (pivot == work.size()) continue;
    std::swap(work[next], work[pivot]);
    std::swap(combo[next], combo[pivot]);
    for (std::size_t r = 0; r < work.size(); ++r) {
      if (r != next && work[r][col]) {
        work[r] ^= work[next];
        for (std::size_t j = 0; j < rows_.size(); ++j) combo[r][j] ^= combo[next][j];
      }
    }
    pivot_.push_back(static_cast<int>(col));
    ++next;
  }
  rank_ = static_cast<int>(next);
  reduced_.assign(work.begin(), work.begin() + next);
  combo_.assign(combo.begin(), combo.begin() + next);
}

std::optional<std::vector<std::uint8_t>> RowBasis::decompose(const BitVec& v) const {
  BitVec rem = v;
  std::vector<std::uint8_t> coords(rows_.size(), 0);
  for (int i = 0; i < rank_; ++i) {
    if (!rem[pivot_[i]]) continue;
    rem ^= reduced_[i];
    for (std::size_t j = 0; j < rows_.size(); ++j) coords[j] ^= combo_[i][j];
  }
  if (!rem.is_zero()) return std::nullopt;
  return coords;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

SpannedMatrix load_spanned_matrix(std::istream& in) {
  int n = -1, k = -1, index_base = 0;
  std::string line;
  // Header: key=value pairs on the first non-comment line.
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (const auto& tok : tokens(line)) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("malformed header token: " + tok);
      std::string key = tok.substr(0, eq);
      int val = std::stoi(tok.substr(eq + 1));
      if (key == "n")
        n = val;
      else if (key == "k")
        k = val;
      else if (key == "index_base")
        index_base = val;
      else
        throw std::invalid_argument("unknown header key: " + key);
    }
    break;
  }
  if (n <= 0 || k < 0) throw std::invalid_argument("missing n=/k= header");
  if (index_base != 0 && index_base != 1)
    throw std::invalid_argument("index_base must be 0 or 1");
  std::vector<BitVec> rows;
  std::vector<Span> spans;
  while (static_cast<int>(rows.size()) < k && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tok = tokens(line);
    if (tok.size() != 4) throw std::invalid_argument("row line needs: bits lo hi kind");
    BitVec row = BitVec::from_string(tok[0]);
    Span s;
    s.lo = std::stoi(tok[1]) - index_base;
    s.hi = std::stoi(tok[2]) - index_base;
    if (tok[3] == "linear")
      s.kind = SpanKind::linear;
    else if (tok[3] == "circular")
      s.kind = SpanKind::circular;
    else
      throw std::invalid_argument("span kind must be linear or circular");
    rows.push_back(std::move(row));
    spans.push_back(s);
  }
  if (static_cast<int>(rows.size()) != k)
    throw std::invalid_argument("fewer rows than header k");
  return SpannedMatrix(std::move(rows), std::move(spans), n);
}

SpannedMatrix load_spanned_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_spanned_matrix(in);
}

void save_spanned_matrix(const SpannedMatrix& g, std::ostream& out) {
  out << "n=" << g.n() << " k=" << g.k() << "\n";
  for (int i = 0; i < g.k(); ++i) {
    const Span& s = g.span(i);
    out << g.row(i).to_string() << ' ' << s.lo << ' ' << s.hi << ' '
        << (s.kind == SpanKind::linear ? "linear" : "circular") << "\n";
  }
}

}  // namespace tbt
