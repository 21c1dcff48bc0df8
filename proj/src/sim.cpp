#include "tbt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tbt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t frame_noise_seed(std::uint64_t base_seed, std::int64_t frame) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(static_cast<std::uint64_t>(frame)) ^
                    0xA5A5A5A5A5A5A5A5ull);
}

std::uint64_t frame_data_seed(std::uint64_t base_seed, std::int64_t frame) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(static_cast<std::uint64_t>(frame)) ^
                    0xDA7ADA7ADA7ADA7Aull);
}

namespace {

BitVec random_info(int k, std::uint64_t seed) {
  BitVec info(k);
  std::uint64_t word = 0;
  int avail = 0;
  std::uint64_t state = seed;
  for (int i = 0; i < k; ++i) {
    if (avail == 0) {
      state = splitmix64(state);
      word = state;
      avail = 64;
    }
    info.set(i, static_cast<int>(word & 1u));
    word >>= 1;
    --avail;
  }
  return info;
}

struct PointAccum {
  std::int64_t frames = 0;
  std::int64_t bit_errors = 0;
  std::int64_t frame_errors = 0;
  std::int64_t sum_nc = 0;
  std::int64_t max_nc = 0;
  std::int64_t max_heap = 0;
  std::int64_t sum_exp = 0;
  std::int64_t disagreements = 0;
  std::int64_t true_misses = 0;
  std::int64_t attributed = 0;
  std::int64_t uses_linear_row = 0;

  void merge(const PointAccum& o) {
    frames += o.frames;
    bit_errors += o.bit_errors;
    frame_errors += o.frame_errors;
    sum_nc += o.sum_nc;
    max_nc = std::max(max_nc, o.max_nc);
    max_heap = std::max(max_heap, o.max_heap);
    sum_exp += o.sum_exp;
    disagreements += o.disagreements;
    true_misses += o.true_misses;
    attributed += o.attributed;
    uses_linear_row += o.uses_linear_row;
  }
};

struct EngineOutput {
  std::vector<SweepRow> rows;
  std::vector<CompareDelta> deltas;
  std::vector<Discrepancy> misses;
};

void validate_config(const SimConfig& cfg) {
  if (cfg.frames < 1) throw std::invalid_argument("frames must be >= 1");
  if (cfg.frames > cfg.max_frames)
    throw std::invalid_argument("frames exceeds the max-frame guard");
  if (cfg.snr_db.empty()) throw std::invalid_argument("SNR list must be non-empty");
  if (cfg.modes.empty()) throw std::invalid_argument("mode list must be non-empty");
}

EngineOutput run_engine(const SimConfig& cfg, bool diagnose_misses) {
  validate_config(cfg);
  Code code = make_code(cfg.code);
  UnrolledTrellis u(code.trellis);
  const int k = code.k();
  const int n_modes = static_cast<int>(cfg.modes.size());

  int exact_idx = -1;
  for (int m = 0; m < n_modes; ++m)
    if (cfg.modes[m] == Mode::exact) exact_idx = m;
  if (diagnose_misses) {
    if (exact_idx < 0)
      throw std::invalid_argument("compare requires the exact mode");
    bool has_approx = false;
    for (Mode m : cfg.modes)
      has_approx = has_approx || m == Mode::approx1 || m == Mode::approx2;
    if (!has_approx)
      throw std::invalid_argument("compare requires at least one approx mode");
  }

  int n_threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = static_cast<int>(
      std::min<std::int64_t>(n_threads, cfg.frames));

  EngineOutput out;
  for (double snr : cfg.snr_db) {
    std::vector<PointAccum> accum(n_modes);
    std::vector<std::vector<PointAccum>> partial(
        n_threads, std::vector<PointAccum>(n_modes));
    std::vector<std::vector<Discrepancy>> partial_misses(n_threads);

    auto worker = [&](int w, std::int64_t lo, std::int64_t hi) {
      auto& acc = partial[w];
      auto& misses = partial_misses[w];
      std::vector<DecodeResult> results(n_modes);
      for (std::int64_t f = lo; f < hi; ++f) {
        const BitVec info = cfg.all_zero ? BitVec(k)
                                         : random_info(k, frame_data_seed(cfg.seed, f));
        const BitVec sent = code.info_map.encode(info);
        const std::vector<double> x = modulate(sent);
        const std::vector<double> r = add_awgn(x, snr, frame_noise_seed(cfg.seed, f));
        const SoftInput soft = branch_costs(code.trellis, r, snr);
        const Phase1Result p1 = phase1(u, soft);

        auto run_mode = [&](Mode m) {
          return m == Mode::phase1_only ? decode(u, soft, m) : phase2(u, soft, p1, m);
        };
        if (exact_idx >= 0) results[exact_idx] = run_mode(Mode::exact);
        for (int m = 0; m < n_modes; ++m)
          if (m != exact_idx) results[m] = run_mode(cfg.modes[m]);

        for (int m = 0; m < n_modes; ++m) {
          const DecodeResult& res = results[m];
          PointAccum& a = acc[m];
          ++a.frames;
          const BitVec decoded_info = code.info_map.info_bits(res.codeword);
          a.bit_errors += (decoded_info ^ info).weight();
          a.frame_errors += res.codeword != sent ? 1 : 0;
          a.sum_nc += res.stats.node_computations;
          a.max_nc = std::max(a.max_nc, res.stats.node_computations);
          a.max_heap = std::max(a.max_heap, res.stats.max_heap_size);
          a.sum_exp += res.stats.phase2_expansions;
          if (exact_idx >= 0 && m != exact_idx) {
            const DecodeResult& ex = results[exact_idx];
            if (res.codeword != ex.codeword) ++a.disagreements;
            if (res.cost > ex.cost + kCostEps) {
              ++a.true_misses;
              if (diagnose_misses &&
                  (cfg.modes[m] == Mode::approx1 || cfg.modes[m] == Mode::approx2)) {
                FrameRef frame{u, soft,
                               code.spanned ? &*code.spanned : nullptr,
                               static_cast<std::uint64_t>(f), cfg.modes[m]};
                Discrepancy d = diagnose_discrepancy(frame, ex, res, p1);
                if (d.attributed) ++a.attributed;
                if (d.uses_linear_row) ++a.uses_linear_row;
                misses.push_back(std::move(d));
              }
            }
          }
        }
      }
    };

    if (n_threads == 1) {
      worker(0, 0, cfg.frames);
    } else {
      std::vector<std::thread> pool;
      const std::int64_t q = cfg.frames / n_threads;
      const std::int64_t rem = cfg.frames % n_threads;
      std::int64_t lo = 0;
      for (int w = 0; w < n_threads; ++w) {
        const std::int64_t hi = lo + q + (w < rem ? 1 : 0);
        pool.emplace_back(worker, w, lo, hi);
        lo = hi;
      }
      for (auto& th : pool) th.join();
    }

    for (int w = 0; w < n_threads; ++w) {
      for (int m = 0; m < n_modes; ++m) accum[m].merge(partial[w][m]);
      for (auto& d : partial_misses[w]) out.misses.push_back(std::move(d));
    }

    const double denom = static_cast<double>(cfg.frames) * k;
    for (int m = 0; m < n_modes; ++m) {
      const PointAccum& a = accum[m];
      SweepRow row;
      row.snr_db = snr;
      row.mode = mode_name(cfg.modes[m]);
      row.frames = a.frames;
      row.bit_errors = a.bit_errors;
      row.ber = a.bit_errors / denom;
      row.frame_errors = a.frame_errors;
      row.avg_node_computations = static_cast<double>(a.sum_nc) / cfg.frames;
      row.max_node_computations = a.max_nc;
      row.max_heap_size = a.max_heap;
      row.avg_phase2_expansions = static_cast<double>(a.sum_exp) / cfg.frames;
      row.disagreements_vs_exact =
          (exact_idx >= 0 && m != exact_idx) ? a.disagreements : -1;
      out.rows.push_back(row);

      if (exact_idx >= 0 && m != exact_idx) {
        const PointAccum& ex = accum[exact_idx];
        CompareDelta delta;
        delta.snr_db = snr;
        delta.mode = row.mode;
        delta.ber_mode = row.ber;
        delta.ber_exact = ex.bit_errors / denom;
        delta.ber_delta = row.ber - delta.ber_exact;
        const double p1v = delta.ber_mode, p2v = delta.ber_exact;
        delta.two_binomial_se =
            2.0 * std::sqrt(p1v * (1.0 - p1v) / denom + p2v * (1.0 - p2v) / denom);
        delta.disagreements = a.disagreements;
        delta.true_misses = a.true_misses;
        delta.attributed = a.attributed;
        delta.uses_linear_row = a.uses_linear_row;
        out.deltas.push_back(delta);
      }
    }
  }
  std::sort(out.misses.begin(), out.misses.end(),
            [](const Discrepancy& a, const Discrepancy& b) {
              return a.frame_seed < b.frame_seed;
            });
  return out;
}

void write_misses(const std::vector<Discrepancy>& misses, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& d : misses) out << to_jsonl(d) << "\n";
}

}  // namespace

std::vector<SweepRow> run_sweep(const SimConfig& cfg) {
  EngineOutput out = run_engine(cfg, false);
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw std::runtime_error("cannot open " + cfg.out_path + " for writing");
    write_csv(out.rows, cfg, f);
  }
  return out.rows;
}

CompareReport compare_modes(const SimConfig& cfg) {
  EngineOutput out = run_engine(cfg, true);
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw std::runtime_error("cannot open " + cfg.out_path + " for writing");
    write_csv(out.rows, cfg, f);
  }
  write_misses(out.misses, cfg.misses_path);
  return CompareReport{std::move(out.rows), std::move(out.deltas),
                       std::move(out.misses)};
}

void write_csv(const std::vector<SweepRow>& rows, const SimConfig& cfg,
               std::ostream& out) {
  Code code = make_code(cfg.code);
  char buf[256];
  if (!cfg.reproducible) {
    out << "# generated_at=" << std::time(nullptr) << "\n";
  }
  out << "# code=" << cfg.code << " n=" << code.n_symbols() << " k=" << code.k()
      << " frames=" << cfg.frames << " seed=" << cfg.seed
      << " all_zero=" << (cfg.all_zero ? 1 : 0) << "\n";
  out << "# snr is Es/N0 in dB; eb_n0_db = snr_db - 10*log10(k/n)\n";
  out << "# ber counts information-bit errors (generator-basis coordinates via "
         "pivot-column inverse), denominator frames*k\n";
  out << "# per-frame streams: splitmix64(seed, frame index); noise and data "
         "streams are independent\n";
  out << "snr_db,eb_n0_db,mode,frames,bit_errors,ber,frame_errors,"
         "avg_node_computations,max_node_computations,max_heap_size,"
         "avg_phase2_expansions,disagreements_vs_exact\n";
  const double rate = code.rate();
  for (const SweepRow& r : rows) {
    const double eb = r.snr_db - 10.0 * std::log10(rate);
    std::snprintf(buf, sizeof buf,
                  "%.4f,%.4f,%s,%lld,%lld,%.8e,%lld,%.4f,%lld,%lld,%.4f,%lld\n",
                  r.snr_db, eb, r.mode.c_str(),
                  static_cast<long long>(r.frames),
                  static_cast<long long>(r.bit_errors), r.ber,
                  static_cast<long long>(r.frame_errors), r.avg_node_computations,
                  static_cast<long long>(r.max_node_computations),
                  static_cast<long long>(r.max_heap_size), r.avg_phase2_expansions,
                  static_cast<long long>(r.disagreements_vs_exact));
    out << buf;
  }
}

bool selftest(std::ostream& out) {
  bool all_ok = true;
  auto check = [&](const std::string& name, bool pass, const std::string& detail = "") {
    out << (pass ? "ok " : "FAIL ") << name;
    if (!pass && !detail.empty()) out << ": " << detail;
    out << "\n";
    all_ok = all_ok && pass;
  };

  auto [g, t] = hamming74();
  UnrolledTrellis u(t);

  {
    // Edge counts multiply section by section along the product fold.
    std::vector<int> widths(g.n(), 1);
    TailBitingTrellis acc = trivial_trellis(widths);
    bool pass = true;
    for (int i = 0; i < g.k(); ++i) {
      TailBitingTrellis elem = elementary_trellis(g.row(i), g.span(i), g.n());
      TailBitingTrellis next = product(acc, elem);
      for (int sec = 0; sec < g.n(); ++sec)
        pass = pass && next.sections[sec].size() ==
                           acc.sections[sec].size() * elem.sections[sec].size();
      acc = std::move(next);
    }
    check("product_edge_counts_multiply", pass);
    check("product_fold_matches_constructor", acc == t);
  }

  check("start_states_2_to_c", t.num_subtrellises() == 4);

  {
    bool pass = true;
    for (int i = 0; i < u.num_subtrellises(); ++i)
      for (int j = 0; j < u.num_subtrellises(); ++j)
        pass = pass && u.in_subtrellis(u.start_node(i), j) == (i == j);
    check("start_membership_is_own_bit", pass);
  }

  {
    bool pass = true;
    for (int i : g.circular_row_indices()) {
      Interval zr = zero_run(g.row(i), g.span(i), g.n());
      auto dbl = doubled_interval(g.span(i), g.n());
      for (int time = 0; time < g.n(); ++time)
        pass = pass && (zr.contains(time, g.n()) != dbl->contains(time, g.n()));
    }
    check("zero_run_tiles_time_axis", pass);
  }

  {
    auto ip = intersection_property(g);
    check("intersection_witness",
          ip.holds && ip.arcs.size() == 1 && ip.arcs[0] == Interval{4, 5});
  }

  {
    auto mi = merging_interval(t, 0, 1);
    check("merging_interval_0_1", mi.has_value() && *mi == Interval{2, 5});
  }

  {
    auto labels = enumerate_path_labels(u);
    std::vector<std::vector<BitVec>> cycles(t.num_subtrellises());
    for (const auto& pl : labels)
      if (pl.start == pl.final) cycles[pl.start].push_back(pl.label);
    for (auto& c : cycles) std::sort(c.begin(), c.end());

    auto circ = g.circular_row_indices();
    bool pass = cycles[0].size() == 4;
    for (int i = 0; i < t.num_subtrellises(); ++i) {
      BitVec leader(g.n());
      for (std::size_t r = 0; r < circ.size(); ++r)
        if ((i >> r) & 1) leader ^= g.row(circ[r]);
      std::vector<BitVec> shifted;
      for (const BitVec& c : cycles[0]) shifted.push_back(c ^ leader);
      std::sort(shifted.begin(), shifted.end());
      pass = pass && shifted == cycles[i];
    }
    check("subtrellis_labels_are_cosets", pass);

    std::vector<BitVec> all;
    for (const auto& pl : labels) all.push_back(pl.label);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    auto space = row_space(split_heads_tails(g).rows());
    check("path_labels_equal_split_row_space",
          all == space && labels.size() == 64);

    const BitVec semi = BitVec::from_string("1100110");
    bool found = false;
    for (const auto& pl : labels)
      found = found || (pl.label == semi && pl.start == 1 && pl.final == 0);
    check("known_semicodeword_endpoints", found);
  }

  {
    std::ostringstream ss;
    save_trellis(t, ss);
    std::istringstream back(ss.str());
    TailBitingTrellis t2 = parse_trellis(back);
    std::ostringstream ss2;
    save_trellis(t2, ss2);
    check("interchange_round_trip", t2 == t && ss.str() == ss2.str());
  }

  {
    ConvCodeSpec small = conv_spec_from_octal({"35", "31"}, 4, 6);
    TailBitingTrellis ct = conv_tbt(small);
    UnrolledTrellis cu(ct);
    auto labels = enumerate_path_labels(cu);
    std::vector<BitVec> cycles;
    for (const auto& pl : labels)
      if (pl.start == pl.final) cycles.push_back(pl.label);
    std::sort(cycles.begin(), cycles.end());
    auto space = row_space(conv_spanned(small).rows());
    check("conv_cycle_labels_linear_code",
          cycles.size() == 64 && cycles == space);

    bool pass = true;
    for (std::uint64_t word = 0; word < 64 && pass; word += 7) {
      BitVec info(6);
      for (int b = 0; b < 6; ++b) info.set(b, static_cast<int>((word >> b) & 1));
      BitVec cw = conv_encode(small, info);
      int start = info[2] | (info[3] << 1) | (info[4] << 2) | (info[5] << 3);
      bool on_cycle = false;
      for (const auto& pl : labels)
        on_cycle = on_cycle ||
                   (pl.label == cw && pl.start == start && pl.final == start);
      pass = pass && on_cycle;
    }
    check("conv_encoder_matches_trellis_cycles", pass);
  }

  {
    TailBitingTrellis c20 = conv_tbt(conv_spec_from_octal({"35", "31"}, 4, 20));
    check("conv35_total_states", c20.total_states() == 320);
    TailBitingTrellis c48 = conv_tbt(conv_spec_from_octal({"133", "171"}, 6, 48));
    check("conv133_total_states", c48.total_states() == 3072);
  }

  {
    bool pass = true;
    std::string detail;
    for (std::int64_t f = 0; f < 200 && pass; ++f) {
      const double snr = (f % 3) * 2.0;
      BitVec info = random_info(4, frame_data_seed(99, f));
      InfoMap im(g.rows());
      BitVec sent = im.encode(info);
      auto r = add_awgn(modulate(sent), snr, frame_noise_seed(99, f));
      SoftInput soft = branch_costs(t, r, snr);
      DecodeResult res = decode(u, soft, Mode::exact);
      MlResult ml = brute_force_ml(g, r);
      if (std::abs(res.cost - ml.cost) > kCostEps) {
        pass = false;
        detail = "cost mismatch at frame " + std::to_string(f);
      }
    }
    check("exact_decode_matches_enumeration_200_frames", pass, detail);
  }

  return all_ok;
}

}  // namespace tbt
