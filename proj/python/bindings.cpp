// Python bindings for the core operations: code construction, channel
// simulation, decoding and the Monte-Carlo sweep driver.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tbt/codebook.hpp"
#include "tbt/decoder.hpp"
#include "tbt/oracle.hpp"
#include "tbt/sim.hpp"

namespace py = pybind11;
using namespace tbt;

namespace {

std::vector<int> bits_of(const BitVec& v) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

BitVec to_bitvec(const std::vector<int>& bits) {
  BitVec v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i]);
  return v;
}

py::dict result_dict(const DecodeResult& res) {
  py::dict d;
  d["codeword"] = res.codeword.to_string();
  d["cost"] = res.cost;
  d["mode"] = mode_name(res.mode);
  d["subtrellis"] = res.subtrellis;
  d["node_computations"] = res.stats.node_computations;
  d["phase2_expansions"] = res.stats.phase2_expansions;
  d["heap_inserts"] = res.stats.heap_inserts;
  d["max_heap_size"] = res.stats.max_heap_size;
  d["phase2_slots"] = res.stats.phase2_slots;
  d["residual_trellises"] = res.stats.residual_trellises;
  d["winner_source"] =
      res.stats.winner_source == WinnerSource::phase1 ? "phase1" : "phase2";
  return d;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["snr_db"] = r.snr_db;
  d["mode"] = r.mode;
  d["frames"] = r.frames;
  d["bit_errors"] = r.bit_errors;
  d["ber"] = r.ber;
  d["frame_errors"] = r.frame_errors;
  d["avg_node_computations"] = r.avg_node_computations;
  d["max_node_computations"] = r.max_node_computations;
  d["max_heap_size"] = r.max_heap_size;
  d["avg_phase2_expansions"] = r.avg_phase2_expansions;
  d["disagreements_vs_exact"] = r.disagreements_vs_exact;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact and approximate ML decoding on tail-biting trellises";

  py::class_<Code>(m, "Code")
      .def_property_readonly("name", [](const Code& c) { return c.name; })
      .def_property_readonly("n", &Code::n_symbols)
      .def_property_readonly("k", &Code::k)
      .def_property_readonly("rate", &Code::rate)
      .def_property_readonly("total_states",
                             [](const Code& c) { return c.trellis.total_states(); })
      .def_property_readonly("num_subtrellises",
                             [](const Code& c) { return c.trellis.num_subtrellises(); })
      .def_property_readonly(
          "generator",
          [](const Code& c) {
            std::vector<std::string> rows;
            for (const auto& r : c.generator) rows.push_back(r.to_string());
            return rows;
          })
      .def("encode",
           [](const Code& c, const std::vector<int>& info) {
             return c.info_map.encode(to_bitvec(info)).to_string();
           })
      .def("info_bits", [](const Code& c, const std::string& codeword) {
        return bits_of(c.info_map.info_bits(BitVec::from_string(codeword)));
      });

  m.def("make_code", &make_code, py::arg("name"),
        "construct a registry code: hamming74, conv133_171_L48, conv35_31_L20, "
        "file:<path>, matrix:<path>");

  m.def(
      "modulate",
      [](const std::string& codeword) {
        return modulate(BitVec::from_string(codeword));
      },
      py::arg("codeword"));

  m.def(
      "add_awgn",
      [](const std::vector<double>& x, double snr_db, std::uint64_t seed) {
        return add_awgn(x, snr_db, seed);
      },
      py::arg("x"), py::arg("snr_db"), py::arg("seed"));

  m.def(
      "decode",
      [](const Code& code, const std::vector<double>& r, const std::string& mode) {
        return result_dict(decode(code.trellis, r, mode_from_name(mode)));
      },
      py::arg("code"), py::arg("received"), py::arg("mode") = "exact",
      "one-shot decode of a received vector");

  m.def(
      "brute_force_ml",
      [](const Code& code, const std::vector<double>& r) {
        auto ml = brute_force_ml(code.generator, r);
        return py::make_tuple(ml.codeword.to_string(), ml.cost);
      },
      py::arg("code"), py::arg("received"));

  m.def(
      "run_sweep",
      [](const std::string& code, const std::vector<std::string>& modes,
         const std::vector<double>& snr_db, std::int64_t frames,
         std::uint64_t seed, bool all_zero, int threads,
         const std::string& out_path) {
        SimConfig cfg;
        cfg.code = code;
        cfg.modes.clear();
        for (const auto& name : modes) cfg.modes.push_back(mode_from_name(name));
        cfg.snr_db = snr_db;
        cfg.frames = frames;
        cfg.seed = seed;
        cfg.all_zero = all_zero;
        cfg.threads = threads;
        cfg.out_path = out_path;
        cfg.reproducible = true;
        auto rows = run_sweep(cfg);
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("code"), py::arg("modes"), py::arg("snr_db"), py::arg("frames"),
      py::arg("seed") = 1, py::arg("all_zero") = false, py::arg("threads") = 0,
      py::arg("out_path") = "");

  m.def("selftest", [] {
    std::ostringstream out;
    const bool ok = selftest(out);
    return py::make_tuple(ok, out.str());
  });

  m.attr("__version__") = "0.1.0";
}
