// Command-line front end: SNR sweeps, exact-vs-approx comparison runs, and
// the structural self-test suite.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbt/sim.hpp"

namespace {

std::vector<double> parse_snr(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double start, step, stop;
    char c1, c2;
    std::istringstream ss(s);
    if (!(ss >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
        step <= 0)
      throw CLI::ValidationError("--snr", "expected start:step:stop");
    for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
    return out;
  }
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw CLI::ValidationError("--snr", "empty SNR list");
  return out;
}

std::vector<tbt::Mode> parse_modes(const std::string& s) {
  std::vector<tbt::Mode> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tbt::mode_from_name(tok));
  if (out.empty()) throw CLI::ValidationError("--modes", "empty mode list");
  return out;
}

void add_common(CLI::App* cmd, tbt::SimConfig& cfg, std::string& snr_arg,
                std::string& modes_arg) {
  cmd->add_option("--code", cfg.code, "code registry name")->required();
  cmd->add_option("--modes", modes_arg, "comma-separated decode modes");
  cmd->add_option("--snr", snr_arg, "Es/N0 in dB: list a,b,c or start:step:stop");
  cmd->add_option("--frames", cfg.frames, "frames per SNR point");
  cmd->add_option("--seed", cfg.seed, "base seed");
  cmd->add_option("--out", cfg.out_path, "CSV output path");
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  cmd->add_option("--max-frames", cfg.max_frames, "frame-count guard");
  cmd->add_flag("--all-zero", cfg.all_zero, "transmit the all-zero codeword");
  cmd->add_flag("--reproducible", cfg.reproducible,
                "suppress the timestamp header for byte-identical output");
}

void print_rows(const std::vector<tbt::SweepRow>& rows) {
  std::printf("%8s %-12s %10s %12s %10s %10s %10s\n", "snr_db", "mode", "frames",
              "ber", "avg_nc", "max_nc", "max_heap");
  for (const auto& r : rows)
    std::printf("%8.2f %-12s %10lld %12.4e %10.2f %10lld %10lld\n", r.snr_db,
                r.mode.c_str(), static_cast<long long>(r.frames), r.ber,
                r.avg_node_computations,
                static_cast<long long>(r.max_node_computations),
                static_cast<long long>(r.max_heap_size));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-biting trellis ML decoder"};
  app.require_subcommand(1);

  tbt::SimConfig cfg;
  std::string snr_arg = "0:1:5";
  std::string modes_arg = "exact";

  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo SNR sweep");
  add_common(sweep, cfg, snr_arg, modes_arg);

  CLI::App* compare =
      app.add_subcommand("compare", "co-run exact and approx modes on identical frames");
  add_common(compare, cfg, snr_arg, modes_arg);
  compare->add_option("--misses", cfg.misses_path,
                      "JSONL output for frames where an approx mode lost");

  CLI::App* selftest = app.add_subcommand("selftest", "run the property suites");

  CLI::App* info = app.add_subcommand("info", "print code and trellis facts");
  std::string info_code;
  info->add_option("--code", info_code, "code registry name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      cfg.snr_db = parse_snr(snr_arg);
      cfg.modes = parse_modes(modes_arg);
      auto rows = tbt::run_sweep(cfg);
      print_rows(rows);
      if (!cfg.out_path.empty())
        std::printf("wrote %s\n", cfg.out_path.c_str());
    } else if (compare->parsed()) {
      cfg.snr_db = parse_snr(snr_arg);
      cfg.modes = parse_modes(modes_arg);
      auto report = tbt::compare_modes(cfg);
      print_rows(report.rows);
      std::printf("%8s %-12s %12s %12s %14s %8s %8s\n", "snr_db", "mode",
                  "ber_delta", "2se", "disagreements", "misses", "gl_flag");
      for (const auto& d : report.deltas)
        std::printf("%8.2f %-12s %12.4e %12.4e %14lld %8lld %8lld\n", d.snr_db,
                    d.mode.c_str(), d.ber_delta, d.two_binomial_se,
                    static_cast<long long>(d.disagreements),
                    static_cast<long long>(d.true_misses),
                    static_cast<long long>(d.uses_linear_row));
      if (!cfg.misses_path.empty())
        std::printf("wrote %zu miss records to %s\n", report.misses.size(),
                    cfg.misses_path.c_str());
    } else if (selftest->parsed()) {
      return tbt::selftest(std::cout) ? 0 : 1;
    } else if (info->parsed()) {
      tbt::Code code = tbt::make_code(info_code);
      const auto& t = code.trellis;
      std::printf("code            %s\n", code.name.c_str());
      std::printf("n (symbols)     %d\n", code.n_symbols());
      std::printf("k               %d\n", code.k());
      std::printf("sections        %d\n", t.n);
      std::printf("total states    %lld\n", static_cast<long long>(t.total_states()));
      std::printf("total edges     %lld\n", static_cast<long long>(t.total_edges()));
      std::printf("subtrellises    %d\n", t.num_subtrellises());
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
