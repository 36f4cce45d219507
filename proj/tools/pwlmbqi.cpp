// Command-line driver: solve a single problem, extract fragments, run
// benchmark batches, or differential-test against an external solver.

#include <cstdlib>
#include <set>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwlmbqi/bench.hpp"
#include "pwlmbqi/fragmenter.hpp"
#include "pwlmbqi/mbqi.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/printer.hpp"

namespace fs = std::filesystem;
using namespace pwlmbqi;

namespace {

constexpr int kExitDefinitive = 0;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;
constexpr int kExitMismatch = 4;

Mode parse_mode(const std::string& m) {
  if (m == "smart") return Mode::Smart;
  if (m == "non-smart") return Mode::NonSmart;
  if (m == "off") return Mode::Off;
  throw CLI::ValidationError("--mode", "expected smart, non-smart, or off");
}

std::string external_or_env(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("PWLMBQI_EXTERNAL_SOLVER");
  return env ? env : "";
}

struct CommonOpts {
  std::string mode = "smart";
  long max_iters = 500;
  double timeout = 30.0;
  bool greedy_stop = true;
  bool verify_models = true;
  unsigned seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "candidate learning mode: smart | non-smart | off");
    cmd->add_option("--max-iters", max_iters, "MBQI iteration budget");
    cmd->add_option("--timeout", timeout, "wall-clock limit in seconds");
    cmd->add_option("--greedy-stop-on-first-unsat", greedy_stop,
                    "stop greedy constraint accumulation on the first UNSAT response");
    cmd->add_option("--verify-models", verify_models, "re-verify models before reporting sat");
    cmd->add_option("--seed", seed, "random seed for generators (solving is deterministic)");
  }

  Config config() const {
    Config cfg;
    cfg.mode = parse_mode(mode);
    cfg.max_iters = max_iters;
    cfg.timeout_seconds = timeout;
    cfg.greedy_stop_on_first_unsat = greedy_stop;
    cfg.verify_models = verify_models;
    cfg.seed = seed;
    return cfg;
  }
};

int cmd_solve(const std::string& path, const CommonOpts& common, bool want_model) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  smtlib::Script script;
  try {
    script = smtlib::parse_script(buf.str());
  } catch (const smtlib::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& w : script.warnings) std::cerr << "warning: " << w << "\n";

  MbqiEngine engine(common.config());
  SolveResult r = engine.solve(script);
  std::cout << verdict_text(r.verdict) << "\n";
  if (r.verdict == SolveResult::Verdict::Sat && (want_model || script.get_model))
    std::cout << smtlib::print_model(r.model);
  if (r.verdict == SolveResult::Verdict::Unknown ||
      r.verdict == SolveResult::Verdict::ResourceOut) {
    if (!r.reason.empty()) std::cerr << "reason: " << r.reason << "\n";
    return kExitUnknown;
  }
  return kExitDefinitive;
}

int cmd_fragment(const std::string& path, std::size_t k, const std::string& out_dir,
                 std::size_t cap) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  smtlib::Script script;
  try {
    script = smtlib::parse_script(buf.str());
  } catch (const smtlib::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  auto fragments = enumerate_fragments(script, k, cap);
  fs::create_directories(out_dir);
  std::string base = fs::path(path).stem().string();
  std::size_t written = 0, duplicates = 0;
  std::set<std::size_t> content_hashes;
  for (const auto& [symbols, frag] : fragments) {
    std::string text = smtlib::print_script(frag);
    if (!content_hashes.insert(std::hash<std::string>{}(text)).second) {
      ++duplicates;  // identical fragment from another symbol subset
      continue;
    }
    // base.<sym1>-<sym2>.smt2
    std::string name = base + ".";
    for (std::size_t i = 0; i < symbols.size(); ++i) name += (i ? "-" : "") + symbols[i];
    name += ".smt2";
    std::ofstream out(fs::path(out_dir) / name);
    out << text;
    ++written;
  }
  std::cout << "wrote " << written << " fragment(s) for k=" << k << " to " << out_dir;
  if (duplicates) std::cout << " (" << duplicates << " duplicate(s) skipped)";
  std::cout << "\n";
  return written == 0 ? kExitUnknown : kExitDefinitive;
}

int cmd_bench(const std::string& dir, const CommonOpts& common,
              const std::vector<std::string>& mode_names, unsigned jobs,
              const std::string& out_csv) {
  std::vector<std::string> problems;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".smt2") problems.push_back(entry.path().string());
    std::sort(problems.begin(), problems.end());
  } else if (fs::exists(dir)) {
    problems.push_back(dir);
  }
  std::vector<Mode> modes;
  for (const auto& m : mode_names) modes.push_back(parse_mode(m));

  auto records = run_bench(problems, common.config(), modes, jobs);
  std::string csv = bench_csv(records);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << csv;
  } else {
    std::cout << csv;
  }
  std::cout << bench_markdown(records, modes);
  return kExitDefinitive;
}

int cmd_diff(const std::string& path, const CommonOpts& common, const std::string& external) {
  std::string cmdline = external_or_env(external);
  if (cmdline.empty()) {
    std::cerr << "error: no external solver (use --external-solver or PWLMBQI_EXTERNAL_SOLVER)\n";
    return kExitUsage;
  }
  DiffReport rep = diff_against_external(path, common.config(), cmdline);
  switch (rep.outcome) {
    case DiffReport::Outcome::Ok:
      std::cout << "ok: both " << rep.ours << "\n";
      return kExitDefinitive;
    case DiffReport::Outcome::Inconclusive:
      std::cout << "inconclusive: ours=" << rep.ours << " external=" << rep.theirs << "\n";
      return kExitDefinitive;
    case DiffReport::Outcome::Mismatch:
      std::cout << "MISMATCH: ours=" << rep.ours << " external=" << rep.theirs << " on " << path
                << "\n";
      return kExitMismatch;
    case DiffReport::Outcome::ExternalFailure:
      std::cout << "external solver failure: " << rep.detail << "\n";
      return kExitUnknown;
  }
  return kExitUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-linear model learning MBQI solver for UFLIA"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* solve = app.add_subcommand("solve", "solve one SMT-LIB problem");
  std::string solve_path;
  bool want_model = false;
  solve->add_option("path", solve_path, "input .smt2 file")->required();
  solve->add_flag("--model", want_model, "print the model on sat");
  common.attach(solve);

  auto* frag = app.add_subcommand("fragment", "extract k-function fragments");
  std::string frag_path, frag_out = "fragments";
  std::size_t frag_k = 2, frag_cap = 0;
  frag->add_option("path", frag_path, "input .smt2 file")->required();
  frag->add_option("--k", frag_k, "number of uninterpreted functions per fragment");
  frag->add_option("--out", frag_out, "output directory");
  frag->add_option("--cap", frag_cap, "maximum number of fragments (0 = no cap)");

  auto* bench = app.add_subcommand("bench", "run a directory of problems under several modes");
  std::string bench_dir, bench_csv_path = "bench.csv";
  std::vector<std::string> bench_modes{"smart", "non-smart", "off"};
  unsigned jobs = 0;
  bench->add_option("dir", bench_dir, "directory of .smt2 problems")->required();
  bench->add_option("--modes", bench_modes, "modes to run")->delimiter(',');
  bench->add_option("--jobs", jobs, "worker count (0 = logical cores)");
  bench->add_option("--out", bench_csv_path, "CSV output path");
  common.attach(bench);

  auto* diff = app.add_subcommand("diff", "differential check against an external solver");
  std::string diff_path, external;
  diff->add_option("path", diff_path, "input .smt2 file")->required();
  diff->add_option("--external-solver", external, "external solver command");
  common.attach(diff);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_path, common, want_model);
    if (frag->parsed()) return cmd_fragment(frag_path, frag_k, frag_out, frag_cap);
    if (bench->parsed()) return cmd_bench(bench_dir, common, bench_modes, jobs, bench_csv_path);
    if (diff->parsed()) return cmd_diff(diff_path, common, external);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
