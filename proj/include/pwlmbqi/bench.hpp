#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "pwlmbqi/mbqi.hpp"
#include "pwlmbqi/smtlib/parser.hpp"

namespace pwlmbqi {

inline SolveResult solve_file(const std::string& path, const Config& cfg) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  smtlib::Script script = smtlib::parse_script(buf.str());
  MbqiEngine engine(cfg);
  return engine.solve(script);
}

struct BenchRecord {
  std::string problem;
  std::string mode;
  std::string verdict;
  double wall_seconds = 0;
  long iterations = 0;
  long instantiations = 0;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "problem,mode,verdict,wall_seconds,iterations,instantiations\r\n";
  for (const auto& r : records) {
    os << csv_field(r.problem) << ',' << r.mode << ',' << r.verdict << ',' << r.wall_seconds
       << ',' << r.iterations << ',' << r.instantiations << "\r\n";
  }
  return os.str();
}

inline std::string bench_markdown(const std::vector<BenchRecord>& records,
                                  const std::vector<Mode>& modes) {
  std::ostringstream os;
  os << "| solver | solved: SAT | solved: UNSAT | solved: total |\n";
  os << "| --- | --- | --- | --- |\n";
  for (Mode mode : modes) {
    long sat = 0, unsat = 0;
    for (const auto& r : records) {
      if (r.mode != mode_name(mode)) continue;
      if (r.verdict == "sat") ++sat;
      if (r.verdict == "unsat") ++unsat;
    }
    os << "| " << mode_name(mode) << " MBQI | " << sat << " | " << unsat << " | " << sat + unsat
       << " |\n";
  }
  return os.str();
}

// Run every *.smt2 problem under every mode with a per-problem wall clock,
// dispatching to a small worker pool; records come back in input order.
inline std::vector<BenchRecord> run_bench(const std::vector<std::string>& problems,
                                          const Config& base, const std::vector<Mode>& modes,
                                          unsigned jobs) {
  struct Task {
    std::string path;
    Mode mode;
  };
  std::vector<Task> tasks;
  for (const auto& p : problems)
    for (Mode m : modes) tasks.push_back({p, m});
  std::vector<BenchRecord> records(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      Config cfg = base;
      cfg.mode = t.mode;
      BenchRecord rec;
      rec.problem = t.path;
      rec.mode = mode_name(t.mode);
      auto t0 = std::chrono::steady_clock::now();
      try {
        SolveResult r = solve_file(t.path, cfg);
        rec.verdict = verdict_text(r.verdict);
        rec.iterations = r.stats.iterations;
        rec.instantiations = r.stats.instantiations;
      } catch (const std::exception&) {
        rec.verdict = "error";
      }
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      records[i] = std::move(rec);
    }
  };
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs && j < tasks.size(); ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return records;
}

// ---- external solver subprocess --------------------------------------------

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool failed = false;
  std::string output;
};

inline ProcessResult run_process(const std::string& command, double timeout_seconds) {
  ProcessResult res;
  int fds[2];
  if (pipe(fds) != 0) {
    res.failed = true;
    return res;
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    res.failed = true;
    return res;
  }
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  fcntl(fds[0], F_SETFL, O_NONBLOCK);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::microseconds(static_cast<long long>(timeout_seconds * 1e6));
  bool done = false;
  int status = 0;
  while (!done) {
    char buf[4096];
    ssize_t n;
    while ((n = read(fds[0], buf, sizeof buf)) > 0) res.output.append(buf, static_cast<size_t>(n));
    pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) {
      done = true;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      res.timed_out = true;
      done = true;
      break;
    }
    usleep(2000);
  }
  char buf[4096];
  ssize_t n;
  while ((n = read(fds[0], buf, sizeof buf)) > 0) res.output.append(buf, static_cast<size_t>(n));
  close(fds[0]);
  if (!res.timed_out && WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  return res;
}

// ---- differential check ------------------------------------------------------

struct DiffReport {
  enum class Outcome { Ok, Inconclusive, Mismatch, ExternalFailure };
  Outcome outcome = Outcome::Inconclusive;
  std::string ours, theirs;
  std::string detail;
};

inline std::string first_verdict_line(const std::string& output) {
  std::istringstream is(output);
  std::string line;
  while (std::getline(is, line)) {
    if (line == "sat" || line == "unsat" || line == "unknown") return line;
  }
  return "";
}

inline DiffReport diff_against_external(const std::string& path, const Config& cfg,
                                        const std::string& external_command) {
  DiffReport rep;
  try {
    SolveResult ours = solve_file(path, cfg);
    rep.ours = verdict_text(ours.verdict);
  } catch (const std::exception& e) {
    rep.ours = "error";
    rep.detail = e.what();
  }
  ProcessResult ext = run_process(external_command + " " + path, cfg.timeout_seconds);
  if (ext.failed || (!ext.timed_out && ext.exit_code == 127)) {
    rep.outcome = DiffReport::Outcome::ExternalFailure;
    rep.detail = "external solver failed to run";
    return rep;
  }
  rep.theirs = ext.timed_out ? "timeout" : first_verdict_line(ext.output);
  bool ours_def = rep.ours == "sat" || rep.ours == "unsat";
  bool theirs_def = rep.theirs == "sat" || rep.theirs == "unsat";
  if (ours_def && theirs_def) {
    rep.outcome = rep.ours == rep.theirs ? DiffReport::Outcome::Ok : DiffReport::Outcome::Mismatch;
  } else {
    rep.outcome = DiffReport::Outcome::Inconclusive;
  }
  return rep;
}

}  // namespace pwlmbqi
