#include "proofdoor/errors.hpp"
#include "proofdoor/sat.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace proofdoor {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> build_argv(const std::string &command,
                                    const std::string &cnf,
                                    const std::string &proof) {
  std::istringstream in(command);
  std::vector<std::string> argv;
  std::string tok;
  bool placeholder = false;
  while (in >> tok) {
    auto sub = [&](const std::string &key, const std::string &value) {
      for (std::size_t pos; (pos = tok.find(key)) != std::string::npos;) {
        tok.replace(pos, key.size(), value);
        placeholder = true;
      }
    };
    sub("{cnf}", cnf);
    sub("{proof}", proof);
    argv.push_back(tok);
  }
  if (argv.empty())
    throw InputError("empty external solver command");
  if (!placeholder) {
    argv.push_back(cnf);
    argv.push_back(proof);
  }
  return argv;
}

// Scratch files removed on scope exit.
struct TempFiles {
  std::vector<fs::path> paths;
  ~TempFiles() {
    std::error_code ec;
    for (const auto &p : paths)
      fs::remove(p, ec);
  }
};

fs::path unique_path(const fs::path &dir, const std::string &stem) {
  static std::uint64_t counter = 0;
  return dir / (stem + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
}

Assignment parse_model(const std::string &path, Var num_vars) {
  Assignment model(num_vars);
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 2 || line[0] != 'v')
      continue;
    std::istringstream ls(line.substr(1));
    int v;
    while (ls >> v)
      if (v != 0 && static_cast<Var>(std::abs(v)) <= num_vars)
        model.set(Lit::from_dimacs(v));
  }
  return model;
}

} // namespace

SolveResult run_external_solver(const CnfFormula &f,
                                const ExternalSolverOptions &options) {
  std::string command = options.command;
  if (command.empty()) {
    const char *env = std::getenv("PROOFDOOR_SOLVER");
    if (!env || !*env)
      throw InputError("no solver command given and PROOFDOOR_SOLVER unset");
    command = env;
  }
  fs::path dir = options.work_dir.empty() ? fs::temp_directory_path()
                                          : fs::path(options.work_dir);
  TempFiles tmp;
  fs::path cnf = unique_path(dir, "proofdoor-input") += ".cnf";
  fs::path proof = unique_path(dir, "proofdoor-proof") += ".drat";
  fs::path out = unique_path(dir, "proofdoor-stdout") += ".txt";
  tmp.paths = {cnf, proof, out};
  write_dimacs_file(cnf.string(), f);

  auto argv = build_argv(command, cnf.string(), proof.string());
  std::vector<char *> cargv;
  for (auto &a : argv)
    cargv.push_back(a.data());
  cargv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0)
    throw Error("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    int fd = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::close(fd);
    }
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }

  auto start = std::chrono::steady_clock::now();
  int status = 0;
  for (;;) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid)
      break;
    if (r < 0)
      throw Error("waitpid failed for external solver");
    if (options.timeout &&
        std::chrono::steady_clock::now() - start > *options.timeout) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      SolveResult timed_out;
      timed_out.status = SolveStatus::BudgetExhausted;
      return timed_out;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  if (!WIFEXITED(status))
    throw Error("external solver terminated abnormally");
  int code = WEXITSTATUS(status);
  SolveResult result;
  if (code == 10) {
    result.status = SolveStatus::Sat;
    result.model = parse_model(out.string(), f.num_vars());
    return result;
  }
  if (code == 20) {
    result.status = SolveStatus::Unsat;
    try {
      result.trace = read_drat_file(proof.string());
    } catch (const InputError &e) {
      throw Error(std::string("unparsable proof from external solver: ") +
                  e.what());
    }
    return result;
  }
  throw Error("external solver '" + argv[0] + "' exited with code " +
              std::to_string(code));
}

} // namespace proofdoor
