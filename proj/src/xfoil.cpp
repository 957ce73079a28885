#include "airfoil/xfoil.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "airfoil/errors.hpp"

namespace fs = std::filesystem;

namespace airfoil {

namespace {

bool is_executable_file(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "xfoil_runXXXXXX").string();
    if (!mkdtemp(tmpl.data())) {
      throw EnvironmentError("xfoil: cannot create temp directory");
    }
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Runs the binary with stdin/stdout redirected to files. Returns false
// when the process had to be killed on timeout.
bool run_with_timeout(const std::string& binary, const fs::path& stdin_file,
                      const fs::path& stdout_file, const fs::path& workdir,
                      double timeout_s) {
  const pid_t pid = fork();
  if (pid < 0) throw EnvironmentError("xfoil: fork failed");
  if (pid == 0) {
    setpgid(0, 0);  // own process group so a timeout kill reaps children too
    if (chdir(workdir.c_str()) != 0) _exit(126);
    const int in = open(stdin_file.c_str(), O_RDONLY);
    const int out = open(stdout_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in < 0 || out < 0) _exit(126);
    dup2(in, STDIN_FILENO);
    dup2(out, STDOUT_FILENO);
    dup2(out, STDERR_FILENO);
    close(in);
    close(out);
    execl(binary.c_str(), binary.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) return true;
    if (done < 0) throw EnvironmentError("xfoil: waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      return false;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

}  // namespace

std::string resolve_xfoil_binary() {
  if (const char* env = std::getenv("XFOIL_PATH")) {
    if (is_executable_file(env)) return env;
    throw EnvironmentError(std::string("XFOIL_PATH is set but not executable: ") + env);
  }
  if (const char* path_env = std::getenv("PATH")) {
    std::istringstream dirs(path_env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      const fs::path candidate = fs::path(dir) / "xfoil";
      if (is_executable_file(candidate)) return candidate.string();
    }
  }
  throw EnvironmentError(
      "xfoil binary not found: set XFOIL_PATH or add 'xfoil' to PATH");
}

std::optional<AeroFeatures> parse_polar_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool past_header = false;
  while (std::getline(in, line)) {
    if (!past_header) {
      if (line.find("------") != std::string::npos) past_header = true;
      continue;
    }
    // Data columns: alpha  CL  CD  CDp  CM  ...
    std::istringstream row(line);
    double alpha = 0.0, cl = 0.0, cd = 0.0, cdp = 0.0, cm = 0.0;
    if (row >> alpha >> cl >> cd >> cdp >> cm) {
      return AeroFeatures{cl, cd, cm};
    }
  }
  return std::nullopt;
}

SolverResult evaluate_xfoil(const AirfoilCoordinates& coords,
                            const OperatingPoint& op, double timeout_s) {
  const auto start = std::chrono::steady_clock::now();
  const std::string binary = resolve_xfoil_binary();

  TempDir dir;
  const fs::path dat = dir.path / "airfoil.dat";
  const fs::path polar = dir.path / "polar.txt";
  const fs::path script = dir.path / "commands.txt";
  const fs::path output = dir.path / "stdout.txt";

  {
    std::ofstream out(dat, std::ios::binary);
    out << export_dat(coords, "airfoil");
    if (!out) throw EnvironmentError("xfoil: cannot write " + dat.string());
  }
  {
    char buf[128];
    std::ofstream out(script, std::ios::binary);
    out << "PLOP\nG F\n\n";
    out << "LOAD airfoil.dat\n";
    out << "OPER\n";
    std::snprintf(buf, sizeof(buf), "VISC %.9g\n", op.reynolds);
    out << buf;
    out << "ITER 100\n";
    out << "PACC\npolar.txt\n\n";
    std::snprintf(buf, sizeof(buf), "ALFA %.9g\n", op.alpha_deg);
    out << buf;
    out << "\nQUIT\n";
    if (!out) throw EnvironmentError("xfoil: cannot write command script");
  }

  SolverResult result;
  result.solver_id = "xfoil";

  const bool finished = run_with_timeout(binary, script, output, dir.path, timeout_s);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!finished) return result;  // timeout => NotConverged

  const std::string polar_text = read_file(polar);
  if (polar_text.empty()) {
    // The solver opens the polar file immediately on accumulation; a
    // missing file means the command protocol broke down.
    throw std::runtime_error("xfoil: no polar output produced; captured output:\n" +
                             read_file(output));
  }
  result.features = parse_polar_text(polar_text);
  return result;
}

}  // namespace airfoil
