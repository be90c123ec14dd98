#pragma once
// Shared plumbing for the command-line tool: output files, run manifests, failures.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace loopbc::cli {

using nlohmann::ordered_json;

inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// A computation finished but missed its tolerance or did not converge.
struct NumericalFailure : std::runtime_error {
  ordered_json diagnostic;
  NumericalFailure(const std::string& what, ordered_json diag) : std::runtime_error(what), diagnostic(std::move(diag)) {}
};

struct Context {
  std::string out_dir = ".";
  bool json = false;
  int jobs = 1;
  std::vector<std::string> argv;
  std::string command;                      // e.g. "mc crossing"
  ordered_json parameters = ordered_json::object();
  ordered_json seeds = ordered_json::object();
  ordered_json truncation = ordered_json::object();
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string path(const std::string& file) const;
  // Manifest file shared by every data file of this run.
  std::string manifest_path() const;
  ordered_json manifest() const;
  void write_manifest() const;
};

std::string format(const char* f, ...) __attribute__((format(printf, 1, 2)));
// Shortest decimal that round-trips.
std::string num(double v);

// Tidy CSV: a '#' comment block documents every column, then one header row.
class Table {
 public:
  struct Column {
    std::string name, definition;
  };
  Table(std::string title, std::vector<Column> columns) : title_(std::move(title)), columns_(std::move(columns)) {}
  void note(const std::string& line) { notes_.push_back(line); }
  void row(const std::vector<std::string>& cells);
  // Writes under ctx.out_dir and records the file in the manifest.
  void write(Context& ctx, const std::string& file) const;

 private:
  std::string title_;
  std::vector<Column> columns_;
  std::vector<std::string> notes_;
  std::vector<std::vector<std::string>> rows_;
};

// Matplotlib stub that renders a CSV written by Table.
void write_plot_stub(Context& ctx, const std::string& file, const std::string& csv, const std::string& x,
                     const std::vector<std::string>& ys, const std::string& group = "");

// Summary to stdout: JSON with --json, otherwise key = value lines.
void emit(const Context& ctx, const ordered_json& summary);

// Runs tasks[0..n) on up to `jobs` threads; results land by task index.
template <class R>
std::vector<R> parallel_map(int n, int jobs, const std::function<R(int)>& task) {
  std::vector<R> out(n);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        out[i] = task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// "a..b" integer range, "a:b:steps" real grid with steps+1 points, "x,y,z" lists.
std::vector<int> parse_int_range(const std::string& s);
std::vector<double> parse_grid(const std::string& s);
std::vector<double> parse_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

void register_predict(CLI::App& app, Context& ctx);
void register_verify(CLI::App& app, Context& ctx);
void register_transfer(CLI::App& app, Context& ctx);
void register_mc(CLI::App& app, Context& ctx);
void register_tba(CLI::App& app, Context& ctx);
void register_reproduce(CLI::App& app, Context& ctx);

}  // namespace loopbc::cli
