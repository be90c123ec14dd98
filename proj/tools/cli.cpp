#include "cli.hpp"

#include <charconv>
#include <cstdarg>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef LOOPBC_VERSION
#define LOOPBC_VERSION "unknown"
#endif

namespace loopbc::cli {

namespace fs = std::filesystem;

std::string format(const char* f, ...) {
  va_list a;
  va_start(a, f);
  char buf[1024];
  std::vsnprintf(buf, sizeof buf, f, a);
  va_end(a);
  return buf;
}

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string Context::path(const std::string& file) const {
  fs::path p(file);
  return p.is_absolute() ? p.string() : (fs::path(out_dir) / p).string();
}

std::string Context::manifest_path() const {
  std::string stem = command;
  for (char& c : stem)
    if (c == ' ') c = '-';
  if (!outputs.empty()) stem = fs::path(outputs.front()).stem().string();
  return path(stem + ".manifest.json");
}

ordered_json Context::manifest() const {
  ordered_json m;
  m["command"] = command;
  m["argv"] = argv;
  m["out_dir"] = out_dir;
  m["parameters"] = parameters;
  m["seeds"] = seeds;
  m["truncation"] = truncation;
  m["version"] = LOOPBC_VERSION;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m["wall_clock_seconds"] = wall;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["finished_utc"] = stamp;
  m["outputs"] = outputs;
  m["jobs"] = jobs;
  return m;
}

void Context::write_manifest() const {
  if (outputs.empty()) return;
  std::ofstream f(manifest_path());
  if (!f) throw std::runtime_error("cannot write " + manifest_path());
  f << manifest().dump(2) << "\n";
}

void Table::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("row width does not match the columns of " + title_);
  rows_.push_back(cells);
}

void Table::write(Context& ctx, const std::string& file) const {
  const std::string full = ctx.path(file);
  if (auto parent = fs::path(full).parent_path(); !parent.empty()) fs::create_directories(parent);
  ctx.outputs.push_back(full);
  std::ofstream f(full);
  if (!f) throw std::runtime_error("cannot write " + full);
  f << "# " << title_ << "\n";
  f << "# manifest: " << fs::path(ctx.manifest_path()).filename().string() << "\n";
  for (const auto& c : columns_) f << "# " << c.name << ": " << c.definition << "\n";
  for (const auto& n : notes_) f << "# " << n << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) f << (i ? "," : "") << columns_[i].name;
  f << "\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << "\n";
  }
}

void write_plot_stub(Context& ctx, const std::string& file, const std::string& csv, const std::string& x,
                     const std::vector<std::string>& ys, const std::string& group) {
  const std::string full = ctx.path(file);
  ctx.outputs.push_back(full);
  std::ofstream f(full);
  f << "# Renders " << csv << "; needs pandas and matplotlib.\n"
    << "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
    << "df = pd.read_csv('" << fs::path(csv).filename().string() << "', comment='#')\n"
    << "fig, ax = plt.subplots()\n";
  for (const auto& y : ys) {
    if (group.empty()) {
      f << "ax.plot(df['" << x << "'], df['" << y << "'], marker='o', label='" << y << "')\n";
    } else {
      f << "for key, part in df.groupby('" << group << "'):\n"
        << "    ax.plot(part['" << x << "'], part['" << y << "'], marker='o', label=f'" << group << "={key}')\n";
    }
  }
  f << "ax.set_xlabel('" << x << "')\nax.legend()\nfig.savefig('" << fs::path(csv).stem().string()
    << ".png', dpi=150)\n";
}

void emit(const Context& ctx, const ordered_json& summary) {
  if (ctx.json) {
    ordered_json out = summary;
    out["manifest"] = ctx.manifest();
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : summary.items()) std::cout << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  if (!ctx.outputs.empty()) std::cout << "manifest = " << ctx.manifest_path() << "\n";
}

namespace {

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw CLI::ValidationError("not a number: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(part);
  return out;
}

}  // namespace

std::vector<int> parse_int_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) return parse_int_list(s);
  int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
  if (b < a) throw CLI::ValidationError("empty range " + s);
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

std::vector<double> parse_grid(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() == 1) return parse_list(s);
  if (parts.size() != 3) throw CLI::ValidationError("expected a:b:steps, got " + s);
  double a = to_double(parts[0]), b = to_double(parts[1]);
  int steps = std::stoi(parts[2]);
  if (steps < 0) throw CLI::ValidationError("negative step count in " + s);
  std::vector<double> v;
  for (int i = 0; i <= steps; ++i) v.push_back(steps == 0 ? a : a + (b - a) * i / steps);
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& p : split(s, ',')) v.push_back(to_double(p));
  if (v.empty()) throw CLI::ValidationError("empty list");
  return v;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  for (const auto& p : split(s, ',')) v.push_back(std::stoi(p));
  if (v.empty()) throw CLI::ValidationError("empty list");
  return v;
}

}  // namespace loopbc::cli
