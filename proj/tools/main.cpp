#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cli.hpp"

using namespace loopbc::cli;

namespace {

// Arguments recorded in a manifest, for `loopbc --replay run.manifest.json`.
std::vector<std::string> replay_args(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw CLI::ValidationError("cannot read manifest " + file);
  auto m = ordered_json::parse(f);
  auto args = m.at("argv").get<std::vector<std::string>>();
  // the environment at replay time must not redirect the outputs
  if (std::find(args.begin(), args.end(), "--out-dir") == args.end() && m.contains("out_dir"))
    args.insert(args.begin(), {"--out-dir", m["out_dir"].get<std::string>()});
  return args;
}

int run(std::vector<std::string> args) {
  Context ctx;
  if (const char* dir = std::getenv("LOOPBC_OUT_DIR")) ctx.out_dir = dir;
  CLI::App app{"Dilute O(n) loop model with blobbed boundaries: algebra, integrability, transfer matrices, "
               "boundary CFT, Ising Monte Carlo and boundary TBA.",
               "loopbc"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; [predict.kac]-style sections per subcommand");
  app.add_option("--out-dir", ctx.out_dir, "directory for CSV/JSON artifacts (env LOOPBC_OUT_DIR)")
      ->capture_default_str();
  app.add_flag("--json", ctx.json, "machine-readable summary on stdout");
  app.add_option("--jobs", ctx.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.set_version_flag("--version", LOOPBC_VERSION);
  register_predict(app, ctx);
  register_verify(app, ctx);
  register_transfer(app, ctx);
  register_mc(app, ctx);
  register_tba(app, ctx);
  register_reproduce(app, ctx);

  ctx.argv = args;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    ordered_json d{{"error", e.what()}, {"command", ctx.command}, {"parameters", ctx.parameters},
                   {"diagnostic", e.diagnostic}};
    std::cout << d.dump(2) << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "loopbc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    ordered_json d{{"error", e.what()}, {"command", ctx.command}, {"parameters", ctx.parameters}};
    std::cout << d.dump(2) << "\n";
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 2 && args[0] == "--replay") {
    try {
      args = replay_args(args[1]);
    } catch (const std::exception& e) {
      std::cerr << "loopbc: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return run(args);
}
