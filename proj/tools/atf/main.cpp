// atf — train, evaluate and inspect asynchronous temporal-field models.
//
// Every artifact-producing run writes a manifest (manifest.cfg) holding
// the fully resolved parameter record and a fingerprint of every file read
// and written; replaying the manifest's command line in serial mode
// reproduces the artifacts byte for byte.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "atf/common.hpp"
#include "cli_support.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace atf::cli;

  CLI::App app{
      "Asynchronous temporal-field activity models: synthetic data, "
      "training, inference and evaluation"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--seed", g.seed, "Seed for the command's RNG streams")
      ->each([&g](const std::string&) { g.has_seed = true; });
  app.add_option("--out", g.out_dir,
                 "Output directory (artifacts + manifest.cfg)")
      ->each([&g](const std::string&) { g.has_out = true; });
  app.add_option("--workers", g.workers,
                 "Worker threads (1 = serial, byte-reproducible)")
      ->each([&g](const std::string&) { g.has_workers = true; });
  app.add_option("--config", g.config_path,
                 "Parameter file for the subcommand (keys mirror the "
                 "command's parameter record; flags override)")
      ->check(CLI::ExistingFile)
      ->each([&g](const std::string&) { g.has_config = true; });

  register_generate(app, g);
  register_train(app, g);
  register_eval(app, g);
  register_infer(app, g);
  register_gradcheck(app, g);
  register_oracle_compare(app, g);
  register_ablate(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CommandFailure& e) {
    std::fprintf(stderr, "atf: %s\n", e.what());
    return e.exit_code;
  } catch (const atf::BudgetError& e) {
    std::fprintf(stderr, "atf: refusing to enumerate %.3g states: %s\n",
                 e.state_count(), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "atf: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
