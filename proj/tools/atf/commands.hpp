#pragma once
// Subcommand registration.  Each function wires one subcommand onto the
// parent parser; the shared GlobalArgs instance carries --seed / --out /
// --workers / --config down into the command bodies.

#include <CLI11.hpp>

#include "cli_support.hpp"

namespace atf::cli {

void register_generate(CLI::App& app, const GlobalArgs& g);
void register_train(CLI::App& app, const GlobalArgs& g);
void register_eval(CLI::App& app, const GlobalArgs& g);
void register_infer(CLI::App& app, const GlobalArgs& g);
void register_gradcheck(CLI::App& app, const GlobalArgs& g);
void register_oracle_compare(CLI::App& app, const GlobalArgs& g);
void register_ablate(CLI::App& app, const GlobalArgs& g);

}  // namespace atf::cli
