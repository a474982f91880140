// Command-line front end: one subcommand per verification surface, with a
// key = value config file overridden by flags. Exit status 0 means every
// check in the run passed; 1 means a named check failed; parse and domain
// errors exit nonzero with a usage message.

#include <cstdio>
#include <exception>
#include <map>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arbor/gf.hpp"
#include "arbor/runner.hpp"
#include "arbor/version.hpp"

namespace {

int emit(const arbor::RunResult& result, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << result.output;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output path " << output_path << "\n";
      return 1;
    }
    out << result.output;
  }
  return result.exit_code;
}

// Presence is enforced after parsing rather than through ->required(), so
// that values may arrive from the config file as well as from flags.
struct OrbitOptions {
  CLI::Option* r = nullptr;
  CLI::Option* s = nullptr;
};

OrbitOptions add_orbit_flags(CLI::App* cmd, arbor::RunConfig& cfg) {
  cfg.orbit = arbor::PCOrbit{3, 2};
  OrbitOptions opts;
  opts.r = cmd->add_option("--r", cfg.orbit->r, "post-critical orbit length (>= 3)")
               ->check(CLI::Range(3, 64));
  opts.s = cmd->add_option("--s", cfg.orbit->s, "index of the second branch point (2 <= s <= r)")
               ->check(CLI::Range(2, 64));
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arbor: verification engine for self-similar groups of quadratic"
               " rational maps with critically periodic orbits"};
  app.set_version_flag("--version", arbor::kVersion);
  app.set_config("--config", "", "key = value config file; flags take precedence");
  app.require_subcommand(1);

  arbor::RunConfig cfg;
  std::map<CLI::App*, OrbitOptions> orbit_options;

  CLI::App* gens = app.add_subcommand("gens", "emit the recursive generator table");
  orbit_options[gens] = add_orbit_flags(gens, cfg);
  gens->add_option("--max-level", cfg.max_level, "level for the relation check")
      ->check(CLI::Range(0, 14));

  CLI::App* signs = app.add_subcommand("signs", "per-level sign table of the generators");
  orbit_options[signs] = add_orbit_flags(signs, cfg);

  CLI::App* odometer =
      app.add_subcommand("odometer", "odometer existence by criterion and by search");
  orbit_options[odometer] = add_orbit_flags(odometer, cfg);
  CLI::Option* certify_opt =
      odometer->add_option("--certify-level", cfg.max_level, "cycle certification level")
          ->check(CLI::Range(1, 14));

  CLI::App* settled = app.add_subcommand("settled", "stable-cycle analysis of a word");
  orbit_options[settled] = add_orbit_flags(settled, cfg);
  settled->add_option("--word", cfg.word, "word in a1..ar, s (e.g. \"a1 a2^-1\")");
  settled->add_option("--samples", cfg.samples, "sample this many random words instead")
      ->check(CLI::Range(1, 100000));
  settled->add_option("--level", cfg.level, "cycle level n")->check(CLI::Range(0, 14));
  settled->add_option("--depth", cfg.depth, "probe depth D >= n")->check(CLI::Range(0, 14));
  settled->add_option("--seed", cfg.seed, "sampler seed (recorded in the report)");

  CLI::App* group = app.add_subcommand("group", "level-group orders and quotient certificates");
  orbit_options[group] = add_orbit_flags(group, cfg);
  group->add_option("--max-level", cfg.max_level, "largest truncation level")
      ->check(CLI::Range(1, 12));
  group->add_flag("--quotients", cfg.quotients, "emit per-index normal closure rows");
  group->add_flag("--abelianization", cfg.abelianization,
                  "emit abelianization rows (s = 2 families only)");

  CLI::App* frobenius =
      app.add_subcommand("frobenius", "factor trees of iterated pullbacks over F_p");
  CLI::Option* prime_opt = frobenius->add_option("--p", cfg.prime, "odd prime modulus");
  uint32_t base_value = 0;
  CLI::Option* base_opt =
      frobenius->add_option("--a", base_value, "base point in F_p (omit to sweep all valid bases)");
  frobenius->add_option("--map", cfg.map_expr, "rational map, e.g. \"1/(x-1)^2\"");
  frobenius->add_option("--depth", cfg.tree_depth, "tree depth")
      ->check(CLI::Range(0, arbor::config::kDefaultFactorDepth));
  frobenius->add_option("--seed", cfg.seed, "factorization seed (recorded)");

  CLI::App* verify = app.add_subcommand("verify-all", "run every per-family check");
  orbit_options[verify] = add_orbit_flags(verify, cfg);
  verify->add_option("--max-level", cfg.max_level, "cap for the group-structure checks")
      ->check(CLI::Range(1, 12));
  verify->add_option("--seed", cfg.seed, "sampler seed");
  verify->add_option("--samples", cfg.samples, "words for the settledness audit");

  for (CLI::App* sub : {gens, signs, odometer, settled, group, frobenius, verify}) {
    sub->add_option("--output", cfg.output_path, "write the report here instead of stdout");
    sub->add_flag("--timings", cfg.timings, "embed wall-clock time (breaks byte determinism)");
    sub->fallthrough();  // lets --config (a parent option) follow the subcommand
  }

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    if (const auto it = orbit_options.find(active); it != orbit_options.end()) {
      if (it->second.r->count() == 0 || it->second.s->count() == 0)
        throw std::invalid_argument(cfg.command + ": --r and --s are required");
      cfg.orbit->validate();  // catches s > r
    }
    if (cfg.command == "odometer" && certify_opt->count() == 0) cfg.max_level = 12;
    if (cfg.command == "frobenius") {
      if (prime_opt->count() == 0) throw std::invalid_argument("frobenius: --p is required");
      if (!arbor::is_prime_u32(cfg.prime) || cfg.prime == 2)
        throw std::invalid_argument("--p must be an odd prime");
      if (base_opt->count() > 0) cfg.base = base_value;
    }
    if (cfg.command == "settled" && cfg.word.empty() && cfg.samples == 0)
      throw std::invalid_argument("settled: pass --word or --samples");
    if (cfg.command == "settled" && cfg.depth < cfg.level)
      throw std::invalid_argument("settled: need --depth >= --level");
    return emit(arbor::run(cfg), cfg.output_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
