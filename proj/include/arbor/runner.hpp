#pragma once

// Wires the modules into runnable commands with deterministic reports.
// Reports embed the tool version, a config echo, and the seed; given the
// same config and seed the emitted bytes are identical run to run, so
// wall-clock timings are only included on request.

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arbor/common.hpp"
#include "arbor/dynamics.hpp"
#include "arbor/factor_tree.hpp"
#include "arbor/family.hpp"
#include "arbor/group_checks.hpp"
#include "arbor/ratmap.hpp"
#include "arbor/version.hpp"
#include "arbor/words.hpp"

namespace arbor {

struct RunConfig {
  std::string command;
  std::optional<PCOrbit> orbit;
  int level = 1;
  int depth = 12;
  int max_level = 10;
  std::string word;
  int samples = 0;
  uint32_t prime = 5;
  std::optional<uint32_t> base;
  std::string map_expr = "1/(x-1)^2";
  int tree_depth = 8;
  uint64_t seed = 0;
  bool quotients = false;
  bool abelianization = false;
  std::string format = "json";  // json | csv
  std::string output_path;      // empty = stdout
  bool timings = false;
};

struct RunResult {
  int exit_code = 0;
  std::string output;
};

namespace detail {

using nlohmann::ordered_json;

inline ordered_json config_echo(const RunConfig& cfg) {
  ordered_json echo;
  echo["command"] = cfg.command;
  if (cfg.orbit && cfg.command != "frobenius") {
    echo["r"] = cfg.orbit->r;
    echo["s"] = cfg.orbit->s;
  }
  if (cfg.command == "settled") {
    echo["level"] = cfg.level;
    echo["depth"] = cfg.depth;
    if (!cfg.word.empty()) echo["word"] = cfg.word;
    if (cfg.samples > 0) echo["samples"] = cfg.samples;
  }
  if (cfg.command == "group" || cfg.command == "verify-all") echo["max_level"] = cfg.max_level;
  if (cfg.command == "group") {
    echo["quotients"] = cfg.quotients;
    echo["abelianization"] = cfg.abelianization;
  }
  if (cfg.command == "frobenius") {
    echo["p"] = cfg.prime;
    if (cfg.base) echo["a"] = *cfg.base;
    echo["map"] = cfg.map_expr;
    echo["depth"] = cfg.tree_depth;
  }
  echo["seed"] = cfg.seed;
  return echo;
}

inline ordered_json report_shell(const RunConfig& cfg) {
  ordered_json report;
  report["version"] = kVersion;
  report["command"] = cfg.command;
  report["config"] = config_echo(cfg);
  report["seed"] = cfg.seed;
  return report;
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline ordered_json stability_json(const StabilityReport& report) {
  ordered_json cycles = ordered_json::array();
  for (const auto& entry : report.entries) {
    ordered_json c;
    c["vertex"] = to_string(Vertex{report.level, entry.rep});
    c["length"] = entry.length;
    if (entry.stable) {
      c["status"] = "stable-through-" + std::to_string(report.probe_depth);
    } else {
      c["status"] = "split-at-level-" + std::to_string(entry.split_level);
    }
    cycles.push_back(std::move(c));
  }
  return cycles;
}

}  // namespace detail

inline detail::ordered_json run_gens(const RunConfig& cfg) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  detail::ordered_json report = detail::report_shell(cfg);
  detail::ordered_json gens = detail::ordered_json::array();
  for (int i = 1; i <= cfg.orbit->r; ++i) {
    const RecursionState& st = fam.table->at(uint32_t(i));
    detail::ordered_json g;
    g["name"] = fam.table->name(uint32_t(i));
    g["section0"] = fam.table->name(st.child0);
    g["section1"] = fam.table->name(st.child1);
    g["swap"] = st.swap;
    gens.push_back(std::move(g));
  }
  report["generators"] = std::move(gens);
  const int n = std::min(cfg.max_level, 12);
  report["relation_level"] = n;
  report["relation_identity"] = verify_relation(fam, n);
  return report;
}

inline detail::ordered_json run_signs(const RunConfig& cfg) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  detail::ordered_json report = detail::report_shell(cfg);
  bool ok = true;
  try {
    const SignTable table = sign_table(fam);
    detail::ordered_json rows = detail::ordered_json::array();
    for (const SignVector& row : table.rows) rows.push_back(row.entries);
    report["levels"] = 3 * cfg.orbit->r;
    report["rows"] = std::move(rows);
  } catch (const std::logic_error& e) {
    ok = false;
    report["errors"] = {e.what()};
  }
  report["closed_form_match"] = ok;
  return report;
}

inline detail::ordered_json run_odometer(const RunConfig& cfg) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  detail::ordered_json report = detail::report_shell(cfg);
  const OdometerReport by_criterion = odometer_by_criterion(*cfg.orbit);
  const OdometerReport by_search = odometer_by_search(fam);

  report["r"] = cfg.orbit->r;
  report["s"] = cfg.orbit->s;
  report["exists"] = by_criterion.exists;
  report["methods_agree"] = by_criterion.exists == by_search.exists;
  const int certify_level = std::min(cfg.max_level, 12);
  if (by_criterion.exists) {
    report["witness"] = *by_criterion.witness;
    report["method"] = by_criterion.method;
    report["search_witness"] = *by_search.witness;
    report["certified_level"] =
        certify_odometer(fam, *by_criterion.witness, certify_level) &&
                certify_odometer(fam, *by_search.witness, certify_level)
            ? certify_level
            : -1;
  } else {
    report["witness"] = nullptr;
    report["method"] = by_criterion.method;
    report["certified_level"] = nullptr;
  }
  return report;
}

inline detail::ordered_json run_settled(const RunConfig& cfg) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  detail::ordered_json report = detail::report_shell(cfg);
  const int D = cfg.depth;
  if (!cfg.word.empty()) {
    const TreeWord w = parse_word(fam.table, cfg.word);
    const StabilityReport st = stability(w, cfg.level, D);
    const SettledEstimate est = settled_estimate(w, cfg.level, D);
    report["cycles"] = detail::stability_json(st);
    report["proportion"] = {{"stable_leaves", est.stable_leaves},
                            {"total_leaves", est.total_leaves},
                            {"value", est.value()}};
    report["probe_depth"] = D;
  } else {
    std::mt19937_64 rng(cfg.seed);
    detail::ordered_json words = detail::ordered_json::array();
    uint64_t stable_cycles = 0;
    for (int i = 0; i < cfg.samples; ++i) {
      const TreeWord w = sample_word(fam, rng);
      const StabilityReport st = stability(w, cfg.level, D);
      uint64_t stable_here = 0;
      for (const auto& e : st.entries) stable_here += e.stable ? 1 : 0;
      stable_cycles += stable_here;
      detail::ordered_json entry;
      entry["word"] = word_to_string(w);
      entry["stable_cycles"] = stable_here;
      words.push_back(std::move(entry));
    }
    report["samples"] = cfg.samples;
    report["stable_cycles_found"] = stable_cycles;
    report["words"] = std::move(words);
    report["probe_depth"] = D;
  }
  return report;
}

inline std::string run_group_csv(const RunConfig& cfg, bool* all_ok) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  GroupAnalyzer an(fam);
  std::ostringstream csv;
  const char* eol = "\r\n";
  csv << "n,group_order,i,closure_order,quotient_order,cyclic,checks_passed" << eol;
  *all_ok = true;
  const int n_max = std::min(cfg.max_level, config::kMaxGroupLevel);

  std::vector<QuotientReport> quotients;
  if (cfg.quotients)
    for (int i = 1; i <= cfg.orbit->r; ++i) quotients.push_back(quotient_report(an, i, n_max));

  for (int n = 1; n <= n_max; ++n) {
    csv << n << ',' << pow2_decimal(an.log2_group_order(n)) << ",,,,,true" << eol;
    if (cfg.quotients) {
      for (int i = 1; i <= cfg.orbit->r; ++i) {
        const QuotientLevel& lvl = quotients[size_t(i - 1)].levels[size_t(n - 1)];
        const bool semi = an.semidirect_check(i, n);
        const bool ok = lvl.cyclic && lvl.step_ok && lvl.growth_ok && semi;
        *all_ok = *all_ok && ok;
        csv << n << ',' << pow2_decimal(lvl.log2_group) << ',' << i << ','
            << pow2_decimal(lvl.log2_closure) << ',' << pow2_decimal(lvl.log2_quotient) << ','
            << (lvl.cyclic ? "true" : "false") << ',' << (ok ? "true" : "false") << eol;
      }
    }
    if (cfg.abelianization && cfg.orbit->s == 2 && n <= config::kMaxDerivedLevel) {
      const bool ok = an.abelianization_check(n);
      *all_ok = *all_ok && ok;
      csv << n << ',' << pow2_decimal(an.log2_group_order(n)) << ",ab,"
          << pow2_decimal(an.derived_subgroup(n).log2_order()) << ','
          << pow2_decimal(an.log2_abelianization_order(n)) << ",," << (ok ? "true" : "false")
          << eol;
    }
  }
  return csv.str();
}

// The composite verification run: relation, signs, odometer agreement with
// certified witnesses, the settledness audit, and the group-structure
// certificates, one named pass/fail entry each.
inline detail::ordered_json run_verify_all(const RunConfig& cfg, bool* all_ok) {
  const GeneratorFamily fam = build_family(*cfg.orbit);
  detail::ordered_json report = detail::report_shell(cfg);
  detail::ordered_json checks = detail::ordered_json::array();
  *all_ok = true;
  const auto push = [&](const std::string& name, bool pass, const std::string& detail_text) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail_text}});
    *all_ok = *all_ok && pass;
  };

  const int relation_level = std::min(cfg.max_level, 12);
  push("relation_identity", verify_relation(fam, relation_level),
       "a_1...a_r restricts to the identity through level " + std::to_string(relation_level));

  bool signs_ok = true;
  try {
    sign_table(fam);
  } catch (const std::logic_error&) {
    signs_ok = false;
  }
  push("sign_closed_form", signs_ok, "generator signs match the mod-r predicate through 3r");

  const OdometerReport by_criterion = odometer_by_criterion(*cfg.orbit);
  const OdometerReport by_search = odometer_by_search(fam);
  const int certify_level = std::min(cfg.max_level, 12);
  bool odo_ok = by_criterion.exists == by_search.exists;
  if (by_criterion.exists) {
    odo_ok = odo_ok && certify_odometer(fam, *by_criterion.witness, certify_level) &&
             certify_odometer(fam, *by_search.witness, certify_level);
  }
  push("odometer_criterion_vs_search", odo_ok,
       by_criterion.exists ? "odometers exist; witnesses act as full cycles at level " +
                                 std::to_string(certify_level)
                           : "no odometer by either method");

  // settledness audit over sampled words; the probe depth stays at 12
  // regardless of the group-level cap, since shallow probes cannot separate
  // stable cycles from not-yet-split ones
  {
    std::mt19937_64 rng(cfg.seed);
    const int samples = cfg.samples > 0 ? cfg.samples : 200;
    const int D = std::min(12, config::max_level());
    uint64_t stable_cycles = 0;
    bool sodo_ok = true;
    for (int i = 0; i < samples; ++i) {
      const TreeWord w = sample_word(fam, rng);
      for (int n = 1; n <= 4; ++n) {
        const StabilityReport st = stability(w, n, D);
        for (const auto& entry : st.entries) stable_cycles += entry.stable ? 1 : 0;
        if (!sodo_check(w, n, D)) sodo_ok = false;
      }
    }
    if (by_criterion.exists) {
      push("section_odometer_law", sodo_ok,
           std::to_string(stable_cycles) + " stable cycles over " + std::to_string(samples) +
               " sampled words, each with a full-cycle section power");
    } else {
      push("no_settled_audit", stable_cycles == 0 && sodo_ok,
           "odometer-free family: no sampled cycle persisted to depth " + std::to_string(D));
    }
  }

  // group structure certificates
  {
    GroupAnalyzer an(fam);
    const int n_max = std::min(cfg.max_level, config::kMaxGroupLevel);
    bool quot_ok = true;
    bool semi_ok = true;
    for (int i = 1; i <= cfg.orbit->r; ++i) {
      const QuotientReport qr = quotient_report(an, i, n_max);
      quot_ok = quot_ok && qr.all_ok();
      for (int n = 1; n <= n_max; ++n) semi_ok = semi_ok && an.semidirect_check(i, n);
    }
    push("quotient_bounds_and_cyclicity", quot_ok,
         "quotient orders are cyclic 2-powers with the step and r-level growth bounds, n <= " +
             std::to_string(n_max));
    push("semidirect_splitting", semi_ok,
         "coset order of a_i equals the quotient order for every i, n <= " + std::to_string(n_max));
    if (cfg.orbit->s == 2) {
      const int ab_max = std::min(n_max, std::min(config::kMaxDerivedLevel, 8));
      bool ab_ok = true;
      for (int n = 1; n <= ab_max; ++n) ab_ok = ab_ok && an.abelianization_check(n);
      push("abelianization_order_identity", ab_ok,
           "|G_n^ab| equals the product of the r-1 quotient orders, n <= " +
               std::to_string(ab_max));
    }
  }

  // torsion growth diagnostic: informational, failures listed but not fatal
  {
    std::mt19937_64 rng(cfg.seed + 1);
    detail::ordered_json stalls = detail::ordered_json::array();
    for (int i = 0; i < 30; ++i) {
      const TreeWord w = sample_word(fam, rng);
      const TorsionDiagnostic diag = torsion_diagnostic(w, std::min(cfg.max_level, 12));
      if (!diag.strict_failures.empty()) {
        stalls.push_back({{"word", word_to_string(w)}, {"levels", diag.strict_failures}});
      }
    }
    report["torsion_diagnostic_stalls"] = std::move(stalls);
  }

  report["checks"] = std::move(checks);
  report["all_passed"] = *all_ok;
  return report;
}

inline detail::ordered_json run_frobenius(const RunConfig& cfg, bool* all_ok) {
  detail::ordered_json report = detail::report_shell(cfg);
  *all_ok = true;
  const PrimeField field(cfg.prime);
  const RationalMap f = make_map(cfg.map_expr, field);

  const auto tree_json = [&](uint32_t a, detail::ordered_json& errors) {
    detail::ordered_json levels = detail::ordered_json::array();
    try {
      const FactorTree tree = build_tree(f, a, cfg.tree_depth, cfg.seed);
      const FrobeniusReport fr = frobenius_report(tree);
      for (const FrobeniusLevel& lvl : fr.levels) {
        detail::ordered_json l;
        l["n"] = lvl.n;
        l["cycle_type"] = lvl.cycle_type;
        l["stable_proportion"] = {{"stable_degree_sum", lvl.stable_degree_sum},
                                  {"total", lvl.total},
                                  {"value", lvl.stable_proportion()}};
        levels.push_back(std::move(l));
      }
    } catch (const ramified_error& e) {
      errors.push_back({{"type", "Ramified"}, {"a", a}, {"level", e.level()}});
      *all_ok = false;
    } catch (const post_critical_base_error& e) {
      errors.push_back({{"type", "PostCriticalBase"}, {"a", a}, {"detail", e.what()}});
      *all_ok = false;
    }
    return levels;
  };

  detail::ordered_json errors = detail::ordered_json::array();
  if (cfg.base) {
    report["levels"] = tree_json(*cfg.base, errors);
  } else {
    // sweep every base point off the post-critical orbit
    std::set<uint32_t> excluded;
    for (const ProjPoint& pt : post_critical_set(f))
      if (!pt.inf) excluded.insert(pt.x);
    detail::ordered_json sweeps = detail::ordered_json::array();
    for (uint32_t a = 0; a < field.p(); ++a) {
      if (excluded.count(a)) continue;
      detail::ordered_json cell;
      cell["a"] = a;
      cell["levels"] = tree_json(a, errors);
      sweeps.push_back(std::move(cell));
    }
    report["sweeps"] = std::move(sweeps);
    report["excluded_post_critical"] = std::vector<uint32_t>(excluded.begin(), excluded.end());
  }
  report["errors"] = std::move(errors);
  return report;
}

inline RunResult run(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  bool ok = true;
  detail::ordered_json report;
  if (cfg.command == "gens") {
    report = run_gens(cfg);
    ok = report["relation_identity"].get<bool>();
  } else if (cfg.command == "signs") {
    report = run_signs(cfg);
    ok = report["closed_form_match"].get<bool>();
  } else if (cfg.command == "odometer") {
    report = run_odometer(cfg);
    ok = report["methods_agree"].get<bool>() &&
         (!report["exists"].get<bool>() || report["certified_level"].get<int>() > 0);
  } else if (cfg.command == "settled") {
    report = run_settled(cfg);
  } else if (cfg.command == "group") {
    result.output = run_group_csv(cfg, &ok);
    result.exit_code = ok ? 0 : 1;
    return result;
  } else if (cfg.command == "frobenius") {
    report = run_frobenius(cfg, &ok);
  } else if (cfg.command == "verify-all") {
    report = run_verify_all(cfg, &ok);
  } else {
    throw std::invalid_argument("unknown command: " + cfg.command);
  }
  if (cfg.timings) {
    report["wall_clock_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  }
  result.output = detail::dump(report);
  result.exit_code = ok ? 0 : 1;
  return result;
}

}  // namespace arbor
