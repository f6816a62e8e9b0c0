#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cli.hpp"

using namespace monadlab;

namespace {

struct Flags {
  std::optional<std::string> verbal, operad, monad, s, target_verbal, mode, config, out;
  std::optional<std::vector<int>> carrier_sizes;
  std::optional<int> bound;
  std::optional<std::vector<std::string>> pool;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  bool prime = false;
  bool pretty = false;
};

void add_common(CLI::App* sc, Flags& f) {
  sc->add_option("--config", f.config, "JSON config file providing defaults for this run");
  sc->add_option("--carrier-size", f.carrier_sizes, "carrier sizes to test")->expected(1, -1);
  sc->add_option("--arity-bound,--bound", f.bound, "arity bound");
  sc->add_option("--pool", f.pool, "coefficient pool, e.g. 0 1 1/2")->expected(1, -1);
  sc->add_option("--mode", f.mode, "exhaustive or sampled");
  sc->add_option("--samples", f.samples, "samples per law when sampling");
  sc->add_option("--seed", f.seed, "random seed (default from MONADLAB_SEED)");
  sc->add_option("--out", f.out, "write the JSON report to this path");
  sc->add_flag("--pretty", f.pretty, "print a table instead of JSON");
  sc->add_flag("--prime", f.prime, "use the right-to-left lax structure");
}

int usage(const std::string& msg) {
  nlohmann::json d = nlohmann::json::array();
  std::string line;
  std::istringstream is(msg);
  while (std::getline(is, line)) d.push_back(line);
  std::cerr << nlohmann::json{{"error", "usage"}, {"diagnostics", d}}.dump(2) << "\n";
  return cli::exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operads, monads and distributive laws at desk scale"};
  app.require_subcommand(1);
  Flags f;
  std::string suite_name;

  auto* cm = app.add_subcommand("check-monad", "monad laws, and W-commutativity with --verbal");
  cm->add_option("--monad", f.monad)->required();
  cm->add_option("--verbal", f.verbal);
  auto* co = app.add_subcommand("check-operad", "operad axioms");
  co->add_option("--operad", f.operad)->required();
  auto* cc = app.add_subcommand("check-commutativity", "W-commutativity, or the characterization table");
  cc->add_option("--monad", f.monad)->required();
  cc->add_option("--verbal", f.verbal);
  auto* sy = app.add_subcommand("synth", "build the distributive law of an operad over a monad");
  auto* ve = app.add_subcommand("verify", "check the four axioms of the synthesized law");
  for (auto* sc : {sy, ve}) {
    sc->add_option("--verbal", f.verbal);
    sc->add_option("--operad", f.operad)->required();
    sc->add_option("--monad", f.monad)->required();
  }
  ve->add_option("--invariance", f.target_verbal, "also compare with the law extended to this category");
  auto* rf = app.add_subcommand("refine", "operadic refinement of a monad");
  rf->add_option("--monad", f.monad)->required();
  rf->add_option("--verbal", f.verbal)->required();
  auto* dg = app.add_subcommand("diagnose", "why a pair of monads has no law, and a repair");
  dg->add_option("--s", f.s)->required();
  dg->add_option("--monad", f.monad)->required();
  auto* su = app.add_subcommand("suite", "run a pinned bundle");
  su->add_option("name", suite_name)->required();
  auto* rn = app.add_subcommand("run", "run a config file or replay a report");
  for (auto* sc : {cm, co, cc, sy, ve, rf, dg, su, rn}) add_common(sc, f);
  rn->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  try {
    auto* sc = app.get_subcommands().front();
    cli::ExperimentConfig c;
    if (f.config) {
      std::ifstream in(*f.config);
      if (!in) return usage("config: cannot read " + *f.config);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        return usage(std::string("config: ") + e.what());
      }
      c = cli::config_from_document(j);
    }
    if (sc->get_name() != "run") c.command = sc->get_name();
    if (c.command == "suite" && !suite_name.empty()) c.suite = suite_name;
    if (f.verbal) c.verbal = *f.verbal;
    if (f.operad) c.operad = *f.operad;
    if (f.monad) c.monad = *f.monad;
    if (f.s) c.s = *f.s;
    if (f.target_verbal) c.target_verbal = *f.target_verbal;
    if (f.mode) c.mode = *f.mode;
    if (f.carrier_sizes) c.carrier_sizes = *f.carrier_sizes;
    if (f.bound) c.bound = *f.bound;
    if (f.pool) c.pool = *f.pool;
    if (f.samples) c.samples = *f.samples;
    if (f.seed) c.seed = *f.seed;
    if (f.prime) c.prime = true;

    auto res = cli::run(c);
    std::string text = f.pretty ? cli::render_pretty(res.report) : res.report.dump(2) + "\n";
    if (f.out) {
      std::ofstream o(*f.out);
      o << res.report.dump(2) << "\n";
      if (f.pretty) std::cout << text;
    } else {
      std::cout << text;
    }
    return res.exit_code;
  } catch (const UsageError& e) {
    return usage(e.what());
  }
}
