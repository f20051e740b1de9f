// Batch front end: one subcommand per task, each reading a JSON config.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cptherm/cptherm.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  double tol = 0.0;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int execute(const std::string& subcommand, const Options& o) {
  std::string text;
  if (!o.config.empty()) {
    try {
      text = read_file(o.config);
    } catch (const std::exception& e) {
      std::cerr << "io-error: " << e.what() << "\n";
      return 2;
    }
  }
  char* summary = nullptr;
  char* timings = nullptr;
  int all_pass = 0;
  cpt_status st = cpt_run(subcommand.c_str(), text.c_str(), o.out.empty() ? nullptr : o.out.c_str(), o.tol,
                          o.seed.has_value(), o.seed.value_or(0), o.jobs, &summary, &all_pass, &timings);
  if (st != CPT_OK) {
    std::cerr << cpt_status_name(st) << ": " << cpt_last_error() << "\n";
    return 2;
  }
  std::cout << summary;
  cpt_string_free(summary);
  std::cerr << timings;
  cpt_string_free(timings);
  std::cerr << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caratheodory-Pesin pressure experiments"};
  app.set_version_flag("--version", std::string(cpt_version()));
  app.require_subcommand(1);

  Options opts;
  std::string chosen;
  const char* names[] = {"pressure",    "capacity",   "spectrum",       "correlation", "vp-check",
                         "inverse-vp",  "gap-example", "transfer-check", "suite"};
  for (const char* name : names) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    sub->add_option("--config", opts.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory for tables and summary.json");
    sub->add_option("--tol", opts.tol, "tolerance override")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "random seed override");
    sub->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::Range(1, 256));
    sub->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return execute(chosen, opts);
}
