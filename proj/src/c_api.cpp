#include "cptherm/cptherm.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "cptherm/compactify.hpp"
#include "cptherm/cp_pressure.hpp"
#include "cptherm/experiment.hpp"
#include "cptherm/multifractal.hpp"
#include "cptherm/thermo.hpp"

struct cpt_system {
  cpt::ShiftSystem system;
};

struct cpt_potential {
  cpt::Potential phi;
};

struct cpt_subset {
  cpt::SubsetSpec spec;
};

namespace {

thread_local std::string last_error;

cpt_status fail(cpt_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
cpt_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CPT_OK;
  } catch (const cpt::Error& e) {
    return fail(static_cast<cpt_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CPT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CPT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CPT_INTERNAL_ERROR, "unknown error");
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw cpt::Error(cpt::ErrorCode::kInvalidArgument, what);
}

void same_alphabet(const cpt_system* s, const cpt_potential* p) {
  need(s && p, "null handle");
  need(s->system.alphabet_size() == p->phi.alphabet_size(), "potential alphabet does not match the system");
}

cpt::SubsetSpec subset_or_whole(const cpt_subset* z) {
  return z ? z->spec : cpt::SubsetSpec::whole();
}

cpt::Sidedness sidedness(int two_sided) {
  return two_sided ? cpt::Sidedness::kTwoSided : cpt::Sidedness::kOneSided;
}

char* copy_string(const std::string& s) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return buf;
}

}  // namespace

extern "C" {

const char* cpt_version(void) { return "0.1.0"; }

const char* cpt_last_error(void) { return last_error.c_str(); }

const char* cpt_status_name(cpt_status status) {
  switch (status) {
    case CPT_OK: return "ok";
    case CPT_INTERNAL_ERROR: return "internal-error";
    default: break;
  }
  int code = static_cast<int>(status);
  if (code >= 1 && code <= static_cast<int>(cpt::ErrorCode::kIoError))
    return cpt::to_string(static_cast<cpt::ErrorCode>(code)).data();
  return "unknown";
}

cpt_status cpt_system_full_shift(int k, int two_sided, cpt_system** out) {
  return guarded([&] {
    need(out != nullptr, "null output");
    *out = new cpt_system{cpt::ShiftSystem::full_shift(k, sidedness(two_sided))};
  });
}

cpt_status cpt_system_sft(int k, const unsigned char* adjacency, int two_sided, cpt_system** out) {
  return guarded([&] {
    need(out != nullptr && adjacency != nullptr && k > 0, "null argument or nonpositive k");
    std::vector<std::uint8_t> adj(adjacency, adjacency + static_cast<std::size_t>(k) * k);
    *out = new cpt_system{cpt::ShiftSystem(k, std::move(adj), sidedness(two_sided))};
  });
}

void cpt_system_free(cpt_system* system) { delete system; }

int cpt_system_alphabet_size(const cpt_system* system) {
  return system ? system->system.alphabet_size() : 0;
}

cpt_status cpt_system_word_count(const cpt_system* system, int n, uint64_t* out) {
  return guarded([&] {
    need(system && out, "null argument");
    *out = system->system.word_count(n);
  });
}

cpt_status cpt_potential_create(const cpt_system* system, int depth, const double* table, size_t length,
                                cpt_potential** out) {
  return guarded([&] {
    need(system && table && out, "null argument");
    *out = new cpt_potential{cpt::Potential(system->system, depth, std::vector<double>(table, table + length))};
  });
}

void cpt_potential_free(cpt_potential* potential) { delete potential; }

cpt_status cpt_subset_whole(cpt_subset** out) {
  return guarded([&] {
    need(out != nullptr, "null output");
    *out = new cpt_subset{cpt::SubsetSpec::whole()};
  });
}

cpt_status cpt_subset_sub_shift(const cpt_system* system, const unsigned char* adjacency, cpt_subset** out) {
  return guarded([&] {
    need(system && adjacency && out, "null argument");
    std::size_t k = static_cast<std::size_t>(system->system.alphabet_size());
    cpt::SubsetSpec spec = cpt::SubsetSpec::sub_shift(std::vector<std::uint8_t>(adjacency, adjacency + k * k));
    spec.validate(system->system);
    *out = new cpt_subset{std::move(spec)};
  });
}

cpt_status cpt_subset_cylinders(const cpt_system* system, const int* symbols, const size_t* lengths,
                                size_t count, int start_index, cpt_subset** out) {
  return guarded([&] {
    need(system && symbols && lengths && out, "null argument");
    std::vector<cpt::Word> words;
    std::size_t at = 0;
    for (std::size_t i = 0; i < count; ++i) {
      words.push_back(cpt::Word{std::vector<int>(symbols + at, symbols + at + lengths[i])});
      at += lengths[i];
    }
    cpt::SubsetSpec spec = cpt::SubsetSpec::cylinders(std::move(words), start_index);
    spec.validate(system->system);
    *out = new cpt_subset{std::move(spec)};
  });
}

void cpt_subset_free(cpt_subset* subset) { delete subset; }

cpt_status cpt_transfer_pressure(const cpt_system* system, const cpt_potential* phi, double* out) {
  return guarded([&] {
    same_alphabet(system, phi);
    need(out != nullptr, "null output");
    *out = system->system.irreducible() ? cpt::transfer_pressure(system->system, phi->phi)
                                        : cpt::transfer_pressure_any(system->system, phi->phi);
  });
}

cpt_status cpt_equilibrium(const cpt_system* system, const cpt_potential* phi, double* entropy,
                           double* integral, double* log_eigenvalue) {
  return guarded([&] {
    same_alphabet(system, phi);
    cpt::EquilibriumState eq = cpt::equilibrium_markov(system->system, phi->phi);
    if (entropy) *entropy = eq.entropy;
    if (integral) *integral = eq.potential_integral;
    if (log_eigenvalue) *log_eigenvalue = std::log(eq.eigenvalue);
  });
}

cpt_status cpt_log_lambda(const cpt_system* system, const cpt_subset* subset, const cpt_potential* phi,
                          int cover_depth, int n, double* out) {
  return guarded([&] {
    same_alphabet(system, phi);
    need(out != nullptr, "null output");
    *out = cpt::log_lambda_n(system->system, subset_or_whole(subset), phi->phi,
                             cpt::Cover(system->system, cover_depth), n);
  });
}

cpt_status cpt_capacity_pressures(const cpt_system* system, const cpt_subset* subset,
                                  const cpt_potential* phi, int cover_depth, int n_max, double* lower,
                                  double* upper) {
  return guarded([&] {
    same_alphabet(system, phi);
    cpt::CapacityPair pair = cpt::capacity_pressures(system->system, subset_or_whole(subset), phi->phi,
                                                     cpt::Cover(system->system, cover_depth), n_max);
    if (lower) *lower = pair.lower.value;
    if (upper) *upper = pair.upper.value;
  });
}

cpt_status cpt_critical_alpha(const cpt_system* system, const cpt_subset* subset, const cpt_potential* phi,
                              int cover_depth, int n_max, double tol, double* value, double* bracket_lo,
                              double* bracket_hi) {
  return guarded([&] {
    same_alphabet(system, phi);
    cpt::CriticalOptions options;
    options.n_max = n_max;
    if (tol > 0) options.tol = tol;
    cpt::PressureEstimate e = cpt::critical_alpha(system->system, subset_or_whole(subset), phi->phi,
                                                  cpt::Cover(system->system, cover_depth), options);
    if (value) *value = e.value;
    if (bracket_lo) *bracket_lo = e.bracket_lo;
    if (bracket_hi) *bracket_hi = e.bracket_hi;
  });
}

cpt_status cpt_t_curve(const cpt_system* system, const cpt_potential* phi, const double* q, size_t count,
                       double* t, double* alpha, double* e) {
  return guarded([&] {
    same_alphabet(system, phi);
    need(q != nullptr && count > 0, "empty q grid");
    cpt::TQCurve curve = cpt::t_curve(system->system, phi->phi, std::vector<double>(q, q + count));
    for (std::size_t i = 0; i < count; ++i) {
      if (t) t[i] = curve.t[i];
      if (alpha) alpha[i] = curve.alpha[i];
      if (e) e[i] = curve.spectrum[i];
    }
  });
}

cpt_status cpt_gap_example(double* pressure_compactified, double* sup_over_line, double* gap,
                           double* estimated_gap) {
  return guarded([&] {
    cpt::GapCertificate g = cpt::gap_example();
    if (pressure_compactified) *pressure_compactified = g.pressure_compactified;
    if (sup_over_line) *sup_over_line = g.sup_over_line_measures;
    if (gap) *gap = g.gap;
    if (estimated_gap) *estimated_gap = g.estimated_gap;
  });
}

cpt_status cpt_run(const char* subcommand, const char* config_json, const char* out_dir, double tol,
                   int has_seed, uint64_t seed, int jobs, char** summary_json, int* all_pass,
                   char** timings) {
  return guarded([&] {
    need(subcommand != nullptr, "null subcommand");
    cpt::Task task = cpt::parse_task(subcommand);
    std::string text = config_json && *config_json ? config_json : "{}";
    cpt::ExperimentConfig config = cpt::parse_config(text);
    config.task = task;
    if (tol > 0) config.budget.tol = tol;
    if (has_seed) config.seed = seed;
    cpt::RunReport report = cpt::run(config, jobs < 1 ? 1 : jobs);
    std::string dir = out_dir && *out_dir ? out_dir : config.output;
    if (!dir.empty()) cpt::emit_tables(report, dir);
    if (all_pass) *all_pass = report.all_pass() ? 1 : 0;
    if (summary_json) *summary_json = copy_string(cpt::summary_json(report));
    if (timings) {
      std::string t;
      char line[256];
      for (const auto& task : report.tasks) {
        std::snprintf(line, sizeof line, "%s %.3f %s\n", task.task.c_str(), task.wall_seconds,
                      task.pass() ? "PASS" : "FAIL");
        t += line;
      }
      *timings = copy_string(t);
    }
  });
}

void cpt_string_free(char* s) { std::free(s); }

}  // extern "C"
