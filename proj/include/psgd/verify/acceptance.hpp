#ifndef PSGD_VERIFY_ACCEPTANCE_HPP
#define PSGD_VERIFY_ACCEPTANCE_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace psgd::verify {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Directory holding the pre-registered experiment configs.
  std::filesystem::path config_dir;
  /// Scratch space for the determinism reruns.
  std::filesystem::path work_dir;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<CriterionResult(const AcceptanceOptions&)> run;
};

/// The full invariant and acceptance suite, P1 to P11.
const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `only` is empty) in order. Exceptions
/// inside a criterion turn into a FAIL with the message as detail.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::vector<std::string>& only = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS P1 <title> (<seconds>s): <detail>"
std::string format_result(const CriterionResult& r);

/// Config directory baked in at build time.
std::filesystem::path default_config_dir();

}  // namespace psgd::verify

#endif
