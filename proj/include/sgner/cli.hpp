#pragma once

// Command-line entry points; the sgner executable is a thin wrapper so that
// tests can drive the exact same code paths in-process.
//
//   sgner synth     --out FILE [--sentences N --p-overlap P --p-discont P ...]
//   sgner train     --train FILE [--dev FILE] --out-model FILE [--config FILE]
//   sgner predict   --model FILE --in FILE --out FILE
//   sgner eval      --gold FILE --pred FILE [--json FILE]
//   sgner gradcheck [--config FILE]
//   sgner inspect   --in FILE
//
// Exit codes: 0 ok, 1 usage/config error, 2 data error, 3 numeric failure.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sgner/config.hpp"
#include "sgner/corpus.hpp"
#include "sgner/gradcheck.hpp"
#include "sgner/model.hpp"

namespace sgner {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Tolerance on the maximum relative gradient error.
inline constexpr double kGradCheckTolerance = 1e-4;

/// The four-token sentence used by gradcheck: one two-fragment entity and
/// one entity overlapping its first fragment, so all three relation classes
/// appear among its gold fragment pairs.
AnnotatedSentence gradcheck_sentence();

/// Copy of `cfg` with the structural settings kept (BiLSTM, blocks, heads,
/// sublayers, MLP depth, ablations) and every width shrunk so finite
/// differences over all coordinates stay cheap.
RunConfig tiny_config(const RunConfig& cfg);

struct GradCheckReport {
  GradCheckResult result;
  std::size_t parameters = 0;
  std::vector<std::string> parameter_names;
};

GradCheckReport run_gradcheck(const RunConfig& cfg, std::uint64_t seed);

}  // namespace sgner
