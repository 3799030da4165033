#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dfm/cli/record.hpp"
#include "dfm/error.hpp"

namespace dfm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kParameterError = 2,
  kBudgetError = 3,
  kCrossCheckFailure = 4,
};

/// Two exact methods returned different values for the same quantity.
class CrossCheckError : public Error {
public:
  CrossCheckError(const std::string& what, std::vector<RunRecord> conflicting)
      : Error(what), conflicting_(std::move(conflicting)) {}

  const std::vector<RunRecord>& conflicting() const noexcept { return conflicting_; }

private:
  std::vector<RunRecord> conflicting_;
};

/// Entry point of the `dfm` tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfm::cli
