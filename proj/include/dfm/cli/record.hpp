#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dfm/exact.hpp"

namespace dfm::cli {

/// One output row. `method` names the algorithm or derived column that produced
/// the value; Monte Carlo methods ("mc-model", "mc-gram") carry a std_error.
struct RunRecord {
  std::string command;
  unsigned M = 0;
  unsigned N = 0;
  std::optional<unsigned> p;
  std::optional<unsigned> r;
  std::string method;
  std::optional<ExactRatio> value_exact;
  double value_float = 0;
  std::optional<double> std_error;
  std::optional<double> z;
  std::int64_t runtime_ms = 0;
  std::optional<std::uint64_t> seed;
  bool cache_hit = false;
};

RunRecord exact_record(std::string command, unsigned M, unsigned N, std::optional<unsigned> p,
                       std::optional<unsigned> r, std::string method, const ExactRatio& value);

RunRecord float_record(std::string command, unsigned M, unsigned N, std::optional<unsigned> p,
                       std::optional<unsigned> r, std::string method, double value);

enum class Format { csv, json };

inline constexpr const char* kCsvHeader = "command,M,N,p,r,method,value,value_float,std_error,z,runtime_ms,seed";

/// Shortest decimal form that round-trips the double.
std::string format_double(double value);

void write_records(std::ostream& out, const std::vector<RunRecord>& records, Format format);

}  // namespace dfm::cli
