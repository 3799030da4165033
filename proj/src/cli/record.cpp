#include "dfm/cli/record.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

namespace dfm::cli {
namespace {

template <class T>
std::string optional_text(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>)
    return format_double(*v);
  else
    return std::to_string(*v);
}

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"/\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>)
    if (!std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

RunRecord exact_record(std::string command, unsigned M, unsigned N, std::optional<unsigned> p,
                       std::optional<unsigned> r, std::string method, const ExactRatio& value) {
  RunRecord rec;
  rec.command = std::move(command);
  rec.M = M;
  rec.N = N;
  rec.p = p;
  rec.r = r;
  rec.method = std::move(method);
  rec.value_exact = value;
  rec.value_float = to_double(value);
  return rec;
}

RunRecord float_record(std::string command, unsigned M, unsigned N, std::optional<unsigned> p,
                       std::optional<unsigned> r, std::string method, double value) {
  RunRecord rec;
  rec.command = std::move(command);
  rec.M = M;
  rec.N = N;
  rec.p = p;
  rec.r = r;
  rec.method = std::move(method);
  rec.value_float = value;
  return rec;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records, Format format) {
  if (format == Format::csv) {
    out << kCsvHeader << '\n';
    for (const auto& rec : records) {
      out << csv_quote(rec.command) << ',' << rec.M << ',' << rec.N << ',' << optional_text(rec.p) << ','
          << optional_text(rec.r) << ',' << csv_quote(rec.method) << ','
          << (rec.value_exact ? '"' + to_string(*rec.value_exact) + '"' : std::string{}) << ','
          << format_double(rec.value_float) << ',' << optional_text(rec.std_error) << ','
          << optional_text(rec.z) << ',' << rec.runtime_ms << ',' << optional_text(rec.seed) << '\n';
    }
    return;
  }
  auto doc = nlohmann::ordered_json::array();
  for (const auto& rec : records) {
    nlohmann::ordered_json row;
    row["command"] = rec.command;
    row["M"] = rec.M;
    row["N"] = rec.N;
    row["p"] = optional_json(rec.p);
    row["r"] = optional_json(rec.r);
    row["method"] = rec.method;
    row["value"] = rec.value_exact ? nlohmann::ordered_json(to_string(*rec.value_exact)) : nullptr;
    row["value_float"] = std::isfinite(rec.value_float) ? nlohmann::ordered_json(rec.value_float) : nullptr;
    row["std_error"] = optional_json(rec.std_error);
    row["z"] = optional_json(rec.z);
    row["runtime_ms"] = rec.runtime_ms;
    row["seed"] = optional_json(rec.seed);
    row["cache_hit"] = rec.cache_hit;
    doc.push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace dfm::cli
