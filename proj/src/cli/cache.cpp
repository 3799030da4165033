#include "dfm/cli/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dfm/error.hpp"

namespace dfm::cli {
namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string CacheKey::text() const {
  std::ostringstream s;
  s << tag << ";M=" << M << ";N=" << N << ";p=" << p << ";r=";
  if (r) s << *r;
  return s.str();
}

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ResultCache::path_for(const CacheKey& key) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a(key.text())));
  return dir_ / name;
}

std::optional<ExactRatio> ResultCache::load(const CacheKey& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("engine_version").get<std::string>() != kEngineVersion) return std::nullopt;
    if (doc.at("key").get<std::string>() != key.text()) return std::nullopt;
    return parse_ratio(doc.at("value").get<std::string>());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void ResultCache::store(const CacheKey& key, const ExactRatio& value) const {
  nlohmann::ordered_json doc;
  doc["key"] = key.text();
  doc["value"] = to_string(value);
  doc["engine_version"] = kEngineVersion;

  const auto target = path_for(key);
  auto tmp = target;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << doc.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot publish cache file " + target.string());
  }
}

std::optional<std::filesystem::path> resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv(kCacheEnvVar); env != nullptr && *env != '\0') return std::filesystem::path(env);
  return std::nullopt;
}

}  // namespace dfm::cli
