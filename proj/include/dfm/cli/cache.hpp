#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dfm/exact.hpp"

namespace dfm::cli {

inline constexpr const char* kEngineVersion = "dfm-engine-1";
inline constexpr const char* kCacheEnvVar = "DFM_CACHE_DIR";

struct CacheKey {
  std::string tag;  ///< quantity and method, e.g. "d/direct"
  unsigned M = 0;
  unsigned N = 0;
  unsigned p = 0;
  std::optional<unsigned> r;

  std::string text() const;
};

/// One JSON document per entry, named by a hash of the key. Entries written by a
/// different engine version are ignored.
class ResultCache {
public:
  explicit ResultCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const CacheKey& key) const;

  std::optional<ExactRatio> load(const CacheKey& key) const;
  /// Writes to a temporary file and renames it into place.
  void store(const CacheKey& key, const ExactRatio& value) const;

private:
  std::filesystem::path dir_;
};

/// Flag value if non-empty, else the environment variable, else none.
std::optional<std::filesystem::path> resolve_cache_dir(const std::string& flag);

}  // namespace dfm::cli
