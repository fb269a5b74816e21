#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace cfit {

inline constexpr std::array<std::string_view, 7> kDomains = {
    "social", "biological", "economic", "technological", "transportation", "information", "synthetic",
};

struct CorpusEntry {
  std::string name;    // [A-Za-z0-9_.-]+, unique
  std::string path;    // resolved against the manifest directory
  std::string domain;  // one of kDomains
};

struct CorpusManifest {
  std::vector<CorpusEntry> entries;
};

// CSV with header `name,path,domain`. Throws InvalidArgument on duplicate
// names, unknown domains or unreadable paths.
CorpusManifest load_manifest(const std::string& path);

// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

}  // namespace cfit
