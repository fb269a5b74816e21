#include "cfit/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "cfit/error.hpp"

namespace cfit {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool valid_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read manifest '" + path + "'");
  const fs::path base = fs::path(path).parent_path();

  CorpusManifest m;
  std::set<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells != std::vector<std::string>{"name", "path", "domain"}) {
        throw InvalidArgument("manifest header must be 'name,path,domain'");
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw ParseError(line_no, "expected 3 fields");
    CorpusEntry e{cells[0], cells[1], cells[2]};
    if (!valid_name(e.name)) throw ParseError(line_no, "invalid network name '" + e.name + "'");
    if (!names.insert(e.name).second) throw InvalidArgument("duplicate network name '" + e.name + "'");
    if (std::find(kDomains.begin(), kDomains.end(), e.domain) == kDomains.end()) {
      std::string known;
      for (auto d : kDomains) known += (known.empty() ? "" : ", ") + std::string(d);
      throw InvalidArgument("unknown domain '" + e.domain + "' (expected one of " + known + ")");
    }
    fs::path p(e.path);
    if (p.is_relative()) p = base / p;
    e.path = p.lexically_normal().string();
    if (!std::ifstream(e.path)) throw InvalidArgument("cannot read '" + e.path + "' for " + e.name);
    m.entries.push_back(std::move(e));
  }
  if (!header) throw InvalidArgument("manifest header must be 'name,path,domain'");
  return m;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int t = 0; t < len; ++t) {
    out.push_back(kHex[digest[t] >> 4]);
    out.push_back(kHex[digest[t] & 15]);
  }
  return out;
}

}  // namespace cfit
