#include "qent/config.hpp"

#include <charconv>
#include <fstream>

#include "qent/errors.hpp"

namespace qent {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.entries_[key] = trim(body.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[trim(key)] = trim(value);
}

void KeyValueConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.contains(key); }

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return find(key).value_or(fallback);
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto v = find(key);
  if (!v) throw ConfigError("missing required key '" + key + "'");
  return *v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double out = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + *v + "' is not a number");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  int out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': '" + *v + "' is not an integer");
  }
  return out;
}

std::set<std::string> KeyValueConfig::unused_keys() const {
  std::set<std::string> out;
  for (const auto& [key, value] : entries_) {
    if (!used_.contains(key)) out.insert(key);
  }
  return out;
}

}  // namespace qent
