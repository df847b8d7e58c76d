#include "run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "csv_io.hpp"

namespace stcov_cli {

RunConfig::RunConfig(std::string command) : command_(std::move(command)) {
  define("config", "", "path of a `key = value` configuration file");
}

void RunConfig::define(const std::string& key, const std::string& default_value,
                       const std::string& help) {
  entries_.push_back({key, default_value, help, true, false});
}

void RunConfig::define_required(const std::string& key, const std::string& help) {
  entries_.push_back({key, "", help, false, false});
}

RunConfig::Entry& RunConfig::find(const std::string& key) {
  for (auto& e : entries_)
    if (e.key == key) return e;
  throw config_error(command_ + ": unknown key '" + key + "'");
}

const RunConfig::Entry& RunConfig::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return e;
  throw config_error(command_ + ": unknown key '" + key + "'");
}

bool RunConfig::parse(const std::vector<std::string>& args) {
  /* Flags are collected first so they can override the config file. */
  std::vector<std::pair<std::string, std::string>> flags;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--help" || a == "-h") {
      print_usage();
      return false;
    }
    if (a.rfind("--", 0) != 0)
      throw config_error(command_ + ": expected --key, got '" + a + "'");
    std::string key = a.substr(2), value;
    const size_t eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size())
        throw config_error(command_ + ": flag --" + key + " needs a value");
      value = args[++i];
    }
    find(key); /* reject unknown flags before any assignment */
    flags.emplace_back(key, value);
  }

  for (const auto& [key, value] : flags)
    if (key == "config") {
      find(key).value = value;
      find(key).set = true;
    }

  const std::string config_path = find("config").value;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw config_error(command_ + ": cannot open config file '" + config_path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error(config_path + " line " + std::to_string(lineno) +
                           ": expected `key = value`");
      Entry& e = find(trim(t.substr(0, eq)));
      e.value = trim(t.substr(eq + 1));
      e.set = true;
    }
  }

  for (const auto& [key, value] : flags) {
    Entry& e = find(key);
    e.value = value;
    e.set = true;
  }

  for (const auto& e : entries_)
    if (!e.has_default && !e.set)
      throw config_error(command_ + ": required key '" + e.key + "' is missing (" + e.help +
                         ")");
  return true;
}

const std::string& RunConfig::str(const std::string& key) const { return find(key).value; }

double RunConfig::num(const std::string& key) const {
  const Entry& e = find(key);
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || end != e.value.c_str() + e.value.size())
    throw config_error(command_ + ": key '" + key + "' needs a number, got '" + e.value + "'");
  return v;
}

long long RunConfig::integer(const std::string& key) const {
  const Entry& e = find(key);
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (e.value.empty() || end != e.value.c_str() + e.value.size())
    throw config_error(command_ + ": key '" + key + "' needs an integer, got '" + e.value +
                       "'");
  return v;
}

bool RunConfig::was_set(const std::string& key) const { return find(key).set; }

std::optional<double> RunConfig::maybe_num(const std::string& key) const {
  if (find(key).value == "auto") return std::nullopt;
  return num(key);
}

std::vector<std::string> RunConfig::echo_lines() const {
  std::vector<std::string> lines;
  lines.push_back("# command = " + command_);
  for (const auto& e : entries_) {
    if (e.key == "config") continue;
    lines.push_back("# " + e.key + " = " + e.value);
  }
  return lines;
}

void RunConfig::print_usage() const {
  std::printf("usage: stcov %s [--key value | --key=value ...]\n\nkeys:\n", command_.c_str());
  for (const auto& e : entries_) {
    if (e.has_default)
      std::printf("  --%-14s %s (default: %s)\n", e.key.c_str(), e.help.c_str(),
                  e.value.empty() ? "empty" : e.value.c_str());
    else
      std::printf("  --%-14s %s (required)\n", e.key.c_str(), e.help.c_str());
  }
}

}  // namespace stcov_cli
