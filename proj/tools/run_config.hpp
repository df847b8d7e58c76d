#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stcov_cli {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Declared key registry for one subcommand.  Values come from three layers
 * with increasing precedence: declared defaults, a `key = value` config file
 * (selected by the built-in `config` key), then command-line flags
 * (`--key value` or `--key=value`).  Unknown keys anywhere are errors. */
class RunConfig {
 public:
  explicit RunConfig(std::string command);

  /* Optional key with a default; required key without one. */
  void define(const std::string& key, const std::string& default_value,
              const std::string& help);
  void define_required(const std::string& key, const std::string& help);

  /* Parses flags, loads the config file if any, and checks required keys.
   * Returns false when --help was requested (usage printed to stdout). */
  bool parse(const std::vector<std::string>& args);

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool was_set(const std::string& key) const;
  /* Numeric value, or nullopt when the key still holds the sentinel `auto`. */
  std::optional<double> maybe_num(const std::string& key) const;

  /* Effective configuration, one `# key = value` line per declared key, in
   * declaration order. */
  std::vector<std::string> echo_lines() const;
  void print_usage() const;

 private:
  struct Entry {
    std::string key, value, help;
    bool has_default = false;
    bool set = false;
  };
  Entry& find(const std::string& key);
  const Entry& find(const std::string& key) const;

  std::string command_;
  std::vector<Entry> entries_;
};

}  // namespace stcov_cli
