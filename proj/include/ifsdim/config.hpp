#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ifsdim/ifs.hpp"
#include "ifsdim/target.hpp"

namespace ifsdim {

// Flat "section.key = value" configuration text.  '#' starts a comment,
// blank lines are skipped, keys come from a fixed schema; unknown and
// duplicate keys are rejected at parse time with line numbers.
class Config {
 public:
  static Config parse_text(const std::string& text);
  static Config load_file(const std::string& path);

  bool has(const std::string& key) const;

  // Getters validate the stored text form and report "key 'x' (line N)"
  // on failure; the variants without a fallback require the key.
  std::string require_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t require_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> require_double_list(const std::string& key) const;
  std::vector<std::uint32_t> get_u32_list(const std::string& key) const;  // {} if absent

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
};

// Builders for the shared config blocks.
SystemSpec system_from_config(const Config& cfg);
TargetSpec target_from_config(const Config& cfg);

// Locale-free decimal form with 17 significant digits (round-trip exact).
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

// Ordered CSV emission: header row first, fixed column count, LF endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

// Executes one CLI command against a parsed config, writing its artifact
// files under out_dir (empty = the config's output.dir, default ".").
// Progress and failure notes go to diag.  Returns a process exit code.
int run_command(const Config& cfg, const std::string& command, const std::string& out_dir,
                std::ostream& diag);

}  // namespace ifsdim
