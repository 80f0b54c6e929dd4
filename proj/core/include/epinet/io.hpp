#pragma once

#include "epinet/errors.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace epinet {

// Flat key=value configuration with dotted section prefixes
// (system., control., targets., damping.). '#' starts a comment.
class Config {
  public:
    Config() = default;

    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key);
    int get_int(const std::string& key, int fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    void set(const std::string& key, const std::string& value);

    // Throws ConfigError naming the first key that was never consumed.
    void reject_unknown() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

// Shortest-round-trip decimal at 12 significant digits.
std::string format_num(double v);

// One CSV table: mandatory header row, values already formatted.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace epinet
