#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slgcli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented run configuration: `section.key = value`, `#` comments,
// comma-separated arrays, unquoted strings.  Every key a pipeline reads is
// recorded with its final value (defaults included) so the run can echo a
// resolved_config; keys that were never consumed are rejected by name.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text, const std::string& origin = "<string>");

    void apply_override(const std::string& assignment);  // "sec.key=value"

    bool has(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback);
    double require_double(const std::string& section, const std::string& key);
    long long get_int(const std::string& section, const std::string& key, long long fallback);
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    std::string require_string(const std::string& section, const std::string& key);
    std::vector<double> get_array(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback);
    std::vector<std::string> get_string_array(const std::string& section, const std::string& key,
                                              const std::vector<std::string>& fallback);
    // semicolon-separated rows of comma-separated numbers
    std::vector<std::vector<double>> get_matrix(const std::string& section,
                                                const std::string& key);

    // throws UsageError naming every key that no pipeline consumed
    void assert_all_consumed() const;

    std::vector<std::string> keys() const;

    // `section.key = value` lines for everything consumed, defaults included
    std::string resolved_echo() const;

private:
    std::string full_key(const std::string& s, const std::string& k) const { return s + "." + k; }
    std::optional<std::string> raw(const std::string& section, const std::string& key);
    void note(const std::string& section, const std::string& key, const std::string& value);

    std::map<std::string, std::string> values_;
    std::map<std::string, bool> consumed_;
    std::map<std::string, std::string> resolved_;
};

}  // namespace slgcli
