#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gravphase/vec3.hpp"

namespace gravphase {

// Plain-text scenario configuration: "[section]" headers and "key = value"
// lines, '#' or ';' comments. Every physical key carries its unit as a name
// suffix (T_s, mass_kg, ...) and the schema rejects anything it does not
// know, so a bare "T = 1" fails by name.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& name);

    const std::string& name() const { return name_; }
    const std::string& raw_text() const { return raw_; }

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key,
                     bool fallback) const;
    Vec3 get_vec3(const std::string& section, const std::string& key) const;
    Vec3 get_vec3_or(const std::string& section, const std::string& key,
                     const Vec3& fallback) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    std::vector<double> get_doubles(const std::string& section,
                                    const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& section,
                                         const std::string& key) const;

    // Replace one value (used by sweep); the key must already be numeric.
    void override_value(const std::string& dotted_key, double value);

    // Schema enforcement: every present section/key must appear in the schema.
    void enforce_schema(
        const std::map<std::string, std::vector<std::string>>& schema) const;

    std::vector<std::string> sections() const;

  private:
    std::string name_;
    std::string raw_;
    // section -> key -> (value text, line number)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> values_;

    const std::string& lookup(const std::string& section, const std::string& key) const;
};

}  // namespace gravphase
