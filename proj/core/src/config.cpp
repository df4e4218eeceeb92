#include "gravphase/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("config: cannot parse '" + text + "' as a number for " +
                          context);
    return value;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    return parse_string(buffer.str(), stem);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile config;
    config.name_ = name;
    config.raw_ = text;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                                  ": empty section name");
            config.values_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                              ": empty key or value");
        if (section.empty())
            throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                              ": key outside any section");
        if (config.values_[section].count(key))
            throw ConfigError("config " + name + ":" + std::to_string(line_number) +
                              ": duplicate key '" + key + "' in [" + section + "]");
        config.values_[section][key] = {value, line_number};
    }
    return config;
}

bool ConfigFile::has_section(const std::string& section) const {
    return values_.count(section) > 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto sec = values_.find(section);
    return sec != values_.end() && sec->second.count(key) > 0;
}

const std::string& ConfigFile::lookup(const std::string& section,
                                      const std::string& key) const {
    const auto sec = values_.find(section);
    if (sec == values_.end())
        throw ConfigError("config " + name_ + ": missing section [" + section + "]");
    const auto it = sec->second.find(key);
    if (it == sec->second.end())
        throw ConfigError("config " + name_ + ": missing key '" + key + "' in [" +
                          section + "]");
    return it->second.first;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_double(lookup(section, key), "[" + section + "]." + key);
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config " + name_ + ": [" + section + "]." + key +
                          " must be an integer");
    return i;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = lookup(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config " + name_ + ": [" + section + "]." + key +
                      " must be a boolean");
}

Vec3 ConfigFile::get_vec3(const std::string& section, const std::string& key) const {
    const auto parts = get_doubles(section, key);
    if (parts.size() != 3)
        throw ConfigError("config " + name_ + ": [" + section + "]." + key +
                          " must hold exactly three components");
    return {parts[0], parts[1], parts[2]};
}

Vec3 ConfigFile::get_vec3_or(const std::string& section, const std::string& key,
                             const Vec3& fallback) const {
    return has(section, key) ? get_vec3(section, key) : fallback;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
    return lookup(section, key);
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
    std::istringstream in(lookup(section, key));
    std::vector<double> values;
    std::string token;
    while (in >> token)
        values.push_back(parse_double(token, "[" + section + "]." + key));
    if (values.empty())
        throw ConfigError("config " + name_ + ": [" + section + "]." + key +
                          " holds no numbers");
    return values;
}

std::vector<std::string> ConfigFile::get_strings(const std::string& section,
                                                 const std::string& key) const {
    std::istringstream in(lookup(section, key));
    std::vector<std::string> values;
    std::string token;
    while (in >> token) values.push_back(token);
    return values;
}

void ConfigFile::override_value(const std::string& dotted_key, double value) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos)
        throw ConfigError("config: sweep key must be 'section.key[.x|.y|.z]', got '" +
                          dotted_key + "'");
    const std::string section = dotted_key.substr(0, dot);
    std::string key = dotted_key.substr(dot + 1);

    // Vector keys are sweepable per component: section.key.z
    int component = -1;
    if (key.size() > 2 && key[key.size() - 2] == '.') {
        const char axis = key.back();
        if (axis == 'x') component = 0;
        else if (axis == 'y') component = 1;
        else if (axis == 'z') component = 2;
        if (component >= 0) key = key.substr(0, key.size() - 2);
    }
    if (!has(section, key))
        throw ConfigError("config: sweep key '" + dotted_key + "' not present");

    auto format = [](double v) {
        char buffer[64];
        const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v,
                                             std::chars_format::general, 17);
        if (ec != std::errc{}) throw NumericError("config: cannot format sweep value");
        return std::string(buffer, ptr);
    };

    if (component < 0) {
        get_double(section, key);  // must already be a numeric leaf
        values_[section][key].first = format(value);
        return;
    }
    Vec3 vec = get_vec3(section, key);
    (component == 0 ? vec.x : component == 1 ? vec.y : vec.z) = value;
    values_[section][key].first =
        format(vec.x) + " " + format(vec.y) + " " + format(vec.z);
}

void ConfigFile::enforce_schema(
    const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, keys] : values_) {
        const auto it = schema.find(section);
        if (it == schema.end())
            throw ConfigError("config " + name_ + ": unknown section [" + section + "]");
        for (const auto& [key, value] : keys) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError("config " + name_ + ":" +
                                  std::to_string(value.second) + ": unknown key '" +
                                  key + "' in [" + section +
                                  "] (check the unit suffix)");
        }
    }
}

std::vector<std::string> ConfigFile::sections() const {
    std::vector<std::string> names;
    for (const auto& [section, keys] : values_) names.push_back(section);
    return names;
}

}  // namespace gravphase
