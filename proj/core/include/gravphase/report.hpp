#pragma once

#include <map>
#include <string>
#include <vector>

namespace gravphase {

// Locale-independent shortest-faithful decimal with up to 17 significant
// digits; all emitted numbers go through this.
std::string format_double(double value);

// Git-style blob hash of the raw content ("blob <len>\0" + bytes, SHA-1 hex).
std::string git_blob_sha1(const std::string& content);

// Deterministic CSV: a '# config_hash=...' header line, then the column
// header, then rows. '.' decimal separator, '\n' line endings.
class CsvWriter {
  public:
    CsvWriter(std::string config_hash, std::vector<std::string> columns);

    void add_row(const std::vector<std::string>& cells);
    std::string str() const;
    void write_file(const std::string& path) const;

  private:
    std::string hash_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Flat key/value report serialized as JSON with sorted keys.
class FlatReport {
  public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, double value);
    void set(const std::string& key, int value);
    void set(const std::string& key, bool value);
    void set_list(const std::string& key, const std::vector<double>& values);

    std::string str() const;
    void write_file(const std::string& path) const;

  private:
    std::map<std::string, std::string> entries_;  // pre-serialized values
};

void ensure_directory(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gravphase
