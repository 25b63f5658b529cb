#pragma once
#include <map>
#include <string>
#include <vector>

namespace pqmc {

// Flat key = value experiment configuration; '#' starts a comment. Values
// are typed on read; list values are comma-separated.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<long> get_int_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long value);

    std::vector<std::string> keys() const;
    // Throws if a key outside `allowed` is present (typo guard).
    void require_known_keys(const std::vector<std::string>& allowed) const;

    void write(const std::string& path) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace pqmc
