#ifndef CONFLAT_KV_HPP
#define CONFLAT_KV_HPP

#include <map>
#include <stdexcept>
#include <string>

namespace conflat {

// `key = value` text files; '#' starts a comment, blank lines ignored.
struct KeyValueFile {
  std::map<std::string, std::string> entries;
  std::map<std::string, int> lines;  // key -> line number, for error messages
  std::string path;

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end())
      throw std::runtime_error(path + ": missing required key '" + key + "'");
    return it->second;
  }
  std::string get_or(const std::string& key, const std::string& def) const {
    auto it = entries.find(key);
    return it == entries.end() ? def : it->second;
  }
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double def) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int def) const;

  static KeyValueFile parse(const std::string& path);
  static KeyValueFile parse_text(const std::string& text, const std::string& name);
};

}  // namespace conflat

#endif
