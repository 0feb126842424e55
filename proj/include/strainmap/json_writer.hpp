#ifndef STRAINMAP_JSON_WRITER_HPP
#define STRAINMAP_JSON_WRITER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace strainmap {

// Streaming JSON writer with a fixed field order and 17-significant-digit
// numbers, so identical results serialize to identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);

  JsonWriter& value(double v);
  JsonWriter& value(unsigned long long v);
  JsonWriter& value(unsigned long v) { return value(static_cast<unsigned long long>(v)); }
  JsonWriter& value(unsigned v) { return value(static_cast<unsigned long long>(v)); }
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);

  template <typename T>
  JsonWriter& kv(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

  const std::string& str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<char> need_comma_;  // per open container
  bool after_key_ = false;
};

// Writes through a temp file and renames, so partial output never lands under
// the final name.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace strainmap

#endif
