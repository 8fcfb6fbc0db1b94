#include "finsler/textio.hpp"

#include <cstdio>

namespace finsler {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string StructuredWriter::indent() const {
  return std::string(static_cast<size_t>(depth_) * 2, ' ');
}

void StructuredWriter::open_block(const std::string& name) {
  text_ += indent() + name + " {\n";
  ++depth_;
}

void StructuredWriter::close_block() {
  --depth_;
  text_ += indent() + "}\n";
}

void StructuredWriter::field(const std::string& key, const std::string& value) {
  text_ += indent() + key + " = " + value + "\n";
}

void StructuredWriter::field(const std::string& key, double value) {
  field(key, format_double(value));
}

void StructuredWriter::field(const std::string& key, long long value) {
  field(key, std::to_string(value));
}

void StructuredWriter::field(const std::string& key, bool value) {
  field(key, std::string(value ? "true" : "false"));
}

void StructuredWriter::field_list(const std::string& key,
                                  const std::vector<double>& values) {
  std::string joined;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += format_double(values[i]);
  }
  field(key, joined);
}

void StructuredWriter::blank() { text_ += "\n"; }

}  // namespace finsler
