#pragma once

// Deterministic text formatting shared by reports, tables and dumps.

#include <string>
#include <vector>

namespace finsler {

// 17 significant digits, round-trip exact, locale-free.
std::string format_double(double v);

// key = value lines inside named blocks, two-space indentation.
class StructuredWriter {
 public:
  void open_block(const std::string& name);
  void close_block();
  void field(const std::string& key, const std::string& value);
  void field(const std::string& key, double value);
  void field(const std::string& key, long long value);
  void field(const std::string& key, bool value);
  void field_list(const std::string& key, const std::vector<double>& values);
  void blank();

  const std::string& text() const { return text_; }

 private:
  std::string indent() const;
  std::string text_;
  int depth_ = 0;
};

}  // namespace finsler
