#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmsq/common.hpp"

namespace gmmsq::jsonio {

/// Formats a double with 17 significant digits, enough to round-trip any
/// IEEE-754 double exactly. All persisted files use this, so identical inputs
/// serialize byte-identically.
std::string format_double(double value);

/// Minimal streaming JSON writer with caller-controlled key order.
class Writer {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(const std::string& name);
  void value(const std::string& text);
  void value(const char* text);
  void value(double number);
  void value(int number);
  void value(std::uint64_t number);
  void value(bool flag);
  void value(const Vector& numbers);
  void value(const Matrix& rows);  // array of row arrays

  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

/// FNV-1a 64-bit over a byte string, rendered as 16 hex characters.
std::string fnv1a_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace gmmsq::jsonio
