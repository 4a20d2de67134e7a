#include "gmmsq/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmmsq::jsonio {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void Writer::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_in_scope_.empty()) {
    if (!first_in_scope_.back()) out_ += ',';
    first_in_scope_.back() = false;
  }
}

void Writer::begin_object() {
  separator();
  out_ += '{';
  first_in_scope_.push_back(true);
}

void Writer::end_object() {
  out_ += '}';
  first_in_scope_.pop_back();
}

void Writer::begin_array() {
  separator();
  out_ += '[';
  first_in_scope_.push_back(true);
}

void Writer::end_array() {
  out_ += ']';
  first_in_scope_.pop_back();
}

void Writer::key(const std::string& name) {
  separator();
  out_ += '"';
  out_ += name;
  out_ += "\":";
  pending_key_ = true;
}

void Writer::value(const std::string& text) {
  separator();
  out_ += '"';
  for (char c : text) {
    if (c == '"' || c == '\\') out_ += '\\';
    out_ += c;
  }
  out_ += '"';
}

void Writer::value(const char* text) { value(std::string(text)); }

void Writer::value(double number) {
  separator();
  out_ += format_double(number);
}

void Writer::value(int number) {
  separator();
  out_ += std::to_string(number);
}

void Writer::value(std::uint64_t number) {
  separator();
  out_ += std::to_string(number);
}

void Writer::value(bool flag) {
  separator();
  out_ += flag ? "true" : "false";
}

void Writer::value(const Vector& numbers) {
  begin_array();
  for (Eigen::Index i = 0; i < numbers.size(); ++i) value(numbers[i]);
  end_array();
}

void Writer::value(const Matrix& rows) {
  begin_array();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    begin_array();
    for (Eigen::Index j = 0; j < rows.cols(); ++j) value(rows(i, j));
    end_array();
  }
  end_array();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << contents;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gmmsq::jsonio
