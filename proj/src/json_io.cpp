#include "temperlab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace temperlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  std::string s(buf);
  // Keep a float-looking token so round-trips stay typed.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_rec(const ojson& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad1(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad1;
        escape_string(it.key(), out);
        out += ": ";
        dump_rec(it.value(), indent, depth + 1, out);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      bool scalars = true;
      for (const auto& e : j)
        if (e.is_object() || e.is_array()) { scalars = false; break; }
      if (scalars && j.size() <= 16) {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
          dump_rec(j[i], indent, depth, out);
          if (i + 1 < j.size()) out += ", ";
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out += pad1;
        dump_rec(j[i], indent, depth + 1, out);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case ojson::value_t::string:
      escape_string(j.get<std::string>(), out);
      return;
    case ojson::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case ojson::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      return;
    case ojson::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      return;
    case ojson::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string dump_stable(const ojson& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

}  // namespace temperlab
