#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "temperlab/rational.hpp"

namespace temperlab {

using ojson = nlohmann::ordered_json;

// Serialization with insertion-ordered keys and floats printed with 12
// significant digits, so the same command with the same seed is
// byte-identical run to run.
std::string dump_stable(const ojson& j, int indent = 2);

std::string format_double(double x);

inline ojson rat_to_json(const Rat& r) { return ojson(r.str()); }

inline Rat rat_from_json(const ojson& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return Rat::parse(j.get<std::string>());
  if (j.is_number_float()) {
    auto r = Rat::approximate(j.get<double>(), 1'000'000'000LL, 1e-12);
    if (!r) throw std::invalid_argument("rat_from_json: not representable");
    return *r;
  }
  throw std::invalid_argument("rat_from_json: expected number or \"p/q\" string");
}

inline ojson ratvec_to_json(const std::vector<Rat>& v) {
  ojson a = ojson::array();
  for (const Rat& r : v) a.push_back(rat_to_json(r));
  return a;
}

inline std::vector<Rat> ratvec_from_json(const ojson& j) {
  std::vector<Rat> v;
  for (const auto& e : j) v.push_back(rat_from_json(e));
  return v;
}

}  // namespace temperlab
