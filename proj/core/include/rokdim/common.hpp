#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/rational.hpp>

namespace rokdim {

/// Exact rational scalar used everywhere a value must round-trip or compare
/// without floating error. All denominators in this library stay tiny
/// (products of window sides and metric grains), so int64 never overflows.
using Rat = boost::rational<std::int64_t>;

/// Error with a stable machine-readable code, raised on contract violations.
/// Verification routines never throw; they return reports instead.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Canonical text form: "p" for integers, "p/q" otherwise, q > 0 reduced.
std::string rat_str(const Rat& r);

/// Parses the canonical form produced by rat_str (also accepts "p/1").
Rat parse_rat(const std::string& s);

} // namespace rokdim
