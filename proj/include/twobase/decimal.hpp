// Copyright 2026 The twobase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWOBASE_DECIMAL_HPP
#define TWOBASE_DECIMAL_HPP

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <system_error>

namespace twobase {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-decimal rounding, round-half-away-from-zero applied to the shortest
/// round-trip decimal string of `x`. Result is the double nearest to the
/// rounded decimal, so it is identical on every IEEE-754 platform.
inline double round_decimal(double x, int decimals) {
  if (!std::isfinite(x)) throw Error("round_decimal: non-finite value");
  if (decimals < 0 || decimals > 300) throw Error("round_decimal: decimals out of range");
  if (x == 0.0) return 0.0;

  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific);
  std::string s(buf, res.ptr);

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '-') {
    negative = true;
    ++pos;
  }
  std::size_t epos = s.find('e');
  std::string digits;
  for (std::size_t i = pos; i < epos; ++i)
    if (s[i] != '.') digits.push_back(s[i]);
  int exp10 = std::atoi(s.c_str() + epos + 1);

  // x = 0.D1D2D3... * 10^(exp10 + 1); keep digits down to place 10^-decimals.
  long keep = static_cast<long>(exp10) + 1 + decimals;
  if (keep < 0) return negative ? -0.0 : 0.0;

  std::string kept = digits.substr(0, std::min<std::size_t>(keep, digits.size()));
  while (static_cast<long>(kept.size()) < keep) kept.push_back('0');
  bool round_up = static_cast<std::size_t>(keep) < digits.size() && digits[keep] >= '5';
  if (round_up) {
    long i = static_cast<long>(kept.size()) - 1;
    while (i >= 0 && kept[i] == '9') kept[i--] = '0';
    if (i >= 0)
      ++kept[i];
    else
      kept.insert(kept.begin(), '1');
  }
  if (kept.empty()) return negative ? -0.0 : 0.0;

  std::string out = (negative ? "-" : "") + kept + "e-" + std::to_string(decimals);
  double value = 0.0;
  std::from_chars(out.data(), out.data() + out.size(), value);
  return value;
}

/// True when `x` already sits on the 10^-decimals grid (within `tol`).
inline bool on_decimal_grid(double x, int decimals, double tol = 1e-12) {
  return std::abs(round_decimal(x, decimals) - x) <= tol;
}

/// Shortest text that round-trips to the same double; used by the CSV writers.
inline std::string format_roundtrip(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// 17 significant digits, the fixed-width numeric text format of all outputs.
inline std::string format_g17(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Probability values rendered with `decimals` places after the point.
inline std::string format_fixed(double x, int decimals) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, decimals);
  if (res.ec != std::errc()) return format_g17(x);
  return std::string(buf, res.ptr);
}

}  // namespace twobase

#endif  // TWOBASE_DECIMAL_HPP
