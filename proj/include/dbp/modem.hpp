/**
 * Copyright 2026 The DBP Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbp/error.hpp"
#include "dbp/linalg.hpp"

namespace dbp {

using Bits = std::vector<std::uint8_t>;

enum class Modulation { bpsk, qpsk, qam16, qam64 };

inline std::string_view to_string(Modulation m) {
  switch (m) {
    case Modulation::bpsk: return "bpsk";
    case Modulation::qpsk: return "qpsk";
    case Modulation::qam16: return "16qam";
    case Modulation::qam64: return "64qam";
  }
  return "?";
}

inline Modulation parse_modulation(std::string_view s) {
  if (s == "bpsk") return Modulation::bpsk;
  if (s == "qpsk") return Modulation::qpsk;
  if (s == "16qam" || s == "qam16") return Modulation::qam16;
  if (s == "64qam" || s == "qam64") return Modulation::qam64;
  throw ConfigError("unknown modulation '" + std::string(s) + "'");
}

/// Gray-coded square QAM (or BPSK) with unit average symbol energy.
///
/// Each axis carries k bits mapped MSB-first through the binary reflected
/// Gray code onto the PAM levels -(L-1), ..., -1, +1, ..., L-1 (L = 2^k);
/// for 16-QAM that is 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3. The first k
/// bits of a symbol select the real axis, the next k the imaginary axis.
/// BPSK uses the real axis only (bit 0 -> -1, bit 1 -> +1).
class Constellation {
 public:
  explicit Constellation(Modulation m) : scheme_(m) {
    switch (m) {
      case Modulation::bpsk: axis_bits_ = 1; complex_ = false; break;
      case Modulation::qpsk: axis_bits_ = 1; break;
      case Modulation::qam16: axis_bits_ = 2; break;
      case Modulation::qam64: axis_bits_ = 3; break;
    }
    levels_ = std::size_t{1} << axis_bits_;
    const double l = static_cast<double>(levels_);
    const double axis_energy = (l * l - 1.0) / 3.0;
    scale_ = 1.0 / std::sqrt(complex_ ? 2.0 * axis_energy : axis_energy);
  }

  Modulation scheme() const noexcept { return scheme_; }
  std::size_t bits_per_symbol() const noexcept { return complex_ ? 2 * axis_bits_ : axis_bits_; }
  std::size_t size() const noexcept { return std::size_t{1} << bits_per_symbol(); }
  bool is_real() const noexcept { return !complex_; }

  /// Largest per-axis coordinate, i.e. the half side of the covering box.
  double box_radius() const noexcept { return static_cast<double>(levels_ - 1) * scale_; }

  /// Point for the symbol whose bits (MSB first) form `index`.
  cplx point(std::size_t index) const {
    const std::size_t mask = levels_ - 1;
    if (!complex_) return {level(gray_to_index(index & mask)), 0.0};
    const std::size_t re_bits = (index >> axis_bits_) & mask;
    const std::size_t im_bits = index & mask;
    return {level(gray_to_index(re_bits)), level(gray_to_index(im_bits))};
  }

  std::vector<cplx> points() const {
    std::vector<cplx> pts(size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = point(i);
    return pts;
  }

  CVec map(std::span<const std::uint8_t> bits) const {
    const std::size_t q = bits_per_symbol();
    if (bits.size() % q != 0) {
      throw FramingError("map: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                         std::to_string(q));
    }
    CVec out(bits.size() / q);
    for (std::size_t n = 0; n < out.size(); ++n) {
      std::size_t index = 0;
      for (std::size_t b = 0; b < q; ++b) index = (index << 1) | (bits[n * q + b] & 1u);
      out[n] = point(index);
    }
    return out;
  }

  /// Nearest constellation point per entry; boundary ties go to the more negative level.
  CVec slice(std::span<const cplx> x) const {
    CVec out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double re = level(nearest_level(x[n].real()));
      const double im = complex_ ? level(nearest_level(x[n].imag())) : 0.0;
      out[n] = {re, im};
    }
    return out;
  }

  /// Hard decision bits for each entry (slice, then invert the Gray map).
  Bits demap(std::span<const cplx> x) const {
    Bits out;
    out.reserve(x.size() * bits_per_symbol());
    for (const cplx& v : x) {
      push_axis_bits(out, index_to_gray(nearest_level(v.real())));
      if (complex_) push_axis_bits(out, index_to_gray(nearest_level(v.imag())));
    }
    return out;
  }

 private:
  double level(std::size_t idx) const noexcept {
    return (2.0 * static_cast<double>(idx) - static_cast<double>(levels_ - 1)) * scale_;
  }

  std::size_t nearest_level(double coord) const noexcept {
    // Continuous level position; ceil(t - 0.5) rounds half-way cases down.
    const double t = (coord / scale_ + static_cast<double>(levels_ - 1)) / 2.0;
    const double r = std::ceil(t - 0.5);
    if (!(r > 0.0)) return 0;  // also catches NaN
    if (r >= static_cast<double>(levels_ - 1)) return levels_ - 1;
    return static_cast<std::size_t>(r);
  }

  static std::size_t index_to_gray(std::size_t i) noexcept { return i ^ (i >> 1); }

  static std::size_t gray_to_index(std::size_t g) noexcept {
    std::size_t i = g;
    for (std::size_t shift = 1; shift < 8 * sizeof(std::size_t); shift <<= 1) i ^= i >> shift;
    return i;
  }

  void push_axis_bits(Bits& out, std::size_t gray) const {
    for (std::size_t b = axis_bits_; b-- > 0;) out.push_back(static_cast<std::uint8_t>((gray >> b) & 1u));
  }

  Modulation scheme_;
  std::size_t axis_bits_ = 1;
  std::size_t levels_ = 2;
  bool complex_ = true;
  double scale_ = 1.0;
};

struct ErrorCount {
  std::size_t errors = 0;
  std::size_t total = 0;
};

inline ErrorCount count_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size()) {
    throw DimensionError("count_errors: " + std::to_string(tx.size()) + " vs " + std::to_string(rx.size()) + " bits");
  }
  ErrorCount c{0, tx.size()};
  for (std::size_t i = 0; i < tx.size(); ++i) c.errors += (tx[i] & 1u) != (rx[i] & 1u);
  return c;
}

}  // namespace dbp
