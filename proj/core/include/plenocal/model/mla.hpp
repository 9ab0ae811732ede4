#pragma once

#include <cmath>
#include <string>

#include "plenocal/error.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Micro-lens array layouts. Hexagonal grids are row aligned: odd rows are
/// shifted by half a pitch, rows are pitch * sqrt(3)/2 apart.
enum class MLAArrangement { HexRowAligned, Orthogonal };

inline const char* arrangement_name(MLAArrangement a) {
  return a == MLAArrangement::HexRowAligned ? "hexagonal_row_aligned" : "orthogonal";
}

inline MLAArrangement arrangement_from_name(const std::string& s) {
  if (s == "hexagonal_row_aligned") return MLAArrangement::HexRowAligned;
  if (s == "orthogonal") return MLAArrangement::Orthogonal;
  fail(ErrorCode::Validation, "unknown MLA arrangement: " + s);
}

/// In-plane lens position for grid indices (k, l) in units of the pitch,
/// relative to lens (0, 0).
inline Vec2 mla_unit_offset(MLAArrangement a, int k, int l) {
  if (a == MLAArrangement::Orthogonal) return {static_cast<double>(k), static_cast<double>(l)};
  const double shift = (l % 2 != 0) ? 0.5 : 0.0;
  return {k + shift, l * std::sqrt(3.0) / 2.0};
}

/// Periodic focal-type pattern: along a row the types cycle 0..I-1 and each
/// row advances the phase by two, so the diagonal neighbours of a lens carry
/// the other types (multi-focus interleaving). I = 1 degenerates to a single
/// type.
inline int mla_lens_type(int k, int l, int type_count) {
  if (type_count <= 1) return 0;
  const int m = (k + 2 * l) % type_count;
  return m < 0 ? m + type_count : m;
}

}  // namespace plenocal
