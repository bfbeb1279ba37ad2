#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upbwit/hermitian.hpp"

namespace upbwit {

/// Inclusive, 1-based rectangle of grid cells [r1..r2] x [c1..c2].
struct Rect {
  int r1 = 1, r2 = 1, c1 = 1, c2 = 1;

  int area() const { return (r2 - r1 + 1) * (c2 - c1 + 1); }
  bool contains(int row, int col) const {
    return row >= r1 && row <= r2 && col >= c1 && col <= c2;
  }
  bool fits(const BipartiteDims& dims) const {
    return r1 >= 1 && c1 >= 1 && r1 <= r2 && c1 <= c2 && r2 <= dims.d1 &&
           c2 <= dims.d2;
  }
  bool operator==(const Rect&) const = default;
};

inline constexpr int kTileCount = 5;

enum class Tile { Central = 0, Top, Right, Bottom, Left };

/// Five-tile pinwheel covering of a d1 x d2 grid, fixed by the 1-based
/// bounds of its central tile: rows [l..n], columns [m..o], with
/// 1 < l <= n < d1 and 1 < m <= o < d2.
class TileLayout {
 public:
  TileLayout(BipartiteDims dims, int l, int n, int m, int o);

  // Inverse of name(); throws std::invalid_argument on malformed input.
  static TileLayout parse(std::string_view name);

  const BipartiteDims& dims() const { return dims_; }
  int l() const { return l_; }
  int n() const { return n_; }
  int m() const { return m_; }
  int o() const { return o_; }
  int central_area() const { return (n_ - l_ + 1) * (o_ - m_ + 1); }

  // "d1xd2-l.n-m.o", e.g. "3x3-2.2-2.2".
  std::string name() const;

  bool operator==(const TileLayout&) const = default;

 private:
  BipartiteDims dims_;
  int l_, n_, m_, o_;
};

// All layouts for `dims` in lexicographic (l, n, m, o) order.
std::vector<TileLayout> enumerate_layouts(const BipartiteDims& dims);
std::size_t layout_count(const BipartiteDims& dims);

// Central, Top, Right, Bottom, Left.
std::array<Rect, kTileCount> pinwheel(const TileLayout& layout);

// True when the rectangles are pairwise disjoint and cover every cell.
bool is_partition(std::span<const Rect> rects, const BipartiteDims& dims);
// True when no union of 2..K-1 of the rectangles is itself a rectangle.
bool is_unextendible(std::span<const Rect> rects);

HermitianOp tile_projector(const Rect& rect, const BipartiteDims& dims);
// Rank-1 projector onto the uniform superposition of the cells in `rect`.
HermitianOp tile_sym_projector(const Rect& rect, const BipartiteDims& dims);
// Projector onto the uniform superposition of all basis states.
HermitianOp stopper_projector(const BipartiteDims& dims);

struct UpbState {
  TileLayout layout;
  DensityMatrix rho;
  HermitianOp support;  // rank K-1 orthogonal projector
  int tiles = kTileCount;
};

UpbState build_state(const TileLayout& layout);

struct StateReport {
  int rank = 0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  double ppt_min_eigenvalue = 0.0;
  double projector_residual = 0.0;   // ||P^2 - P||
  double stopper_residual = 0.0;     // ||rho Pi_sym||
  double tile_residual = 0.0;        // max_k ||rho (Pi_k - Pi_k,sym)||
  double max_product_overlap = 0.0;  // seesaw estimate of max <ab|P|ab>
  bool partition_ok = false;
  bool unextendible_ok = false;

  bool ppt() const { return ppt_min_eigenvalue >= -kDerivedTol; }
  bool ok() const;
};

StateReport validate_state(const UpbState& state, int restarts, Rng& rng);

}  // namespace upbwit
