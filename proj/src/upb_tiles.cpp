#include "upbwit/upb_tiles.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <optional>

#include "upbwit/seesaw.hpp"

namespace upbwit {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed layout name '" + std::string(whole) + "'");
  }
  return value;
}

std::pair<std::string_view, std::string_view> split_once(std::string_view text, char sep,
                                                         std::string_view whole) {
  const auto pos = text.find(sep);
  if (pos == std::string_view::npos) {
    throw std::invalid_argument("malformed layout name '" + std::string(whole) +
                                "' (expected d1xd2-l.n-m.o)");
  }
  return {text.substr(0, pos), text.substr(pos + 1)};
}

Rect bounding_box(const Rect& x, const Rect& y) {
  return {std::min(x.r1, y.r1), std::max(x.r2, y.r2), std::min(x.c1, y.c1),
          std::max(x.c2, y.c2)};
}

}  // namespace

TileLayout::TileLayout(BipartiteDims dims, int l, int n, int m, int o)
    : dims_(dims), l_(l), n_(n), m_(m), o_(o) {
  if (!(1 < l && l <= n && n < dims.d1 && 1 < m && m <= o && o < dims.d2)) {
    throw std::invalid_argument(
        "invalid tile layout: need 1 < l <= n < d1 and 1 < m <= o < d2 (got " +
        name() + ")");
  }
}

TileLayout TileLayout::parse(std::string_view name) {
  const auto [dims_part, rest] = split_once(name, '-', name);
  const auto [rows_part, cols_part] = split_once(rest, '-', name);
  const auto [d1, d2] = split_once(dims_part, 'x', name);
  const auto [l, n] = split_once(rows_part, '.', name);
  const auto [m, o] = split_once(cols_part, '.', name);
  return TileLayout({parse_int(d1, name), parse_int(d2, name)}, parse_int(l, name),
                    parse_int(n, name), parse_int(m, name), parse_int(o, name));
}

std::string TileLayout::name() const {
  return std::to_string(dims_.d1) + "x" + std::to_string(dims_.d2) + "-" +
         std::to_string(l_) + "." + std::to_string(n_) + "-" + std::to_string(m_) +
         "." + std::to_string(o_);
}

std::size_t layout_count(const BipartiteDims& dims) {
  if (dims.d1 < 3 || dims.d2 < 3) return 0;
  const auto per = [](std::size_t d) { return (d - 1) * (d - 2) / 2; };
  return per(dims.d1) * per(dims.d2);
}

std::vector<TileLayout> enumerate_layouts(const BipartiteDims& dims) {
  if (dims.d1 < 3 || dims.d2 < 3) {
    throw std::invalid_argument("enumerate_layouts: both dimensions must be >= 3");
  }
  std::vector<TileLayout> out;
  out.reserve(layout_count(dims));
  for (int l = 2; l < dims.d1; ++l)
    for (int n = l; n < dims.d1; ++n)
      for (int m = 2; m < dims.d2; ++m)
        for (int o = m; o < dims.d2; ++o) out.emplace_back(dims, l, n, m, o);
  return out;
}

std::array<Rect, kTileCount> pinwheel(const TileLayout& t) {
  const int d1 = t.dims().d1;
  const int d2 = t.dims().d2;
  return {{
      {t.l(), t.n(), t.m(), t.o()},   // central
      {1, t.l() - 1, 1, t.o()},       // top
      {1, t.n(), t.o() + 1, d2},      // right
      {t.n() + 1, d1, t.m(), d2},     // bottom
      {t.l(), d1, 1, t.m() - 1},      // left
  }};
}

bool is_partition(std::span<const Rect> rects, const BipartiteDims& dims) {
  for (const Rect& r : rects)
    if (!r.fits(dims)) return false;
  for (int row = 1; row <= dims.d1; ++row) {
    for (int col = 1; col <= dims.d2; ++col) {
      int hits = 0;
      for (const Rect& r : rects) hits += r.contains(row, col) ? 1 : 0;
      if (hits != 1) return false;
    }
  }
  return true;
}

bool is_unextendible(std::span<const Rect> rects) {
  const std::size_t k = rects.size();
  const unsigned full = (1u << k) - 1;
  for (unsigned mask = 1; mask < full; ++mask) {
    if (std::popcount(mask) < 2) continue;
    std::optional<Rect> box;
    int area = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(mask & (1u << i))) continue;
      box = box ? bounding_box(*box, rects[i]) : rects[i];
      area += rects[i].area();
    }
    // Disjoint tiles form a rectangle iff they fill their bounding box.
    if (box->area() == area) return false;
  }
  return true;
}

HermitianOp tile_projector(const Rect& rect, const BipartiteDims& dims) {
  if (!rect.fits(dims)) throw std::invalid_argument("tile_projector: rect outside grid");
  CMatrix p = CMatrix::Zero(dims.total(), dims.total());
  for (int i = rect.r1; i <= rect.r2; ++i)
    for (int j = rect.c1; j <= rect.c2; ++j) {
      const int k = dims.index(i - 1, j - 1);
      p(k, k) = 1.0;
    }
  return HermitianOp(std::move(p));
}

HermitianOp tile_sym_projector(const Rect& rect, const BipartiteDims& dims) {
  if (!rect.fits(dims)) throw std::invalid_argument("tile_sym_projector: rect outside grid");
  CVector u = CVector::Zero(dims.total());
  for (int i = rect.r1; i <= rect.r2; ++i)
    for (int j = rect.c1; j <= rect.c2; ++j) u(dims.index(i - 1, j - 1)) = 1.0;
  u /= std::sqrt(static_cast<double>(rect.area()));
  return HermitianOp::hermitian_part(u * u.adjoint());
}

HermitianOp stopper_projector(const BipartiteDims& dims) {
  return tile_sym_projector({1, dims.d1, 1, dims.d2}, dims);
}

UpbState build_state(const TileLayout& layout) {
  const BipartiteDims& dims = layout.dims();
  const auto tiles = pinwheel(layout);
  if (!is_partition(tiles, dims)) {
    throw NumericalFault("build_state: pinwheel does not partition the grid for " +
                         layout.name());
  }
  HermitianOp support = HermitianOp::identity(dims.total()) - stopper_projector(dims);
  for (const Rect& r : tiles) {
    support -= tile_projector(r, dims) - tile_sym_projector(r, dims);
  }
  const double idem = (support.matrix() * support.matrix() - support.matrix()).norm();
  if (idem > kDerivedTol) {
    throw NumericalFault("build_state: support is not a projector (||P^2-P|| = " +
                         std::to_string(idem) + ")");
  }
  const int rank = kTileCount - 1;
  DensityMatrix rho(support * (1.0 / rank));
  return UpbState{layout, std::move(rho), std::move(support), kTileCount};
}

bool StateReport::ok() const {
  return rank == kTileCount - 1 && std::abs(trace - 1.0) <= kDerivedTol &&
         min_eigenvalue >= -kDerivedTol && ppt() && projector_residual <= kDerivedTol &&
         stopper_residual <= kConstructTol && tile_residual <= kConstructTol &&
         max_product_overlap < 1.0 - 1e-3 && partition_ok && unextendible_ok;
}

StateReport validate_state(const UpbState& state, int restarts, Rng& rng) {
  const BipartiteDims& dims = state.layout.dims();
  const CMatrix& rho = state.rho.matrix();
  const CMatrix& p = state.support.matrix();
  const auto tiles = pinwheel(state.layout);

  StateReport rep;
  rep.rank = numerical_rank(state.support, 0.5);
  rep.trace = state.rho.op().trace();
  rep.min_eigenvalue = min_eigenvalue(state.rho.op());
  rep.ppt_min_eigenvalue = min_eigenvalue(partial_transpose(state.rho.op(), dims));
  rep.projector_residual = (p * p - p).norm();
  rep.stopper_residual = (rho * stopper_projector(dims).matrix()).norm();
  for (const Rect& r : tiles) {
    const CMatrix diff = (tile_projector(r, dims) - tile_sym_projector(r, dims)).matrix();
    rep.tile_residual = std::max(rep.tile_residual, (rho * diff).norm());
  }
  rep.max_product_overlap = seesaw_multistart(state.support, dims, restarts, rng).value;
  rep.partition_ok = is_partition(tiles, dims);
  rep.unextendible_ok = is_unextendible(tiles);
  return rep;
}

}  // namespace upbwit
