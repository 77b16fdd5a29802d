#pragma once

// Exact nodal-connectivity graph of a non-tiling eigenfunction.
//
// The zero sets of phi1 = sin(mx)sin(ny) and phi2 = sin(nx)sin(my) are grid
// lines at x, y in (pi/m)Z and (pi/n)Z. Over the common denominator m*n
// these are the integers t in nZ and mZ, t in [0, mn]. The lines cut the
// triangle into rectangles and diagonal half-squares ("cells"). The nodal
// set of phi = phi1 - phi2 lives in the shaded cells, where phi1 and phi2
// share a sign, and it passes through V: the grid points where both terms
// vanish. Each shaded cell joins its V corners, or joins one V corner to
// the boundary, so the nodal set is encoded as a multigraph on V plus one
// anchor vertex that stands for the whole boundary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/phi.hpp"
#include "trinodal/recursion.hpp"

namespace trinodal {

// Grid point (pi*tx/(mn), pi*ty/(mn)).
struct GridPoint {
  std::int64_t tx = 0;
  std::int64_t ty = 0;

  friend constexpr bool operator==(const GridPoint&, const GridPoint&) = default;
};

enum class CellShape { rectangle, diagonal_triangle };

// Corner order: 0 = (x0,y0), 1 = (x1,y0), 2 = (x1,y1), 3 = (x0,y1).
// Diagonal triangles are the half {y < x} of [x0,x1]^2; their only corner
// that can lie in V is corner 1.
struct Cell {
  std::int32_t a = 0;  // x interval index
  std::int32_t b = 0;  // y interval index, b <= a
  std::int64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  CellShape shape = CellShape::rectangle;
  bool shaded = false;
  bool touches_bottom = false;  // y0 == 0
  bool touches_right = false;   // x1 == mn
  // Vertex ids (0 means "not in V") for the four corners.
  std::array<std::int32_t, 4> corner_vertex{};

  int v_corner_count() const {
    return static_cast<int>(std::count_if(corner_vertex.begin(), corner_vertex.end(),
                                          [](std::int32_t v) { return v != 0; }));
  }
  bool boundary_adjacent() const {
    return shape == CellShape::diagonal_triangle || touches_bottom || touches_right;
  }
  GridPoint corner(int i) const {
    switch (i) {
      case 0: return {x0, y0};
      case 1: return {x1, y0};
      case 2: return {x1, y1};
      default: return {x0, y1};
    }
  }
};

inline constexpr std::int32_t kAnchor = 0;

struct GraphEdge {
  std::int32_t u = 0;
  std::int32_t v = 0;
  std::int64_t cell = 0;  // cell index a(a+1)/2 + b

  friend constexpr bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct CellEdges {
  std::array<GraphEdge, 2> edges{};
  int count = 0;
  void add(std::int32_t u, std::int32_t v, std::int64_t cell) { edges[count++] = {u, v, cell}; }
};

// Bookkeeping from a build, for monitoring.
struct BuildStats {
  std::int64_t cells = 0;
  std::int64_t shaded = 0;
  std::int64_t four_corner = 0;
  std::int64_t empty_shaded_boundary = 0;  // shaded boundary rectangles with no V corner
  std::int64_t empty_shaded_interior = 0;
  std::int64_t extended_precision = 0;     // center signs that needed the fallback

  BuildStats& operator+=(const BuildStats& o) {
    cells += o.cells;
    shaded += o.shaded;
    four_corner += o.four_corner;
    empty_shaded_boundary += o.empty_shaded_boundary;
    empty_shaded_interior += o.empty_shaded_interior;
    extended_precision += o.extended_precision;
    return *this;
  }
};

struct NodalGraph {
  ModePair mode;
  // vertices[0] is the anchor; its coordinates are unused.
  std::vector<GridPoint> vertices;
  std::vector<GraphEdge> edges;
  BuildStats stats;

  std::int64_t v_count() const { return static_cast<std::int64_t>(vertices.size()) - 1; }

  // Incident edge indices per vertex; self-loops appear twice.
  std::vector<std::vector<std::int32_t>> adjacency() const {
    std::vector<std::vector<std::int32_t>> adj(vertices.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adj[edges[i].u].push_back(static_cast<std::int32_t>(i));
      adj[edges[i].v].push_back(static_cast<std::int32_t>(i));
    }
    return adj;
  }
};

struct GraphCounts {
  std::int64_t nu = 0;
  std::int64_t eta = 0;
  std::int64_t loops = 0;
  std::int64_t edge_count = 0;
  std::int64_t component_count = 0;
  std::int64_t vertex_count = 0;  // |V|, anchor excluded
};

namespace detail {

inline std::int64_t choose2(std::int64_t k) { return k >= 2 ? k * (k - 1) / 2 : 0; }

// Sorted union of {i*n} and {j*m} on [0, mn].
inline std::vector<std::int64_t> breakpoints(const ModePair& mode) {
  const std::int64_t mn = mode.m * mode.n;
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(mode.m + mode.n));
  std::int64_t i = 0;
  std::int64_t j = 0;
  while (i <= mode.m || j <= mode.n) {
    const std::int64_t a = i <= mode.m ? i * mode.n : mn + 1;
    const std::int64_t b = j <= mode.n ? j * mode.m : mn + 1;
    if (a < b) {
      out.push_back(a);
      ++i;
    } else if (b < a) {
      out.push_back(b);
      ++j;
    } else {
      out.push_back(a);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace detail

// Vertex id of a grid point, 0 when the point is not in V.
// m-lattice points (i n, j n), 0<j<i<m, come first, then n-lattice points.
inline std::int32_t vertex_id(const ModePair& mode, GridPoint p) {
  const std::int64_t m = mode.m;
  const std::int64_t n = mode.n;
  if (p.ty <= 0 || p.ty >= p.tx || p.tx >= m * n) return 0;
  if (p.tx % n == 0 && p.ty % n == 0) {
    const std::int64_t i = p.tx / n;
    const std::int64_t j = p.ty / n;
    return static_cast<std::int32_t>(1 + detail::choose2(i - 1) + (j - 1));
  }
  if (p.tx % m == 0 && p.ty % m == 0) {
    const std::int64_t i = p.tx / m;
    const std::int64_t j = p.ty / m;
    return static_cast<std::int32_t>(1 + detail::choose2(m - 1) + detail::choose2(i - 1) + (j - 1));
  }
  return 0;
}

inline std::int64_t v_point_count(const ModePair& mode) {
  return detail::choose2(mode.m - 1) + detail::choose2(mode.n - 1);
}

// V_{m,n} in vertex-id order.
inline std::vector<GridPoint> v_points(const ModePair& mode) {
  require_nontiling(mode);
  std::vector<GridPoint> out;
  out.reserve(static_cast<std::size_t>(v_point_count(mode)));
  for (std::int64_t i = 2; i < mode.m; ++i) {
    for (std::int64_t j = 1; j < i; ++j) out.push_back({i * mode.n, j * mode.n});
  }
  for (std::int64_t i = 2; i < mode.n; ++i) {
    for (std::int64_t j = 1; j < i; ++j) out.push_back({i * mode.m, j * mode.m});
  }
  return out;
}

inline std::int64_t cell_index(std::int64_t a, std::int64_t b) { return a * (a + 1) / 2 + b; }

// Cell grid of a non-tiling mode. Cells are addressed by (a, b), b <= a.
class CellGrid {
 public:
  explicit CellGrid(const ModePair& mode) : mode_(mode) {
    require_nontiling(mode);
    breaks_ = detail::breakpoints(mode);
    // sin(m c) and sin(n c) at interval midpoints c; x and y share the grid.
    const std::int64_t den = 2 * mode.m * mode.n;
    sin_m_.reserve(breaks_.size());
    sin_n_.reserve(breaks_.size());
    for (std::size_t a = 0; a + 1 < breaks_.size(); ++a) {
      const std::int64_t mid = breaks_[a] + breaks_[a + 1];
      const std::int64_t rm = detail::turn_residue(mode.m, mid, den);
      const std::int64_t rn = detail::turn_residue(mode.n, mid, den);
      sin_m_.push_back(detail::sin_pi_fraction<double>(rm, den));
      sin_n_.push_back(detail::sin_pi_fraction<double>(rn, den));
      // (-1)^floor(mid / 2n) and (-1)^floor(mid / 2m); never zero at a midpoint.
      mid_sign_m_.push_back(static_cast<signed char>(detail::sin_sign_reduced(rm, den)));
      mid_sign_n_.push_back(static_cast<signed char>(detail::sin_sign_reduced(rn, den)));
    }
    // Breakpoint kinds: 1 for i*n, 2 for j*m, 0 for the ends 0 and mn.
    const std::int64_t mn = mode.m * mode.n;
    for (const std::int64_t t : breaks_) {
      if (t == 0 || t == mn) {
        kind_.push_back(0);
        lattice_.push_back(0);
      } else if (t % mode.n == 0) {
        kind_.push_back(1);
        lattice_.push_back(t / mode.n);
      } else {
        kind_.push_back(2);
        lattice_.push_back(t / mode.m);
      }
    }
  }

  const ModePair& mode() const { return mode_; }
  const std::vector<std::int64_t>& breakpoints() const { return breaks_; }
  std::int32_t intervals() const { return static_cast<std::int32_t>(breaks_.size()) - 1; }
  std::int64_t cell_count() const {
    const std::int64_t k = intervals();
    return k * (k + 1) / 2;
  }

  Cell cell(std::int32_t a, std::int32_t b) const {
    const std::int64_t mn = mode_.m * mode_.n;
    Cell c;
    c.a = a;
    c.b = b;
    c.x0 = breaks_[a];
    c.x1 = breaks_[a + 1];
    c.y0 = breaks_[b];
    c.y1 = breaks_[b + 1];
    c.shape = a == b ? CellShape::diagonal_triangle : CellShape::rectangle;
    c.touches_bottom = c.y0 == 0;
    c.touches_right = c.x1 == mn;

    if (c.shape == CellShape::rectangle) {
      // Term signs are constant on the cell; read them at the center.
      c.shaded = mid_sign_m_[a] * mid_sign_n_[b] == mid_sign_n_[a] * mid_sign_m_[b];
      c.corner_vertex = {corner_id(a, b), corner_id(a + 1, b), corner_id(a + 1, b + 1),
                         corner_id(a, b + 1)};
    } else {
      // Sample at thirds, strictly inside {y < x}; denominator 3mn.
      const TermSigns ts =
          term_signs(mode_, RationalPoint{c.x0 + 2 * c.x1, 2 * c.x0 + c.x1, 3 * mn});
      c.shaded = ts.first == ts.second;
      c.corner_vertex[1] = corner_id(a + 1, b);
    }
    return c;
  }

  // Vertex id of the grid point (breaks[px], breaks[py]).
  std::int32_t corner_id(std::int32_t px, std::int32_t py) const {
    if (py >= px || kind_[px] == 0 || kind_[px] != kind_[py]) return 0;
    const std::int64_t i = lattice_[px];
    const std::int64_t j = lattice_[py];
    const std::int64_t base = kind_[px] == 1 ? 1 : 1 + detail::choose2(mode_.m - 1);
    return static_cast<std::int32_t>(base + detail::choose2(i - 1) + (j - 1));
  }

  // phi at the center of rectangle (a, b). Uses the midpoint tables and
  // falls back to eval_phi when the double result is too close to zero.
  PhiValue center_phi(std::int32_t a, std::int32_t b) const {
    const double t1 = sin_m_[a] * sin_n_[b];
    const double t2 = sin_n_[a] * sin_m_[b];
    const double v = t1 - t2;
    constexpr double kRelBound = 64.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(v) > kRelBound * (std::abs(t1) + std::abs(t2))) {
      return PhiValue{v, v > 0 ? 1 : -1, SignCertificate::double_precision};
    }
    const std::int64_t den = 2 * mode_.m * mode_.n;
    return eval_phi(mode_, {breaks_[a] + breaks_[a + 1], breaks_[b] + breaks_[b + 1], den});
  }

 private:
  ModePair mode_;
  std::vector<std::int64_t> breaks_;
  std::vector<double> sin_m_;
  std::vector<double> sin_n_;
  std::vector<signed char> mid_sign_m_;
  std::vector<signed char> mid_sign_n_;
  std::vector<unsigned char> kind_;
  std::vector<std::int64_t> lattice_;
};

// All cells in scan order: a ascending, then b ascending.
inline std::vector<Cell> build_cells(const ModePair& mode) {
  const CellGrid grid(mode);
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (std::int32_t a = 0; a < grid.intervals(); ++a) {
    for (std::int32_t b = 0; b <= a; ++b) out.push_back(grid.cell(a, b));
  }
  return out;
}

namespace detail {

// Sign of phi on a grid line, where one product term vanishes exactly.
inline int grid_line_sign(const ModePair& mode, const RationalPoint& p) {
  const TermSigns ts = term_signs(mode, p);
  if (ts.first != 0 && ts.second != 0) {
    throw invariant_violation("grid_line_sign called off the grid lines");
  }
  return ts.first - ts.second;
}

}  // namespace detail

// Nodal edges inside one cell. Unshaded cells carry no nodal line.
// `grid` supplies the eigenfunction evaluator for four-corner cells; when it
// is null, the center is evaluated directly with eval_phi.
inline CellEdges edges_for_cell(const Cell& cell, const ModePair& mode, BuildStats* stats = nullptr,
                                const CellGrid* grid = nullptr) {
  CellEdges out;
  if (!cell.shaded) return out;
  const std::int64_t idx = cell_index(cell.a, cell.b);
  const auto& cv = cell.corner_vertex;
  const int count = cell.v_corner_count();
  auto bail = [&](const char* what) {
    throw invariant_violation(std::string(what) + " in cell (" + std::to_string(cell.a) + "," +
                              std::to_string(cell.b) + ") of " + to_string(mode));
  };
  auto first_two = [&]() {
    std::array<std::int32_t, 2> vs{};
    int k = 0;
    for (auto v : cv) {
      if (v != 0 && k < 2) vs[k++] = v;
    }
    return vs;
  };

  if (cell.shape == CellShape::diagonal_triangle) {
    if (cv[1] != 0) out.add(cv[1], kAnchor, idx);
    return out;
  }

  if (cell.boundary_adjacent()) {
    switch (count) {
      case 0:
        if (stats) ++stats->empty_shaded_boundary;
        break;
      case 1: out.add(first_two()[0], kAnchor, idx); break;
      case 2: {
        const auto vs = first_two();
        out.add(vs[0], vs[1], idx);
        break;
      }
      default: bail("boundary rectangle with more than two V corners");
    }
    return out;
  }

  switch (count) {
    case 0:
      if (stats) ++stats->empty_shaded_interior;
      return out;
    case 2: {
      const auto vs = first_two();
      out.add(vs[0], vs[1], idx);
      return out;
    }
    case 4: break;
    default: bail("interior rectangle with an odd number of V corners");
  }

  // Four V corners: phi is nonzero at the center, and the two nodal lines
  // run along the pair of opposite sides where phi has the other sign.
  if (stats) ++stats->four_corner;
  const std::int64_t den = 2 * mode.m * mode.n;
  const PhiValue center = grid ? grid->center_phi(cell.a, cell.b)
                               : eval_phi(mode, {cell.x0 + cell.x1, cell.y0 + cell.y1, den});
  if (center.certificate == SignCertificate::extended_precision && stats) {
    ++stats->extended_precision;
  }
  if (center.sign == 0) bail("phi vanishes at the center of a four-corner cell");
  // Side midpoints sit on grid lines: one term vanishes there, so the sign
  // of phi is exact.
  const int left = detail::grid_line_sign(mode, {2 * cell.x0, cell.y0 + cell.y1, den});
  const int right = detail::grid_line_sign(mode, {2 * cell.x1, cell.y0 + cell.y1, den});
  const int bottom = detail::grid_line_sign(mode, {cell.x0 + cell.x1, 2 * cell.y0, den});
  const int top = detail::grid_line_sign(mode, {cell.x0 + cell.x1, 2 * cell.y1, den});
  const bool sides_opposite = left == -center.sign && right == -center.sign;
  const bool caps_opposite = bottom == -center.sign && top == -center.sign;
  if (sides_opposite && !caps_opposite && bottom == center.sign && top == center.sign) {
    out.add(cv[0], cv[3], idx);  // along x = x0
    out.add(cv[1], cv[2], idx);  // along x = x1
  } else if (caps_opposite && !sides_opposite && left == center.sign && right == center.sign) {
    out.add(cv[0], cv[1], idx);  // along y = y0
    out.add(cv[3], cv[2], idx);  // along y = y1
  } else {
    bail("four-corner cell without a pair of opposite-sign sides");
  }
  return out;
}

namespace detail {

inline void scan_columns(const CellGrid& grid, std::int32_t a_begin, std::int32_t a_end,
                         std::vector<GraphEdge>& edges, BuildStats& stats) {
  for (std::int32_t a = a_begin; a < a_end; ++a) {
    for (std::int32_t b = 0; b <= a; ++b) {
      const Cell c = grid.cell(a, b);
      ++stats.cells;
      if (!c.shaded) continue;
      ++stats.shaded;
      const CellEdges ce = edges_for_cell(c, grid.mode(), &stats, &grid);
      for (int i = 0; i < ce.count; ++i) edges.push_back(ce.edges[i]);
    }
  }
}

}  // namespace detail

// G_{m,n}: union of the cell edges over all shaded cells, in cell scan order.
// Column ranges can be scanned by several workers; results are merged in
// column order, so the edge list does not depend on the worker count.
inline NodalGraph build_graph(const ModePair& mode, unsigned workers = 1) {
  const CellGrid grid(mode);
  NodalGraph g;
  g.mode = mode;
  g.vertices.reserve(static_cast<std::size_t>(v_point_count(mode) + 1));
  g.vertices.push_back({0, 0});
  for (const auto& p : v_points(mode)) g.vertices.push_back(p);

  const std::int32_t k = grid.intervals();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(k)));
  if (workers == 1) {
    detail::scan_columns(grid, 0, k, g.edges, g.stats);
    return g;
  }

  // Column a holds a+1 cells; split into ranges of roughly equal area.
  std::vector<std::int32_t> cuts{0};
  const double total = static_cast<double>(k) * (k + 1) / 2.0;
  for (unsigned w = 1; w < workers; ++w) {
    const double target = total * w / workers;
    auto a = static_cast<std::int32_t>(std::sqrt(2.0 * target));
    cuts.push_back(std::clamp(a, cuts.back(), k));
  }
  cuts.push_back(k);

  std::vector<std::vector<GraphEdge>> parts(workers);
  std::vector<BuildStats> part_stats(workers);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          detail::scan_columns(grid, cuts[w], cuts[w + 1], parts[w], part_stats[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (unsigned w = 0; w < workers; ++w) {
    g.edges.insert(g.edges.end(), parts[w].begin(), parts[w].end());
    g.stats += part_stats[w];
  }
  return g;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t size) : parent_(size), rank_(size, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

// nu = E - |V| + c counts faces of the graph drawn on the sphere obtained by
// collapsing the boundary to the anchor. Loops are the components other
// than the anchor's; eta is twice the anchor component's cycle rank.
inline GraphCounts counts_from_graph(const NodalGraph& g) {
  const std::size_t nv = g.vertices.size();
  UnionFind uf(nv);
  std::vector<int> degree(nv, 0);
  std::int64_t components = static_cast<std::int64_t>(nv);
  for (const auto& e : g.edges) {
    ++degree[e.u];
    ++degree[e.v];
    if (uf.unite(e.u, e.v)) --components;
  }
  // No crossings: every point of V lies on exactly one nodal line.
  for (std::size_t v = 1; v < nv; ++v) {
    if (degree[v] != 2) {
      throw invariant_violation("vertex " + std::to_string(v) + " of G" + to_string(g.mode) +
                                " has degree " + std::to_string(degree[v]));
    }
  }
  const std::size_t anchor_root = uf.find(kAnchor);
  std::int64_t anchor_vertices = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (uf.find(v) == anchor_root) ++anchor_vertices;
  }
  std::int64_t anchor_edges = 0;
  for (const auto& e : g.edges) {
    if (uf.find(e.u) == anchor_root) ++anchor_edges;
  }

  GraphCounts c;
  c.edge_count = static_cast<std::int64_t>(g.edges.size());
  c.vertex_count = g.v_count();
  c.component_count = components;
  c.loops = components - 1;
  c.eta = 2 * (anchor_edges - anchor_vertices + 1);
  c.nu = c.edge_count - c.vertex_count + c.component_count;
  return c;
}

// Full counting algorithm: reduce, build the graph of the reduced pair,
// count, and scale nu by the number of tiles.
inline NodalSummary graph_nodal_count(const ModePair& mode, unsigned workers = 1) {
  const Reduction r = reduce(mode);
  const GraphCounts c = counts_from_graph(build_graph(r.reduced, workers));
  NodalSummary s;
  s.mode = mode;
  s.reduced = r.reduced;
  s.tiles = r.tiles;
  s.eta = c.eta;
  s.loops = c.loops;
  s.nu = r.tiles * c.nu;
  s.method = Method::graph;
  return s;
}

}  // namespace trinodal
