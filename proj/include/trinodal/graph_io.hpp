#pragma once

// Graph export (DOT, JSON) and schematic SVG drawings of the cell
// decomposition. Outputs are plain strings and depend only on the mode.

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/nodal_graph.hpp"

namespace trinodal {

enum class GraphFormat { dot, json };

inline GraphFormat parse_graph_format(const std::string& s) {
  if (s == "dot") return GraphFormat::dot;
  if (s == "json") return GraphFormat::json;
  throw invalid_input("unknown graph format '" + s + "' (expected dot or json)");
}

inline std::string export_graph(const NodalGraph& g, GraphFormat format) {
  const std::int64_t den = g.mode.m * g.mode.n;
  if (format == GraphFormat::json) {
    nlohmann::ordered_json doc;
    doc["m"] = g.mode.m;
    doc["n"] = g.mode.n;
    doc["denominator"] = den;
    auto nodes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      nlohmann::ordered_json node;
      node["id"] = i;
      if (i == kAnchor) {
        node["tx"] = nullptr;
        node["ty"] = nullptr;
      } else {
        node["tx"] = g.vertices[i].tx;
        node["ty"] = g.vertices[i].ty;
      }
      node["anchor"] = i == kAnchor;
      nodes.push_back(std::move(node));
    }
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
      nlohmann::ordered_json edge;
      edge["u"] = e.u;
      edge["v"] = e.v;
      edge["cell"] = e.cell;
      edges.push_back(std::move(edge));
    }
    doc["nodes"] = std::move(nodes);
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "graph \"phi_" << g.mode.m << "_" << g.mode.n << "\" {\n";
  out << "  graph [m=" << g.mode.m << ", n=" << g.mode.n << ", denominator=" << den << "];\n";
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (i == kAnchor) {
      out << "  v0 [anchor=true, label=\"boundary\", shape=box];\n";
    } else {
      out << "  v" << i << " [anchor=false, tx=" << g.vertices[i].tx << ", ty=" << g.vertices[i].ty
          << "];\n";
    }
  }
  for (const auto& e : g.edges) {
    out << "  v" << e.u << " -- v" << e.v << " [cell=" << e.cell << "];\n";
  }
  out << "}\n";
  return out.str();
}

// Affine map p -> A p + t in the plane.
struct Affine2 {
  double xx = 1, xy = 0, yx = 0, yy = 1;
  double tx = 0, ty = 0;

  std::array<double, 2> operator()(double x, double y) const {
    return {xx * x + xy * y + tx, yx * x + yy * y + ty};
  }
  // this after other
  Affine2 after(const Affine2& o) const {
    return {xx * o.xx + xy * o.yx, xx * o.xy + xy * o.yy, yx * o.xx + yy * o.yx,
            yx * o.xy + yy * o.yy, xx * o.tx + xy * o.ty + tx, yx * o.tx + yy * o.ty + ty};
  }
};

namespace detail {

// Images of the triangle {0 <= y <= x <= pi} under the reflection group
// generated by x=0, y=x and x=pi, kept when they land inside the triangle
// scaled by d, then shrunk back by 1/d.
inline std::vector<Affine2> gcd_tile_maps(std::int64_t d) {
  constexpr double pi = std::numbers::pi;
  std::vector<Affine2> out;
  const double cx = 2.0 * pi / 3.0;
  const double cy = pi / 3.0;
  const double inv = 1.0 / static_cast<double>(d);
  for (std::int64_t k = 0; k <= d; ++k) {
    for (std::int64_t l = 0; l <= d; ++l) {
      for (int swap = 0; swap < 2; ++swap) {
        for (int sx : {1, -1}) {
          for (int sy : {1, -1}) {
            Affine2 f;
            if (swap == 0) {
              f = {double(sx), 0, 0, double(sy), 2.0 * pi * double(k), 2.0 * pi * double(l)};
            } else {
              f = {0, double(sx), double(sy), 0, 2.0 * pi * double(k), 2.0 * pi * double(l)};
            }
            const auto c = f(cx, cy);
            const double big = pi * static_cast<double>(d);
            if (c[1] > 0.0 && c[1] < c[0] && c[0] < big) {
              out.push_back(Affine2{inv, 0, 0, inv, 0, 0}.after(f));
            }
          }
        }
      }
    }
  }
  if (out.size() != static_cast<std::size_t>(d * d)) {
    throw invariant_violation("reflection images do not tile the triangle");
  }
  return out;
}

// The two half-triangles of a parity step, in (U, W) = (x + y, x - y).
inline std::vector<Affine2> parity_tile_maps() {
  constexpr double pi = std::numbers::pi;
  return {Affine2{0.5, 0.5, 0.5, -0.5, 0.0, 0.0}, Affine2{-0.5, 0.5, -0.5, -0.5, pi, pi}};
}

inline std::string svg_number(double v) {
  if (std::abs(v) < 5e-7) v = 0.0;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 6);
  std::string s(buf.data(), res.ptr);
  // Trim trailing zeros for compactness; the value is unchanged.
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

}  // namespace detail

// Maps taking the reduced pattern (in radians) onto each tile of `mode`.
inline std::vector<Affine2> tile_maps(const ModePair& mode) {
  require_valid(mode);
  const Reduction r = reduce(mode);
  std::vector<Affine2> outer = detail::gcd_tile_maps(r.gcd);
  if (!r.parity_step) return outer;
  std::vector<Affine2> out;
  for (const auto& g : outer) {
    for (const auto& p : detail::parity_tile_maps()) out.push_back(g.after(p));
  }
  return out;
}

// Schematic drawing of the nodal pattern: grid lines, shaded cells, V
// points and one polyline per graph edge. Tiling modes show the reduced
// pattern in every tile.
inline std::string render_svg(const ModePair& mode) {
  require_valid(mode);
  constexpr double pi = std::numbers::pi;
  const Reduction red = reduce(mode);
  const ModePair rm = red.reduced;
  const CellGrid grid(rm);
  const std::int64_t den = rm.m * rm.n;
  const double unit = pi / static_cast<double>(den);
  auto num = [](double v) { return detail::svg_number(v); };
  auto pt = [&](double tx, double ty) { return num(tx * unit) + "," + num(ty * unit); };

  // Tiles are drawn shrunk by a common factor; widths are scaled back up.
  const auto maps = tile_maps(mode);
  const Affine2& f0 = maps.front();
  const double zoom = 1.0 / std::sqrt(std::abs(f0.xx * f0.yy - f0.xy * f0.yx));
  std::ostringstream body;
  // One tile in reduced coordinates.
  const auto& br = grid.breakpoints();
  body << "<g class=\"cells\" fill=\"#d0d0d0\" stroke=\"none\">\n";
  for (std::int32_t a = 0; a < grid.intervals(); ++a) {
    for (std::int32_t b = 0; b <= a; ++b) {
      const Cell c = grid.cell(a, b);
      if (!c.shaded) continue;
      if (c.shape == CellShape::diagonal_triangle) {
        body << "<polygon points=\"" << pt(c.x0, c.y0) << " " << pt(c.x1, c.y0) << " " << pt(c.x1, c.y1)
             << "\"/>\n";
      } else {
        body << "<rect x=\"" << num(c.x0 * unit) << "\" y=\"" << num(c.y0 * unit) << "\" width=\""
             << num((c.x1 - c.x0) * unit) << "\" height=\"" << num((c.y1 - c.y0) * unit) << "\"/>\n";
      }
    }
  }
  body << "</g>\n<g class=\"grid\" stroke=\"#a0a0a0\" stroke-width=\"" << num(0.002 * zoom)
       << "\">\n";
  for (std::size_t i = 1; i + 1 < br.size(); ++i) {
    const double t = static_cast<double>(br[i]);
    body << "<line x1=\"" << num(t * unit) << "\" y1=\"0\" x2=\"" << num(t * unit) << "\" y2=\""
         << num(t * unit) << "\"/>\n";
    body << "<line x1=\"" << num(t * unit) << "\" y1=\"" << num(t * unit) << "\" x2=\"" << num(pi)
         << "\" y2=\"" << num(t * unit) << "\"/>\n";
  }
  body << "</g>\n<g class=\"edges\" fill=\"none\" stroke=\"#c00000\" stroke-width=\"" << num(0.01 * zoom)
       << "\">\n";
  for (std::int32_t a = 0; a < grid.intervals(); ++a) {
    for (std::int32_t b = 0; b <= a; ++b) {
      const Cell c = grid.cell(a, b);
      const CellEdges ce = edges_for_cell(c, rm, nullptr, &grid);
      for (int e = 0; e < ce.count; ++e) {
        const GraphEdge& edge = ce.edges[e];
        auto corner_of = [&](std::int32_t v) {
          for (int i = 0; i < 4; ++i) {
            if (c.corner_vertex[i] == v) return i;
          }
          return -1;
        };
        const GridPoint p = c.corner(corner_of(edge.u));
        double bx = 0, by = 0, ex = 0, ey = 0;
        if (c.shape == CellShape::diagonal_triangle) {
          bx = (c.x0 + 2.0 * c.x1) / 3.0;
          by = (2.0 * c.y0 + c.y1) / 3.0;
          ex = ey = (c.x0 + c.x1) / 2.0;
        } else if (edge.v == kAnchor) {
          bx = (c.x0 + c.x1) / 2.0;
          by = (c.y0 + c.y1) / 2.0;
          if (c.touches_bottom) {
            ex = bx;
            ey = 0.0;
          } else {
            ex = static_cast<double>(den);
            ey = by;
          }
        } else {
          const GridPoint q = c.corner(corner_of(edge.v));
          ex = static_cast<double>(q.tx);
          ey = static_cast<double>(q.ty);
          bx = (c.x0 + c.x1) / 2.0;
          by = (c.y0 + c.y1) / 2.0;
          if (c.v_corner_count() == 4) {
            // Pull the bend toward the side the two corners share.
            bx = 0.5 * (bx + (p.tx + ex) / 2.0);
            by = 0.5 * (by + (p.ty + ey) / 2.0);
          }
        }
        body << "<polyline points=\"" << pt(double(p.tx), double(p.ty)) << " " << pt(bx, by) << " "
             << pt(ex, ey) << "\"/>\n";
      }
    }
  }
  const double r = std::min(0.02 * zoom, 0.25 * unit * static_cast<double>(rm.n));
  body << "</g>\n<g class=\"vertices\" fill=\"#000000\">\n";
  for (const auto& v : v_points(rm)) {
    body << "<circle cx=\"" << num(v.tx * unit) << "\" cy=\"" << num(v.ty * unit) << "\" r=\"" << num(r)
         << "\"/>\n";
  }
  body << "</g>\n";
  if (red.tiles > 1) {
    body << "<polygon class=\"tile\" fill=\"none\" stroke=\"#0050c0\" stroke-width=\"" << num(0.006 * zoom)
         << "\" stroke-dasharray=\"" << num(0.03 * zoom) << " " << num(0.02 * zoom) << "\" "
            "points=\"0,0 " << num(pi) << ",0 " << num(pi) << "," << num(pi)
         << "\"/>\n";
  }
  const std::string tile = body.str();

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(pi) << " " << num(pi)
      << "\" width=\"720\" height=\"720\">\n";
  out << "<title>phi(" << mode.m << "," << mode.n << ") reduced to (" << rm.m << "," << rm.n << "), "
      << red.tiles << " tile" << (red.tiles == 1 ? "" : "s") << "</title>\n";
  // Flip y so that the triangle sits with its right angle at (pi, 0).
  out << "<g transform=\"matrix(1 0 0 -1 0 " << num(pi) << ")\">\n";
  for (const Affine2& f : maps) {
    out << "<g class=\"tile-group\" transform=\"matrix(" << num(f.xx) << " " << num(f.yx) << " " << num(f.xy)
        << " " << num(f.yy) << " " << num(f.tx) << " " << num(f.ty) << ")\">\n"
        << tile << "</g>\n";
  }
  out << "<polygon class=\"outline\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.012\" "
         "points=\"0,0 " << num(pi) << ",0 " << num(pi) << "," << num(pi)
      << "\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace trinodal
