#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <numbers>
#include <regex>
#include <set>
#include <string>

#include "trinodal/graph_io.hpp"

using namespace trinodal;

namespace {

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(
      std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST(Export, DotNineFour) {
  const std::string dot = export_graph(build_graph({9, 4}), GraphFormat::dot);
  EXPECT_EQ(count_matches(dot, R"(\n  v\d+ \[anchor=)"), 32u);
  EXPECT_EQ(count_matches(dot, R"(\n  v\d+ -- v\d+ )"), 36u);
  EXPECT_EQ(count_matches(dot, "anchor=true"), 1u);
}

TEST(Export, DotShowsParallelEdgesTwice) {
  const std::string dot = export_graph(build_graph({3, 2}), GraphFormat::dot);
  EXPECT_EQ(count_matches(dot, R"(v1 -- v0 \[cell=\d+\])"), 2u);
}

TEST(Export, JsonGroundState) {
  const auto doc = nlohmann::json::parse(export_graph(build_graph({2, 1}), GraphFormat::json));
  ASSERT_EQ(doc["nodes"].size(), 1u);
  EXPECT_TRUE(doc["nodes"][0]["anchor"].get<bool>());
  EXPECT_TRUE(doc["edges"].empty());
}

TEST(Export, JsonRoundTrip) {
  const NodalGraph g = build_graph({9, 4});
  const auto doc = nlohmann::json::parse(export_graph(g, GraphFormat::json));
  EXPECT_EQ(doc["denominator"].get<std::int64_t>(), 36);
  ASSERT_EQ(doc["nodes"].size(), g.vertices.size());
  for (std::size_t i = 1; i < g.vertices.size(); ++i) {
    EXPECT_EQ(doc["nodes"][i]["tx"].get<std::int64_t>(), g.vertices[i].tx);
    EXPECT_EQ(doc["nodes"][i]["ty"].get<std::int64_t>(), g.vertices[i].ty);
  }
  ASSERT_EQ(doc["edges"].size(), g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    EXPECT_EQ(doc["edges"][i]["u"].get<std::int32_t>(), g.edges[i].u);
    EXPECT_EQ(doc["edges"][i]["v"].get<std::int32_t>(), g.edges[i].v);
    EXPECT_EQ(doc["edges"][i]["cell"].get<std::int64_t>(), g.edges[i].cell);
  }
}

TEST(Export, Deterministic) {
  EXPECT_EQ(export_graph(build_graph({30, 7}), GraphFormat::dot),
            export_graph(build_graph({30, 7}, 3), GraphFormat::dot));
}

TEST(Export, UnknownFormat) { EXPECT_THROW(parse_graph_format("gml"), invalid_input); }

TEST(TileMaps, CoverTheTriangleOnce) {
  for (const ModePair mode : {ModePair{9, 5}, ModePair{21, 6}, ModePair{6, 2}, ModePair{20, 4}}) {
    const auto maps = tile_maps(mode);
    EXPECT_EQ(static_cast<std::int64_t>(maps.size()), reduce(mode).tiles) << to_string(mode);
    std::set<std::pair<long, long>> centroids;
    for (const auto& f : maps) {
      const auto c = f(2.0 * std::numbers::pi / 3.0, std::numbers::pi / 3.0);
      EXPECT_GT(c[1], 0.0);
      EXPECT_LT(c[1], c[0]);
      EXPECT_LT(c[0], std::numbers::pi);
      centroids.insert({std::lround(c[0] * 1e6), std::lround(c[1] * 1e6)});
      // Each tile has area (pi^2 / 2) / tiles.
      EXPECT_NEAR(std::abs(f.xx * f.yy - f.xy * f.yx), 1.0 / static_cast<double>(maps.size()), 1e-12);
    }
    EXPECT_EQ(centroids.size(), maps.size());
  }
}

TEST(Svg, ViewBoxAndFixtureContent) {
  const std::string svg = render_svg({9, 4});
  EXPECT_NE(svg.find("viewBox=\"0 0 3.141593 3.141593\""), std::string::npos);
  EXPECT_EQ(count_matches(svg, "<circle "), 31u);
  EXPECT_EQ(count_matches(svg, "<polyline "), 36u);
  EXPECT_EQ(count_matches(svg, "class=\"tile-group\""), 1u);
}

TEST(Svg, GroundStateHasNoNodalLines) {
  const std::string svg = render_svg({2, 1});
  EXPECT_EQ(count_matches(svg, "<polyline "), 0u);
  EXPECT_EQ(count_matches(svg, "<circle "), 0u);
}

TEST(Svg, TilingModesDrawEveryTile) {
  EXPECT_EQ(count_matches(render_svg({9, 5}), "class=\"tile-group\""), 2u);
  EXPECT_EQ(count_matches(render_svg({21, 6}), "class=\"tile-group\""), 9u);
}

TEST(Svg, Deterministic) { EXPECT_EQ(render_svg({21, 6}), render_svg({21, 6})); }
