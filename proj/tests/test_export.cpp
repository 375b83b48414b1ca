#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qes/export.hpp"

using namespace qes;
using nlohmann::json;

TEST_CASE("complex arguments") {
  CHECK(parse_complex("0.75,1") == Complex(0.75, 1.0));
  CHECK(parse_complex("-2.5") == Complex(-2.5, 0.0));
  CHECK(parse_complex("1e-3, -4") == Complex(1e-3, -4.0));
  for (const std::string bad : {"", ",", "1,", "a,b", "1,2,3", "1;2", "nan"})
    CHECK_THROWS_AS(parse_complex(bad), InvalidArgument);
}

TEST_CASE("trace check") {
  const SexticProblem prob(4);
  const Complex b(0.3, -0.7);
  // Trace of the matrix: b times the sum of 4i + 1 over i = 0..m.
  const auto plain = trace_check(4, b, false, eigenvalues(prob, b));
  CHECK(std::abs(plain.trace - 45.0 * b) < 1e-14);
  CHECK(plain.relative_error < 1e-13);
  const auto scaled = trace_check(4, b, true, scaled_eigenvalues(prob, b));
  CHECK(std::abs(scaled.trace - 45.0 * b * 2.0 / 8.0) < 1e-14);
  CHECK(scaled.relative_error < 1e-13);
}

TEST_CASE("track requests") {
  auto req = parse_track_request(
      R"({"m": 2, "waypoints": [[1, 0], [1, 0.5], [1, 0.5], [1, 0]],
          "segments": ["line", {"type": "arc", "center": [1, 1]}, "line"],
          "options": {"clearance": 0.01, "max_step": 0.05}})");
  CHECK(req.m == 2);
  CHECK(req.options.clearance == 0.01);
  CHECK(req.options.max_step == 0.05);
  CHECK(req.path.is_closed());
  CHECK(req.path.winding_number(Complex(1.0, 1.0)) == 1);
  CHECK(std::abs(req.path.length() - (1.0 + std::numbers::pi)) < 1e-12);

  req = parse_track_request(
      R"({"m": 2, "waypoints": [[1, 0], [1, 0.5], [1, 0.5], [1, 0]],
          "segments": ["line", {"type": "arc", "center": [1, 1], "clockwise": true}, "line"]})");
  CHECK(req.path.winding_number(Complex(1.0, 1.0)) == -1);

  // A quarter turn between distinct points on the circle.
  req = parse_track_request(R"({"m": 1, "waypoints": [[1, 0], [0, 1]],
                                 "segments": [{"type": "arc", "center": [0, 0]}]})");
  CHECK(std::abs(req.path.length() - std::numbers::pi / 2) < 1e-12);
  CHECK(std::abs(req.path.at(std::numbers::pi / 4) - std::polar(1.0, std::numbers::pi / 4)) < 1e-12);

  req = parse_track_request(R"({"m": 1, "waypoints": [[0, 0], [1, 0], [1, 1]]})");
  CHECK(std::abs(req.path.length() - 2.0) < 1e-15);
  CHECK_THROWS_AS(parse_track_request(R"({"m": 1, "waypoints": [[0, 0], [1, 0]], "segments": ["line", "line"]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_track_request(R"({"m": 1, "waypoints": [[0, 0], ["a", 0]]})"), InvalidArgument);
  CHECK_THROWS_AS(parse_track_request(R"({"m": 1.5, "waypoints": [[0, 0], [1, 0]]})"), InvalidArgument);
  CHECK_THROWS_AS(parse_track_request(R"({"m": 1, "waypoints": [[0, 0], [1, 0]], "options": {"clearance": -1}})"),
                  InvalidArgument);
}

TEST_CASE("crossing and braid serialization") {
  const auto cs = crossing_set(3);
  const auto j = json::parse(crossings_json(cs));
  CHECK(j["count"] == 12);
  CHECK(j["discriminant_degree"] == 12);
  CHECK(j["row_sizes"] == std::vector<int>{3, 2, 1});
  CHECK(j["rows_match"] == true);
  // Same order as the CSV.
  const std::string csv = crossings_csv(std::span<const CrossingSet>(&cs, 1));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  for (const auto& p : j["points"]) {
    std::getline(in, line);
    char buf[128];
    std::snprintf(buf, sizeof buf, "3,%.17g,%.17g,%d,%d,%d", p["re_b"].get<double>(), p["im_b"].get<double>(),
                  p["row"].get<int>(), p["position"].get<int>(), p["multiplicity"].get<int>());
    CHECK(line == buf);
  }

  const auto braid = track_path(2, line_path(Complex(0.2, 0.0), Complex(0.4, 0.0)));
  const auto lines = braid_ndjson(braid);
  REQUIRE(lines.size() == braid.steps.size() + 1);
  const auto whole = json::parse(braid_json(braid));
  for (std::size_t k = 0; k < braid.steps.size(); ++k) CHECK(json::parse(lines[k]) == whole["steps"][k]);
  const auto last = json::parse(lines.back());
  CHECK(last["permutation"] == whole["permutation"]);
  CHECK(last["m"] == 2);
}

TEST_CASE("svg plots") {
  const std::vector<ScatterLayer> layers{{{Complex(0, 0), Complex(1, 1)}, "#000", 2.0, "a<b"}};
  const std::string svg = scatter_svg(layers, "title & more");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("title &amp; more") != std::string::npos);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  const std::vector<std::vector<Complex>> curves{{Complex(0, 0), Complex(1, 0), Complex(1, 1)}};
  const std::string c = curves_svg(curves, layers, "curves");
  CHECK(c.find("<polyline") != std::string::npos);
  CHECK(c.find("</svg>") != std::string::npos);
}
