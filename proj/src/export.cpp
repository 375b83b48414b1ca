#include "qes/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "json_steps.hpp"

namespace qes {

namespace {

using nlohmann::json;
using detail::complex_pair;

double parse_double(const std::string& text, const std::string& whole) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (text.empty() || end == begin || *end != '\0' || !std::isfinite(v))
    throw InvalidArgument("not a complex number \"re,im\": \"" + whole + "\"");
  return v;
}

Complex json_complex(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidArgument(std::string(what) + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Square-aspect map from the plane to SVG pixels.
struct Frame {
  double x0, y0, scale, pad, height, width;

  static Frame fit(const std::vector<Complex>& pts, int width, int height) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& z : pts) {
      x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
    }
    if (pts.empty()) x0 = y0 = -1.0, x1 = y1 = 1.0;
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    const double pad = 30.0;
    const double scale = std::min(width - 2 * pad, height - 2 * pad) / span;
    // Centre the data in both directions.
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double hx = 0.5 * (width - 2 * pad) / scale, hy = 0.5 * (height - 2 * pad) / scale;
    return {cx - hx, cy - hy, scale, pad, static_cast<double>(height), static_cast<double>(width)};
  }
  double px(Complex z) const { return pad + (z.real() - x0) * scale; }
  double py(Complex z) const { return height - pad - (z.imag() - y0) * scale; }
};

void svg_open(std::ostringstream& out, const Frame& f, int width, int height, const std::string& title) {
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<title>" << xml_escape(title) << "</title>\n";
  out << "<text x=\"" << f.pad << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(title)
      << "</text>\n";
  // Coordinate axes where they fall inside the frame.
  const Complex origin(0.0, 0.0);
  const double ox = f.px(origin), oy = f.py(origin);
  if (ox >= f.pad && ox <= width - f.pad)
    out << "<line x1=\"" << ox << "\" y1=\"" << f.pad << "\" x2=\"" << ox << "\" y2=\"" << height - f.pad
        << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  if (oy >= f.pad && oy <= height - f.pad)
    out << "<line x1=\"" << f.pad << "\" y1=\"" << oy << "\" x2=\"" << width - f.pad << "\" y2=\"" << oy
        << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
}

void svg_markers(std::ostringstream& out, const Frame& f, std::span<const ScatterLayer> layers) {
  double legend_y = 36.0;
  for (const auto& layer : layers) {
    out << "<g fill=\"" << xml_escape(layer.color) << "\">\n";
    for (const auto& z : layer.points)
      out << "<circle cx=\"" << f.px(z) << "\" cy=\"" << f.py(z) << "\" r=\"" << layer.radius << "\"/>\n";
    out << "</g>\n";
    if (!layer.label.empty()) {
      out << "<text x=\"" << f.width - f.pad << "\" y=\"" << legend_y
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << xml_escape(layer.color)
          << "\">" << xml_escape(layer.label) << "</text>\n";
      legend_y += 14.0;
    }
  }
}

}  // namespace

Complex parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_double(text, text), 0.0};
  return {parse_double(text.substr(0, comma), text), parse_double(text.substr(comma + 1), text)};
}

TraceCheck trace_check(int m, Complex b, bool scaled, const Spectrum& s) {
  TraceCheck t;
  const double factor = static_cast<double>(m + 1) * (2 * m + 1);
  t.trace = b * factor / (scaled ? static_cast<double>(m) : 1.0);
  double total = 0.0;
  for (const auto& z : s.eigenvalues) t.sum += z, total += std::abs(z);
  t.relative_error = std::abs(t.sum - t.trace) / std::max(1.0, total);
  return t;
}

std::string spectrum_json(int m, Complex b, bool scaled, const Spectrum& s) {
  json j;
  j["m"] = m;
  j["b"] = complex_pair(b);
  j["scaled"] = scaled;
  auto& e = j["eigenvalues"] = json::array();
  for (const auto& z : s.eigenvalues) e.push_back(complex_pair(z));
  j["min_gap"] = s.min_gap;
  const auto t = trace_check(m, b, scaled, s);
  j["trace_check"] = {{"trace", complex_pair(t.trace)}, {"sum", complex_pair(t.sum)},
                      {"relative_error", t.relative_error}};
  return j.dump();
}

std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream out;
  out << "index,re,im,residual,multiplicity\n";
  char buf[128];
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    const double re = s.eigenvalues[i].real(), im = s.eigenvalues[i].imag();
    // Signed zeros print as 0 so that outputs are stable.
    std::snprintf(buf, sizeof buf, "%zu,%.15g,%.15g,%.3e,%d\n", i + 1, re == 0.0 ? 0.0 : re, im == 0.0 ? 0.0 : im,
                  i < s.residuals.size() ? s.residuals[i] : 0.0, i < s.multiplicity.size() ? s.multiplicity[i] : 1);
    out << buf;
  }
  return out.str();
}

std::string crossings_json(const CrossingSet& cs) {
  json j;
  j["m"] = cs.m;
  const auto pts = ordered_points(cs);
  int count = 0;
  for (const auto& c : pts) count += c.multiplicity;
  j["count"] = count;
  j["discriminant_degree"] = cs.discriminant.degree();
  j["rows_match"] = cs.rows_match;
  auto& sizes = j["row_sizes"] = json::array();
  for (const auto& r : cs.rows) sizes.push_back(r.size());
  j["precision"] = cs.precision;
  j["warnings"] = cs.warnings;
  auto& arr = j["points"] = json::array();
  for (const auto& c : pts)
    arr.push_back({{"re_b", c.b.real()},
                   {"im_b", c.b.imag()},
                   {"row", c.row},
                   {"position", c.position},
                   {"multiplicity", c.multiplicity}});
  return j.dump();
}

std::vector<std::string> braid_ndjson(const Braid& braid) {
  std::vector<std::string> lines;
  lines.reserve(braid.steps.size() + 1);
  for (const auto& s : braid.steps) lines.push_back(detail::step_object(s).dump());
  json last;
  last["m"] = braid.m;
  last["permutation"] = braid.permutation;
  last["steps"] = braid.steps.size();
  lines.push_back(last.dump());
  return lines;
}

std::string scatter_svg(std::span<const ScatterLayer> layers, const std::string& title, int width, int height) {
  std::vector<Complex> all;
  for (const auto& l : layers) all.insert(all.end(), l.points.begin(), l.points.end());
  const Frame f = Frame::fit(all, width, height);
  std::ostringstream out;
  svg_open(out, f, width, height, title);
  svg_markers(out, f, layers);
  out << "</svg>\n";
  return out.str();
}

std::string curves_svg(std::span<const std::vector<Complex>> curves, std::span<const ScatterLayer> markers,
                       const std::string& title, int width, int height) {
  std::vector<Complex> all;
  for (const auto& c : curves) all.insert(all.end(), c.begin(), c.end());
  for (const auto& l : markers) all.insert(all.end(), l.points.begin(), l.points.end());
  const Frame f = Frame::fit(all, width, height);
  std::ostringstream out;
  svg_open(out, f, width, height, title);
  for (const auto& c : curves) {
    if (c.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke=\"#444444\" stroke-width=\"1\" points=\"";
    for (const auto& z : c) out << f.px(z) << ',' << f.py(z) << ' ';
    out << "\"/>\n";
  }
  svg_markers(out, f, markers);
  out << "</svg>\n";
  return out.str();
}

TrackRequest parse_track_request(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("track request: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("track request: expected a JSON object");
  TrackRequest req;
  if (!j.contains("m") || !j["m"].is_number_integer()) throw InvalidArgument("track request: integer m required");
  req.m = j["m"].get<int>();
  if (req.m < 1) throw InvalidArgument("track request: m must be at least 1");

  if (!j.contains("waypoints") || !j["waypoints"].is_array() || j["waypoints"].size() < 2)
    throw InvalidArgument("track request: at least two waypoints required");
  std::vector<Complex> w;
  for (const auto& p : j["waypoints"]) w.push_back(json_complex(p, "waypoint"));

  if (j.contains("options")) {
    const auto& o = j["options"];
    if (!o.is_object()) throw InvalidArgument("track request: options must be an object");
    if (o.contains("clearance")) {
      if (!o["clearance"].is_number() || o["clearance"].get<double>() < 0.0)
        throw InvalidArgument("track request: clearance must be a non-negative number");
      req.options.clearance = o["clearance"].get<double>();
    }
    if (o.contains("max_step")) {
      if (!o["max_step"].is_number() || !(o["max_step"].get<double>() > 0.0))
        throw InvalidArgument("track request: max_step must be positive");
      req.options.max_step = o["max_step"].get<double>();
    }
  }

  json segments = j.value("segments", json::array());
  if (!segments.is_array()) throw InvalidArgument("track request: segments must be an array");
  if (!segments.empty() && segments.size() != w.size() - 1)
    throw InvalidArgument("track request: need one segment per consecutive waypoint pair");
  std::vector<PathPiece> pieces;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const json seg = segments.empty() ? json("line") : segments[k];
    if (seg.is_string() && seg.get<std::string>() == "line") {
      pieces.push_back(LinePiece{w[k], w[k + 1]});
      continue;
    }
    if (!seg.is_object() || seg.value("type", "") != "arc")
      throw InvalidArgument("track request: segment must be \"line\" or {\"type\": \"arc\", ...}");
    const Complex c = json_complex(seg.value("center", json()), "arc center");
    const bool clockwise = seg.value("clockwise", false);
    const double r0 = std::abs(w[k] - c), r1 = std::abs(w[k + 1] - c);
    if (!(r0 > 0.0) || std::abs(r0 - r1) > 1e-9 * std::max(1.0, r0))
      throw InvalidArgument("track request: arc ends are not on one circle about its center");
    const double a0 = std::arg(w[k] - c);
    double sweep = std::arg(w[k + 1] - c) - a0;
    const double two_pi = 2.0 * std::numbers::pi;
    if (clockwise) {
      while (sweep >= 0.0) sweep -= two_pi;
    } else {
      while (sweep <= 0.0) sweep += two_pi;
    }
    pieces.push_back(ArcPiece{c, r0, a0, sweep});
  }
  try {
    req.path = PlanePath(std::move(pieces));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("track request: ") + e.what());
  }
  return req;
}

}  // namespace qes
