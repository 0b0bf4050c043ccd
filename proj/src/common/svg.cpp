#include "acdc/common/svg.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"

namespace acdc {

namespace {
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
}  // namespace

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, std::string_view fill,
                       std::string_view stroke) {
  body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << xml_escape(fill) << "\" stroke=\""
        << xml_escape(stroke) << "\"/>\n";
}

void SvgDocument::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                       double width) {
  body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
        << "\" y2=\"" << num(y2) << "\" stroke=\"" << xml_escape(stroke)
        << "\" stroke-width=\"" << num(width) << "\"/>\n";
}

void SvgDocument::circle(double cx, double cy, double r, std::string_view fill) {
  body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
        << "\" fill=\"" << xml_escape(fill) << "\"/>\n";
}

void SvgDocument::text(double x, double y, std::string_view content, double size,
                       std::string_view anchor) {
  body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
        << "\" font-family=\"sans-serif\" text-anchor=\"" << xml_escape(anchor) << "\">"
        << xml_escape(content) << "</text>\n";
}

void SvgDocument::polyline(const std::string& points, std::string_view stroke, double width) {
  body_ << "<polyline points=\"" << xml_escape(points) << "\" fill=\"none\" stroke=\""
        << xml_escape(stroke) << "\" stroke-width=\"" << num(width) << "\"/>\n";
}

std::string SvgDocument::str() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
      << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_)
      << "\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

void SvgDocument::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << str();
}

std::string_view level_color(int level) {
  static constexpr std::array<std::string_view, 5> kColors = {"#1a9850", "#91cf60", "#fee08b",
                                                              "#fc8d59", "#d73027"};
  if (level < 1 || level > 5) return "#bdbdbd";
  return kColors[static_cast<std::size_t>(level - 1)];
}

std::string_view series_color(std::size_t i) {
  static constexpr std::array<std::string_view, 8> kColors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return kColors[i % kColors.size()];
}

}  // namespace acdc
