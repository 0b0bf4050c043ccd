#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>

namespace acdc {

// Tiny standalone SVG builder; output is deterministic for identical calls.
class SvgDocument {
 public:
  SvgDocument(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none");
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0);
  void circle(double cx, double cy, double r, std::string_view fill);
  void text(double x, double y, std::string_view content, double size = 10.0,
            std::string_view anchor = "start");
  void polyline(const std::string& points, std::string_view stroke, double width = 1.0);

  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

std::string xml_escape(std::string_view s);

// Sequential palette for performance levels 1..5 (5 = unstable).
std::string_view level_color(int level);
// Qualitative palette for series index.
std::string_view series_color(std::size_t i);

}  // namespace acdc
