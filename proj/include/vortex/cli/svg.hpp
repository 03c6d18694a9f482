#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vortex::cli {

// Minimal self-contained SVG scatter/line plots: linear or log-10 y axis,
// auto ticks, legend. Deterministic text output.
class SvgPlot {
public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void set_log_y(bool log_y) { log_y_ = log_y; }

  void add_line(const std::string& name, const std::vector<double>& xs,
                const std::vector<double>& ys);
  void add_points(const std::string& name, const std::vector<double>& xs,
                  const std::vector<double>& ys);

  void write(const std::filesystem::path& path) const;

private:
  struct Series {
    std::string name;
    std::vector<double> xs, ys;
    bool line = false;
    std::string color;
  };

  std::string next_color();

  std::string title_, xlabel_, ylabel_;
  bool log_y_ = false;
  std::vector<Series> series_;
  int color_index_ = 0;
};

} // namespace vortex::cli
