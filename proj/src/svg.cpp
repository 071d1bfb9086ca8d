// Copyright 2026 The lflh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lflh/svg.hpp"

#include <fstream>

#include "lflh/envgen.hpp"

namespace lflh {

SvgWriter::SvgWriter(double width, double height)
    : width_(width), height_(height) {}

void SvgWriter::rect(double x, double y, double w, double h,
                     const std::string& fill, const std::string& stroke) {
  body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
        << "\" height=\"" << h << "\" fill=\"" << fill << "\" stroke=\""
        << stroke << "\"/>\n";
}

void SvgWriter::circle(double cx, double cy, double r,
                       const std::string& fill) {
  body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
        << "\" fill=\"" << fill << "\"/>\n";
}

void SvgWriter::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double width) {
  body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
        << "\" y2=\"" << y2 << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << width << "\"/>\n";
}

void SvgWriter::polyline(const std::vector<Vec2>& pts,
                         const std::string& stroke, double width) {
  body_ << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"" << width << "\" points=\"";
  for (const auto& p : pts) body_ << p.x << "," << p.y << " ";
  body_ << "\"/>\n";
}

void SvgWriter::text(double x, double y, const std::string& content,
                     double size, const std::string& fill) {
  body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
        << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << content
        << "</text>\n";
}

void SvgWriter::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n"
      << body_.str() << "</svg>\n";
}

void render_task_svg(const std::string& path, const NavTask& task) {
  const double scale = 20.0;  // px per cell
  const double w = task.grid.width * scale;
  const double h = task.grid.height * scale;
  SvgWriter svg(w, h);
  svg.rect(0, 0, w, h, "#ffffff");
  // y grows upward in the world; flip for svg
  const auto sx = [&](double wx) {
    return (wx - task.grid.origin.x) / task.grid.resolution * scale;
  };
  const auto sy = [&](double wy) {
    return h - (wy - task.grid.origin.y) / task.grid.resolution * scale;
  };
  for (int cy = 0; cy < task.grid.height; ++cy)
    for (int cx = 0; cx < task.grid.width; ++cx)
      if (task.grid.occupied(cx, cy))
        svg.rect(cx * scale, h - (cy + 1) * scale, scale, scale, "#404040");
  if (!task.global_path.empty()) {
    std::vector<Vec2> pts;
    for (const auto& p : task.global_path)
      pts.push_back({sx(p.x), sy(p.y)});
    svg.polyline(pts, "#2060c0", 2.0);
  }
  svg.circle(sx(task.start.x), sy(task.start.y), 0.4 * scale, "#20a020");
  svg.circle(sx(task.goal.x), sy(task.goal.y), 0.4 * scale, "#c02020");
  svg.save(path);
}

}  // namespace lflh
