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

#ifndef LFLH_SVG_HPP_
#define LFLH_SVG_HPP_

#include <sstream>
#include <string>
#include <vector>

#include "lflh/geometry.hpp"

namespace lflh {

struct NavTask;

/// Minimal standalone SVG writer for environment renders and report plots.
class SvgWriter {
 public:
  SvgWriter(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  void circle(double cx, double cy, double r, const std::string& fill);
  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0);
  void polyline(const std::vector<Vec2>& pts, const std::string& stroke,
                double width = 1.0);
  void text(double x, double y, const std::string& content,
            double size = 12.0, const std::string& fill = "#000");
  void save(const std::string& path) const;

 private:
  double width_, height_;
  std::ostringstream body_;
};

/// Render a navigation task (grid, global path, endpoints) to SVG.
void render_task_svg(const std::string& path, const NavTask& task);

}  // namespace lflh

#endif  // LFLH_SVG_HPP_
