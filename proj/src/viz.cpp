// Copyright (c) 2026 The asdkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asdkit/viz.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <set>

#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

namespace {

constexpr int kPlotSize = 480;
constexpr int kMargin = 40;
constexpr int kLegendWidth = 200;

// tab20-style palette, BGR
const cv::Scalar kPalette[] = {
    {180, 119, 31},  {14, 127, 255}, {44, 160, 44},   {40, 39, 214},   {189, 103, 148},
    {75, 86, 140},   {194, 119, 227}, {127, 127, 127}, {34, 189, 188},  {207, 190, 23},
    {232, 199, 174}, {120, 187, 255}, {138, 223, 152}, {150, 152, 255}, {213, 176, 197},
    {148, 156, 196}};

}  // namespace

void RenderScatter(const std::vector<ScatterPoint>& points, const std::string& title,
                   const std::filesystem::path& path) {
  Require(!points.empty(), Errc::kMissingPoints, "viz: no points to plot for '" + title + "'");
  std::set<std::string> labels;
  double xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
  for (const auto& p : points) {
    labels.insert(p.label);
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double xr = xmax > xmin ? xmax - xmin : 1.0, yr = ymax > ymin ? ymax - ymin : 1.0;
  std::map<std::string, cv::Scalar> color;
  int idx = 0;
  for (const auto& l : labels) color[l] = kPalette[idx++ % std::size(kPalette)];

  cv::Mat img(kPlotSize + 2 * kMargin, kPlotSize + 2 * kMargin + kLegendWidth, CV_8UC3,
              cv::Scalar(255, 255, 255));
  cv::rectangle(img, {kMargin, kMargin}, {kMargin + kPlotSize, kMargin + kPlotSize}, {0, 0, 0}, 1);
  for (const auto& p : points) {
    const int px = kMargin + static_cast<int>((p.x - xmin) / xr * (kPlotSize - 20)) + 10;
    const int py = kMargin + kPlotSize - 10 - static_cast<int>((p.y - ymin) / yr * (kPlotSize - 20));
    cv::circle(img, {px, py}, 4, color[p.label], cv::FILLED, cv::LINE_8);
  }
  cv::putText(img, title, {kMargin, kMargin - 12}, cv::FONT_HERSHEY_SIMPLEX, 0.5, {0, 0, 0}, 1, cv::LINE_AA);
  int y = kMargin + 10;
  for (const auto& l : labels) {
    cv::rectangle(img, {kMargin * 2 + kPlotSize, y - 8}, {kMargin * 2 + kPlotSize + 10, y + 2}, color[l],
                  cv::FILLED);
    cv::putText(img, l, {kMargin * 2 + kPlotSize + 16, y + 2}, cv::FONT_HERSHEY_SIMPLEX, 0.4, {0, 0, 0}, 1,
                cv::LINE_AA);
    y += 18;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  Require(cv::imwrite(path.string(), img), Errc::kIoError, "viz: cannot write " + path.string());
}

std::vector<std::filesystem::path> RenderCoordinateFile(const std::filesystem::path& coords_csv,
                                                        const std::filesystem::path& out_dir,
                                                        const std::string& color_by, std::optional<double> score) {
  const CsvTable t = ReadCsv(coords_csv);
  std::string method = "unknown";
  for (const auto& c : t.comments)
    if (c.rfind("method=", 0) == 0) method = c.substr(7);
  const int cm = t.Column("machine"), cd = t.Column("domain"), cx = t.Column("x"), cy = t.Column("y"),
            cl = t.Column(color_by);
  Require(cm >= 0 && cd >= 0 && cx >= 0 && cy >= 0, Errc::kCorruptFile,
          coords_csv.string() + ": missing coordinate columns");
  Require(cl >= 0, Errc::kInvalidArgument, "viz: no column '" + color_by + "' in " + coords_csv.string());
  std::map<std::pair<std::string, std::string>, std::vector<ScatterPoint>> groups;
  for (const auto& r : t.rows)
    groups[{r[cm], r[cd]}].push_back({std::stod(r[cx]), std::stod(r[cy]), r[cl].empty() ? "(none)" : r[cl]});
  Require(!groups.empty(), Errc::kMissingPoints, "viz: " + coords_csv.string() + " has no points");
  std::vector<std::filesystem::path> written;
  for (const auto& [key, pts] : groups) {
    std::string title = key.first + " " + key.second + " " + method;
    if (score) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " (%.2f)", 100.0 * *score);
      title += buf;
    }
    written.push_back(out_dir / (key.first + "_" + key.second + "_" + method + ".png"));
    RenderScatter(pts, title, written.back());
  }
  return written;
}

int CountPlotColors(const std::filesystem::path& png) {
  cv::Mat img = cv::imread(png.string(), cv::IMREAD_COLOR);
  Require(!img.empty(), Errc::kIoError, "cannot read " + png.string());
  std::set<std::tuple<int, int, int>> seen;
  const cv::Rect area(kMargin + 1, kMargin + 1, kPlotSize - 2, kPlotSize - 2);
  for (const cv::Scalar& c : kPalette) {
    for (int r = area.y; r < area.y + area.height; ++r) {
      bool found = false;
      for (int col = area.x; col < area.x + area.width; ++col) {
        const cv::Vec3b px = img.at<cv::Vec3b>(r, col);
        if (px[0] == c[0] && px[1] == c[1] && px[2] == c[2]) {
          seen.insert({px[0], px[1], px[2]});
          found = true;
          break;
        }
      }
      if (found) break;
    }
  }
  return static_cast<int>(seen.size());
}

}  // namespace asdkit
