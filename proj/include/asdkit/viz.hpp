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

#ifndef ASDKIT_VIZ_HPP_
#define ASDKIT_VIZ_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace asdkit {

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

/// PNG scatter plot, one colour per distinct label with a legend.
/// Throws MissingPoints when `points` is empty.
void RenderScatter(const std::vector<ScatterPoint>& points, const std::string& title,
                   const std::filesystem::path& path);

/// One plot per (machine, domain) from a pseudo_coords.csv artifact, named
/// <machine>_<domain>_<method>.png. `color_by` is "attribute" or "cluster_id".
/// A score, when given, is shown in parentheses in the title.
std::vector<std::filesystem::path> RenderCoordinateFile(const std::filesystem::path& coords_csv,
                                                        const std::filesystem::path& out_dir,
                                                        const std::string& color_by,
                                                        std::optional<double> score = std::nullopt);

/// Distinct colours (BGR) found in a rendered plot area, for tests.
int CountPlotColors(const std::filesystem::path& png);

}  // namespace asdkit

#endif  // ASDKIT_VIZ_HPP_
