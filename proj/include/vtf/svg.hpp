/*
 * Copyright 2026 The vtf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Small hand-rolled SVG charts for reports.

#include <string>
#include <vector>

namespace vtf::svg {

struct Bar {
  std::string label;
  double value;
};

// One bar per entry, drawn in the given order. Negative values hang below
// the zero line.
std::string bar_chart(const std::vector<Bar>& bars, const std::string& title,
                      const std::string& comment = {});

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN leaves a gap
};

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& comment = {});

std::string escape(const std::string& text);

}  // namespace vtf::svg
