// Copyright (c) 2026 The styletok Authors
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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "styletok/error.hpp"
#include "styletok/style_control/style_control.hpp"

namespace styletok::style {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num3(double v) { return fmt("%.3f", v); }

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kPanelW = 360, kPanelH = 220, kLeft = 60, kTop = 30, kGap = 40, kBottom = 50;

}  // namespace

void emit_f0_plot(const std::vector<F0Curve>& curves, const std::filesystem::path& base) {
  if (curves.empty()) throw ContractError("emit_f0_plot: no tracks");
  std::ostringstream csv;
  csv << "frame,seconds,token,f0_hz\n";
  double t_max = 0, lo = 1e9, hi = -1e9;
  std::vector<std::size_t> texts;
  for (const auto& c : curves) {
    const double dt = c.track.frame_seconds();
    t_max = std::max(t_max, dt * static_cast<double>(c.track.hz.size() > 0 ? c.track.hz.size() - 1 : 0));
    for (std::size_t m = 0; m < c.track.hz.size(); ++m) {
      const double hz = c.track.hz[m];
      if (hz <= 0) continue;
      csv << m << ',' << fmt("%.6f", dt * static_cast<double>(m)) << ',' << c.token << ',' << fmt("%.3f", hz) << '\n';
      lo = std::min(lo, hz);
      hi = std::max(hi, hz);
    }
    if (std::find(texts.begin(), texts.end(), c.text) == texts.end()) texts.push_back(c.text);
  }
  if (hi < lo) {
    lo = 0;
    hi = 400;
  }
  lo = std::floor(lo / 50) * 50;
  hi = std::max(lo + 50, std::ceil(hi / 50) * 50);
  if (t_max <= 0) t_max = 1;

  const double width = kLeft + static_cast<double>(texts.size()) * (kPanelW + kGap);
  const double height = kTop + kPanelH + kBottom;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num3(width) << "\" height=\""
      << num3(height) << "\" viewBox=\"0 0 " << num3(width) << ' ' << num3(height) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < texts.size(); ++p) {
    const double x0 = kLeft + static_cast<double>(p) * (kPanelW + kGap);
    svg << "<g class=\"panel\" data-text=\"" << texts[p] << "\" data-t-max=\"" << fmt("%.6f", t_max)
        << "\" data-f0-min=\"" << num3(lo) << "\" data-f0-max=\"" << num3(hi) << "\" transform=\"translate("
        << num3(x0) << ',' << num3(kTop) << ")\">\n"
        << "<line class=\"axis x\" x1=\"0\" y1=\"" << num3(kPanelH) << "\" x2=\"" << num3(kPanelW) << "\" y2=\""
        << num3(kPanelH) << "\" stroke=\"black\"/>\n"
        << "<line class=\"axis y\" x1=\"0\" y1=\"0\" x2=\"0\" y2=\"" << num3(kPanelH) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double f = i / 4.0;
      svg << "<text class=\"tick x\" x=\"" << num3(f * kPanelW) << "\" y=\"" << num3(kPanelH + 16)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt("%.2f", f * t_max) << "</text>\n"
          << "<text class=\"tick y\" x=\"-6\" y=\"" << num3(kPanelH * (1 - f) + 3)
          << "\" font-size=\"10\" text-anchor=\"end\">" << fmt("%.0f", lo + f * (hi - lo)) << "</text>\n";
    }
    svg << "<text class=\"label x\" x=\"" << num3(kPanelW / 2) << "\" y=\"" << num3(kPanelH + 36)
        << "\" font-size=\"12\" text-anchor=\"middle\">time (s)</text>\n"
        << "<text class=\"label y\" x=\"" << num3(-45) << "\" y=\"" << num3(kPanelH / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 -45 " << num3(kPanelH / 2)
        << ")\">F0 (Hz)</text>\n";
    for (const auto& c : curves) {
      if (c.text != texts[p]) continue;
      const double dt = c.track.frame_seconds();
      svg << "<polyline class=\"f0\" data-token=\"" << c.token << "\" fill=\"none\" stroke=\""
          << kPalette[c.token % std::size(kPalette)] << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t m = 0; m < c.track.hz.size(); ++m) {
        if (c.track.hz[m] <= 0) continue;
        const double x = dt * static_cast<double>(m) / t_max * kPanelW;
        const double y = kPanelH * (1 - (c.track.hz[m] - lo) / (hi - lo));
        svg << (first ? "" : " ") << num3(x) << ',' << num3(y);
        first = false;
      }
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";

  auto csv_path = base;
  csv_path += ".csv";
  auto svg_path = base;
  svg_path += ".svg";
  write_text(csv_path, csv.str());
  write_text(svg_path, svg.str());
}

void emit_mixing_overlay(const std::vector<double>& mel, std::size_t n_mels, const model::AttentionTrace& trace,
                         std::size_t r, const std::filesystem::path& path) {
  if (n_mels == 0 || mel.size() % n_mels != 0) throw DimensionError("overlay: mel size is not a multiple of n_mels");
  const std::size_t frames = mel.size() / n_mels;
  if (trace.steps * r != frames) {
    throw ContractError("overlay: " + std::to_string(trace.steps) + " steps x r=" + std::to_string(r) +
                        " does not match " + std::to_string(frames) + " mel frames");
  }
  const double w = kOverlayFrameWidth * static_cast<double>(frames);
  const double h = kOverlayHeight;
  const double cell_h = h / static_cast<double>(n_mels);
  const double total_w = kLeft + w + 20, total_h = kTop + h + kBottom;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num3(total_w) << "\" height=\""
      << num3(total_h) << "\" viewBox=\"0 0 " << num3(total_w) << ' ' << num3(total_h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g class=\"plot\" data-frames=\"" << frames << "\" data-n-mels=\"" << n_mels << "\" transform=\"translate("
      << num3(kLeft) << ',' << num3(kTop) << ")\">\n"
      << "<g class=\"heatmap\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t b = 0; b < n_mels; ++b) {
      const double v = std::clamp(mel[f * n_mels + b], 0.0, 1.0);
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      char fill[8];
      std::snprintf(fill, sizeof fill, "#%02x%02x%02x", g, g, g);
      // Low mel bins at the bottom.
      svg << "<rect x=\"" << num3(kOverlayFrameWidth * static_cast<double>(f)) << "\" y=\""
          << num3(h - cell_h * static_cast<double>(b + 1)) << "\" width=\"" << num3(kOverlayFrameWidth)
          << "\" height=\"" << num3(cell_h) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  svg << "</g>\n"
      << "<rect class=\"frame\" x=\"0\" y=\"0\" width=\"" << num3(w) << "\" height=\"" << num3(h)
      << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<polyline class=\"g-text\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\" "
         "points=\"";
  for (std::size_t f = 0; f < frames; ++f) {
    const double g = std::clamp(trace.gate_at(f / r, 0), 0.0, 1.0);
    const double y = h * (1.0 - g);
    svg << (f ? " " : "") << num3(kOverlayFrameWidth * static_cast<double>(f)) << ',' << num3(y) << ' '
        << num3(kOverlayFrameWidth * static_cast<double>(f + 1)) << ',' << num3(y);
  }
  svg << "\"/>\n"
      << "<text class=\"label x\" x=\"" << num3(w / 2) << "\" y=\"" << num3(h + 30)
      << "\" font-size=\"12\" text-anchor=\"middle\">frame</text>\n"
      << "<text class=\"label y\" x=\"-40\" y=\"" << num3(h / 2) << "\" font-size=\"12\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 -40 " << num3(h / 2) << ")\">mel bin / text weight</text>\n"
      << "</g>\n</svg>\n";
  write_text(path, svg.str());
}

}  // namespace styletok::style
