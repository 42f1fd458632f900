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

#include "styletok/dsp/f0.hpp"

#include <algorithm>
#include <cmath>

#include "styletok/error.hpp"

namespace styletok::dsp {

F0Track estimate_f0(const Waveform& w, const F0Options& opts) {
  if (w.sample_rate <= 0) throw ContractError("estimate_f0: sample rate must be positive");
  if (opts.hop == 0 || opts.frame_length == 0) throw ContractError("estimate_f0: frame length and hop must be positive");
  const double sr = w.sample_rate;
  if (!(opts.fmin > 0.0 && opts.fmin < opts.fmax && opts.fmax < sr / 2.0)) {
    throw ContractError("estimate_f0: search band [" + std::to_string(opts.fmin) + ", " + std::to_string(opts.fmax) +
                        "] invalid");
  }
  if (opts.fmin < sr / static_cast<double>(opts.frame_length)) {
    throw ContractError("estimate_f0: fmin " + std::to_string(opts.fmin) + " Hz allows less than one period per " +
                        std::to_string(opts.frame_length) + "-sample frame");
  }
  const std::size_t lag_min = static_cast<std::size_t>(std::ceil(sr / opts.fmax));
  const std::size_t lag_max = static_cast<std::size_t>(std::floor(sr / opts.fmin));
  const std::size_t len = w.samples.size();
  const std::size_t frames = stft_frame_count(len, opts.hop);
  const std::size_t half = opts.frame_length / 2;

  F0Track track{std::vector<double>(frames, 0.0), opts.hop, w.sample_rate};
  std::vector<double> frame(opts.frame_length);
  std::vector<double> r(lag_max + 2, 0.0);
  for (std::size_t m = 0; m < frames; ++m) {
    double energy = 0.0;
    for (std::size_t n = 0; n < opts.frame_length; ++n) {
      const auto j = static_cast<std::ptrdiff_t>(m * opts.hop + n) - static_cast<std::ptrdiff_t>(half);
      frame[n] = (j >= 0 && j < static_cast<std::ptrdiff_t>(len)) ? w.samples[static_cast<std::size_t>(j)] : 0.0;
      energy += frame[n] * frame[n];
    }
    if (std::sqrt(energy / static_cast<double>(opts.frame_length)) < opts.min_rms) continue;

    const std::size_t top = std::min(lag_max + 1, opts.frame_length - 1);
    double best = -1.0;
    for (std::size_t lag = lag_min - 1; lag <= top; ++lag) {
      double xy = 0.0, xx = 0.0, yy = 0.0;
      for (std::size_t n = 0; n + lag < opts.frame_length; ++n) {
        xy += frame[n] * frame[n + lag];
        xx += frame[n] * frame[n];
        yy += frame[n + lag] * frame[n + lag];
      }
      r[lag] = (xx > 0.0 && yy > 0.0) ? xy / std::sqrt(xx * yy) : 0.0;
      if (lag >= lag_min && lag <= lag_max) best = std::max(best, r[lag]);
    }
    if (best < opts.voicing_threshold) continue;

    // Shortest-lag local maximum close to the global one guards against
    // picking a multiple of the period.
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= std::min(lag_max, top - 1); ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double denom = a - 2.0 * b + c;
    const double shift = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    const double hz = sr / (static_cast<double>(pick) + std::clamp(shift, -0.5, 0.5));
    if (hz >= opts.fmin && hz <= opts.fmax) track.hz[m] = hz;
  }
  return track;
}

namespace {

template <typename Fn>
void for_each_voiced_run(const std::vector<double>& hz, Fn&& fn) {
  std::size_t i = 0;
  while (i < hz.size()) {
    if (hz[i] <= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < hz.size() && hz[j] > 0.0) ++j;
    fn(i, j);
    i = j;
  }
}

std::vector<double> window_filter(const std::vector<double>& run, std::size_t width, bool median) {
  const auto n = static_cast<std::ptrdiff_t>(run.size());
  const auto half = static_cast<std::ptrdiff_t>(width / 2);
  std::vector<double> out(run.size()), win(width);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      win[static_cast<std::size_t>(k + half)] = run[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i + k, 0, n - 1))];
    }
    if (median) {
      std::nth_element(win.begin(), win.begin() + half, win.end());
      out[static_cast<std::size_t>(i)] = win[static_cast<std::size_t>(half)];
    } else {
      double acc = 0.0;
      for (double v : win) acc += v;
      out[static_cast<std::size_t>(i)] = acc / static_cast<double>(width);
    }
  }
  return out;
}

}  // namespace

F0Track smooth_f0(const F0Track& track, std::size_t median_width, std::size_t mean_width) {
  for (std::size_t width : {median_width, mean_width}) {
    if (width == 0 || width % 2 == 0) {
      throw ContractError("smooth_f0: filter width " + std::to_string(width) + " must be odd and positive");
    }
  }
  F0Track out = track;
  for_each_voiced_run(track.hz, [&](std::size_t begin, std::size_t end) {
    std::vector<double> run(track.hz.begin() + static_cast<std::ptrdiff_t>(begin),
                            track.hz.begin() + static_cast<std::ptrdiff_t>(end));
    run = window_filter(window_filter(run, median_width, true), mean_width, false);
    std::copy(run.begin(), run.end(), out.hz.begin() + static_cast<std::ptrdiff_t>(begin));
  });
  return out;
}

double voiced_total_variation(const F0Track& track) {
  double tv = 0.0;
  for_each_voiced_run(track.hz, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin + 1; i < end; ++i) tv += std::abs(track.hz[i] - track.hz[i - 1]);
  });
  return tv;
}

VoicedStats voiced_stats(const F0Track& track) {
  VoicedStats s;
  double sum = 0.0, st = 0.0, stt = 0.0, sft = 0.0;
  const double dt = track.sample_rate > 0 ? track.frame_seconds() : 1.0;
  for (std::size_t i = 0; i < track.hz.size(); ++i) {
    if (track.hz[i] <= 0.0) continue;
    const double t = static_cast<double>(i) * dt;
    ++s.voiced;
    sum += track.hz[i];
    st += t;
    stt += t * t;
    sft += track.hz[i] * t;
  }
  if (s.voiced == 0) return s;
  const double n = static_cast<double>(s.voiced);
  s.mean = sum / n;
  double var = 0.0;
  for (double v : track.hz) {
    if (v > 0.0) var += (v - s.mean) * (v - s.mean);
  }
  s.stddev = std::sqrt(var / n);
  const double denom = stt - st * st / n;
  s.slope = denom > 0.0 ? (sft - sum * st / n) / denom : 0.0;
  return s;
}

}  // namespace styletok::dsp
