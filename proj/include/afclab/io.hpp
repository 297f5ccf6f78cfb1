// Copyright 2026 The afclab Authors.
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

#ifndef AFCLAB_IO_HPP_
#define AFCLAB_IO_HPP_

#include <string>
#include <vector>

#include "afclab/scenario.hpp"
#include "afclab/signals.hpp"

namespace afclab {

inline constexpr double kWavSampleRate = 16000.0;

// Mono 16-bit PCM at 16 kHz only; samples scaled by 1/32768. No resampling.
Signal load_wav(const std::string& path);

// Writes mono 16-bit PCM, rounding and saturating to [-32768, 32767].
void write_wav(const std::string& path, const Signal& x);

// One coefficient per line; blank lines and '#' comments are skipped.
std::vector<double> read_coefficients(const std::string& path);
void write_coefficients(const std::string& path,
                        const std::vector<double>& taps);

// JSON object with ScenarioConfig keys; missing keys keep their defaults.
ScenarioConfig read_config(const std::string& path);

}  // namespace afclab

#endif  // AFCLAB_IO_HPP_
