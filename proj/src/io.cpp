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

#include "afclab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace afclab {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Signal load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_wav: cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw Error("load_wav: " + path + " is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw Error("load_wav: truncated chunk in " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw Error("load_wav: short fmt chunk");
      format = read_u16(data + body);
      channels = read_u16(data + body + 2);
      rate = read_u32(data + body + 4);
      bits = read_u16(data + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error("load_wav: data chunk before fmt chunk");
      if (format != 1 || bits != 16) {
        throw Error("load_wav: expected 16-bit PCM, found format " +
                    std::to_string(format) + " with " + std::to_string(bits) +
                    " bits");
      }
      if (channels != 1) {
        throw Error("load_wav: expected mono, found " +
                    std::to_string(channels) + " channels");
      }
      if (rate != static_cast<std::uint32_t>(kWavSampleRate)) {
        throw Error("load_wav: expected sample rate 16000 Hz, found " +
                    std::to_string(rate) + " Hz");
      }
      const std::size_t n = size / 2;
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) {
        const auto v = static_cast<std::int16_t>(read_u16(data + body + 2 * k));
        x[k] = static_cast<double>(v) / 32768.0;
      }
      return Signal(std::move(x), kWavSampleRate);
    }
    pos = body + size + (size & 1u);
  }
  throw Error("load_wav: no data chunk in " + path);
}

void write_wav(const std::string& path, const Signal& x) {
  const auto n = static_cast<std::uint32_t>(x.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(x.sample_rate));
  std::string out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out += "RIFF";
  put_u32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, 2 * n);
  for (double v : x.samples) {
    const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("write_wav: cannot open " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::vector<double> read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_coefficients: cannot open " + path);
  std::vector<double> taps;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v;
    if (!(ss >> v)) {
      std::string rest;
      if (std::istringstream(line) >> rest) {
        throw Error("read_coefficients: bad value on line " +
                    std::to_string(lineno) + " of " + path);
      }
      continue;
    }
    taps.push_back(v);
  }
  if (taps.empty()) throw Error("read_coefficients: no coefficients in " + path);
  return taps;
}

void write_coefficients(const std::string& path,
                        const std::vector<double>& taps) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw Error("write_coefficients: cannot open " + path);
  for (double v : taps) std::fprintf(f, "%.17g\n", v);
  std::fclose(f);
}

ScenarioConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("read_config: " + path + ": " + e.what());
  }
  ScenarioConfig cfg;
  from_json(j, cfg);
  return cfg;
}

}  // namespace afclab
