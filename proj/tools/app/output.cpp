// Copyright 2026 The lswlattice Authors
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

#include "output.hpp"

#include <bit>
#include <cstring>
#include <ctime>

#include <fmt/format.h>

#include "lsw/error.hpp"

#ifndef LSW_VERSION
#define LSW_VERSION "unknown"
#endif
#ifndef LSW_GIT_REVISION
#define LSW_GIT_REVISION ""
#endif

namespace lsw::app {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(open_out(path, std::ios::out | std::ios::binary)), path_(path), columns_(header.size()) {
  for (auto h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_++ > 0) out_.put(',');
}

CsvWriter& CsvWriter::cell(double x) {
  sep();
  out_ << fmt::format("{:.17g}", x);
  return *this;
}

CsvWriter& CsvWriter::integer(std::int64_t x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::unsigned_integer(std::uint64_t x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw Error(fmt::format("{}: row has {} cells, header has {}", path_.string(), in_row_,
                            columns_));
  out_.put('\n');
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("failed writing " + path_.string());
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path, int radius)
    : out_(open_out(path, std::ios::out | std::ios::binary)), path_(path), radius_(radius) {
  out_.write("LSWTRAJ1", 8);
  put_u32(kVersion);
  put_u32(static_cast<std::uint32_t>(radius));
}

void TrajectoryWriter::put_u32(std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xffu);
  out_.write(b, 4);
}

void TrajectoryWriter::put_u64(std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xffu);
  out_.write(b, 8);
}

void TrajectoryWriter::put_f64(double x) { put_u64(std::bit_cast<std::uint64_t>(x)); }

void TrajectoryWriter::write(std::uint64_t path, double t, const LatticeState& s) {
  if (s.radius() != radius_) throw DimensionError("trajectory record radius differs from header");
  put_u64(path);
  put_f64(t);
  put_f64(norm_sq(s.u));
  put_f64(norm_sq(s.v));
  for (const Complex& z : s.u) {
    put_f64(z.real());
    put_f64(z.imag());
  }
  for (double x : s.v) put_f64(x);
}

void TrajectoryWriter::close() {
  out_.close();
  if (!out_) throw Error("failed writing " + path_.string());
}

std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  auto get_u64 = [&](int bytes) {
    unsigned char b[8] = {};
    if (!in.read(reinterpret_cast<char*>(b), bytes)) throw Error("truncated trajectory file");
    std::uint64_t x = 0;
    for (int i = bytes - 1; i >= 0; --i) x = (x << 8) | b[i];
    return x;
  };
  auto get_f64 = [&] { return std::bit_cast<double>(get_u64(8)); };
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "LSWTRAJ1", 8) != 0)
    throw Error(path.string() + " is not a trajectory file");
  if (get_u64(4) != TrajectoryWriter::kVersion) throw Error("unsupported trajectory version");
  const int radius = static_cast<int>(get_u64(4));
  std::vector<TrajectoryRecord> out;
  while (in.peek() != std::char_traits<char>::eof()) {
    TrajectoryRecord r;
    r.path = get_u64(8);
    r.t = get_f64();
    r.norm_u_sq = get_f64();
    r.norm_v_sq = get_f64();
    r.state = LatticeState::zero(radius);
    for (auto& z : r.state.u) {
      const double re = get_f64();
      z = Complex(re, get_f64());
    }
    for (auto& x : r.state.v) x = get_f64();
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

}  // namespace

Manifest::Manifest(std::filesystem::path directory, std::string verb, nlohmann::json config,
                   std::uint64_t seed, unsigned workers)
    : path_(std::move(directory) / "manifest.json"),
      start_(std::chrono::steady_clock::now()),
      last_(start_) {
  doc_ = {{"status", "running"},
          {"verb", std::move(verb)},
          {"version", std::string(code_version())},
          {"seed", seed},
          {"workers", workers},
          {"started_at", utc_now()},
          {"wall_clock_seconds", nullptr},
          {"timings", nlohmann::json::object()},
          {"outputs", nlohmann::json::array()},
          {"results", nlohmann::json::object()},
          {"config", std::move(config)}};
  flush();
}

void Manifest::stage(const std::string& name) {
  const auto now = std::chrono::steady_clock::now();
  doc_["timings"][name] = seconds(now - last_);
  last_ = now;
}

void Manifest::add_output(const std::string& file) { doc_["outputs"].push_back(file); }

void Manifest::mark_complete() {
  doc_["status"] = "complete";
  doc_["wall_clock_seconds"] = seconds(std::chrono::steady_clock::now() - start_);
  flush();
}

void Manifest::mark_failed(const std::string& message, int exit_code) {
  doc_["status"] = "failed";
  doc_["error"] = message;
  doc_["exit_code"] = exit_code;
  doc_["wall_clock_seconds"] = seconds(std::chrono::steady_clock::now() - start_);
  flush();
}

void Manifest::flush() {
  auto out = open_out(path_, std::ios::out);
  out << doc_.dump(2) << '\n';
}

std::string_view code_version() {
  static const std::string v = std::string(LSW_VERSION) +
                               (std::strlen(LSW_GIT_REVISION) > 0
                                    ? std::string("+") + LSW_GIT_REVISION
                                    : std::string());
  return v;
}

}  // namespace lsw::app
