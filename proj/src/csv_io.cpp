// Copyright 2026 The coaxsim Authors
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

#include "coaxsim/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "coaxsim/config_io.hpp"

namespace coaxsim {

namespace {

std::string complex_table(const char* header, const std::vector<double>& x,
                          const std::vector<cplx>& s) {
  std::string out = std::string(header) + "\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    out += format_double(x[k]) + "," + format_double(s[k].real()) + "," +
           format_double(s[k].imag()) + "\n";
  }
  return out;
}

void expect_header(const CsvTable& table, std::initializer_list<std::string_view> names,
                   const char* what) {
  bool ok = table.header.size() == names.size();
  std::size_t i = 0;
  for (auto n : names) ok = ok && table.header[i++] == n;
  if (!ok) {
    std::string want;
    for (auto n : names) want += (want.empty() ? "" : ",") + std::string(n);
    throw ConfigError(std::string(what) + ": expected header '" + want + "'");
  }
}

}  // namespace

std::string to_csv(const ResonatorResponse& resp) {
  return complex_table("f_hz,re,im", resp.f_axis, resp.s);
}

std::string to_csv(const IQTrace& trace) { return complex_table("t_s,re,im", trace.t_axis, trace.s); }

std::string population_csv(const Dataset& data) {
  const bool freq = data.kind == ExperimentKind::kQubitSpectroscopy;
  std::string out = freq ? "f_hz,p1\n" : "t_s,p1\n";
  for (std::size_t k = 0; k < data.axis.size(); ++k) {
    out += format_double(data.axis[k]) + "," + format_double(data.p1[k]) + "\n";
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (table.header.empty()) {
      table.header = fields;
      table.columns.assign(fields.size(), {});
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      const auto& f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + f + "'");
      }
      table.columns[c].push_back(v);
    }
  }
  if (table.header.empty() || table.columns.empty() || table.columns[0].empty()) {
    throw ConfigError("empty CSV table");
  }
  return table;
}

ResonatorResponse resonator_response_from_csv(const CsvTable& table) {
  expect_header(table, {"f_hz", "re", "im"}, "resonator response");
  ResonatorResponse resp;
  resp.f_axis = table.columns[0];
  for (std::size_t k = 0; k < resp.f_axis.size(); ++k) {
    resp.s.emplace_back(table.columns[1][k], table.columns[2][k]);
  }
  return resp;
}

IQTrace iq_trace_from_csv(const CsvTable& table) {
  expect_header(table, {"t_s", "re", "im"}, "IQ trace");
  IQTrace trace;
  trace.t_axis = table.columns[0];
  for (std::size_t k = 0; k < trace.t_axis.size(); ++k) {
    trace.s.emplace_back(table.columns[1][k], table.columns[2][k]);
  }
  return trace;
}

Dataset dataset_from_csv(ExperimentKind kind, const CsvTable& table) {
  Dataset data;
  data.kind = kind;
  switch (kind) {
    case ExperimentKind::kResonatorSweep: {
      const auto resp = resonator_response_from_csv(table);
      data.axis = resp.f_axis;
      data.iq = resp.s;
      break;
    }
    case ExperimentKind::kQubitSpectroscopy:
      expect_header(table, {"f_hz", "p1"}, "spectroscopy dataset");
      data.axis = table.columns[0];
      data.p1 = table.columns[1];
      break;
    default:
      expect_header(table, {"t_s", "p1"}, "time-domain dataset");
      data.axis = table.columns[0];
      data.p1 = table.columns[1];
      break;
  }
  return data;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& data,
                   const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());
  const std::string stem(to_string(data.kind));
  if (data.kind == ExperimentKind::kResonatorSweep) {
    write_text_file(dir / (stem + ".csv"), complex_table("f_hz,re,im", data.axis, data.iq));
  } else {
    write_text_file(dir / (stem + ".csv"), population_csv(data));
    write_text_file(dir / (stem + "_cal0.csv"), to_csv(data.cal0));
    write_text_file(dir / (stem + "_cal1.csv"), to_csv(data.cal1));
    for (std::size_t k = 0; k < data.traces.size(); ++k) {
      write_text_file(dir / (stem + "_trace_" + std::to_string(k) + ".csv"), to_csv(data.traces[k]));
    }
  }
  write_text_file(dir / (stem + ".meta"), format_experiment_config(cfg));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace coaxsim
