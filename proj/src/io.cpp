#include "escape_lab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace escape_lab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_double(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw std::invalid_argument("empty number");
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number: '" + token + "'");
  }
  if (consumed != t.size()) throw std::invalid_argument("bad number: '" + token + "'");
  return value;
}

long to_long(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw std::invalid_argument("empty integer");
  std::size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(t, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer: '" + token + "'");
  }
  if (consumed != t.size()) throw std::invalid_argument("bad integer: '" + token + "'");
  return value;
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad json: ") + e.what());
  }
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  if (traj.points.empty()) throw std::invalid_argument("trajectory_csv: empty trajectory");
  if (traj.losses.size() != traj.points.size() || traj.grad_norms.size() != traj.points.size())
    throw std::invalid_argument("trajectory_csv: inconsistent trajectory");
  const long d = traj.points.front().size();
  std::string out = "step";
  for (long j = 0; j < d; ++j) out += ",x" + std::to_string(j);
  out += ",f,grad_norm\n";
  for (std::size_t t = 0; t < traj.points.size(); ++t) {
    out += std::to_string(t);
    for (long j = 0; j < d; ++j) out += ',' + fmt_double(traj.points[t](j));
    out += ',' + fmt_double(traj.losses[t]);
    out += ',' + fmt_double(traj.grad_norms[t]);
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.size() < 2) throw std::invalid_argument("trajectory csv: no data rows");

  const std::vector<std::string> header = split(trim(lines.front()), ',');
  if (header.size() < 4 || header.front() != "step" || header[header.size() - 2] != "f" ||
      header.back() != "grad_norm")
    throw std::invalid_argument("trajectory csv: unexpected header");
  const long d = static_cast<long>(header.size()) - 3;
  for (long j = 0; j < d; ++j)
    if (header[static_cast<std::size_t>(j) + 1] != "x" + std::to_string(j))
      throw std::invalid_argument("trajectory csv: unexpected header");

  Trajectory traj;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> row = split(lines[i], ',');
    if (row.size() != header.size())
      throw std::invalid_argument("trajectory csv: ragged row " + std::to_string(i));
    to_long(row[0]);  // step index; positional, value unused
    Vector p(d);
    for (long j = 0; j < d; ++j) p(j) = to_double(row[static_cast<std::size_t>(j) + 1]);
    traj.points.push_back(std::move(p));
    traj.losses.push_back(to_double(row[row.size() - 2]));
    traj.grad_norms.push_back(to_double(row.back()));
  }
  return traj;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw std::runtime_error("cannot read " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out.good()) throw std::runtime_error("cannot write " + path);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"argv", m.argv},
          {"config", m.config},
          {"master_seed", m.master_seed},
          {"artifacts", m.artifacts},
          {"version", m.version}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.config = j.value("config", nlohmann::json());
  m.master_seed = j.value("master_seed", std::uint64_t{0});
  m.artifacts = j.value("artifacts", std::vector<std::string>{});
  m.version = j.value("version", std::string{});
  return m;
}

void write_manifest(const RunManifest& m, const std::string& artifact_path) {
  write_text_file(artifact_path + ".manifest.json", manifest_to_json(m).dump(2) + "\n");
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& token : split(text, ',')) out.push_back(to_double(token));
  return out;
}

Vector parse_vector(const std::string& text) {
  const std::vector<double> values = parse_doubles(text);
  Vector v(static_cast<long>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<long>(i)) = values[i];
  return v;
}

std::vector<ScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<ScheduleEntry> entries;
  if (trim(text).empty()) return entries;
  for (const std::string& item : split(text, ',')) {
    const std::vector<std::string> pair = split(item, ':');
    if (pair.size() != 2)
      throw std::invalid_argument("bad schedule entry: '" + item + "' (want step:factor)");
    ScheduleEntry entry;
    entry.step = to_long(pair[0]);
    entry.factor = to_double(pair[1]);
    entries.push_back(entry);
  }
  return entries;
}

LandscapeSpec parse_landscape_spec(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty landscape spec");
  if (t.front() == '{') return landscape_spec_from_json(parse_json(t));
  LandscapeSpec spec;
  const auto colon = t.find(':');
  if (colon == std::string::npos) {
    spec.id = t;
  } else {
    spec.id = t.substr(0, colon);
    spec.params = parse_doubles(t.substr(colon + 1));
  }
  return spec;
}

Region parse_region(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty region spec");
  if (t.front() == '{') return region_from_json(parse_json(t));
  const std::vector<double> bounds = parse_doubles(t);
  if (bounds.size() != 2)
    throw std::invalid_argument("region shorthand must be 'lo,hi'; got '" + text + "'");
  return Region::interval(bounds[0], bounds[1]);
}

}  // namespace escape_lab
