#include "terracelab/report_io.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "terracelab/errors.hpp"

namespace terracelab::io {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw PreconditionError("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) { return json::parse(read_text(path)); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw PreconditionError("CSV header and column count differ");
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw PreconditionError("CSV columns have different lengths");
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) s += (k ? "," : "") + header[k];
  s += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) s += ",";
      s += fmt(columns[k][i]);
    }
    s += "\n";
  }
  write_text(path, s);
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
  return row;
}

}  // namespace

std::vector<std::vector<double>> read_csv_rows(const fs::path& path) {
  std::stringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      const char c0 = line[0];
      if (!(std::isdigit(static_cast<unsigned char>(c0)) || c0 == '-' || c0 == '+' || c0 == '.')) continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

void write_profile_csv(const fs::path& path, const WaveProfile& w, double residual) {
  json head;
  head["c"] = w.c;
  head["q_top"] = w.q_top;
  head["q_bot"] = w.q_bot;
  head["residual"] = residual;
  std::string s = "# " + head.dump() + "\nz,U\n";
  for (std::size_t i = 0; i < w.z_samples.size(); ++i) s += fmt(w.z_samples[i]) + "," + fmt(w.u_samples[i]) + "\n";
  write_text(path, s);
}

WaveProfile read_profile_csv(const fs::path& path) {
  std::stringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) throw PreconditionError("profile CSV lacks its JSON header");
  const json head = json::parse(line.substr(2));
  WaveProfile w;
  w.c = head.at("c").get<double>();
  w.q_top = head.at("q_top").get<double>();
  w.q_bot = head.at("q_bot").get<double>();
  for (const auto& row : read_csv_rows(path)) {
    if (row.size() != 2) throw PreconditionError("profile CSV rows must have two columns");
    w.z_samples.push_back(row[0]);
    w.u_samples.push_back(row[1]);
  }
  return w;
}

std::string scheme_name(Scheme s) { return s == Scheme::RK4 ? "rk4" : "imex"; }

json grid_json(const RadialGrid& g) {
  json j;
  j["N"] = g.N;
  j["R_max"] = g.R_max;
  j["dr"] = g.dr;
  j["dt"] = g.time_step();
  j["cfl"] = g.cfl;
  j["scheme"] = scheme_name(g.scheme);
  j["nodes"] = g.nodes();
  return j;
}

namespace {

const char* kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::Bump: return "bump";
    case InitialKind::TerraceSeed: return "terrace-seed";
    default: return "custom";
  }
}

InitialKind kind_from(const std::string& s) {
  if (s == "bump") return InitialKind::Bump;
  if (s == "terrace-seed") return InitialKind::TerraceSeed;
  return InitialKind::Custom;
}

}  // namespace

void write_trajectory(const fs::path& dir, const std::string& stem, const RadialTrajectory& traj,
                      const ReactionTerm& f, const std::string& format) {
  const std::size_t cols = traj.grid.nodes() + 1;
  json side;
  side["grid"] = grid_json(traj.grid);
  side["dt_used"] = traj.dt;
  side["f"] = f.canonical();
  side["f_hash"] = fnv1a64_hex(f.canonical());
  side["initial"] = kind_name(traj.initial_kind);
  side["R0"] = traj.R0;
  side["isa"] = traj.isa;
  side["warnings"] = traj.warnings;
  side["rows"] = traj.times.size();
  side["cols"] = cols;
  side["layout"] = "row = time; column 0 = t, columns 1.. = u at r_j = j*dr";
  if (format == "binary") {
    side["format"] = "float64-le";
    side["data"] = stem + ".bin";
    std::string buf;
    buf.reserve(traj.times.size() * cols * sizeof(double));
    auto put = [&](double x) {
      char b[sizeof(double)];
      std::memcpy(b, &x, sizeof(double));
      buf.append(b, sizeof(double));
    };
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
      put(traj.times[s]);
      for (double x : traj.snapshots[s]) put(x);
    }
    write_text(dir / (stem + ".bin"), buf);
  } else {
    side["format"] = "csv";
    side["data"] = stem + ".csv";
    std::string s;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      s += fmt(traj.times[k]);
      for (double x : traj.snapshots[k]) s += "," + fmt(x);
      s += "\n";
    }
    write_text(dir / (stem + ".csv"), s);
  }
  write_json(dir / (stem + ".json"), side);
}

RadialTrajectory read_trajectory(const fs::path& dir, const std::string& stem) {
  const json side = read_json(dir / (stem + ".json"));
  RadialTrajectory tr;
  const json& g = side.at("grid");
  tr.grid.N = g.at("N").get<int>();
  tr.grid.R_max = g.at("R_max").get<double>();
  tr.grid.dr = g.at("dr").get<double>();
  tr.grid.dt = g.at("dt").get<double>();
  tr.grid.cfl = g.at("cfl").get<double>();
  tr.grid.scheme = g.at("scheme").get<std::string>() == "rk4" ? Scheme::RK4 : Scheme::IMEXTrapezoid;
  tr.dt = side.at("dt_used").get<double>();
  tr.initial_kind = kind_from(side.at("initial").get<std::string>());
  tr.R0 = side.at("R0").get<double>();
  tr.isa = side.at("isa").get<std::string>();
  tr.warnings = side.at("warnings").get<std::vector<std::string>>();
  const std::size_t rows = side.at("rows").get<std::size_t>();
  const std::size_t cols = side.at("cols").get<std::size_t>();
  std::vector<std::vector<double>> data;
  if (side.at("format").get<std::string>() == "float64-le") {
    const std::string buf = read_text(dir / side.at("data").get<std::string>());
    if (buf.size() != rows * cols * sizeof(double)) throw PreconditionError("binary snapshot size mismatch");
    data.assign(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      std::memcpy(data[i].data(), buf.data() + i * cols * sizeof(double), cols * sizeof(double));
  } else {
    data = read_csv_rows(dir / side.at("data").get<std::string>());
  }
  if (data.size() != rows) throw PreconditionError("snapshot row count mismatch");
  for (auto& row : data) {
    if (row.size() != cols) throw PreconditionError("snapshot column count mismatch");
    tr.times.push_back(row.front());
    tr.snapshots.emplace_back(row.begin() + 1, row.end());
  }
  return tr;
}

}  // namespace terracelab::io
