#include "stlfunnel/io/trace_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stlfunnel/error.hpp"

namespace stlfunnel::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

LoadedTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Parse, "empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "agent") {
    throw Error(ErrorCode::Parse, "header must start with t,agent");
  }
  std::vector<std::size_t> xcols;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c] == "x" + std::to_string(xcols.size() + 1)) xcols.push_back(c);
  }
  if (xcols.empty()) throw Error(ErrorCode::Parse, "no state columns");

  std::vector<double> times;
  std::map<stl::AgentId, int> dims;
  std::vector<std::map<stl::AgentId, std::vector<double>>> rows;

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(header.size()) + " cells");
    }
    double t = parse_double(cells[0], lineno);
    int id = 0;
    auto [p, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), id);
    if (ec != std::errc() || p != cells[1].data() + cells[1].size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": bad agent id");
    }
    std::vector<double> x;
    for (std::size_t c : xcols) {
      double v = parse_double(cells[c], lineno);
      if (std::isnan(v)) break;
      x.push_back(v);
    }

    if (times.empty() || times.back() != t) {
      times.push_back(t);
      rows.emplace_back();
    }
    auto it = dims.find(id);
    if (it == dims.end()) {
      if (times.size() > 1) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": agent " + std::to_string(id) +
                                          " appears after the first sample");
      }
      dims[id] = static_cast<int>(x.size());
    } else if (it->second != static_cast<int>(x.size())) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": state size changed");
    }
    if (!rows.back().emplace(id, std::move(x)).second) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": duplicate agent sample");
    }
  }

  std::vector<std::pair<stl::AgentId, int>> slots;
  for (const auto& [id, d] : dims) slots.emplace_back(id, d);
  LoadedTrace out;
  out.layout = stl::StateLayout(slots);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (rows[k].size() != dims.size()) {
      throw Error(ErrorCode::Parse, "sample at t = " + std::to_string(times[k]) + " misses agents");
    }
    Eigen::VectorXd x(out.layout.size());
    for (const auto& s : out.layout.slots()) {
      const auto& v = rows[k].at(s.id);
      for (int c = 0; c < s.dim; ++c) x[s.offset + c] = v[c];
    }
    out.trace.t.push_back(times[k]);
    out.trace.x.push_back(std::move(x));
  }
  return out;
}

LoadedTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_trace_csv(in);
}

}  // namespace stlfunnel::io
