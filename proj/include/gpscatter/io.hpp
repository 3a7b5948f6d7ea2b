#pragma once

// Text snapshot format:
//   # gpfield v1 L=<float> n=<int> x0=<float>
//   x re im        (n lines, full double precision)

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "gpscatter/error.hpp"
#include "gpscatter/grid.hpp"

namespace gpscatter {

inline void write_field(std::ostream& os, const SampledFunction& f) {
  const auto& g = f.grid;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# gpfield v1 L=" << g.length << " n=" << g.n << " x0=" << g.x0 << "\n";
  for (int j = 0; j < g.n; ++j) os << g.x(j) << ' ' << f.values[j].real() << ' ' << f.values[j].imag() << "\n";
}

inline void write_field(const std::string& path, const SampledFunction& f) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_field(os, f);
  if (!os) throw InvalidArgument("write to '" + path + "' failed");
}

inline SampledFunction read_field(std::istream& is, const std::string& name = "<stream>") {
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument(name + ": empty field file");
  double length = 0.0, x0 = 0.0;
  int n = 0;
  char tail = 0;
  if (std::sscanf(header.c_str(), "# gpfield v1 L=%lf n=%d x0=%lf %c", &length, &n, &x0, &tail) != 3)
    throw InvalidArgument(name + ": bad header '" + header + "'");
  Grid g = make_grid(length, n, x0);
  cvec v;
  v.reserve(n);
  std::string line;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double x, re, im;
    std::string extra;
    if (!(ls >> x >> re >> im) || (ls >> extra))
      throw InvalidArgument(name + ":" + std::to_string(lineno) + ": expected 'x re im'");
    v.emplace_back(re, im);
  }
  if (static_cast<int>(v.size()) != n)
    throw InvalidArgument(name + ": header declares n=" + std::to_string(n) + " but " + std::to_string(v.size()) +
                          " samples follow");
  return SampledFunction(g, std::move(v));
}

inline SampledFunction read_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open field file '" + path + "'");
  return read_field(is, path);
}

}  // namespace gpscatter
