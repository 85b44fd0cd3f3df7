// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/problem_spec.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tdinv
{

namespace
{

struct Entry
{
  int line = 0;
  std::string key;
  std::vector<double> values;
  std::string word;  // for non-numeric values
};

std::string Trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Entry> Tokenize(const std::string &text)
{
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw))
  {
    line_no++;
    const std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      Fail("problem spec line " + std::to_string(line_no) + ": expected `key = values`");
    }
    Entry e;
    e.line = line_no;
    e.key = Trim(line.substr(0, eq));
    const std::string rhs = Trim(line.substr(eq + 1));
    std::istringstream vs(rhs);
    std::string tok;
    while (vs >> tok)
    {
      try
      {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size())
        {
          throw std::invalid_argument(tok);
        }
        e.values.push_back(v);
      }
      catch (const std::exception &)
      {
        if (!e.word.empty() || !e.values.empty())
        {
          Fail("problem spec line " + std::to_string(line_no) + ": bad value '" + tok + "'");
        }
        e.word = tok;
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void Expect(const Entry &e, std::size_t count)
{
  if (e.values.size() != count)
  {
    Fail("problem spec line " + std::to_string(e.line) + ": '" + e.key + "' expects " +
         std::to_string(count) + " numbers");
  }
}

int AsCount(const Entry &e, double v)
{
  if (v < 1.0 || v != static_cast<int>(v))
  {
    Fail("problem spec line " + std::to_string(e.line) + ": count must be a positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace

ProblemSpec ParseProblemSpec(const std::string &text)
{
  const auto entries = Tokenize(text);
  ProblemSpec spec;
  for (const auto &e : entries)
  {
    if (e.key == "dimension")
    {
      Expect(e, 1);
      spec.dimension = static_cast<int>(e.values[0]);
      Require(spec.dimension == 1 || spec.dimension == 2, "dimension must be 1 or 2");
    }
  }
  const int d = spec.dimension;
  auto point = [d](const std::vector<double> &v, std::size_t at) -> Point
  { return {v[at], d == 2 ? v[at + 1] : 0.0}; };

  for (const auto &e : entries)
  {
    if (e.key == "dimension")
    {
      continue;
    }
    if (e.key == "x" || e.key == "y")
    {
      Expect(e, 3);
      auto &lo = e.key == "x" ? spec.x0 : spec.y0;
      auto &hi = e.key == "x" ? spec.x1 : spec.y1;
      auto &n = e.key == "x" ? spec.nx : spec.ny;
      lo = e.values[0];
      hi = e.values[1];
      n = AsCount(e, e.values[2]);
    }
    else if (e.key == "boundary")
    {
      if (e.word == "dirichlet")
      {
        spec.boundary = Boundary::Dirichlet;
      }
      else if (e.word == "neumann")
      {
        spec.boundary = Boundary::Neumann;
      }
      else
      {
        Fail("problem spec line " + std::to_string(e.line) + ": boundary must be dirichlet or neumann");
      }
    }
    else if (e.key == "mu")
    {
      Expect(e, 1);
      spec.mu = e.values[0];
    }
    else if (e.key == "background_sigma")
    {
      Expect(e, 1);
      spec.background_sigma = e.values[0];
    }
    else if (e.key == "reference_sigma")
    {
      Expect(e, 1);
      spec.reference_sigma = e.values[0];
    }
    else if (e.key == "anomaly")
    {
      Expect(e, 2 * d + 1);
      Anomaly a;
      a.box.lo = {e.values[0], d == 2 ? e.values[2] : 0.0};
      a.box.hi = {e.values[1], d == 2 ? e.values[3] : 0.0};
      a.sigma = e.values[2 * d];
      spec.anomalies.push_back(a);
    }
    else if (e.key == "receiver")
    {
      Expect(e, d);
      spec.receivers.push_back(point(e.values, 0));
    }
    else if (e.key == "receiver_grid")
    {
      Expect(e, 3 * d);
      const int nx = AsCount(e, e.values[2]);
      const int ny = d == 2 ? AsCount(e, e.values[5]) : 1;
      for (int j = 0; j < ny; j++)
      {
        for (int i = 0; i < nx; i++)
        {
          const double sx = nx == 1 ? 0.0 : static_cast<double>(i) / (nx - 1);
          const double sy = ny == 1 ? 0.0 : static_cast<double>(j) / (ny - 1);
          spec.receivers.push_back({e.values[0] + sx * (e.values[1] - e.values[0]),
                                    d == 2 ? e.values[3] + sy * (e.values[4] - e.values[3]) : 0.0});
        }
      }
    }
    else if (e.key == "source_box")
    {
      Expect(e, 2 * d + 1);
      SourceFootprint s;
      s.kind = SourceFootprint::Kind::Box;
      s.box.lo = {e.values[0], d == 2 ? e.values[2] : 0.0};
      s.box.hi = {e.values[1], d == 2 ? e.values[3] : 0.0};
      s.amplitude = e.values[2 * d];
      spec.sources.push_back(s);
    }
    else if (e.key == "source_point")
    {
      Expect(e, d + 1);
      SourceFootprint s;
      s.kind = SourceFootprint::Kind::Point;
      s.point = point(e.values, 0);
      s.amplitude = e.values[d];
      spec.sources.push_back(s);
    }
    else
    {
      Fail("problem spec line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  return spec;
}

ProblemSpec LoadProblemSpec(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(Error::Kind::Io, "cannot open problem spec '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseProblemSpec(buf.str());
}

std::string FormatProblemSpec(const ProblemSpec &spec)
{
  const int d = spec.dimension;
  std::ostringstream out;
  out << std::setprecision(17);
  out << "dimension = " << d << "\n";
  out << "x = " << spec.x0 << " " << spec.x1 << " " << spec.nx << "\n";
  if (d == 2)
  {
    out << "y = " << spec.y0 << " " << spec.y1 << " " << spec.ny << "\n";
  }
  out << "boundary = " << (spec.boundary == Boundary::Dirichlet ? "dirichlet" : "neumann") << "\n";
  out << "mu = " << spec.mu << "\n";
  out << "background_sigma = " << spec.background_sigma << "\n";
  if (spec.reference_sigma > 0.0)
  {
    out << "reference_sigma = " << spec.reference_sigma << "\n";
  }
  auto box = [&](const Box &b)
  {
    out << b.lo[0] << " " << b.hi[0];
    if (d == 2)
    {
      out << " " << b.lo[1] << " " << b.hi[1];
    }
  };
  for (const auto &a : spec.anomalies)
  {
    out << "anomaly = ";
    box(a.box);
    out << " " << a.sigma << "\n";
  }
  for (const auto &r : spec.receivers)
  {
    out << "receiver = " << r[0];
    if (d == 2)
    {
      out << " " << r[1];
    }
    out << "\n";
  }
  for (const auto &s : spec.sources)
  {
    if (s.kind == SourceFootprint::Kind::Box)
    {
      out << "source_box = ";
      box(s.box);
    }
    else
    {
      out << "source_point = " << s.point[0];
      if (d == 2)
      {
        out << " " << s.point[1];
      }
    }
    out << " " << s.amplitude << "\n";
  }
  return out.str();
}

}  // namespace tdinv
