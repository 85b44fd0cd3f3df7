// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include "tdinv/problem.hpp"
#include "tdinv/problem_spec.hpp"

namespace tdinv
{

double Grid::DomainMeasure() const
{
  double total = 0.0;
  for (const auto &c : cells)
  {
    total += c.measure;
  }
  return total;
}

Model Model::Uniform(int cells, double sigma)
{
  Require(sigma > 0.0, "conductivity must be positive");
  Model model;
  model.m = Vector::Constant(cells, std::log(sigma));
  model.m_ref = model.m;
  return model;
}

bool Box::Contains(const Point &p, int dimension) const
{
  const bool in_x = p[0] >= lo[0] && p[0] <= hi[0];
  return dimension == 1 ? in_x : (in_x && p[1] >= lo[1] && p[1] <= hi[1]);
}

namespace
{

// Vertex order (a, b, c) of each triangle is counter-clockwise.
double TriangleArea(const Point &a, const Point &b, const Point &c)
{
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

// P1 stiffness ∫ ∇φ_i · ∇φ_j on one cell.
Matrix LocalStiffness(const Grid &grid, const Cell &cell)
{
  if (grid.dimension == 1)
  {
    const double h = cell.measure;
    Matrix k(2, 2);
    k << 1.0, -1.0, -1.0, 1.0;
    return k / h;
  }
  const auto &p0 = grid.nodes[cell.vertices[0]];
  const auto &p1 = grid.nodes[cell.vertices[1]];
  const auto &p2 = grid.nodes[cell.vertices[2]];
  // Gradients of barycentric coordinates: ∇λ_i = (y_j - y_k, x_k - x_j) / (2A).
  const double area = cell.measure;
  Eigen::Matrix<double, 3, 2> grad;
  grad << p1[1] - p2[1], p2[0] - p1[0],
          p2[1] - p0[1], p0[0] - p2[0],
          p0[1] - p1[1], p1[0] - p0[0];
  grad /= 2.0 * area;
  return area * grad * grad.transpose();
}

// Consistent P1 mass ∫ φ_i φ_j with unit conductivity.
Matrix LocalMass(const Grid &grid, const Cell &cell)
{
  if (grid.dimension == 1)
  {
    Matrix m(2, 2);
    m << 2.0, 1.0, 1.0, 2.0;
    return m * (cell.measure / 6.0);
  }
  Matrix m(3, 3);
  m << 2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0;
  return m * (cell.measure / 12.0);
}

// Cell containing p and the P1 basis values there; nullopt outside the domain.
struct Location
{
  int cell = -1;
  std::vector<double> weights;
};

std::optional<Location> Locate(const Grid &grid, const Point &p)
{
  const double tol = 1.0e-12 * std::max(grid.hi[0] - grid.lo[0], 1.0);
  if (p[0] < grid.lo[0] - tol || p[0] > grid.hi[0] + tol)
  {
    return std::nullopt;
  }
  const double hx = (grid.hi[0] - grid.lo[0]) / grid.nx;
  const int i = std::clamp(static_cast<int>(std::floor((p[0] - grid.lo[0]) / hx)), 0, grid.nx - 1);
  const double s = std::clamp((p[0] - (grid.lo[0] + i * hx)) / hx, 0.0, 1.0);
  if (grid.dimension == 1)
  {
    return Location{i, {1.0 - s, s}};
  }
  if (p[1] < grid.lo[1] - tol || p[1] > grid.hi[1] + tol)
  {
    return std::nullopt;
  }
  const double hy = (grid.hi[1] - grid.lo[1]) / grid.ny;
  const int j = std::clamp(static_cast<int>(std::floor((p[1] - grid.lo[1]) / hy)), 0, grid.ny - 1);
  const double t = std::clamp((p[1] - (grid.lo[1] + j * hy)) / hy, 0.0, 1.0);
  const int square = j * grid.nx + i;
  if (t <= s)
  {
    return Location{2 * square, {1.0 - s, s - t, t}};
  }
  return Location{2 * square + 1, {1.0 - t, s, t - s}};
}

std::vector<std::pair<int, double>> InterpolationRow(const Grid &grid, const Point &p)
{
  const auto loc = Locate(grid, p);
  if (!loc)
  {
    Fail("point lies outside the domain");
  }
  std::vector<std::pair<int, double>> row;
  const auto &cell = grid.cells[loc->cell];
  for (std::size_t k = 0; k < cell.vertices.size(); k++)
  {
    const int dof = grid.dof_of_node[cell.vertices[k]];
    if (dof >= 0 && loc->weights[k] != 0.0)
    {
      row.emplace_back(dof, loc->weights[k]);
    }
  }
  return row;
}

}  // namespace

Grid BuildGrid(const ProblemSpec &spec)
{
  Require(spec.dimension == 1 || spec.dimension == 2, "dimension must be 1 or 2");
  Require(spec.nx >= 1 && spec.x1 > spec.x0, "degenerate cells: x extent or count invalid");
  if (spec.dimension == 2)
  {
    Require(spec.ny >= 1 && spec.y1 > spec.y0, "degenerate cells: y extent or count invalid");
  }

  Grid grid;
  grid.dimension = spec.dimension;
  grid.lo = {spec.x0, spec.dimension == 2 ? spec.y0 : 0.0};
  grid.hi = {spec.x1, spec.dimension == 2 ? spec.y1 : 0.0};
  grid.nx = spec.nx;
  grid.ny = spec.dimension == 2 ? spec.ny : 1;
  const double hx = (spec.x1 - spec.x0) / spec.nx;

  if (spec.dimension == 1)
  {
    for (int i = 0; i <= spec.nx; i++)
    {
      grid.nodes.push_back({spec.x0 + i * hx, 0.0});
    }
    grid.nodes.back()[0] = spec.x1;
    for (int i = 0; i < spec.nx; i++)
    {
      Cell c;
      c.vertices = {i, i + 1};
      c.measure = grid.nodes[i + 1][0] - grid.nodes[i][0];
      c.centroid = {0.5 * (grid.nodes[i][0] + grid.nodes[i + 1][0]), 0.0};
      grid.cells.push_back(c);
    }
    for (int i = 0; i + 1 < spec.nx; i++)
    {
      grid.faces.push_back({i, i + 1, 1.0});
    }
  }
  else
  {
    const double hy = (spec.y1 - spec.y0) / spec.ny;
    auto node = [&](int i, int j) { return j * (spec.nx + 1) + i; };
    for (int j = 0; j <= spec.ny; j++)
    {
      for (int i = 0; i <= spec.nx; i++)
      {
        grid.nodes.push_back({i == spec.nx ? spec.x1 : spec.x0 + i * hx,
                              j == spec.ny ? spec.y1 : spec.y0 + j * hy});
      }
    }
    for (int j = 0; j < spec.ny; j++)
    {
      for (int i = 0; i < spec.nx; i++)
      {
        const int n00 = node(i, j), n10 = node(i + 1, j), n01 = node(i, j + 1),
                  n11 = node(i + 1, j + 1);
        for (const auto &tri : {std::array<int, 3>{n00, n10, n11}, std::array<int, 3>{n00, n11, n01}})
        {
          Cell c;
          c.vertices = {tri[0], tri[1], tri[2]};
          const auto &a = grid.nodes[tri[0]], &b = grid.nodes[tri[1]], &d = grid.nodes[tri[2]];
          c.measure = TriangleArea(a, b, d);
          c.centroid = {(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0};
          Require(c.measure > 0.0, "degenerate triangle");
          grid.cells.push_back(c);
        }
      }
    }
    std::map<std::pair<int, int>, int> first_owner;
    for (int c = 0; c < grid.CellCount(); c++)
    {
      const auto &v = grid.cells[c].vertices;
      for (int e = 0; e < 3; e++)
      {
        const int a = v[e], b = v[(e + 1) % 3];
        const auto key = std::minmax(a, b);
        const auto it = first_owner.find(key);
        if (it == first_owner.end())
        {
          first_owner.emplace(key, c);
        }
        else
        {
          const auto &pa = grid.nodes[a], &pb = grid.nodes[b];
          grid.faces.push_back({it->second, c, std::hypot(pb[0] - pa[0], pb[1] - pa[1])});
        }
      }
    }
  }

  grid.dof_of_node.assign(grid.nodes.size(), -1);
  int dof = 0;
  for (std::size_t n = 0; n < grid.nodes.size(); n++)
  {
    bool boundary = false;
    if (spec.boundary == Boundary::Dirichlet)
    {
      const int i = static_cast<int>(n) % (spec.nx + 1);
      const int j = static_cast<int>(n) / (spec.nx + 1);
      boundary = i == 0 || i == spec.nx || (spec.dimension == 2 && (j == 0 || j == spec.ny));
    }
    if (!boundary)
    {
      grid.dof_of_node[n] = dof++;
    }
  }
  grid.dof_count = dof;
  Require(dof > 0, "grid has no free degrees of freedom");
  return grid;
}

Problem BuildProblem(const ProblemSpec &spec)
{
  Require(spec.mu > 0.0, "mu must be positive");
  Grid grid = BuildGrid(spec);
  const int n = grid.dof_count;

  Problem problem;
  std::vector<Triplet> kt;
  problem.slices.reserve(grid.cells.size());
  for (const auto &cell : grid.cells)
  {
    const Matrix ke = LocalStiffness(grid, cell) / spec.mu;
    const Matrix me = LocalMass(grid, cell);
    std::vector<int> keep;
    for (std::size_t a = 0; a < cell.vertices.size(); a++)
    {
      if (grid.dof_of_node[cell.vertices[a]] >= 0)
      {
        keep.push_back(static_cast<int>(a));
      }
    }
    MassSlice slice;
    slice.local.resize(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); a++)
    {
      slice.dofs.push_back(grid.dof_of_node[cell.vertices[keep[a]]]);
      for (std::size_t b = 0; b < keep.size(); b++)
      {
        slice.local(a, b) = me(keep[a], keep[b]);
        kt.emplace_back(slice.dofs[a], grid.dof_of_node[cell.vertices[keep[b]]],
                        ke(keep[a], keep[b]));
      }
    }
    problem.slices.push_back(std::move(slice));
  }
  problem.K.resize(n, n);
  problem.K.setFromTriplets(kt.begin(), kt.end());
  problem.K.makeCompressed();

  std::vector<Triplet> qt;
  for (std::size_t r = 0; r < spec.receivers.size(); r++)
  {
    if (!Locate(grid, spec.receivers[r]))
    {
      Fail("receiver " + std::to_string(r) + " lies outside the domain");
    }
    for (const auto &[dof, w] : InterpolationRow(grid, spec.receivers[r]))
    {
      qt.emplace_back(static_cast<int>(r), dof, w);
    }
  }
  problem.Q.resize(static_cast<Eigen::Index>(spec.receivers.size()), n);
  problem.Q.setFromTriplets(qt.begin(), qt.end());
  problem.Q.makeCompressed();
  problem.receivers = spec.receivers;

  problem.grid = std::move(grid);
  problem.f = Vector::Zero(n);
  for (const auto &src : spec.sources)
  {
    problem.f += BuildSource(problem, src);
  }
  return problem;
}

Vector BuildSource(const Problem &problem, const SourceFootprint &footprint)
{
  Require(problem.grid.has_value(), "source assembly requires a grid");
  const Grid &grid = *problem.grid;
  Vector f = Vector::Zero(problem.DofCount());
  if (footprint.kind == SourceFootprint::Kind::Point)
  {
    if (!Locate(grid, footprint.point))
    {
      Fail("source footprint does not intersect the domain");
    }
    for (const auto &[dof, w] : InterpolationRow(grid, footprint.point))
    {
      f(dof) += footprint.amplitude * w;
    }
    return f;
  }
  const auto cells = CellsInBox(grid, footprint.box);
  if (cells.empty())
  {
    Fail("source footprint does not intersect the domain");
  }
  for (int c : cells)
  {
    const auto &cell = grid.cells[c];
    // ∫_cell φ_i = measure / (vertices per cell) for P1 elements.
    const double share = footprint.amplitude * cell.measure / cell.vertices.size();
    for (int v : cell.vertices)
    {
      const int dof = grid.dof_of_node[v];
      if (dof >= 0)
      {
        f(dof) += share;
      }
    }
  }
  return f;
}

std::vector<int> CellsInBox(const Grid &grid, const Box &box)
{
  std::vector<int> out;
  for (int c = 0; c < grid.CellCount(); c++)
  {
    if (box.Contains(grid.cells[c].centroid, grid.dimension))
    {
      out.push_back(c);
    }
  }
  return out;
}

Model BuildTrueModel(const ProblemSpec &spec, const Problem &problem)
{
  Require(problem.grid.has_value(), "model painting requires a grid");
  Model model = BuildReferenceModel(spec, problem);
  model.m = Vector::Constant(problem.CellCount(), std::log(spec.background_sigma));
  for (const auto &a : spec.anomalies)
  {
    Require(a.sigma > 0.0, "anomaly conductivity must be positive");
    for (int c : CellsInBox(*problem.grid, a.box))
    {
      model.m(c) = std::log(a.sigma);
    }
  }
  return model;
}

Model BuildReferenceModel(const ProblemSpec &spec, const Problem &problem)
{
  const double ref = spec.reference_sigma > 0.0 ? spec.reference_sigma : spec.background_sigma;
  return Model::Uniform(problem.CellCount(), ref);
}

SparseMatrix AssembleM(const Problem &problem, const Vector &m)
{
  Require(m.size() == problem.CellCount(), "model size does not match cell count");
  std::vector<Triplet> t;
  for (int c = 0; c < problem.CellCount(); c++)
  {
    const auto &s = problem.slices[c];
    const double sigma = std::exp(m(c));
    for (std::size_t a = 0; a < s.dofs.size(); a++)
    {
      for (std::size_t b = 0; b < s.dofs.size(); b++)
      {
        t.emplace_back(s.dofs[a], s.dofs[b], sigma * s.local(a, b));
      }
    }
  }
  SparseMatrix M(problem.DofCount(), problem.DofCount());
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

ComplexSparseMatrix DMContract(const Problem &problem, const Vector &m, const ComplexVector &g)
{
  Require(g.size() == problem.DofCount(), "vector length does not match DOF count");
  Require(m.size() == problem.CellCount(), "model size does not match cell count");
  std::vector<ComplexTriplet> t;
  for (int c = 0; c < problem.CellCount(); c++)
  {
    const auto &s = problem.slices[c];
    const double sigma = std::exp(m(c));
    for (std::size_t a = 0; a < s.dofs.size(); a++)
    {
      Complex acc = 0.0;
      for (std::size_t b = 0; b < s.dofs.size(); b++)
      {
        acc += s.local(a, b) * g(s.dofs[b]);
      }
      if (acc != Complex(0.0))
      {
        t.emplace_back(s.dofs[a], c, sigma * acc);
      }
    }
  }
  ComplexSparseMatrix G(problem.DofCount(), problem.CellCount());
  G.setFromTriplets(t.begin(), t.end());
  G.makeCompressed();
  return G;
}

ComplexVector DMContractApply(const Problem &problem, const Vector &m, const ComplexVector &g,
                              const Vector &v)
{
  ComplexVector out = ComplexVector::Zero(problem.DofCount());
  for (int c = 0; c < problem.CellCount(); c++)
  {
    if (v(c) == 0.0)
    {
      continue;
    }
    const auto &s = problem.slices[c];
    const double scale = std::exp(m(c)) * v(c);
    for (std::size_t a = 0; a < s.dofs.size(); a++)
    {
      Complex acc = 0.0;
      for (std::size_t b = 0; b < s.dofs.size(); b++)
      {
        acc += s.local(a, b) * g(s.dofs[b]);
      }
      out(s.dofs[a]) += scale * acc;
    }
  }
  return out;
}

ComplexVector DMContractApplyTranspose(const Problem &problem, const Vector &m,
                                       const ComplexVector &g, const ComplexVector &z)
{
  ComplexVector out(problem.CellCount());
  for (int c = 0; c < problem.CellCount(); c++)
  {
    const auto &s = problem.slices[c];
    Complex acc = 0.0;
    for (std::size_t a = 0; a < s.dofs.size(); a++)
    {
      Complex mg = 0.0;
      for (std::size_t b = 0; b < s.dofs.size(); b++)
      {
        mg += s.local(a, b) * g(s.dofs[b]);
      }
      acc += z(s.dofs[a]) * mg;
    }
    out(c) = std::exp(m(c)) * acc;
  }
  return out;
}

}  // namespace tdinv
