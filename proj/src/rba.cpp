// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/rba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace tdinv
{

using namespace std::complex_literals;

TimeChannels TimeChannels::LogSpaced(double lo_log10, double hi_log10, int count)
{
  Require(count >= 1, "time channel count must be positive");
  TimeChannels tc;
  tc.times.resize(count);
  for (int j = 0; j < count; j++)
  {
    const double s = (count == 1) ? 0.0 : static_cast<double>(j) / (count - 1);
    tc.times[j] = std::pow(10.0, lo_log10 + s * (hi_log10 - lo_log10));
  }
  tc.Validate();
  return tc;
}

void TimeChannels::Validate() const
{
  for (std::size_t j = 0; j < times.size(); j++)
  {
    Require(std::isfinite(times[j]) && times[j] > 0.0, "time channels must be positive");
    Require(j == 0 || times[j] > times[j - 1], "time channels must be strictly increasing");
  }
}

void RationalApproximant::CheckInvariants() const
{
  Require(residues.rows() == PoleCount() && residues.cols() == ChannelCount(),
          "residue matrix shape does not match poles × channels");
  for (std::size_t i = 0; i < poles.size(); i++)
  {
    Require(poles[i].imag() > 0.0, "pole representatives must lie in the upper half-plane");
    for (std::size_t k = 0; k < i; k++)
    {
      Require(poles[i] != poles[k], "poles must be pairwise distinct");
    }
  }
}

namespace
{

std::vector<double> Linspace(double a, double b, int n)
{
  std::vector<double> x(n);
  for (int k = 0; k < n; k++)
  {
    x[k] = (n == 1) ? a : a + (b - a) * static_cast<double>(k) / (n - 1);
  }
  return x;
}

std::vector<double> Logspace(double a, double b, int n)
{
  std::vector<double> x(n);
  const double la = std::log(a), lb = std::log(b);
  for (int k = 0; k < n; k++)
  {
    x[k] = (n == 1) ? a : std::exp(la + (lb - la) * static_cast<double>(k) / (n - 1));
  }
  if (n > 1)
  {
    x.front() = a;
    x.back() = b;
  }
  return x;
}

std::vector<double> TrainingGrid(double x_min, double x_max, double t_min,
                                 const FitConfig &cfg)
{
  const double x_scale = 1.0 / t_min;
  const double log_lo = std::max(x_min, 1.0e-3 * x_scale);
  std::vector<double> grid;
  if (log_lo >= x_max)
  {
    grid = Linspace(x_min, x_max, cfg.log_points + cfg.linear_points);
  }
  else
  {
    grid = Linspace(x_min, std::min(x_scale, x_max), cfg.linear_points);
    const auto lg = Logspace(log_lo, x_max, cfg.log_points);
    grid.insert(grid.end(), lg.begin(), lg.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// Real basis for a conjugate pole pair a, conj(a) evaluated at real x:
//   φ1 = 2 Re 1/(x - a),  φ2 = 2 Re i/(x - a) = -2 Im 1/(x - a),
// so c1 φ1 + c2 φ2 = 2 Re (c1 + i c2)/(x - a).
Matrix PairBasis(const std::vector<double> &x, const std::vector<Complex> &poles)
{
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(poles.size());
  Matrix phi(n, 2 * m);
  for (int k = 0; k < m; k++)
  {
    for (int r = 0; r < n; r++)
    {
      const Complex z = 1.0 / (x[r] - poles[k]);
      phi(r, 2 * k) = 2.0 * z.real();
      phi(r, 2 * k + 1) = -2.0 * z.imag();
    }
  }
  return phi;
}

Matrix ChannelTargets(const std::vector<double> &x, const TimeChannels &channels)
{
  Matrix f(x.size(), channels.size());
  for (int j = 0; j < channels.size(); j++)
  {
    for (std::size_t r = 0; r < x.size(); r++)
    {
      f(r, j) = std::exp(-channels.times[j] * x[r]);
    }
  }
  return f;
}

Matrix RowWeights(const Matrix &f, bool relative)
{
  Matrix w = Matrix::Ones(f.rows(), f.cols());
  if (relative)
  {
    w = f.cwiseMax(FitReport::rel_floor).cwiseInverse();
  }
  return w;
}

// Column-scaled least squares; returns the minimum-norm-in-scaled-coordinates solution.
Vector ScaledLeastSquares(const Matrix &A, const Vector &b)
{
  Vector scale = A.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < scale.size(); k++)
  {
    scale(k) = scale(k) > 0.0 ? 1.0 / scale(k) : 1.0;
  }
  const Matrix As = A * scale.asDiagonal();
  Eigen::ColPivHouseholderQR<Matrix> qr(As);
  return scale.asDiagonal() * qr.solve(b);
}

ComplexMatrix SolveResidues(const std::vector<double> &x, const Matrix &f, const Matrix &w,
                            const std::vector<Complex> &poles, bool shared_weights,
                            FitStats &stats)
{
  const Matrix phi = PairBasis(x, poles);
  const int m = static_cast<int>(poles.size());
  Matrix coeffs(2 * m, f.cols());
  if (shared_weights)
  {
    // One factorization serves every channel when the row weights coincide.
    Vector scale = phi.colwise().norm().transpose().cwiseMax(1.0e-300).cwiseInverse();
    Eigen::ColPivHouseholderQR<Matrix> qr(phi * scale.asDiagonal());
    coeffs = scale.asDiagonal() * qr.solve(f);
    stats.residue_solves += static_cast<int>(f.cols());
  }
  else
  {
    for (Eigen::Index j = 0; j < f.cols(); j++)
    {
      const Matrix A = w.col(j).asDiagonal() * phi;
      const Vector b = w.col(j).cwiseProduct(f.col(j));
      coeffs.col(j) = ScaledLeastSquares(A, b);
      stats.residue_solves++;
    }
  }
  ComplexMatrix residues(m, f.cols());
  for (Eigen::Index j = 0; j < f.cols(); j++)
  {
    for (int k = 0; k < m; k++)
    {
      residues(k, j) = Complex(coeffs(2 * k, j), coeffs(2 * k + 1, j));
    }
  }
  return residues;
}

double MaxError(const std::vector<double> &x, const TimeChannels &channels,
                const std::vector<Complex> &poles, const ComplexMatrix &residues)
{
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(poles.size());
  ComplexMatrix z(n, m);
  for (int r = 0; r < n; r++)
  {
    for (int i = 0; i < m; i++)
    {
      z(r, i) = 1.0 / (x[r] - poles[i]);
    }
  }
  const Matrix approx = 2.0 * (z * residues).real();
  double err = 0.0;
  for (int j = 0; j < channels.size(); j++)
  {
    for (int r = 0; r < n; r++)
    {
      err = std::max(err, std::abs(std::exp(-channels.times[j] * x[r]) - approx(r, j)));
    }
  }
  return err;
}

std::vector<Complex> InitialPoles(const TimeChannels &channels, int m)
{
  const double lo = 1.0 / channels.Max(), hi = 1.0 / channels.Min();
  std::vector<Complex> poles(m);
  for (int i = 0; i < m; i++)
  {
    const double s = (m == 1) ? 0.5 : static_cast<double>(i) / (m - 1);
    const double im = (lo == hi) ? lo : std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
    poles[i] = Complex(-im / 100.0, im);
  }
  return poles;
}

// Zeros of σ(x) = 1 + Σ_k 2 Re c̃_k / (x - a_k) from the real state-space realization
// (Â - b̂ c̃ᵀ) with 2×2 blocks [[Re a, Im a], [-Im a, Re a]] and b̂ = [2, 0] per pair.
// Returns upper-half-plane representatives; real zeros are paired into admissible
// conjugate pairs.
std::vector<Complex> RelocatePoles(const std::vector<Complex> &poles, const Vector &ctilde,
                                   double imag_floor)
{
  const int m = static_cast<int>(poles.size());
  Matrix H = Matrix::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; k++)
  {
    H(2 * k, 2 * k) = poles[k].real();
    H(2 * k, 2 * k + 1) = poles[k].imag();
    H(2 * k + 1, 2 * k) = -poles[k].imag();
    H(2 * k + 1, 2 * k + 1) = poles[k].real();
  }
  for (int k = 0; k < m; k++)
  {
    H.row(2 * k) -= 2.0 * ctilde.transpose();
  }
  Eigen::EigenSolver<Matrix> es(H, false);
  if (es.info() != Eigen::Success)
  {
    throw Error(Error::Kind::Numerical, "pole relocation eigenvalue solve failed");
  }
  const Eigen::VectorXcd ev = es.eigenvalues();

  double scale = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); k++)
  {
    scale = std::max(scale, std::abs(ev(k)));
  }
  const double real_tol = 1.0e-12 * std::max(scale, 1.0);

  std::vector<Complex> upper;
  std::vector<double> reals;
  for (Eigen::Index k = 0; k < ev.size(); k++)
  {
    if (std::abs(ev(k).imag()) <= real_tol)
    {
      reals.push_back(ev(k).real());
    }
    else if (ev(k).imag() > 0.0)
    {
      upper.push_back(ev(k));
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t k = 0; k + 1 < reals.size(); k += 2)
  {
    const double re = 0.5 * (reals[k] + reals[k + 1]);
    const double im = 0.5 * (reals[k + 1] - reals[k]);
    upper.emplace_back(re, im);
  }
  // An odd number of real zeros cannot occur for a real 2m × 2m matrix, but numerical
  // classification could split a pair; top up from the last real value.
  if (static_cast<int>(upper.size()) < m && !reals.empty())
  {
    upper.emplace_back(reals.back(), 0.0);
  }
  upper.resize(m, Complex(0.0, imag_floor));

  for (auto &p : upper)
  {
    // Keep every pole off the real axis; a pole on [0, ∞) would make K - ξM singular for
    // some positive semidefinite spectrum.
    if (p.imag() < imag_floor)
    {
      p = Complex(p.real(), std::abs(p.imag()) + imag_floor);
    }
  }
  std::sort(upper.begin(), upper.end(),
            [](const Complex &a, const Complex &b) { return a.imag() < b.imag(); });
  return upper;
}

double PoleMovement(const std::vector<Complex> &prev, const std::vector<Complex> &next)
{
  double move = 0.0;
  for (const auto &p : next)
  {
    double best = std::numeric_limits<double>::infinity();
    for (const auto &q : prev)
    {
      best = std::min(best, std::abs(p - q) / std::max(std::abs(q), 1.0e-300));
    }
    move = std::max(move, best);
  }
  return move;
}

void CheckCollisions(const std::vector<Complex> &poles, double tol)
{
  for (std::size_t i = 0; i < poles.size(); i++)
  {
    for (std::size_t k = 0; k < i; k++)
    {
      const double d = std::abs(poles[i] - poles[k]);
      if (d < tol * std::max(std::abs(poles[i]), std::abs(poles[k])))
      {
        throw Error(Error::Kind::Numerical, "pole collision during rational fit");
      }
    }
  }
}

}  // namespace

std::vector<double> CompositeGrid(double x_min, double x_max, double t_min, int grid_size)
{
  Require(x_max > x_min, "grid interval must be nonempty");
  const int half = std::max(1, grid_size / 2);
  int levels = 0;
  while ((1 << levels) < half)
  {
    levels++;
  }
  const int n = (1 << levels) + 1;
  const double x_scale = 1.0 / t_min;
  const double log_lo = std::max(x_min, 1.0e-3 * x_scale);

  std::vector<double> grid;
  const double lin_hi = std::min(x_scale, x_max);
  for (int k = 0; k < n; k++)
  {
    grid.push_back(x_min + (lin_hi - x_min) * static_cast<double>(k) / (n - 1));
  }
  if (log_lo < x_max)
  {
    const double la = std::log(log_lo), lb = std::log(x_max);
    for (int k = 0; k < n; k++)
    {
      grid.push_back(std::exp(la + (lb - la) * static_cast<double>(k) / (n - 1)));
    }
  }
  grid.push_back(x_min);
  grid.push_back(x_max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

RationalApproximant FitCommonPole(const TimeChannels &channels, double x_min, double x_max,
                                  int pole_count, const FitConfig &cfg)
{
  Require(pole_count >= 1, "pole count must be at least 1");
  Require(x_min >= 0.0 && x_max > x_min, "spectral interval must satisfy 0 <= x_min < x_max");
  Require(channels.size() >= 1, "at least one time channel is required");
  channels.Validate();

  const int m = pole_count;
  const auto x = TrainingGrid(x_min, x_max, channels.Min(), cfg);
  const auto xv = CompositeGrid(x_min, x_max, channels.Min(), cfg.validation_size);
  const Matrix f = ChannelTargets(x, channels);
  const Matrix w = RowWeights(f, cfg.relative_weighting);
  const int n = static_cast<int>(x.size());
  const int kt = channels.size();
  const double imag_floor = 1.0e-6 / channels.Max();

  RationalApproximant best;
  best.fit_error = std::numeric_limits<double>::infinity();
  FitStats stats;

  auto consider = [&](const std::vector<Complex> &poles, int iteration)
  {
    ComplexMatrix res = SolveResidues(x, f, w, poles, !cfg.relative_weighting, stats);
    const double err = MaxError(xv, channels, poles, res);
    if (err < best.fit_error)
    {
      best.poles = poles;
      best.residues = std::move(res);
      best.fit_error = err;
      stats.best_iteration = iteration;
    }
  };

  std::vector<Complex> poles = InitialPoles(channels, m);
  consider(poles, 0);
  for (int it = 1; it <= cfg.max_iters; it++)
  {
    // Fast relaxation: eliminate the per-channel numerator coefficients by projecting
    // onto the orthogonal complement of the (weighted) pole basis, then stack the reduced
    // rows, which only involve the common denominator correction c̃.
    const Matrix phi = PairBasis(x, poles);
    const Vector colscale = phi.colwise().norm().transpose().cwiseMax(1.0e-300).cwiseInverse();
    const Matrix phis = phi * colscale.asDiagonal();
    Matrix stacked(kt * 2 * m, 2 * m);
    Vector rhs(kt * 2 * m);
    Matrix basis;
    for (int j = 0; j < kt; j++)
    {
      if (cfg.relative_weighting || j == 0)
      {
        Eigen::HouseholderQR<Matrix> qr(w.col(j).asDiagonal() * phis);
        basis = qr.householderQ() * Matrix::Identity(n, 2 * m);
      }
      const Vector b = w.col(j).cwiseProduct(f.col(j));
      Matrix B = -(b.asDiagonal() * phis);
      B -= basis * (basis.transpose() * B);
      const Vector bp = b - basis * (basis.transpose() * b);
      Eigen::HouseholderQR<Matrix> qr(B);
      stacked.middleRows(j * 2 * m, 2 * m) =
          qr.matrixQR().topRows(2 * m).triangularView<Eigen::Upper>();
      rhs.segment(j * 2 * m, 2 * m) = (qr.householderQ().transpose() * bp).head(2 * m);
    }
    const Vector ctilde = colscale.asDiagonal() * ScaledLeastSquares(stacked, rhs);

    std::vector<Complex> next = RelocatePoles(poles, ctilde, imag_floor);
    stats.pole_relocations++;
    stats.iterations = it;
    CheckCollisions(next, cfg.collision_tol);
    const double move = PoleMovement(poles, next);
    poles = std::move(next);
    consider(poles, it);
    if (move < cfg.pole_tol)
    {
      stats.converged = true;
      break;
    }
  }

  best.channels = channels;
  best.x_min = x_min;
  best.x_max = x_max;
  best.stats = stats;
  best.CheckInvariants();
  return best;
}

RationalApproximant RefitResidues(const RationalApproximant &approx,
                                  const TimeChannels &channels, const FitConfig &cfg)
{
  channels.Validate();
  Require(channels.size() >= 1, "at least one time channel is required");
  const auto x = TrainingGrid(approx.x_min, approx.x_max, channels.Min(), cfg);
  const auto xv = CompositeGrid(approx.x_min, approx.x_max, channels.Min(), cfg.validation_size);
  const Matrix f = ChannelTargets(x, channels);
  const Matrix w = RowWeights(f, cfg.relative_weighting);

  RationalApproximant out;
  out.poles = approx.poles;
  out.x_min = approx.x_min;
  out.x_max = approx.x_max;
  out.channels = channels;
  out.residues = SolveResidues(x, f, w, out.poles, !cfg.relative_weighting, out.stats);
  out.fit_error = MaxError(xv, channels, out.poles, out.residues);
  out.CheckInvariants();
  return out;
}

Complex EvalHalfSum(const RationalApproximant &approx, double x, int channel)
{
  Complex s = 0.0;
  for (int i = 0; i < approx.PoleCount(); i++)
  {
    s += approx.residues(i, channel) / (x - approx.poles[i]);
  }
  return s;
}

double EvalScalar(const RationalApproximant &approx, double x, int channel)
{
  Require(channel >= 0 && channel < approx.ChannelCount(), "channel index out of range");
  return 2.0 * EvalHalfSum(approx, x, channel).real();
}

FitReport ValidateFit(const RationalApproximant &approx, int grid_size)
{
  Require(grid_size >= 10, "validation grid needs at least 10 points");
  FitReport report;
  if (approx.ChannelCount() == 0)
  {
    return report;
  }
  const auto grid = CompositeGrid(approx.x_min, approx.x_max, approx.channels.Min(), grid_size);
  report.grid_points = static_cast<int>(grid.size());
  report.max_abs.assign(approx.ChannelCount(), 0.0);
  report.max_rel.assign(approx.ChannelCount(), 0.0);
  for (int j = 0; j < approx.ChannelCount(); j++)
  {
    for (double x : grid)
    {
      const double exact = std::exp(-approx.channels.times[j] * x);
      const double err = std::abs(EvalScalar(approx, x, j) - exact);
      report.max_abs[j] = std::max(report.max_abs[j], err);
      if (exact >= FitReport::rel_floor)
      {
        report.max_rel[j] = std::max(report.max_rel[j], err / exact);
      }
    }
    report.overall_max_abs = std::max(report.overall_max_abs, report.max_abs[j]);
  }
  return report;
}

}  // namespace tdinv
