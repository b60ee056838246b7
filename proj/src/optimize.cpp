#include "qmerge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qmerge/random.hpp"

namespace qmerge {

SimplexPoint project_to_simplex(SimplexPoint v) {
  if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
  SimplexPoint u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / double(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  // Renormalize away rounding.
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

bool on_simplex(const SimplexPoint& p, double tol) {
  if (p.empty()) return false;
  double s = 0.0;
  for (double x : p) {
    if (!(x >= -tol)) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

namespace {

SimplexPoint vertex(std::size_t n, std::size_t i) {
  SimplexPoint p(n, 0.0);
  p[i] = 1.0;
  return p;
}

double max_abs_diff(const SimplexPoint& a, const SimplexPoint& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// One projected-gradient ascent run.
SimplexResult ascend(const SimplexObjective& f, SimplexPoint p, const SimplexOptions& opts) {
  const std::size_t n = p.size();
  SimplexResult r;
  double v = f(p);
  ++r.evaluations;
  double t = 1.0;
  for (; r.iterations < opts.max_iterations; ++r.iterations) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      SimplexPoint q = p;
      for (std::size_t j = 0; j < n; ++j) q[j] += opts.fd_step * ((i == j ? 1.0 : 0.0) - p[j]);
      g[i] = (f(q) - v) / opts.fd_step;
      ++r.evaluations;
    }
    bool moved = false;
    double gain = 0.0;
    while (t > 1e-14) {
      SimplexPoint q = p;
      for (std::size_t j = 0; j < n; ++j) q[j] += t * g[j];
      q = project_to_simplex(std::move(q));
      if (max_abs_diff(q, p) < 1e-16) {
        t *= 0.5;
        continue;
      }
      const double fq = f(q);
      ++r.evaluations;
      if (fq > v) {
        gain = fq - v;
        p = std::move(q);
        v = fq;
        moved = true;
        t = std::min(t * 2.0, 1e6);
        break;
      }
      t *= 0.5;
    }
    if (!moved || gain < opts.tol * 1e-4) {
      ++r.iterations;
      break;
    }
  }
  r.p = std::move(p);
  r.value = v;
  return r;
}

SimplexResult multistart(const SimplexObjective& f, std::size_t n, const SimplexOptions& opts) {
  if (n == 0) throw std::invalid_argument("simplex optimizer: dimension must be positive");
  std::vector<SimplexPoint> starts{SimplexPoint(n, 1.0 / double(n))};
  if (opts.vertex_starts && n > 1)
    for (std::size_t i = 0; i < n; ++i) starts.push_back(vertex(n, i));
  SplitMix64 rng(opts.seed);
  if (n > 1)
    for (std::size_t i = 0; i < opts.random_starts; ++i) starts.push_back(random_simplex_point(n, rng));
  SimplexResult best;
  bool first = true;
  std::size_t iters = 0, evals = 0;
  for (const auto& s : starts) {
    SimplexResult r = ascend(f, s, opts);
    iters += r.iterations;
    evals += r.evaluations;
    if (first || r.value > best.value) {
      best = std::move(r);
      first = false;
    }
  }
  best.iterations = iters;
  best.evaluations = evals;
  best.starts = starts.size();
  return best;
}

}  // namespace

SimplexResult maximize_on_simplex(const SimplexObjective& f, std::size_t n, const SimplexOptions& opts) {
  return multistart(f, n, opts);
}

SimplexResult minimize_on_simplex(const SimplexObjective& f, std::size_t n, const SimplexOptions& opts) {
  SimplexResult r = multistart([&](const SimplexPoint& p) { return -f(p); }, n, opts);
  r.value = -r.value;
  return r;
}

SimplexResult minimize_convex_on_simplex(const ConvexObjective& f, std::size_t n, const SubgradientOptions& opts) {
  if (n == 0) throw std::invalid_argument("subgradient optimizer: dimension must be positive");
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const SimplexPoint& p, const ValueAndSubgradient& vs) {
    if (vs.value < best.value) {
      best.value = vs.value;
      best.p = p;
    }
  };
  std::size_t best_vertex = 0;
  double best_vertex_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const SimplexPoint v = vertex(n, i);
    const auto vs = f(v);
    ++best.evaluations;
    consider(v, vs);
    if (vs.value < best_vertex_value) {
      best_vertex_value = vs.value;
      best_vertex = i;
    }
  }
  std::vector<SimplexPoint> starts{vertex(n, best_vertex)};
  if (n > 1) starts.push_back(SimplexPoint(n, 1.0 / double(n)));
  best.starts = starts.size();
  for (SimplexPoint p : starts) {
    for (std::size_t k = 0; k < opts.max_iterations && best.value > opts.tol; ++k) {
      const auto vs = f(p);
      ++best.evaluations;
      ++best.iterations;
      consider(p, vs);
      double norm = 0.0;
      for (double g : vs.subgradient) norm += g * g;
      norm = std::sqrt(norm);
      if (norm < 1e-15) break;
      const double step = opts.initial_step / std::sqrt(double(k + 1)) / norm;
      for (std::size_t i = 0; i < n; ++i) p[i] -= step * vs.subgradient[i];
      p = project_to_simplex(std::move(p));
    }
    if (best.value <= opts.tol) break;
  }
  return best;
}

CompassResult compass_maximize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const CompassOptions& opts) {
  CompassResult r;
  r.x = std::move(x0);
  r.value = f(r.x);
  r.evaluations = 1;
  double step = opts.initial_step;
  while (step >= opts.min_step && r.evaluations < opts.max_evaluations) {
    ++r.sweeps;
    bool improved = false;
    for (std::size_t i = 0; i < r.x.size() && r.evaluations < opts.max_evaluations; ++i) {
      for (double sign : {1.0, -1.0}) {
        if (r.evaluations >= opts.max_evaluations) break;
        const double old = r.x[i];
        r.x[i] = old + sign * step;
        const double v = f(r.x);
        ++r.evaluations;
        if (v > r.value) {
          r.value = v;
          improved = true;
          break;
        }
        r.x[i] = old;
      }
    }
    if (!improved) step *= 0.5;
  }
  return r;
}

Matrix hermitian_from_params(const std::vector<double>& x, std::size_t n) {
  if (x.size() != n * n) throw std::invalid_argument("hermitian_from_params: expected n^2 parameters");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix h = Matrix::Zero(m, m);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m; ++i) h(i, i) = x[k++];
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      h(i, j) = cplx(x[k], x[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  return h;
}

Instrument instrument_from_params(const std::vector<double>& x, std::size_t d, std::size_t outcomes,
                                  const NumericConfig& cfg) {
  if (d == 0 || outcomes == 0) throw std::invalid_argument("instrument_from_params: empty instrument");
  const std::size_t n = d * outcomes;
  check_cap("instrument parameterization dimension", n, cfg.dim_cap);
  const Matrix h = hermitian_from_params(x, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector phases = (es.eigenvalues().cast<cplx>() * cplx(0.0, 1.0)).array().exp();
  const auto di = static_cast<Eigen::Index>(d);
  const Matrix v = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().topRows(di).adjoint();
  std::vector<CpMap> maps;
  for (std::size_t j = 0; j < outcomes; ++j)
    maps.emplace_back(std::vector<Matrix>{v.block(static_cast<Eigen::Index>(j) * di, 0, di, di)}, cfg);
  return Instrument(std::move(maps), cfg);
}

}  // namespace qmerge
