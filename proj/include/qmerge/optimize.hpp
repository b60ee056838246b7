#pragma once

// Small deterministic optimizers: smooth search on the probability simplex,
// projected subgradient for convex nonsmooth objectives, compass search in
// R^n, and the exponential-map parameterization of instruments.

#include <cstdint>
#include <functional>
#include <vector>

#include "qmerge/channels.hpp"

namespace qmerge {

using SimplexPoint = std::vector<double>;
using SimplexObjective = std::function<double(const SimplexPoint&)>;

// Euclidean projection onto {p >= 0, sum p = 1}.
SimplexPoint project_to_simplex(SimplexPoint v);
bool on_simplex(const SimplexPoint& p, double tol = 1e-9);

struct SimplexOptions {
  std::size_t max_iterations = 500;
  double tol = 1e-6;                // stop when an iteration improves by less than tol * 1e-3
  std::size_t random_starts = 2;    // in addition to the uniform point
  bool vertex_starts = true;        // also start at (and evaluate) every vertex
  std::uint64_t seed = 0;
  double fd_step = 1e-7;
};

struct SimplexResult {
  SimplexPoint p;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t starts = 0;
};

// Multi-start projected gradient with forward differences along the
// feasible directions e_i - p and backtracking line search.
SimplexResult maximize_on_simplex(const SimplexObjective& f, std::size_t n, const SimplexOptions& opts = {});
SimplexResult minimize_on_simplex(const SimplexObjective& f, std::size_t n, const SimplexOptions& opts = {});

// Value and one subgradient (with respect to p) of a convex function.
struct ValueAndSubgradient {
  double value = 0.0;
  std::vector<double> subgradient;
};
using ConvexObjective = std::function<ValueAndSubgradient(const SimplexPoint&)>;

struct SubgradientOptions {
  std::size_t max_iterations = 2000;
  double tol = 1e-6;  // stop once the best value is <= tol (objectives here are >= 0)
  double initial_step = 0.5;
};

// Projected subgradient with step initial_step / sqrt(k+1), started from the
// best vertex and from the uniform point; returns the best iterate seen.
SimplexResult minimize_convex_on_simplex(const ConvexObjective& f, std::size_t n,
                                         const SubgradientOptions& opts = {});

struct CompassOptions {
  double initial_step = 0.5;
  double min_step = 1e-4;
  std::size_t max_evaluations = 400;
};

struct CompassResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t sweeps = 0;
};

// Coordinate (compass) search for a maximum; a step is accepted only when it
// strictly improves the value, so the result is never below f(x0).
CompassResult compass_maximize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const CompassOptions& opts = {});

// Hermitian n x n matrix from n^2 reals: diagonal first, then (re, im) of
// the strict upper triangle row by row.
Matrix hermitian_from_params(const std::vector<double>& x, std::size_t n);
// J outcomes with one Kraus operator each: the row blocks of the first d
// columns of exp(iH), H = hermitian_from_params(x, J d). x = 0 gives the
// identity on outcome 0 and zero maps elsewhere.
Instrument instrument_from_params(const std::vector<double>& x, std::size_t d, std::size_t outcomes,
                                  const NumericConfig& cfg = default_config());
inline std::size_t instrument_param_count(std::size_t d, std::size_t outcomes) {
  return d * outcomes * d * outcomes;
}

}  // namespace qmerge
