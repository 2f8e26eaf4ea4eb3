#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace stripwall {

// Objective evaluated at x; fills grad (full length) and returns the value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;
// z = P^{-1} g for an SPD metric P; entries of held variables must come out 0.
using Preconditioner = std::function<void(std::span<const double> g, std::span<double> z)>;
// In-place projection onto the admissible set (e.g. a box clamp).
using Projector = std::function<void(std::span<double> x)>;

struct DescentProblem {
  Objective objective;
  Preconditioner precondition;  // identity on free entries when empty
  Projector project;            // no-op when empty
  std::vector<char> held;       // nonzero = variable is not updated
  // Optional linear constraint c . x = const kept by every step (directions
  // are projected in the preconditioner metric); the gradient test then
  // ignores the multiplier direction c.
  std::vector<double> constraint;
  // Diagonal of the preconditioner metric; entries sitting on a bound with
  // an inward gradient are stepped with this diagonal scaling (ones if empty).
  std::vector<double> metric_diagonal;
};

enum class DescentMethod {
  steepest,  // (preconditioned) steepest descent
  lbfgs,     // limited-memory BFGS with the preconditioner as initial metric
};

struct DescentOptions {
  int max_iters = 20000;
  double grad_tol = 1e-8;     // on the projected gradient, infinity norm
  double energy_tol = 1e-12;  // relative energy change over stall_window iterations
  int stall_window = 10;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  DescentMethod method = DescentMethod::steepest;
  int lbfgs_memory = 8;
  // Called after every accepted step; may modify x and returns true if it
  // did (the objective is then re-evaluated before continuing).
  std::function<bool(int iteration, std::vector<double>& x)> on_iteration;
};

enum class StopReason { grad_tol, energy_stall, max_iters, line_search };

std::string to_string(StopReason r);

struct DescentResult {
  std::vector<double> x;
  double energy = 0.0;
  double grad_inf = 0.0;
  int iterations = 0;
  bool converged = false;  // grad_inf <= grad_tol at exit
  StopReason stop = StopReason::max_iters;
  std::vector<double> energy_history;  // energy after each accepted step
};

// Armijo backtracking (sufficient-decrease parameter armijo, factor backtrack)
// along the chosen direction with projection applied to each trial point.
// Throws std::logic_error if an accepted step ever increases the objective.
DescentResult descend(const DescentProblem& problem, std::vector<double> x0, const DescentOptions& opts);

}  // namespace stripwall
