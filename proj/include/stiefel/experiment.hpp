#pragma once

// Condition-number scaling experiments: run the solvers over a sweep of
// problem sizes with seeded random starts, and fit log(iterations) against
// log(kappa).

#include "stiefel/objectives.hpp"
#include "stiefel/optimizers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stiefel {

enum class ProblemKind { Sphere, Brockett };

/// Spectrum family evaluated at each n of the sweep.
struct SpectrumFamily {
  enum class Kind { Linear, Quadratic, File } kind = Kind::Linear;
  std::string path;  // File only; the same spectrum is used for every n

  SpectrumInfo at(std::size_t n) const;
};

/// "linear", "quadratic", "file:<path>"; a trailing ":n" (as in "linear:100")
/// is accepted and ignored because the sweep supplies n.
SpectrumFamily parse_spectrum_family(std::string_view text);

struct ExperimentSpec {
  ProblemKind problem = ProblemKind::Sphere;
  long k = 1;                              // ignored for Sphere
  SpectrumFamily spectrum;
  std::optional<std::vector<double>> weights;  // explicit weights; empty means optimal for the spectrum
  std::vector<long> n_values;
  int trials_per_n = 1;
  std::uint64_t base_seed = 0;
  std::vector<Method> methods;
  SolverConfig solver;

  /// Throws ContractViolation if n_values is not ascending or trials_per_n < 1.
  void validate() const;
};

/// Seed of the random start for one (n, trial) cell: base_seed plus a
/// splitmix64 hash of (n, trial). Every method in a cell shares it.
std::uint64_t cell_seed(std::uint64_t base_seed, long n, int trial);

struct ResultRow {
  Method method;
  long n;
  long k;
  double kappa;
  int trial;
  std::uint64_t seed;
  long iterations;
  long f_evals;
  long g_evals;
  long restarts;
  double final_rel_gradnorm;
  Termination termination;
  double wall_ms;
  double max_defect;  // not part of the CSV
};

struct FitPoint {
  double log_kappa;
  double mean_log_iterations;
};

struct FitResult {
  bool defined = false;  // false when fewer than two distinct abscissae were available
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<FitPoint> points;
};

/// Ordinary least squares of mean_log_iterations on log_kappa. Both
/// coordinates are already natural logarithms. Throws DegenerateFit with
/// fewer than two distinct abscissae.
FitResult loglog_fit(const std::vector<FitPoint>& points);

/// Aggregates converged rows of one method into per-n points (mean of the
/// natural log of the iteration count) and fits them. Rows are visited in
/// canonical order so the result only depends on the row set. Returns an
/// undefined FitResult if fewer than two points exist.
FitResult fit_rows(const std::vector<ResultRow>& rows, Method method);

struct ExperimentFailure {
  Method method;
  long n;
  int trial;
  std::string message;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // canonical order: method, n, trial
  std::vector<std::pair<Method, FitResult>> fits;
  std::vector<ExperimentFailure> failures;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Exact CSV header of the row table.
inline constexpr const char* kCsvHeader =
    "method,n,k,kappa,trial,seed,iterations,f_evals,g_evals,restarts,final_rel_gradnorm,"
    "termination,wall_ms";

/// Writes the CSV. With `timing` false the wall_ms column holds "NA" so the
/// output is a pure function of the experiment spec.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timing);

/// Parses a CSV written by write_csv. Throws ParseError.
std::vector<ResultRow> read_csv(std::istream& in);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace stiefel
