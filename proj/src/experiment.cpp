#include "stiefel/experiment.hpp"

#include "stiefel/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace stiefel {

SpectrumInfo SpectrumFamily::at(std::size_t n) const {
  switch (kind) {
    case Kind::Linear: return parse_spectrum("linear:" + std::to_string(n));
    case Kind::Quadratic: return parse_spectrum("quadratic:" + std::to_string(n));
    case Kind::File: {
      SpectrumInfo s = parse_spectrum("file:" + path);
      if (s.size() != n) {
        throw ContractViolation("spectrum file has " + std::to_string(s.size()) +
                                " values but n = " + std::to_string(n));
      }
      return s;
    }
  }
  throw ContractViolation("unknown spectrum family");
}

SpectrumFamily parse_spectrum_family(std::string_view text) {
  SpectrumFamily family;
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  if (kind == "linear") {
    family.kind = SpectrumFamily::Kind::Linear;
  } else if (kind == "quadratic") {
    family.kind = SpectrumFamily::Kind::Quadratic;
  } else if (kind == "file" && colon != std::string_view::npos) {
    family.kind = SpectrumFamily::Kind::File;
    family.path = std::string(text.substr(colon + 1));
  } else {
    throw ParseError("unknown spectrum family '" + std::string(text) + "'");
  }
  return family;
}

void ExperimentSpec::validate() const {
  if (n_values.empty()) throw ContractViolation("experiment: no n values");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (!(n_values[i] > n_values[i - 1])) {
      throw ContractViolation("experiment: n values must be strictly ascending");
    }
  }
  if (trials_per_n < 1) throw ContractViolation("experiment: need at least one trial per n");
  if (methods.empty()) throw ContractViolation("experiment: no methods");
  if (problem == ProblemKind::Brockett && k < 1) throw ContractViolation("experiment: k must be >= 1");
  solver.validate();
}

std::uint64_t cell_seed(std::uint64_t base_seed, long n, int trial) {
  std::uint64_t z = (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(trial);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return base_seed + z;
}

// ---------------------------------------------------------------------------

FitResult loglog_fit(const std::vector<FitPoint>& points) {
  if (points.size() < 2) throw DegenerateFit("loglog_fit: need at least two points");
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.log_kappa;
    my += p.mean_log_iterations;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.log_kappa - mx;
    const double dy = p.mean_log_iterations - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateFit("loglog_fit: all abscissae coincide");

  FitResult fit;
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = points;
  return fit;
}

namespace {

auto row_key(const ResultRow& r) { return std::make_tuple(static_cast<int>(r.method), r.n, r.trial); }

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
}

}  // namespace

FitResult fit_rows(const std::vector<ResultRow>& rows, Method method) {
  std::vector<ResultRow> selected;
  for (const auto& r : rows) {
    if (r.method == method && r.termination == Termination::Converged && r.iterations > 0) {
      selected.push_back(r);
    }
  }
  sort_rows(selected);

  std::vector<FitPoint> points;
  for (std::size_t i = 0; i < selected.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < selected.size() && selected[j].n == selected[i].n) {
      sum += std::log(static_cast<double>(selected[j].iterations));
      ++j;
    }
    points.push_back({std::log(selected[i].kappa), sum / static_cast<double>(j - i)});
    i = j;
  }

  try {
    return loglog_fit(points);
  } catch (const DegenerateFit&) {
    FitResult undefined;
    undefined.points = std::move(points);
    return undefined;
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;

  for (const long n : spec.n_values) {
    const SpectrumInfo spectrum = spec.spectrum.at(static_cast<std::size_t>(n));
    const DiagonalOperator op{spectrum.as_vector()};

    const long k = spec.problem == ProblemKind::Sphere ? 1 : spec.k;
    Vector weights;
    double kappa = 0.0;
    if (spec.problem == ProblemKind::Sphere) {
      weights = Vector::Ones(1);
      kappa = sphere_condition_number(spectrum);
    } else {
      if (spec.weights) {
        weights = Eigen::Map<const Vector>(spec.weights->data(),
                                           static_cast<Eigen::Index>(spec.weights->size()));
        if (weights.size() != k) {
          throw ContractViolation("experiment: got " + std::to_string(weights.size()) +
                                  " weights for k = " + std::to_string(k));
        }
      } else {
        weights = optimal_weights(spectrum, k);
      }
      kappa = brockett_condition_number(spectrum, weights);
    }
    const BrockettObjective objective(op, weights);

    for (int trial = 0; trial < spec.trials_per_n; ++trial) {
      const std::uint64_t seed = cell_seed(spec.base_seed, n, trial);
      const StiefelPoint x0 = random_point(n, k, seed);
      for (const Method method : spec.methods) {
        SolverConfig config = spec.solver;
        config.record_history = false;
        try {
          const RunTrace trace = run_method(method, objective, x0, config);
          result.rows.push_back(ResultRow{method, n, k, kappa, trial, seed, trace.iterations,
                                          trace.f_evals, trace.g_evals, trace.restarts,
                                          trace.relative_grad_norm(), trace.termination,
                                          trace.wall_ms, trace.max_defect});
        } catch (const Error& e) {
          result.failures.push_back({method, n, trial, e.what()});
        }
      }
    }
  }

  sort_rows(result.rows);
  std::vector<Method> methods = spec.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  for (const Method m : methods) result.fits.emplace_back(m, fit_rows(result.rows, m));
  return result;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.n << ',' << r.k << ',' << format_double(r.kappa) << ','
        << r.trial << ',' << r.seed << ',' << r.iterations << ',' << r.f_evals << ',' << r.g_evals
        << ',' << r.restarts << ',' << format_double(r.final_rel_gradnorm) << ','
        << to_string(r.termination) << ',' << (timing ? format_double(r.wall_ms) : "NA") << '\n';
  }
}

namespace {

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("csv line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return value;
}

Termination parse_termination(const std::string& s, std::size_t line) {
  for (auto t : {Termination::Converged, Termination::MaxIterations, Termination::LineSearchFailed}) {
    if (s == to_string(t)) return t;
  }
  throw ParseError("csv line " + std::to_string(line) + ": unknown termination '" + s + "'");
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError("csv: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 13) {
      throw ParseError("csv line " + std::to_string(lineno) + ": expected 13 fields");
    }
    ResultRow r{};
    r.method = parse_method(f[0]);
    r.n = parse_number<long>(f[1], lineno);
    r.k = parse_number<long>(f[2], lineno);
    r.kappa = parse_number<double>(f[3], lineno);
    r.trial = parse_number<int>(f[4], lineno);
    r.seed = parse_number<std::uint64_t>(f[5], lineno);
    r.iterations = parse_number<long>(f[6], lineno);
    r.f_evals = parse_number<long>(f[7], lineno);
    r.g_evals = parse_number<long>(f[8], lineno);
    r.restarts = parse_number<long>(f[9], lineno);
    r.final_rel_gradnorm = parse_number<double>(f[10], lineno);
    r.termination = parse_termination(f[11], lineno);
    r.wall_ms = f[12] == "NA" ? 0.0 : parse_number<double>(f[12], lineno);
    r.max_defect = 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace stiefel
