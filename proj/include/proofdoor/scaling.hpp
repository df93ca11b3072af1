#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace proofdoor {

enum class PointStatus { Solved, Timeout, Sat };

const char *to_string(PointStatus s);

struct TimingPoint {
  int k = 0;
  double vars = 0;
  double clauses = 0;
  double time_s = 0;
  PointStatus status = PointStatus::Solved;
};

enum class SizeMeasure { Clauses, Vars };

struct TimingSeries {
  std::string family;
  std::vector<TimingPoint> points; // k strictly increasing

  // Points before the first sat/timeout point.
  TimingSeries truncated() const;
  std::vector<double> sizes(SizeMeasure m = SizeMeasure::Clauses) const;
  std::vector<double> times() const;
  std::vector<double> depths() const;
};

enum class ScalingLabel { Linear, Polynomial, Exponential, Unknown };

const char *to_string(ScalingLabel l);

struct ModelFit {
  double r2 = 0;
  // linear: {a, b} for a*s + b. polynomial: coefficients c_0..c_d of
  // sum c_i u^i with u = (s - x_center) / x_scale. exponential: {alpha,
  // beta} for alpha * exp(beta * s).
  std::vector<double> params;
};

struct FitReport {
  ScalingLabel label = ScalingLabel::Unknown;
  ModelFit linear;
  ModelFit polynomial;
  ModelFit exponential;
  double adjusted_linear_r2 = 0;
  double x_center = 0; // polynomial input normalisation
  double x_scale = 1;
  int poly_degree = 3;
  std::size_t n_points = 0;
  std::optional<std::pair<ScalingLabel, ScalingLabel>> parity_labels; // odd, even
  // Inputs of the fit, kept for plotting.
  std::vector<double> xs;
  std::vector<double> envelope;
};

struct ClassifyOptions {
  int poly_degree = 3;
  SizeMeasure size = SizeMeasure::Clauses;
  double linear_bonus = 0.05;
  double time_floor_s = 1e-3; // ε for the log-linear exponential fit
  // Gauss-Newton steps refining the exponential fit on the original scale;
  // 0 keeps the plain log-linear fit.
  int exp_refine_iterations = 50;
};

// out[i] = max(in[0..i]).
std::vector<double> running_max(const std::vector<double> &in);

// Running maximum over depth, linearly interpolated between consecutive jump
// points (the first point and every strict increase); flat after the last
// jump. Throws ContractError on empty input or mismatched lengths.
std::vector<double> envelope(const std::vector<double> &depths,
                             const std::vector<double> &times);
std::vector<double> envelope(const TimingSeries &s);

// Least-squares linear, polynomial and log-linear exponential fits; r2 on the
// original scale for all three. Throws ContractError for fewer than two
// points or when every size is equal. Label is left Unknown.
FitReport fit_models(const std::vector<double> &xs,
                     const std::vector<double> &ys,
                     const ClassifyOptions &opts = {});

// Truncate, envelope, fit, label. Fewer than five points gives Unknown.
FitReport classify(const TimingSeries &s, const ClassifyOptions &opts = {});
// classify plus independent labels for the odd-k and even-k subsequences.
FitReport classify_parity(const TimingSeries &s,
                          const ClassifyOptions &opts = {});

// CSV with header columns family,k,vars,clauses,time_s,status (any order).
// Families keep first-appearance order; points are sorted by k. Throws
// InputError with the 1-based line number on schema violations.
std::vector<TimingSeries> read_timing_csv(std::istream &in);
std::vector<TimingSeries> read_timing_csv_file(const std::string &path);

struct FamilyReport {
  std::string family;
  FitReport fit;
};

std::vector<FamilyReport> classify_all(const std::vector<TimingSeries> &fams,
                                       const ClassifyOptions &opts,
                                       bool parity, std::size_t jobs = 1);

std::string scaling_report_json(const std::vector<FamilyReport> &reports);

// Raw points, envelope and the selected model's curve.
void write_fit_svg(std::ostream &out, const TimingSeries &s,
                   const FitReport &r, const ClassifyOptions &opts = {});

} // namespace proofdoor
