#include "proofdoor/scaling.hpp"

#include "proofdoor/errors.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace proofdoor {

const char *to_string(PointStatus s) {
  switch (s) {
  case PointStatus::Solved:
    return "solved";
  case PointStatus::Timeout:
    return "timeout";
  case PointStatus::Sat:
    return "sat";
  }
  return "?";
}

const char *to_string(ScalingLabel l) {
  switch (l) {
  case ScalingLabel::Linear:
    return "linear";
  case ScalingLabel::Polynomial:
    return "polynomial";
  case ScalingLabel::Exponential:
    return "exponential";
  case ScalingLabel::Unknown:
    return "unknown";
  }
  return "?";
}

TimingSeries TimingSeries::truncated() const {
  TimingSeries out{family, {}};
  for (const TimingPoint &p : points) {
    if (p.status != PointStatus::Solved)
      break;
    out.points.push_back(p);
  }
  return out;
}

std::vector<double> TimingSeries::sizes(SizeMeasure m) const {
  std::vector<double> out;
  for (const TimingPoint &p : points)
    out.push_back(m == SizeMeasure::Clauses ? p.clauses : p.vars);
  return out;
}

std::vector<double> TimingSeries::times() const {
  std::vector<double> out;
  for (const TimingPoint &p : points)
    out.push_back(p.time_s);
  return out;
}

std::vector<double> TimingSeries::depths() const {
  std::vector<double> out;
  for (const TimingPoint &p : points)
    out.push_back(p.k);
  return out;
}

//===----------------------------------------------------------------------===//
// Envelope
//===----------------------------------------------------------------------===//

std::vector<double> running_max(const std::vector<double> &in) {
  std::vector<double> out;
  out.reserve(in.size());
  for (double v : in)
    out.push_back(out.empty() ? v : std::max(out.back(), v));
  return out;
}

std::vector<double> envelope(const std::vector<double> &depths,
                             const std::vector<double> &times) {
  if (times.empty())
    throw ContractError("envelope of an empty series");
  if (depths.size() != times.size())
    throw ContractError("depths and times differ in length");
  std::vector<double> m = running_max(times);
  std::vector<std::size_t> jumps{0};
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] > m[i - 1])
      jumps.push_back(i);
  std::vector<double> out = m;
  for (std::size_t q = 0; q + 1 < jumps.size(); ++q) {
    std::size_t a = jumps[q], b = jumps[q + 1];
    double span = depths[b] - depths[a];
    for (std::size_t i = a + 1; i < b; ++i) {
      double t = span > 0 ? (depths[i] - depths[a]) / span : 1.0;
      out[i] = m[a] + t * (m[b] - m[a]);
    }
  }
  return out;
}

std::vector<double> envelope(const TimingSeries &s) {
  return envelope(s.depths(), s.times());
}

//===----------------------------------------------------------------------===//
// Fitting
//===----------------------------------------------------------------------===//

namespace {

double r_squared(const std::vector<double> &ys,
                 const std::vector<double> &pred) {
  double mean = 0;
  for (double y : ys)
    mean += y;
  mean /= static_cast<double>(ys.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ss_res += (ys[i] - pred[i]) * (ys[i] - pred[i]);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  double scale = std::max(1.0, mean * mean) * static_cast<double>(ys.size());
  if (ss_tot <= 1e-24 * scale)
    return ss_res <= 1e-18 * scale ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

// Least squares on a design matrix; column-pivoted QR copes with rank loss.
Eigen::VectorXd lstsq(const Eigen::MatrixXd &a, const Eigen::VectorXd &b) {
  return a.colPivHouseholderQr().solve(b);
}

double poly_eval(const std::vector<double> &c, double u) {
  double v = 0;
  for (std::size_t i = c.size(); i-- > 0;)
    v = v * u + c[i];
  return v;
}

} // namespace

FitReport fit_models(const std::vector<double> &xs,
                     const std::vector<double> &ys,
                     const ClassifyOptions &opts) {
  const std::size_t n = xs.size();
  if (n != ys.size())
    throw ContractError("sizes and times differ in length");
  if (n < 2)
    throw ContractError("fitting needs at least two points");
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo == *hi)
    throw ContractError("degenerate design matrix: every size equals " +
                        std::to_string(*lo));

  FitReport r;
  r.n_points = n;
  r.xs = xs;
  r.envelope = ys;
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i)
    y(i) = ys[i];

  // Linear.
  {
    Eigen::MatrixXd a(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, 0) = xs[i];
      a(i, 1) = 1.0;
    }
    Eigen::VectorXd c = lstsq(a, y);
    std::vector<double> pred(n);
    for (std::size_t i = 0; i < n; ++i)
      pred[i] = c(0) * xs[i] + c(1);
    r.linear.params = {c(0), c(1)};
    r.linear.r2 = r_squared(ys, pred);
  }

  // Polynomial on normalised x.
  {
    double sum = 0;
    for (double x : xs)
      sum += x;
    r.x_center = sum / static_cast<double>(n);
    r.x_scale = (*hi - *lo) / 2.0;
    int d = std::max(1, std::min<int>(opts.poly_degree,
                                      static_cast<int>(n) - 1));
    r.poly_degree = d;
    Eigen::MatrixXd a(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
      double u = (xs[i] - r.x_center) / r.x_scale, p = 1;
      for (int k = 0; k <= d; ++k, p *= u)
        a(i, k) = p;
    }
    Eigen::VectorXd c = lstsq(a, y);
    r.polynomial.params.assign(c.data(), c.data() + c.size());
    std::vector<double> pred(n);
    for (std::size_t i = 0; i < n; ++i)
      pred[i] = poly_eval(r.polynomial.params,
                          (xs[i] - r.x_center) / r.x_scale);
    r.polynomial.r2 = r_squared(ys, pred);
  }

  // Exponential via ln max(t, ε).
  {
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd ly(n);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, 0) = xs[i];
      a(i, 1) = 1.0;
      ly(i) = std::log(std::max(ys[i], opts.time_floor_s));
    }
    Eigen::VectorXd c = lstsq(a, ly);
    double beta = c(0), alpha = std::exp(c(1));
    auto predict = [&](double al, double be) {
      std::vector<double> pred(n);
      for (std::size_t i = 0; i < n; ++i)
        pred[i] = al * std::exp(be * xs[i]);
      return pred;
    };
    auto sse = [&](const std::vector<double> &pred) {
      double e = 0;
      for (std::size_t i = 0; i < n; ++i)
        e += (ys[i] - pred[i]) * (ys[i] - pred[i]);
      return e;
    };
    // Gauss-Newton refinement on the original scale, seeded by the
    // log-linear fit; a step is kept only if it lowers the residual.
    double best = sse(predict(alpha, beta));
    for (int it = 0; it < opts.exp_refine_iterations && best > 0; ++it) {
      Eigen::MatrixXd jac(n, 2);
      Eigen::VectorXd res(n);
      for (std::size_t i = 0; i < n; ++i) {
        double e = std::exp(beta * xs[i]);
        jac(i, 0) = e;
        jac(i, 1) = alpha * xs[i] * e;
        res(i) = ys[i] - alpha * e;
      }
      Eigen::VectorXd step = lstsq(jac, res);
      double s = 1.0, na = alpha, nb = beta, trial = best;
      for (int h = 0; h < 20; ++h, s /= 2) {
        na = alpha + s * step(0);
        nb = beta + s * step(1);
        trial = sse(predict(na, nb));
        if (std::isfinite(trial) && trial < best)
          break;
      }
      if (!(std::isfinite(trial) && trial < best) ||
          best - trial <= 1e-15 * best)
        break;
      alpha = na;
      beta = nb;
      best = trial;
    }
    r.exponential.params = {alpha, beta};
    r.exponential.r2 = r_squared(ys, predict(alpha, beta));
  }

  r.adjusted_linear_r2 = r.linear.r2 + opts.linear_bonus;
  return r;
}

namespace {

ScalingLabel pick_label(const FitReport &r) {
  ScalingLabel best = ScalingLabel::Linear;
  double score = r.adjusted_linear_r2;
  if (r.polynomial.r2 > score) {
    best = ScalingLabel::Polynomial;
    score = r.polynomial.r2;
  }
  if (r.exponential.r2 > score)
    best = ScalingLabel::Exponential;
  return best;
}

} // namespace

FitReport classify(const TimingSeries &s, const ClassifyOptions &opts) {
  TimingSeries t = s.truncated();
  FitReport r;
  r.n_points = t.points.size();
  r.poly_degree = opts.poly_degree;
  if (t.points.size() < 5)
    return r;
  std::vector<double> env = envelope(t);
  try {
    std::size_t n = r.n_points;
    r = fit_models(t.sizes(opts.size), env, opts);
    r.n_points = n;
  } catch (const ContractError &) {
    return r; // constant size column: nothing to regress on
  }
  r.label = pick_label(r);
  return r;
}

FitReport classify_parity(const TimingSeries &s, const ClassifyOptions &opts) {
  FitReport r = classify(s, opts);
  TimingSeries t = s.truncated(), odd{s.family, {}}, even{s.family, {}};
  for (const TimingPoint &p : t.points)
    (p.k % 2 != 0 ? odd : even).points.push_back(p);
  r.parity_labels = {classify(odd, opts).label, classify(even, opts).label};
  return r;
}

//===----------------------------------------------------------------------===//
// CSV
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ','))
    out.push_back(cur);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  for (auto &f : out) {
    auto b = f.find_first_not_of(" \t\r");
    auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string &s, const char *what,
                    std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v))
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw InputError(std::string("bad ") + what + " value '" + s + "'", line);
  }
}

} // namespace

std::vector<TimingSeries> read_timing_csv(std::istream &in) {
  static const char *kColumns[] = {"family", "k",      "vars",
                                   "clauses", "time_s", "status"};
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> col;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto head = split_csv(line);
    for (std::size_t i = 0; i < head.size(); ++i)
      col[head[i]] = i;
    break;
  }
  for (const char *c : kColumns)
    if (!col.count(c))
      throw InputError(std::string("missing column '") + c + "'",
                       lineno ? lineno : 1);
  std::size_t width = col.size();

  std::vector<TimingSeries> fams;
  std::map<std::string, std::size_t> index;
  std::vector<std::map<int, std::size_t>> seen; // k -> line
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto f = split_csv(line);
    if (f.size() != width)
      throw InputError("expected " + std::to_string(width) + " fields, got " +
                           std::to_string(f.size()),
                       lineno);
    const std::string &fam = f[col["family"]];
    if (fam.empty())
      throw InputError("empty family name", lineno);
    TimingPoint p;
    double k = parse_number(f[col["k"]], "k", lineno);
    if (k < 0 || k != std::floor(k))
      throw InputError("k must be a nonnegative integer", lineno);
    p.k = static_cast<int>(k);
    p.vars = parse_number(f[col["vars"]], "vars", lineno);
    p.clauses = parse_number(f[col["clauses"]], "clauses", lineno);
    p.time_s = parse_number(f[col["time_s"]], "time_s", lineno);
    if (p.time_s < 0)
      throw InputError("negative time", lineno);
    const std::string &st = f[col["status"]];
    if (st == "solved" || st == "unsat")
      p.status = PointStatus::Solved;
    else if (st == "timeout")
      p.status = PointStatus::Timeout;
    else if (st == "sat")
      p.status = PointStatus::Sat;
    else
      throw InputError("unknown status '" + st + "'", lineno);

    auto [it, fresh] = index.try_emplace(fam, fams.size());
    if (fresh) {
      fams.push_back({fam, {}});
      seen.emplace_back();
    }
    if (!seen[it->second].emplace(p.k, lineno).second)
      throw InputError("duplicate k=" + std::to_string(p.k) + " for family " +
                           fam,
                       lineno);
    fams[it->second].points.push_back(p);
  }
  for (TimingSeries &s : fams)
    std::sort(s.points.begin(), s.points.end(),
              [](const TimingPoint &a, const TimingPoint &b) {
                return a.k < b.k;
              });
  return fams;
}

std::vector<TimingSeries> read_timing_csv_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path);
  return read_timing_csv(in);
}

//===----------------------------------------------------------------------===//
// Reports
//===----------------------------------------------------------------------===//

std::vector<FamilyReport> classify_all(const std::vector<TimingSeries> &fams,
                                       const ClassifyOptions &opts,
                                       bool parity, std::size_t jobs) {
  std::vector<FamilyReport> out(fams.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < fams.size(); i += stride)
      out[i] = {fams[i].family, parity ? classify_parity(fams[i], opts)
                                       : classify(fams[i], opts)};
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, fams.size()));
  if (jobs == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back(work, t, jobs);
  for (auto &t : pool)
    t.join();
  return out;
}

std::string scaling_report_json(const std::vector<FamilyReport> &reports) {
  using nlohmann::json;
  json fams = json::array();
  for (const FamilyReport &fr : reports) {
    const FitReport &r = fr.fit;
    json j;
    j["family"] = fr.family;
    j["label"] = to_string(r.label);
    j["n_points"] = r.n_points;
    if (r.label != ScalingLabel::Unknown) {
      j["r2"] = {{"linear", r.linear.r2},
                 {"polynomial", r.polynomial.r2},
                 {"exponential", r.exponential.r2}};
      j["adjusted_linear_r2"] = r.adjusted_linear_r2;
      j["params"] = {
          {"linear", {{"a", r.linear.params[0]}, {"b", r.linear.params[1]}}},
          {"polynomial",
           {{"degree", r.poly_degree},
            {"coefficients", r.polynomial.params},
            {"x_center", r.x_center},
            {"x_scale", r.x_scale}}},
          {"exponential",
           {{"alpha", r.exponential.params[0]},
            {"beta", r.exponential.params[1]}}}};
    } else {
      j["r2"] = nullptr;
      j["params"] = nullptr;
    }
    if (r.parity_labels)
      j["parity_labels"] = {{"odd", to_string(r.parity_labels->first)},
                            {"even", to_string(r.parity_labels->second)}};
    else
      j["parity_labels"] = nullptr;
    fams.push_back(std::move(j));
  }
  return json{{"families", fams}}.dump(2);
}

void write_fit_svg(std::ostream &out, const TimingSeries &s,
                   const FitReport &r, const ClassifyOptions &opts) {
  const double w = 480, h = 320, m = 40;
  TimingSeries t = s.truncated();
  std::vector<double> xs = t.sizes(opts.size), ys = t.times();
  std::vector<double> env = r.envelope;
  double x0 = 0, x1 = 1, y1 = 1;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    y1 = *std::max_element(ys.begin(), ys.end());
  }
  if (x1 <= x0)
    x1 = x0 + 1;
  if (y1 <= 0)
    y1 = 1;
  auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
  auto py = [&](double y) {
    return h - m - std::clamp(y / y1, 0.0, 1.2) * (h - 2 * m);
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" "
      << "fill=\"white\"/>\n";
  out << "<text x=\"" << m << "\" y=\"16\">" << s.family << ": "
      << to_string(r.label) << "</text>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m
      << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m
      << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i])
        << "\" r=\"2.5\" fill=\"gray\"/>\n";
  if (env.size() == xs.size() && !env.empty()) {
    out << "<polyline fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << px(xs[i]) << ',' << py(env[i]) << ' ';
    out << "\"/>\n";
  }
  if (r.label != ScalingLabel::Unknown) {
    out << "<polyline fill=\"none\" stroke=\"red\" stroke-dasharray=\"4 2\" "
        << "points=\"";
    for (int i = 0; i <= 64; ++i) {
      double x = x0 + (x1 - x0) * i / 64.0, y = 0;
      switch (r.label) {
      case ScalingLabel::Linear:
        y = r.linear.params[0] * x + r.linear.params[1];
        break;
      case ScalingLabel::Polynomial:
        y = poly_eval(r.polynomial.params, (x - r.x_center) / r.x_scale);
        break;
      default:
        y = r.exponential.params[0] * std::exp(r.exponential.params[1] * x);
        break;
      }
      out << px(x) << ',' << py(y) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

} // namespace proofdoor
