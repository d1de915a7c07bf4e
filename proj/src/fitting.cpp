#include "nspec/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nspec::fit {

namespace {

void check_series(const PowerSeries& data, int n_params) {
  if (static_cast<int>(data.size()) < n_params) {
    throw Error("fit needs at least as many points as free parameters");
  }
  for (const PowerPoint& pt : data) {
    if (pt.p2 < 0.0) throw Error("powers must be non-negative");
  }
}

Eigen::VectorXd weights_of(const PowerSeries& data) {
  Eigen::VectorXd w(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const double s = data[i].has_sigma ? data[i].sigma : 1.0;
    if (!(s > 0.0)) throw Error("sigmas must be positive");
    w[static_cast<Eigen::Index>(i)] = 1.0 / s;
  }
  return w;
}

/// Pseudoinverse-based covariance; tolerant of a vanishing k column.
/// With unit weights the covariance is rescaled by reduced chi-square.
Eigen::MatrixXd covariance_from_jacobian(const Eigen::MatrixXd& jw,
                                         double chi2, int n, int p,
                                         bool rescale) {
  Eigen::MatrixXd jtj = jw.transpose() * jw;
  Eigen::MatrixXd cov =
      jtj.completeOrthogonalDecomposition().pseudoInverse();
  if (rescale && n > p) cov *= chi2 / static_cast<double>(n - p);
  return (cov + cov.transpose()) / 2.0;
}

double bias_bound(const PowerSeries& data, double omega1, double k) {
  double pmax = 0.0;
  for (const PowerPoint& pt : data) pmax = std::max(pmax, pt.p2);
  const double weff = std::sqrt(omega1 * omega1 + k * k * pmax);
  if (weff <= 0.0) return 0.0;
  return kReportedDetuning * kReportedDetuning / (2.0 * weff);
}

}  // namespace

double SplittingModel::value(const Eigen::VectorXd& params, double p2) const {
  return std::sqrt(params[0] * params[0] + params[1] * params[1] * p2);
}

Eigen::VectorXd SplittingModel::gradient(const Eigen::VectorXd& params,
                                         double p2) const {
  const double f = std::max(value(params, p2), 1e-300);
  return Eigen::Vector2d(params[0] / f, params[1] * p2 / f);
}

double HeightModel::regressor(double p2) const {
  const double w2sq = k_ * k_ * p2;
  const double denom = omega1_ * omega1_ + w2sq;
  return denom > 0.0 ? w2sq / denom : 0.0;
}

double HeightModel::value(const Eigen::VectorXd& params, double p2) const {
  return params[0] + params[1] * regressor(p2);
}

Eigen::VectorXd HeightModel::gradient(const Eigen::VectorXd&,
                                      double p2) const {
  return Eigen::Vector2d(1.0, regressor(p2));
}

FitResult fit_splitting(const PowerSeries& data) {
  const SplittingModel model;
  check_series(data, model.n_params());
  const int n = static_cast<int>(data.size());
  const Eigen::VectorXd w = weights_of(data);

  {
    int distinct = 1;
    for (int i = 1; i < n; ++i) {
      if (data[i].p2 != data[0].p2) distinct = 2;
    }
    if (n < 3 || distinct < 2) {
      throw SingularJacobian("fit_splitting needs >= 3 points at >= 2 powers");
    }
  }

  // Internal coordinates u with omega1 = u0^2, k = u1^2 keep the natural
  // parameters positive.
  auto natural = [](const Eigen::Vector2d& u) {
    return Eigen::Vector2d(u[0] * u[0], u[1] * u[1]);
  };

  double ymin = data[0].y, ymax = data[0].y, pmax = data[0].p2;
  for (const PowerPoint& pt : data) {
    ymin = std::min(ymin, pt.y);
    ymax = std::max(ymax, pt.y);
    pmax = std::max(pmax, pt.p2);
  }
  const double w1_0 = std::max(std::abs(ymin), 1e-3);
  const double k_0 =
      std::sqrt(std::max(ymax * ymax - w1_0 * w1_0, 1e-6) / std::max(pmax, 1e-12));
  Eigen::Vector2d u(std::sqrt(w1_0), std::sqrt(k_0));

  auto residuals = [&](const Eigen::Vector2d& uu) {
    const Eigen::Vector2d th = natural(uu);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      r[i] = w[i] * (data[i].y - model.value(th, data[i].p2));
    }
    return r;
  };

  Eigen::VectorXd r = residuals(u);
  double chi2 = r.squaredNorm();
  double lambda = 1e-3;
  constexpr int kMaxIter = 200;
  int iter = 0;
  bool converged = false;

  for (; iter < kMaxIter; ++iter) {
    const Eigen::Vector2d th = natural(u);
    Eigen::MatrixXd jw(n, 2);  // of the residuals w.r.t. internal coords
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd g = model.gradient(th, data[i].p2);
      jw(i, 0) = -w[i] * g[0] * 2.0 * u[0];
      jw(i, 1) = -w[i] * g[1] * 2.0 * u[1];
    }
    const Eigen::Matrix2d jtj = jw.transpose() * jw;
    const Eigen::Vector2d gradient = jw.transpose() * r;
    if (gradient.norm() < 1e-10) {
      converged = true;
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector2d step = damped.ldlt().solve(-gradient);
      const Eigen::Vector2d u_try = u + step;
      const Eigen::VectorXd r_try = residuals(u_try);
      const double chi2_try = r_try.squaredNorm();
      if (chi2_try <= chi2) {
        const double rel_step =
            step.norm() / std::max(u.norm(), 1e-12);
        u = u_try;
        r = r_try;
        chi2 = chi2_try;
        lambda = std::max(lambda / 10.0, 1e-14);
        accepted = true;
        if (rel_step < 1e-10) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted || converged) {
      converged = converged || !accepted;  // stalled = at a minimum
      break;
    }
  }

  FitResult res;
  res.params = natural(u);
  res.param_names = model.param_names();
  res.residual_norm = std::sqrt(chi2);
  res.iterations = iter;
  res.converged = converged || iter < kMaxIter;

  // Covariance in natural units from the Jacobian at the solution.
  Eigen::MatrixXd jw(n, 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd g = model.gradient(res.params, data[i].p2);
    jw(i, 0) = w[i] * g[0];
    jw(i, 1) = w[i] * g[1];
  }
  const bool any_sigma =
      std::any_of(data.begin(), data.end(),
                  [](const PowerPoint& pt) { return pt.has_sigma; });
  res.covariance = covariance_from_jacobian(jw, chi2, n, 2, !any_sigma);
  res.detuning_bias_bound = bias_bound(data, res.params[0], res.params[1]);
  return res;
}

FitResult fit_height(const PowerSeries& data, double omega1, double k) {
  const HeightModel model(omega1, k);
  check_series(data, model.n_params());
  const int n = static_cast<int>(data.size());
  const Eigen::VectorXd w = weights_of(data);

  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd g = model.gradient(Eigen::Vector2d::Zero(), data[i].p2);
    x(i, 0) = w[i] * g[0];
    x(i, 1) = w[i] * g[1];
    y[i] = w[i] * data[i].y;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 2) {
    throw RankDeficient("height regressor is constant (all powers equal?)");
  }
  FitResult res;
  res.params = qr.solve(y);
  res.param_names = model.param_names();
  const double chi2 = (y - x * res.params).squaredNorm();
  res.residual_norm = std::sqrt(chi2);
  res.iterations = 0;

  const bool any_sigma =
      std::any_of(data.begin(), data.end(),
                  [](const PowerPoint& pt) { return pt.has_sigma; });
  res.covariance = covariance_from_jacobian(x, chi2, n, 2, !any_sigma);
  res.detuning_bias_bound = bias_bound(data, omega1, k);
  return res;
}

Band confidence_band(const Model& model, const FitResult& fit,
                     std::span<const double> p2_grid) {
  Band band;
  for (double p2 : p2_grid) {
    const double f = model.value(fit.params, p2);
    const Eigen::VectorXd g = model.gradient(fit.params, p2);
    const double var = std::max(0.0, g.dot(fit.covariance * g));
    const double half = 1.96 * std::sqrt(var);
    band.p2.push_back(p2);
    band.center.push_back(f);
    band.lower.push_back(f - half);
    band.upper.push_back(f + half);
  }
  return band;
}

PowerSeries load_series(std::istream& in) {
  PowerSeries series;
  std::string line;
  long line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    // Trim whitespace and tolerate CRLF endings.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty()) continue;

    if (!saw_header) {
      if (line != "p2_mw,value" && line != "p2_mw,value,sigma") {
        throw ParseError(line_no,
                         "expected header 'p2_mw,value[,sigma]', got '" +
                             line + "'");
      }
      saw_header = true;
      continue;
    }

    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(line_no, "not a number: '" + cell + "'");
      }
    }
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(line_no, "expected 2 or 3 columns");
    }
    for (double v : fields) {
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
    }
    if (fields[0] < 0.0) throw ParseError(line_no, "negative power");

    PowerPoint pt;
    pt.p2 = fields[0];
    pt.y = fields[1];
    if (fields.size() == 3) {
      if (fields[2] <= 0.0) throw ParseError(line_no, "sigma must be > 0");
      pt.sigma = fields[2];
      pt.has_sigma = true;
    }
    series.push_back(pt);
  }

  if (!saw_header) throw ParseError(std::max(line_no, 1L), "missing header");
  if (series.empty()) throw EmptySeries("no data rows");
  return series;
}

PowerSeries load_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_series(in);
}

}  // namespace nspec::fit
