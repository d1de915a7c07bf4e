#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nspec/errors.hpp"

namespace nspec::fit {

struct PowerPoint {
  double p2 = 0.0;     ///< power of C2, mW
  double y = 0.0;      ///< observed splitting or central-peak height
  double sigma = 1.0;  ///< uncertainty; 1 when absent
  bool has_sigma = false;
};

using PowerSeries = std::vector<PowerPoint>;

/// A fitted model of one scalar observable against power.
class Model {
 public:
  virtual ~Model() = default;
  virtual int n_params() const = 0;
  virtual std::vector<std::string> param_names() const = 0;
  virtual double value(const Eigen::VectorXd& params, double p2) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& params,
                                   double p2) const = 0;
};

/// Autler-Townes splitting vs power: delta13 = sqrt(omega1^2 + k^2 p2).
/// Params (omega1, k); omega2 = k sqrt(p2).
class SplittingModel final : public Model {
 public:
  int n_params() const override { return 2; }
  std::vector<std::string> param_names() const override {
    return {"omega1", "k"};
  }
  double value(const Eigen::VectorXd& params, double p2) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params,
                           double p2) const override;
};

/// Central-peak height vs power: h_c = h_uc + B w2^2/(w1^2 + w2^2) with
/// w2 = k sqrt(p2); (omega1, k) fixed. Params (h_uc, B); linear.
class HeightModel final : public Model {
 public:
  HeightModel(double omega1, double k) : omega1_(omega1), k_(k) {}
  int n_params() const override { return 2; }
  std::vector<std::string> param_names() const override {
    return {"h_uc", "B"};
  }
  double value(const Eigen::VectorXd& params, double p2) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params,
                           double p2) const override;
  double regressor(double p2) const;

 private:
  double omega1_;
  double k_;
};

struct FitResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  ///< symmetric PSD, natural units
  std::vector<std::string> param_names;
  double residual_norm = 0.0;  ///< sqrt(chi^2) at the solution
  int iterations = 0;
  bool converged = true;  ///< false when returning best-so-far at the cap
  /// First-order detuning bias bound Delta^2 / (2 Omega_eff) at the largest
  /// power, reported for a common detuning of `kReportedDetuning` MHz.
  double detuning_bias_bound = 0.0;
};

/// Common detuning used for the reported bias bound.
inline constexpr double kReportedDetuning = 7.0;

/// Weighted Levenberg-Marquardt fit of the splitting model. Parameters are
/// kept positive by an internal squared reparameterization and reported in
/// natural units. Unit weights are assumed when sigmas are absent, with the
/// covariance rescaled by reduced chi-square.
FitResult fit_splitting(const PowerSeries& data);

/// Linear least squares for (h_uc, B) with (omega1, k) fixed.
/// Throws RankDeficient when the regressor is constant (all powers equal).
FitResult fit_height(const PowerSeries& data, double omega1, double k);

struct Band {
  std::vector<double> p2;
  std::vector<double> center, lower, upper;
};

/// 95% pointwise confidence band by the linearized delta method:
/// model +- 1.96 sqrt(g^T C g).
Band confidence_band(const Model& model, const FitResult& fit,
                     std::span<const double> p2_grid);

/// CSV with header `p2_mw,value[,sigma]`. Throws ParseError (with the
/// 1-based line number) on malformed rows, non-finite values or negative
/// powers, and EmptySeries when no data rows are present.
PowerSeries load_series(std::istream& in);
PowerSeries load_series_file(const std::string& path);

}  // namespace nspec::fit
