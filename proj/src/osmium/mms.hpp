#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

namespace osmium {

// Analytic manufactured solutions on the unit square, expressed in the
// nondimensional solver variables. The transformed flux slots carry zero
// normal trace on the boundary and are divergence-free, so only momentum,
// transport and mass-average sources arise; the current density and potential
// are identically zero.
class ManufacturedCase {
 public:
  virtual ~ManufacturedCase() = default;
  virtual Eigen::Vector2d velocity(const Eigen::Vector2d& p) const = 0;
  virtual Eigen::Matrix2d grad_velocity(const Eigen::Vector2d& p) const = 0;
  // Hessians of the two velocity components.
  virtual void hess_velocity(const Eigen::Vector2d& p, Eigen::Matrix2d& Hx,
                             Eigen::Matrix2d& Hy) const = 0;
  virtual double pressure(const Eigen::Vector2d& p) const = 0;
  virtual Eigen::Vector2d grad_pressure(const Eigen::Vector2d& p) const = 0;
  virtual Eigen::VectorXd x_nu(const Eigen::Vector2d& p) const = 0;       // length s
  virtual Eigen::MatrixXd grad_x_nu(const Eigen::Vector2d& p) const = 0;  // s x 2
  // Transformed flux slots 0..s (slot s is the scaled current, zero here).
  virtual Eigen::MatrixXd N_hat(const Eigen::Vector2d& p) const = 0;  // (s+1) x 2
};

std::unique_ptr<ManufacturedCase> make_manufactured(const std::string& name,
                                                    const Eigen::VectorXd& nu_Z);

}  // namespace osmium
