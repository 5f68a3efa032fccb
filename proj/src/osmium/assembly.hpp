#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "osmium/constraints.hpp"
#include "osmium/fields.hpp"
#include "osmium/mms.hpp"
#include "osmium/saltcharge.hpp"
#include "osmium/scenario.hpp"

namespace osmium {

// Flat dof layout: velocity pair, pressure, salt fluxes, current, transformed
// mole fractions, salt-charge potential, then the continuous reconstruction
// auxiliaries and one multiplier slot per active constraint (the slot of the
// normalization constraint carries the leak amplitude when a leak BC is
// active).
struct Layout {
  int s = 0;  // n - 1
  int nvl = 0, npl = 0, nfl = 0, ndg = 0, nrc = 0;
  int v_off = 0, p_off = 0, N_off = 0, J_off = 0, x_off = 0, phi_off = 0, recon_off = 0,
      mult_off = 0;
  int total = 0;

  int vdof(int scalar_dof, int comp) const { return v_off + 2 * scalar_dof + comp; }
  int pdof(int i) const { return p_off + i; }
  int Ndof(int slot, int i) const { return N_off + slot * nfl + i; }
  int Jdof(int i) const { return J_off + i; }
  int xdof(int slot, int i) const { return x_off + slot * ndg + i; }
  int phidof(int i) const { return phi_off + i; }
  int rdof(int slot, int i) const { return recon_off + slot * nrc + i; }
  int mdof(int ci) const { return mult_off + ci; }
};

// Per-facet resolved boundary treatment.
struct FacetBC {
  const BoundarySpec* spec = nullptr;
  int wd_salt = -1;  // salt with a weak-Dirichlet composition pin on this facet
  double leak_s0 = 0.0, leak_s1 = 0.0, leak_total = 1.0;  // chain arclength interval
  bool leak_reversed = false;
};

class DiscreteSystem {
 public:
  explicit DiscreteSystem(const Scenario& scenario);

  const Scenario& scenario() const { return scn_; }
  const Mesh2D& mesh() const { return mesh_; }
  const SpaceSetup& spaces() const { return setup_; }
  const SaltChargeBasis& basis() const { return *basis_; }
  const Layout& layout() const { return lay_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const ConstraintAnalysis& analysis() const { return analysis_; }
  bool leak_active() const { return leak_active_; }
  const ManufacturedCase* mms() const { return mms_.get(); }

  // Steady/algebraic residual A(u) and its Jacobian triplets. frozen_coeffs
  // drops the material-coefficient linearization (diagnostics only).
  void assemble(const Eigen::VectorXd& u, Eigen::VectorXd* residual,
                std::vector<Eigen::Triplet<double>>* jac, bool frozen_coeffs = false) const;
  // Conserved quantities G(u): momentum rows (rho v, phi) scaled by the
  // inertia coefficient and continuity rows (c_l, psi); zero elsewhere.
  void assemble_mass(const Eigen::VectorXd& u, Eigen::VectorXd* G,
                     std::vector<Eigen::Triplet<double>>* jac) const;
  std::vector<char> differential_rows() const;

  // Initial state: uniform (optionally perturbed) composition, zeros
  // elsewhere, reconstruction blocks solved consistently.
  Eigen::VectorXd initial_state() const;
  void solve_recon(Eigen::VectorXd& u) const;
  // Fill zero-valued TotalMoles/TotalMass targets from a state (or from the
  // manufactured solution when present).
  void fill_constraint_targets(const Eigen::VectorXd& u);

  // max |(r(u+e w)-r(u-e w))/2e - K w| / max|K w| over the given direction.
  double fd_jacobian_check(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                           double eps) const;

  // metrics
  double error_E1(const Eigen::VectorXd& u) const;  // ||v - psi^T N_Z||_L2
  double error_E2(const Eigen::VectorXd& u) const;  // ||1 - nu_Z . x||_L2
  Eigen::VectorXd salt_moles(const Eigen::VectorXd& u) const;
  double total_mass(const Eigen::VectorXd& u) const;
  double domain_area() const { return area_; }
  // ratio of the neglected pressure boundary term to the retained composition
  // term in the weak-Dirichlet rows (audit quantity)
  double weak_dirichlet_pressure_ratio(const Eigen::VectorXd& u) const;
  double weak_dirichlet_error(const Eigen::VectorXd& u) const;  // ||x_salt - x_pin||_L2(tags)

  // L2 errors against the manufactured solution
  double mms_error_velocity(const Eigen::VectorXd& u) const;
  double mms_error_pressure(const Eigen::VectorXd& u) const;
  double mms_error_x(const Eigen::VectorXd& u) const;

  const std::vector<char>& replaced_rows() const { return replaced_; }

 private:
  Scenario scn_;
  Mesh2D mesh_;
  SpaceSetup setup_;
  std::shared_ptr<SaltChargeBasis> basis_;
  std::unique_ptr<ManufacturedCase> mms_;
  Layout lay_;
  ConstraintSet constraints_;
  ConstraintAnalysis analysis_;
  bool leak_active_ = false;
  int leak_salt_ = -1;
  double area_ = 0.0;
  std::vector<char> replaced_;
  std::vector<FacetBC> facet_bc_;
  std::vector<int> facet_of_edge_;
  Eigen::VectorXd zm_hat_;  // (Z m)/m_ref per transformed slot

  struct PointEval {
    Dual cT_hat, rho_hat, eta_hat, zeta_hat;
    std::vector<Dual> psi;     // n transformed slots of psi_Z (scaled by c_ref)
    std::vector<Dual> Vhat;    // s partial molar volumes (scaled by c_ref)
    std::vector<Dual> X;       // s*s thermodynamic factors
    std::vector<Dual> Mg;      // n*n augmented transport matrix (nondimensional)
    std::vector<Dual> c_hat;   // s transformed concentrations / c_ref
    std::vector<Dual> x_phys;  // n physical fractions
  };
  void material_at(const Eigen::VectorXd& xt, double p_phys, PointEval& out) const;
  void assemble_cells(const Eigen::VectorXd& u, Eigen::VectorXd* r,
                      std::vector<Eigen::Triplet<double>>* jac, bool frozen, bool mass_mode,
                      Eigen::VectorXd* Gout) const;
  void assemble_facets(const Eigen::VectorXd& u, Eigen::VectorXd* r,
                       std::vector<Eigen::Triplet<double>>* jac, bool frozen) const;
  void setup_boundary_bookkeeping();
};

}  // namespace osmium
