#include "osmium/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "osmium/errors.hpp"
#include "osmium/verify.hpp"
#include "osmium/vtk.hpp"

namespace osmium {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_convergence_csv(const std::string& path, const NewtonReport& rep) {
  std::ofstream out(path);
  out << "iteration,residual_norm\n";
  for (size_t i = 0; i < rep.residual_norms.size(); ++i)
    out << i << "," << fmt(rep.residual_norms[i]) << "\n";
}

void write_transient_csv(const std::string& path, const TransientReport& rep) {
  std::ofstream out(path);
  out << "step,time,newton_iterations,residual,E1,E2";
  if (!rep.steps.empty())
    for (int l = 0; l < rep.steps.front().moles.size(); ++l) out << ",moles_" << l;
  out << ",total_mass\n";
  for (size_t k = 0; k < rep.steps.size(); ++k) {
    const auto& r = rep.steps[k];
    out << k << "," << fmt(r.time) << "," << r.newton_iterations << "," << fmt(r.residual)
        << "," << fmt(r.E1) << "," << fmt(r.E2);
    for (int l = 0; l < r.moles.size(); ++l) out << "," << fmt(r.moles[l]);
    out << "," << fmt(r.mass) << "\n";
  }
}

}  // namespace

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create directory " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

NewtonReport solve_steady(DiscreteSystem& sys, Eigen::VectorXd& u) {
  auto fn = [&](const Eigen::VectorXd& uc, Eigen::VectorXd& r,
                std::vector<Eigen::Triplet<double>>* T) { sys.assemble(uc, &r, T); };
  return newton_solve(fn, u, sys.scenario().solver);
}

Eigen::VectorXd transfer_state(const DiscreteSystem& from, const DiscreteSystem& to,
                               const Eigen::VectorXd& uf) {
  const auto& mesh = to.mesh();
  if (mesh.n_cells() != from.mesh().n_cells())
    fail(ErrorCode::ConfigError, "state transfer requires matching meshes");
  const auto& lf = from.layout();
  const auto& lt = to.layout();
  Eigen::VectorXd ut = Eigen::VectorXd::Zero(lt.total);

  auto eval_scalar = [&](const LagrangeSpace& sp, int block_offset, int stride, int comp,
                         int cell, const std::array<double, 3>& bary) {
    std::vector<std::array<double, 3>> pts = {bary};
    Eigen::MatrixXd val, dx, dy;
    sp.eval(from.mesh(), cell, pts, val, dx, dy);
    double acc = 0.0;
    for (size_t a = 0; a < sp.cells[cell].size(); ++a)
      acc += uf[block_offset + stride * sp.cells[cell][a].gdof + comp] * val(a, 0);
    return acc;
  };

  auto bary_of = [&](int cell, const Eigen::Vector2d& p) {
    const auto& tri = mesh.tris[cell];
    Eigen::Vector2d p0 = mesh.vertices[tri[0]];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[tri[1]] - p0;
    J.col(1) = mesh.vertices[tri[2]] - p0;
    Eigen::Vector2d r = J.inverse() * (p - p0);
    return std::array<double, 3>{1.0 - r.x() - r.y(), r.x(), r.y()};
  };

  // velocity and pressure: nodal interpolation
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (const auto& cd : to.spaces().velocity.cells[t]) {
      Eigen::Vector2d pos = lagrange_node_position(mesh, t, cd.node);
      auto b = bary_of(t, pos);
      for (int c = 0; c < 2; ++c)
        ut[lt.vdof(cd.gdof, c)] = eval_scalar(from.spaces().velocity, lf.v_off, 2, c, t, b);
    }
    for (const auto& cd : to.spaces().pressure.cells[t]) {
      Eigen::Vector2d pos = lagrange_node_position(mesh, t, cd.node);
      auto b = bary_of(t, pos);
      ut[lt.pdof(cd.gdof)] = eval_scalar(from.spaces().pressure, lf.p_off, 1, 0, t, b);
    }
  }

  // DG fields: means or vertex values
  for (int t = 0; t < mesh.n_cells(); ++t) {
    for (int slot = 0; slot <= lt.s; ++slot) {
      auto from_dg_at = [&](const std::array<double, 3>& bary) {
        std::vector<std::array<double, 3>> pts = {bary};
        Eigen::MatrixXd val;
        from.spaces().scalar.eval(from.mesh(), t, pts, val);
        double acc = 0.0;
        for (int c = 0; c < from.spaces().scalar.per_cell; ++c)
          acc += uf[(slot < lf.s) ? lf.xdof(slot, from.spaces().scalar.cell_dof(t, c))
                                  : lf.phidof(from.spaces().scalar.cell_dof(t, c))] *
                 val(c, 0);
        return acc;
      };
      if (to.spaces().scalar.degree == 0) {
        double mean = from_dg_at({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        ut[(slot < lt.s) ? lt.xdof(slot, t) : lt.phidof(t)] = mean;
      } else {
        for (int c = 0; c < 3; ++c) {
          std::array<double, 3> b{0.0, 0.0, 0.0};
          b[c] = 1.0;
          ut[(slot < lt.s) ? lt.xdof(slot, to.spaces().scalar.cell_dof(t, c))
                           : lt.phidof(to.spaces().scalar.cell_dof(t, c))] = from_dg_at(b);
        }
      }
    }
  }

  // fluxes: moments of the source field against the target functionals
  auto eq = edge_rule(9);
  for (int slot = 0; slot <= lt.s; ++slot) {
    auto from_flux_at = [&](int cell, const Eigen::Vector2d& p) {
      Eigen::Matrix2Xd val;
      Eigen::VectorXd dv;
      from.spaces().flux.bases[cell].eval(p, val, dv);
      auto fd = from.spaces().flux.cell_dofs(from.mesh(), cell);
      Eigen::Vector2d acc = Eigen::Vector2d::Zero();
      for (size_t e = 0; e < fd.size(); ++e)
        acc += uf[(slot < lf.s) ? lf.Ndof(slot, fd[e]) : lf.Jdof(fd[e])] * val.col(e);
      return acc;
    };
    for (int e = 0; e < mesh.n_edges(); ++e) {
      int cell = mesh.edge_tris[e][0];
      Eigen::Vector2d plo = mesh.vertices[mesh.edges[e].v0];
      Eigen::Vector2d phi = mesh.vertices[mesh.edges[e].v1];
      Eigen::Vector2d tv = phi - plo;
      Eigen::Vector2d nrm(tv.y(), -tv.x());
      nrm /= tv.norm();
      for (int m = 0; m < to.spaces().flux.edge_dofs; ++m) {
        double acc = 0.0;
        for (const auto& q : eq) {
          double un = from_flux_at(cell, plo + q.t * tv).dot(nrm);
          acc += q.w * un * ((m == 0) ? 1.0 : (2.0 * q.t - 1.0));
        }
        int dof = to.spaces().flux.edge_dof(e, m);
        ut[(slot < lt.s) ? lt.Ndof(slot, dof) : lt.Jdof(dof)] = acc;
      }
    }
    if (to.spaces().flux.order == 2) {
      auto cq = triangle_rule(6);
      for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& tri = mesh.tris[t];
        Eigen::Vector2d p0 = mesh.vertices[tri[0]];
        Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        for (const auto& q : cq) acc += 2.0 * q.w * from_flux_at(t, p0 + q.x * e1 + q.y * e2);
        for (int c = 0; c < 2; ++c) {
          int dof = to.spaces().flux.interior_dof(t, c);
          ut[(slot < lt.s) ? lt.Ndof(slot, dof) : lt.Jdof(dof)] = acc[c];
        }
      }
    }
  }

  // multipliers by matching kind order
  const auto& cf = from.constraints().items;
  const auto& ct = to.constraints().items;
  for (size_t i = 0; i < std::min(cf.size(), ct.size()); ++i)
    if (cf[i].kind == ct[i].kind) ut[lt.mdof(static_cast<int>(i))] = uf[lf.mdof(static_cast<int>(i))];

  Eigen::VectorXd mutable_ut = ut;
  to.solve_recon(mutable_ut);
  return mutable_ut;
}

RunOutcome run_steady(const Scenario& scenario, const std::string& outdir,
                      bool override_illposed) {
  RunOutcome out;
  ensure_dir(outdir);
  write_text(outdir + "/scenario_resolved.json", scenario.resolved_json.empty()
                                                     ? std::string("{}")
                                                     : scenario.resolved_json);
  DiscreteSystem sys(scenario);
  if (sys.analysis().ill_posed_warning && !override_illposed) {
    out.exit_code = 4;
    out.message = "ill-posed configuration: " + sys.analysis().note;
    return out;
  }
  Eigen::VectorXd u = sys.initial_state();
  sys.fill_constraint_targets(u);
  NewtonReport rep;
  try {
    rep = solve_steady(sys, u);
  } catch (const Error& e) {
    out.exit_code = 3;
    out.message = e.what();
    return out;
  }
  out.newton = rep;
  write_convergence_csv(outdir + "/convergence.csv", rep);
  if (!rep.converged) {
    out.exit_code = 3;
    out.message = "Newton did not converge";
    return out;
  }
  out.E1 = sys.error_E1(u);
  out.E2 = sys.error_E2(u);
  write_vtk(outdir + "/fields.vtk", sys, u);
  std::ofstream metrics(outdir + "/metrics.csv");
  metrics << "E1,E2\n" << fmt(out.E1) << "," << fmt(out.E2) << "\n";
  return out;
}

RunOutcome run_transient_cmd(const Scenario& scenario, const std::string& outdir,
                             bool override_illposed) {
  RunOutcome out;
  ensure_dir(outdir);
  write_text(outdir + "/scenario_resolved.json", scenario.resolved_json.empty()
                                                     ? std::string("{}")
                                                     : scenario.resolved_json);
  Scenario sc = scenario;
  sc.transient = true;
  DiscreteSystem sys(sc);
  if (sys.analysis().ill_posed_warning && !override_illposed) {
    out.exit_code = 4;
    out.message = "ill-posed configuration: " + sys.analysis().note;
    return out;
  }
  Eigen::VectorXd u = sys.initial_state();
  sys.fill_constraint_targets(u);
  try {
    TimeSettings ts = sc.time;
    TransientReport rep = run_transient(sys, u, ts, sc.solver);
    out.transient = rep;
    out.E1 = rep.max_E1;
    out.E2 = rep.max_E2;
    write_transient_csv(outdir + "/transient.csv", rep);
    if (ts.snapshot_every > 0) write_vtk(outdir + "/final.vtk", sys, u);
    if (sys.layout().s >= 3) {
      // two-solvent systems: report the solvent-ratio range across the cell
      const auto& lay = sys.layout();
      double rmin = 1e300, rmax = -1e300;
      for (int c = 0; c < lay.ndg; ++c) {
        double r = u[lay.xdof(0, c)] / u[lay.xdof(1, c)];
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      char buf[128];
      std::snprintf(buf, sizeof(buf), "solvent ratio range [%.6g, %.6g]", rmin, rmax);
      out.message = buf;
    }
    if (sys.analysis().ill_posed_warning)
      out.message += (out.message.empty() ? "" : "; ") + std::string("warning: ") +
                     sys.analysis().note;
  } catch (const Error& e) {
    out.exit_code = 3;
    out.message = e.what();
    write_transient_csv(outdir + "/transient.csv", out.transient);
    return out;
  }
  return out;
}

RunOutcome run_convergence(const Scenario& scenario, int levels, const std::string& outdir) {
  RunOutcome out;
  ensure_dir(outdir);
  if (scenario.mms_case.empty()) {
    out.exit_code = 2;
    out.message = "convergence study needs a manufactured-solution scenario";
    return out;
  }
  std::ofstream csv(outdir + "/orders.csv");
  csv << "level,h,err_x,err_v,err_p,order_x,order_v\n";
  double prev_x = 0.0, prev_v = 0.0, prev_h = 0.0;
  double last_order_x = 0.0, last_order_v = 0.0;
  Scenario sc = scenario;
  for (int lev = 0; lev < levels; ++lev) {
    DiscreteSystem sys(sc);
    Eigen::VectorXd u = sys.initial_state();
    sys.fill_constraint_targets(u);
    NewtonReport rep = solve_steady(sys, u);
    if (!rep.converged) {
      out.exit_code = 3;
      out.message = "level " + std::to_string(lev) + " did not converge";
      return out;
    }
    double h = sys.mesh().max_cell_diameter();
    double ex = sys.mms_error_x(u);
    double ev = sys.mms_error_velocity(u);
    double ep = sys.mms_error_pressure(u);
    double ox = 0.0, ov = 0.0;
    if (lev > 0) {
      ox = std::log(prev_x / ex) / std::log(prev_h / h);
      ov = (ev > 0.0 && prev_v > 0.0) ? std::log(prev_v / ev) / std::log(prev_h / h) : 0.0;
      last_order_x = ox;
      last_order_v = ov;
    }
    csv << lev << "," << fmt(h) << "," << fmt(ex) << "," << fmt(ev) << "," << fmt(ep) << ","
        << fmt(ox) << "," << fmt(ov) << "\n";
    prev_x = ex;
    prev_v = ev;
    prev_h = h;
    sc.geometry.nx *= 2;
    sc.geometry.ny *= 2;
  }
  out.E1 = last_order_x;  // repurposed: observed orders for the caller
  out.E2 = last_order_v;
  return out;
}

RunOutcome run_check(const std::string& outdir, unsigned seed) {
  RunOutcome out;
  ensure_dir(outdir);
  auto results = invariant_suite(seed);
  std::ofstream csv(outdir + "/invariants.csv");
  csv << "check,passed,measured,tolerance\n";
  std::string text;
  int failures = 0;
  for (const auto& r : results) {
    csv << r.name << "," << (r.passed ? 1 : 0) << "," << fmt(r.measured) << ","
        << fmt(r.tolerance) << "\n";
    text += (r.passed ? "PASS " : "FAIL ") + r.name + "  measured=" + fmt(r.measured) +
            " tol=" + fmt(r.tolerance) + "\n";
    if (!r.passed) ++failures;
  }
  write_text(outdir + "/invariants.txt", text);
  out.exit_code = failures == 0 ? 0 : 1;
  out.message = std::to_string(results.size() - failures) + "/" +
                std::to_string(results.size()) + " checks passed";
  return out;
}

RunOutcome run_appendix_a(double A, double B, const std::string& outdir) {
  RunOutcome out;
  ensure_dir(outdir);
  auto both = appendix_a_evolution(A, B, 100, 0.02, 0.4, true, true);
  auto single = appendix_a_evolution(A, B, 100, 0.02, 0.4, false, true);
  std::ofstream csv(outdir + "/appendix_a.csv");
  csv << "step,var_both,var_single,int_x_both,int_x2_both\n";
  for (size_t k = 0; k < both.variance.size(); ++k)
    csv << k << "," << fmt(both.variance[k]) << "," << fmt(single.variance[k]) << ","
        << fmt(both.integral_x[k]) << "," << fmt(both.integral_x2[k]) << "\n";
  bool frozen = both.max_variance <= 1e-12;
  bool grows = single.max_variance > 1e-6;
  if (B == 0.0) {
    // degenerate constant-cT case: the two conservation conditions coincide
    out.message = "constant total concentration (B = 0): conservation conditions coincide";
    out.exit_code = frozen ? 0 : 1;
  } else {
    out.exit_code = (frozen && grows) ? 0 : 1;
    out.message = "var(both)=" + fmt(both.max_variance) +
                  " var(single)=" + fmt(single.max_variance);
  }
  out.E1 = both.max_variance;
  out.E2 = single.max_variance;
  return out;
}

}  // namespace osmium
