#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlfem/assembly.hpp"

namespace nlfem {

const char* to_string(EnergyKind e) { return e == EnergyKind::EI ? "E_I" : "E_II"; }

EnergyKind energy_from_string(const std::string& name) {
  if (name == "E_I" || name == "EI" || name == "I" || name == "censored") return EnergyKind::EI;
  if (name == "E_II" || name == "EII" || name == "II" || name == "full") return EnergyKind::EII;
  throw std::invalid_argument("unknown energy '" + name + "' (expected E_I or E_II)");
}

void ProblemSpec::validate(const Mesh& mesh) const {
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream os;
    os << "fractional order s must lie in (0, 1), got " << s;
    throw std::invalid_argument(os.str());
  }
  // Sample barycenters of up to 64 triangles per subdomain.
  std::vector<Point> pts1, pts2;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Omega1) pts1.push_back(mesh.barycenter(t));
    if (mesh.tags[t] != Subdomain::Exterior) pts2.push_back(mesh.barycenter(t));
  }
  auto thin = [](std::vector<Point>& v) {
    if (v.size() <= 64) return;
    std::vector<Point> out;
    const double stride = static_cast<double>(v.size()) / 64.0;
    for (int k = 0; k < 64; ++k) out.push_back(v[static_cast<std::size_t>(k * stride)]);
    v = out;
  };
  thin(pts1);
  thin(pts2);
  for (Point p : pts1) {
    const double v = sigma_l ? sigma_l(p) : 1.0;
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "sigma_l = " << v << " at (" << p.x << ", " << p.y << ") is not positive";
      throw std::invalid_argument(os.str());
    }
  }
  for (std::size_t i = 0; i < pts2.size(); ++i)
    for (std::size_t j = i; j < pts2.size(); j += 7) {
      const double a = sigma_nl(pts2[i], pts2[j]), b = sigma_nl(pts2[j], pts2[i]);
      if (!(a > 0.0) || !std::isfinite(a)) {
        std::ostringstream os;
        os << "sigma_nl = " << a << " is not positive at a sampled pair";
        throw std::invalid_argument(os.str());
      }
      if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b))) {
        std::ostringstream os;
        os.precision(17);
        os << "sigma_nl is not symmetric: " << a << " vs " << b << " at (" << pts2[i].x << ", " << pts2[i].y << "), ("
           << pts2[j].x << ", " << pts2[j].y << ")";
        throw std::invalid_argument(os.str());
      }
    }
  if (energy == EnergyKind::EII) validate_tail(tail, mesh);
}

Eigen::MatrixXd LinearSystem::nonlocal() const {
  Eigen::MatrixXd n = A;
  for (int k = 0; k < local.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(local, k); it; ++it) n(it.row(), it.col()) -= it.value();
  return n;
}

LinearSystem build_system(const ProblemSpec& spec, const Mesh& mesh, const BuildOptions& opts) {
  spec.validate(mesh);
  LinearSystem sys;
  sys.energy = spec.energy;
  sys.s = spec.s;
  sys.dofs = interior_dofs(mesh);
  if (spec.energy == EnergyKind::EI) {
    sys.A = opts.reference ? assemble_nonlocal_censored_reference(mesh, spec.s, spec.sigma_nl, spec.quad, sys.dofs)
                           : assemble_nonlocal_censored(mesh, spec.s, spec.sigma_nl, spec.quad, sys.dofs, opts.assembly);
    if (spec.s <= 0.5 && mesh.count(Subdomain::Omega2) > 0) {
      sys.ill_posed = true;
      sys.warnings.push_back("E_I with s <= 1/2: the continuous problem need not have a unique minimizer");
    }
  } else {
    sys.A = opts.reference
                ? assemble_nonlocal_full_reference(mesh, spec.s, spec.sigma_nl, spec.tail, spec.quad, sys.dofs)
                : assemble_nonlocal_full(mesh, spec.s, spec.sigma_nl, spec.tail, spec.quad, sys.dofs, opts.assembly);
  }
  sys.local = assemble_local(mesh, spec.sigma_l, sys.dofs);
  for (int k = 0; k < sys.local.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.local, k); it; ++it) sys.A(it.row(), it.col()) += it.value();
  sys.b = assemble_load(mesh, spec.f, sys.dofs);
  if (opts.with_mass) sys.M = assemble_mass(mesh, sys.dofs);
  return sys;
}

}  // namespace nlfem
