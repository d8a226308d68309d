#include "displab/models.hpp"

#include <cmath>

#include "displab/errors.hpp"

namespace displab {

namespace {

// Working range for validity checks of a' and the invariants; covers the
// sech^2 initial data and stays away from the u = 0 singularities.
constexpr double kRangeLo = 0.05;
constexpr double kRangeHi = 1.05;

void require_a_prime_nonzero(const SmoothFn& a, const std::string& who) {
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    double u = kRangeLo + (kRangeHi - kRangeLo) * i / kSamples;
    if (std::abs(a.deriv(u, 1)) < 1e-12)
      throw ConstructionError(who + ": a'(u) vanishes at u = " +
                              std::to_string(u) +
                              " inside the working range");
  }
}

}  // namespace

ModelSpec make_gen_kdv(int n) {
  if (n < 1) throw ConstructionError("make_gen_kdv: n must be >= 1");
  ModelSpec m;
  m.kind = ModelKind::GenKdV;
  m.gen_kdv_n = n;
  m.name = "genkdv" + std::to_string(n);
  m.a = SmoothFn::monomial(6.0, n);
  m.flux_antideriv = SmoothFn::monomial(6.0 / (n + 1), n + 1);
  m.c = SmoothFn::monomial(1.0 / (6.0 * n), 1 - n);
  m.p = n == 1 ? SmoothFn::zero()
               : SmoothFn::monomial(-(n - 1.0) / (120.0 * n * n), 1 - 2 * n);
  m.b1 = SmoothFn::constant(1.0);
  m.linear_symbol = [](double k, double eps) {
    // -eps^2 (ik)^3 from u_t + ... + eps^2 u_xxx = 0
    return std::complex<double>{0.0, eps * eps * k * k * k};
  };
  m.has_linear_part = true;

  // h = 6 u^{n+2}/((n+1)(n+2)) - eps^2 u_x^2 / 2; rhs = -d_x dH/du.
  // The reported energy is -H, negative for small eps and positive data.
  std::vector<DensityTerm> terms;
  terms.push_back(
      {SmoothFn::monomial(6.0 / ((n + 1.0) * (n + 2.0)), n + 2), 0, 0, 0, 0});
  terms.push_back({SmoothFn::constant(-0.5), 2, 2, 0, 0});
  m.density = HamiltonianDensity(std::move(terms), m.name);
  m.energy_sign = -1.0;

  require_a_prime_nonzero(m.a, m.name);
  return m;
}

ModelSpec make_kawahara(double alpha, double beta) {
  if (beta == 0.0)
    throw ConstructionError("make_kawahara: beta must be nonzero");
  ModelSpec m;
  m.kind = ModelKind::Kawahara;
  m.kaw_alpha = alpha;
  m.kaw_beta = beta;
  m.name = "kawahara(a=" + std::to_string(alpha) +
           ",b=" + std::to_string(beta) + ")";
  m.a = SmoothFn::monomial(6.0, 1);
  m.flux_antideriv = SmoothFn::monomial(3.0, 2);
  m.c = SmoothFn::constant(alpha / 6.0);
  m.p = SmoothFn::constant(beta / 12.0);
  m.b1 = SmoothFn::constant(alpha);
  m.linear_symbol = [alpha, beta](double k, double eps) {
    // u_t + 6uu_x + alpha eps^2 u_xxx + beta eps^4 u_xxxxx = 0:
    // L = -alpha eps^2 (ik)^3 - beta eps^4 (ik)^5.
    double e2 = eps * eps;
    return std::complex<double>{
        0.0, alpha * e2 * k * k * k - beta * e2 * e2 * k * k * k * k * k};
  };
  m.has_linear_part = true;

  // h = u^3 - (alpha/2) eps^2 u_x^2 + (beta/2) eps^4 u_xx^2.
  std::vector<DensityTerm> terms;
  terms.push_back({SmoothFn::monomial(1.0, 3), 0, 0, 0, 0});
  terms.push_back({SmoothFn::constant(-alpha / 2.0), 2, 2, 0, 0});
  terms.push_back({SmoothFn::constant(beta / 2.0), 4, 0, 2, 0});
  m.density = HamiltonianDensity(std::move(terms), m.name);

  require_a_prime_nonzero(m.a, m.name);
  return m;
}

ModelSpec make_nonlinear_dispersion(SmoothFn c, SmoothFn p,
                                    const std::string& label) {
  if (!c.valid() || !p.valid())
    throw ConstructionError("make_nonlinear_dispersion: c and p required");
  ModelSpec m;
  m.kind = ModelKind::NonlinearDispersion;
  m.name = "nldisp(" + label + ")";
  m.a = SmoothFn::identity();
  m.flux_antideriv = SmoothFn::monomial(0.5, 2);
  m.c = c;
  m.p = p;
  m.b1 = c;  // a' = 1
  m.linear_symbol = [](double, double) { return std::complex<double>{0.0, 0.0}; };
  m.has_linear_part = false;

  // h = u^3/6 - (eps^2/2) c(u) u_x^2 + eps^4 p(u) u_xx^2.
  std::vector<DensityTerm> terms;
  terms.push_back({SmoothFn::monomial(1.0 / 6.0, 3), 0, 0, 0, 0});
  terms.push_back({-0.5 * c, 2, 2, 0, 0});
  terms.push_back({p, 4, 0, 2, 0});
  m.density = HamiltonianDensity(std::move(terms), m.name);
  return m;
}

ModelSpec make_kdv2(double alpha) {
  ModelSpec m;
  m.kind = ModelKind::KdV2Family;
  m.kdv2_alpha = alpha;
  m.name = "kdv2(a=" + std::to_string(alpha) + ")";
  m.a = SmoothFn::monomial(30.0, 2);
  m.flux_antideriv = SmoothFn::monomial(10.0, 3);
  m.c = SmoothFn::constant(alpha / 6.0);
  // p has a 1/u singularity for alpha != +-1; validity checks keep u away
  // from zero.
  m.p = (1.0 - alpha * alpha) == 0.0
            ? SmoothFn::zero()
            : SmoothFn::monomial((1.0 - alpha * alpha) / 120.0, -1);
  m.b1 = SmoothFn::monomial(10.0 * alpha, 1);  // c * a' = (alpha/6)(60u)
  m.linear_symbol = [](double k, double eps) {
    // Only eps^4 u_xxxxx is constant-coefficient: L = -(ik)^5 eps^4.
    double e4 = eps * eps * eps * eps;
    return std::complex<double>{0.0, -e4 * k * k * k * k * k};
  };
  m.has_linear_part = true;

  // h = 2.5 u^4 - 5 alpha eps^2 u u_x^2 + (eps^4/2) u_xx^2.
  std::vector<DensityTerm> terms;
  terms.push_back({SmoothFn::monomial(2.5, 4), 0, 0, 0, 0});
  terms.push_back({SmoothFn::monomial(-5.0 * alpha, 1), 2, 2, 0, 0});
  terms.push_back({SmoothFn::constant(0.5), 4, 0, 2, 0});
  m.density = HamiltonianDensity(std::move(terms), m.name);

  require_a_prime_nonzero(m.a, m.name);
  return m;
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

namespace {

// Full flux (stiff linear terms included), evaluated in physical space.
RealField full_flux(const ModelSpec& m, const RealField& u, double eps) {
  const int n = u.size();
  const double e2 = eps * eps, e4 = e2 * e2;
  RealField flux(u.grid());

  switch (m.kind) {
    case ModelKind::GenKdV: {
      RealField uxx = derivative(u, 2);
      for (int j = 0; j < n; ++j)
        flux[j] = m.flux_antideriv(u[j]) + e2 * uxx[j];
      break;
    }
    case ModelKind::Kawahara: {
      RealField uxx = derivative(u, 2);
      RealField uxxxx = derivative(u, 4);
      for (int j = 0; j < n; ++j)
        flux[j] = 3.0 * u[j] * u[j] + m.kaw_alpha * e2 * uxx[j] +
                  m.kaw_beta * e4 * uxxxx[j];
      break;
    }
    case ModelKind::NonlinearDispersion: {
      RealField ux = derivative(u, 1);
      RealField uxx = derivative(u, 2);
      RealField uxxx = derivative(u, 3);
      RealField uxxxx = derivative(u, 4);
      for (int j = 0; j < n; ++j) {
        Jet uj = Jet::variable(u[j], 2);
        Jet cj = m.c(uj), pj = m.p(uj);
        double c0 = cj.deriv(0), c1 = cj.deriv(1);
        double p0 = pj.deriv(0), p1 = pj.deriv(1), p2 = pj.deriv(2);
        flux[j] = 0.5 * u[j] * u[j] +
                  e2 * (c0 * uxx[j] + 0.5 * c1 * ux[j] * ux[j]) +
                  e4 * (2.0 * p0 * uxxxx[j] + 4.0 * p1 * ux[j] * uxxx[j] +
                        3.0 * p1 * uxx[j] * uxx[j] +
                        2.0 * p2 * ux[j] * ux[j] * uxx[j]);
      }
      break;
    }
    case ModelKind::KdV2Family: {
      RealField ux = derivative(u, 1);
      RealField uxx = derivative(u, 2);
      RealField uxxxx = derivative(u, 4);
      const double a10 = 10.0 * m.kdv2_alpha;
      for (int j = 0; j < n; ++j)
        flux[j] = 10.0 * u[j] * u[j] * u[j] +
                  a10 * e2 * (u[j] * uxx[j] + 0.5 * ux[j] * ux[j]) +
                  e4 * uxxxx[j];
      break;
    }
  }
  return flux;
}

// Flux with the constant-coefficient stiff terms removed.
RealField nonlinear_flux(const ModelSpec& m, const RealField& u, double eps) {
  const int n = u.size();
  const double e2 = eps * eps;
  RealField flux(u.grid());

  switch (m.kind) {
    case ModelKind::GenKdV:
      for (int j = 0; j < n; ++j) flux[j] = m.flux_antideriv(u[j]);
      break;
    case ModelKind::Kawahara:
      for (int j = 0; j < n; ++j) flux[j] = 3.0 * u[j] * u[j];
      break;
    case ModelKind::NonlinearDispersion:
      return full_flux(m, u, eps);  // zero symbol: everything is nonlinear
    case ModelKind::KdV2Family: {
      RealField ux = derivative(u, 1);
      RealField uxx = derivative(u, 2);
      const double a10 = 10.0 * m.kdv2_alpha;
      for (int j = 0; j < n; ++j)
        flux[j] = 10.0 * u[j] * u[j] * u[j] +
                  a10 * e2 * (u[j] * uxx[j] + 0.5 * ux[j] * ux[j]);
      break;
    }
  }
  return flux;
}

}  // namespace

RhsResult rhs(const ModelSpec& m, const RealField& u, double eps,
              const RhsOptions& opt) {
  if (!(eps > 0.0)) throw Error("rhs: eps must be positive");
  if (!u.finite()) throw InvalidFieldError("rhs: non-finite input field");

  RhsResult out{RealField(u.grid())};
  if (opt.check_resolution) {
    auto rep = resolution_ok(to_spectral(u), 0.1, opt.warn_threshold);
    out.resolution_warning = !rep.ok;
    out.tail_max = rep.tail_max;
  }
  RealField flux = full_flux(m, u, eps);
  RealField dflux = derivative(flux, 1);
  for (int j = 0; j < u.size(); ++j) out.dudt[j] = -dflux[j];
  if (!out.dudt.finite())
    throw InvalidFieldError("rhs: produced non-finite values");
  return out;
}

RealField rhs_nonlinear(const ModelSpec& m, const RealField& u, double eps) {
  RealField flux = nonlinear_flux(m, u, eps);
  RealField dflux = derivative(flux, 1);
  for (int j = 0; j < u.size(); ++j) dflux[j] = -dflux[j];
  return dflux;
}

void rhs_nonlinear_spectral(const ModelSpec& m, const SpectralCoeffs& u_hat,
                            double eps, SpectralCoeffs& out) {
  RealField u = to_physical(u_hat);
  RealField flux = nonlinear_flux(m, u, eps);
  out = to_spectral(flux);
  derivative_inplace(out, 1);
  for (auto& c : out.coeffs()) c = -c;
}

std::vector<InvariantSample> invariants_cp(const ModelSpec& m,
                                           std::span<const double> u_samples) {
  std::vector<InvariantSample> out;
  out.reserve(u_samples.size());
  for (double u : u_samples) {
    if (std::abs(m.a.deriv(u, 1)) < 1e-14)
      throw SingularInvariantError(
          "invariants_cp: a'(u) = 0 at u = " + std::to_string(u), u);
    out.push_back({u, m.c(u), m.p(u)});
  }
  return out;
}

}  // namespace displab
