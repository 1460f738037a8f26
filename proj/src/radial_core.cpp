#include "chemomass/radial_core.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "chemomass/errors.hpp"

namespace chemomass {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at index " << i;
      throw InvalidInput(os.str());
    }
  }
}

void require_nonnegative(const RadialProfile& f, const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0) {
      std::ostringstream os;
      os << what << ": negative value " << f[i] << " in cell " << i;
      throw InvalidInput(os.str());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- RadialGrid

RadialGrid::RadialGrid(std::vector<double> faces) : faces_(std::move(faces)) {
  if (faces_.size() < 2) throw InvalidInput("RadialGrid: need at least one cell");
  if (faces_.front() != 0.0 || faces_.back() != 1.0)
    throw InvalidInput("RadialGrid: faces must span exactly [0,1]");
  for (std::size_t i = 0; i + 1 < faces_.size(); ++i)
    if (!(faces_[i + 1] > faces_[i])) throw InvalidInput("RadialGrid: faces must increase strictly");
  const std::size_t n = faces_.size() - 1;
  centers_.resize(n);
  areas_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    centers_[i] = 0.5 * (faces_[i] + faces_[i + 1]);
    // (r1 - r0)(r1 + r0) avoids cancellation in r1^2 - r0^2
    areas_[i] = kPi * (faces_[i + 1] - faces_[i]) * (faces_[i + 1] + faces_[i]);
  }
}

std::shared_ptr<const RadialGrid> RadialGrid::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("RadialGrid::uniform: n must be positive");
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = static_cast<double>(i) / static_cast<double>(n);
  f[n] = 1.0;
  return std::shared_ptr<const RadialGrid>(new RadialGrid(std::move(f)));
}

std::shared_ptr<const RadialGrid> RadialGrid::from_faces(std::vector<double> faces) {
  return std::shared_ptr<const RadialGrid>(new RadialGrid(std::move(faces)));
}

std::shared_ptr<const RadialGrid> RadialGrid::two_zone(double r_split, double h_inner, double h_outer) {
  if (!(r_split > 0.0 && r_split < 1.0)) throw InvalidInput("RadialGrid::two_zone: r_split must lie in (0,1)");
  if (!(h_inner > 0.0) || !(h_outer > 0.0)) throw InvalidInput("RadialGrid::two_zone: spacings must be > 0");
  const auto n_in = static_cast<std::size_t>(std::ceil(r_split / h_inner));
  const auto n_out = static_cast<std::size_t>(std::ceil((1.0 - r_split) / h_outer));
  std::vector<double> f;
  f.reserve(n_in + n_out + 1);
  for (std::size_t i = 0; i <= n_in; ++i) f.push_back(r_split * static_cast<double>(i) / static_cast<double>(n_in));
  for (std::size_t i = 1; i <= n_out; ++i)
    f.push_back(r_split + (1.0 - r_split) * static_cast<double>(i) / static_cast<double>(n_out));
  f.back() = 1.0;
  return std::shared_ptr<const RadialGrid>(new RadialGrid(std::move(f)));
}

double RadialGrid::min_width() const {
  double h = 1.0;
  for (std::size_t i = 0; i < size(); ++i) h = std::min(h, width(i));
  return h;
}

// ------------------------------------------------------------- RadialProfile

RadialProfile::RadialProfile(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidInput("RadialProfile: null grid");
  if (values_.size() != grid_->size())
    throw InvalidInput("RadialProfile: value count does not match grid");
  require_finite(values_, "RadialProfile");
}

RadialProfile RadialProfile::constant(GridPtr grid, double c) {
  std::vector<double> v(grid->size(), c);
  return RadialProfile(std::move(grid), std::move(v));
}

double RadialProfile::at(double r) const {
  const auto c = grid_->centers();
  if (r <= c.front()) return values_.front();
  if (r >= c.back()) return values_.back();
  const auto it = std::upper_bound(c.begin(), c.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - c.begin());
  const double s = (r - c[i - 1]) / (c[i] - c[i - 1]);
  return (1.0 - s) * values_[i - 1] + s * values_[i];
}

double RadialProfile::max() const { return *std::max_element(values_.begin(), values_.end()); }
double RadialProfile::min() const { return *std::min_element(values_.begin(), values_.end()); }

// --------------------------------------------------------------- ModelParams

ModelParams::ModelParams(double delta_, double tau_, double m_) : delta(delta_), tau(tau_), m(m_) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("ModelParams: tau must be > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidInput("ModelParams: delta must be >= 0");
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("ModelParams: m must be > 0");
}

// -------------------------------------------------------------------- XiGrid

XiGrid::XiGrid(std::vector<double> nodes) : xi_(std::move(nodes)) {
  if (xi_.size() < 3) throw InvalidInput("XiGrid: need at least 3 nodes");
  if (xi_.front() != 0.0 || xi_.back() != 1.0) throw InvalidInput("XiGrid: endpoints must be 0 and 1");
  for (std::size_t j = 0; j + 1 < xi_.size(); ++j)
    if (!(xi_[j + 1] > xi_[j])) throw InvalidInput("XiGrid: nodes must increase strictly");
}

XiGrid XiGrid::uniform(std::size_t nxi) {
  if (nxi < 3) throw InvalidInput("XiGrid::uniform: nxi must be >= 3");
  std::vector<double> x(nxi);
  const double n = static_cast<double>(nxi - 1);
  for (std::size_t j = 0; j < nxi; ++j) x[j] = static_cast<double>(j) / n;
  x.back() = 1.0;
  return XiGrid(std::move(x));
}

XiGrid XiGrid::graded(double xi_min, double q, double h_max) {
  if (!(xi_min > 0.0 && xi_min < 0.1)) throw InvalidInput("XiGrid::graded: xi_min must lie in (0, 0.1)");
  if (!(q > 1.0)) throw InvalidInput("XiGrid::graded: ratio must exceed 1");
  if (!(h_max > 0.0 && h_max < 0.5)) throw InvalidInput("XiGrid::graded: h_max must lie in (0, 0.5)");
  std::vector<double> x{0.0, xi_min};
  while (x.back() * (q - 1.0) < h_max && x.back() * q < 1.0) x.push_back(x.back() * q);
  const double start = x.back();
  const auto steps = static_cast<std::size_t>(std::ceil((1.0 - start) / h_max));
  for (std::size_t k = 1; k <= steps; ++k)
    x.push_back(start + (1.0 - start) * static_cast<double>(k) / static_cast<double>(steps));
  x.back() = 1.0;
  return XiGrid(std::move(x));
}

// -------------------------------------------------------------- MassFunction

MassFunction::MassFunction(const RadialProfile& f) {
  const auto& g = f.grid();
  const auto r = g.faces();
  knots_.resize(r.size());
  cum_.resize(r.size());
  half_values_.resize(f.size());
  knots_[0] = 0.0;
  cum_[0] = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    knots_[i + 1] = r[i + 1] * r[i + 1];
    half_values_[i] = 0.5 * f[i];
    cum_[i + 1] = cum_[i] + half_values_[i] * (r[i + 1] - r[i]) * (r[i + 1] + r[i]);
  }
  knots_.back() = 1.0;
}

double MassFunction::operator()(double xi) const {
  if (xi <= 0.0) return 0.0;
  if (xi >= 1.0) return cum_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), xi);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return cum_[i] + half_values_[i] * (xi - knots_[i]);
}

double MassFunction::slope(double xi) const {
  if (xi >= 1.0) return half_values_.back();
  if (xi <= 0.0) return half_values_.front();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), xi);
  return half_values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::vector<double> MassFunction::sample(const XiGrid& xig) const {
  std::vector<double> out(xig.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(xig[j]);
  out.front() = 0.0;
  out.back() = cum_.back();
  return out;
}

// ---------------------------------------------------------------- operations

double integrate_disk(const RadialProfile& f) {
  require_finite(f.values(), "integrate_disk");
  const auto a = f.grid().areas();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += a[i] * f[i];
  return s;
}

std::vector<double> mass_function(const RadialProfile& u, const XiGrid& xig) {
  require_nonnegative(u, "mass_function");
  return MassFunction(u).sample(xig);
}

W0Moments w0_moments(const RadialProfile& w0, const XiGrid& xig) {
  require_nonnegative(w0, "w0_moments");
  MassFunction W(w0);
  return {W.sample(xig), W.total()};
}

HoldWeights hold_weights(double k, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("hold_weights: dt must be > 0");
  const double x = k * dt;
  // (1 - e^{-x} - x e^{-x}) / x^2 and (x - 1 + e^{-x}) / x^2, by series when x is small
  double a, b;
  if (std::abs(x) < 1e-3) {
    a = 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
    b = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
  } else {
    const double em1 = -std::expm1(-x);  // 1 - e^{-x}
    const double E = std::exp(-x);
    a = (em1 - x * E) / (x * x);
    b = (x - em1) / (x * x);
  }
  return {a * dt, b * dt};
}

double mu_closed_form(const ModelParams& p, double w0_mass, double t) {
  if (!(t >= 0.0)) throw InvalidInput("mu_closed_form: t must be >= 0");
  const double k = p.kernel_rate();
  return std::exp(-k * t) * w0_mass / kPi + p.m / (kPi * p.tau) * memory_weight(k, t);
}

void write_profile_csv(std::ostream& os, const RadialProfile& f) {
  os << "r,value\n" << std::setprecision(17);
  const auto c = f.grid().centers();
  for (std::size_t i = 0; i < f.size(); ++i) os << c[i] << ',' << f[i] << '\n';
}

void write_xi_csv(std::ostream& os, const XiGrid& xig, std::span<const double> values) {
  if (values.size() != xig.size()) throw InvalidInput("write_xi_csv: size mismatch");
  os << "xi,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < values.size(); ++j) os << xig[j] << ',' << values[j] << '\n';
}

}  // namespace chemomass
