#include "hawkes/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hawkes/error.hpp"

namespace hawkes {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double basis_normaliser(const GaussianBasisKernel& k, int m) {
  const double c = k.centers[m];
  return normal_cdf((k.support - c) / k.bandwidth) - normal_cdf(-c / k.bandwidth);
}

double basis_value(const GaussianBasisKernel& k, int m, double t) {
  if (t < 0.0 || t > k.support) return 0.0;
  const double c = k.centers[m];
  return normal_pdf((t - c) / k.bandwidth) / (k.bandwidth * basis_normaliser(k, m));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

const char* kernel_type_name(const KernelSpec& kernel) {
  return std::visit(overloaded{[](const ExponentialKernel&) { return "exponential"; },
                               [](const GaussianBasisKernel&) { return "basis"; },
                               [](const DiscretizedKernel&) { return "discretized"; }},
                    kernel);
}

void validate_kernel(const KernelSpec& kernel) {
  std::visit(overloaded{
                 [](const ExponentialKernel& k) {
                   if (!(k.decay > 0.0) || !std::isfinite(k.decay))
                     throw InvalidInput("exponential kernel: decay must be positive and finite");
                 },
                 [](const GaussianBasisKernel& k) {
                   if (k.centers.empty()) throw InvalidInput("basis kernel: at least one center required");
                   if (!(k.bandwidth > 0.0)) throw InvalidInput("basis kernel: bandwidth must be positive");
                   if (!(k.support > 0.0) || !std::isfinite(k.support))
                     throw InvalidInput("basis kernel: support must be positive and finite");
                   if (!std::is_sorted(k.centers.begin(), k.centers.end()))
                     throw InvalidInput("basis kernel: centers must be sorted");
                   for (double c : k.centers)
                     if (!(c >= 0.0) || !std::isfinite(c))
                       throw InvalidInput("basis kernel: centers must be nonnegative");
                   for (std::size_t m = 0; m < k.centers.size(); ++m)
                     if (!(basis_normaliser(k, static_cast<int>(m)) > 0.0))
                       throw InvalidInput("basis kernel: basis " + std::to_string(m) + " has no mass on the support");
                 },
                 [](const DiscretizedKernel& k) {
                   if (!(k.lag > 0.0) || !std::isfinite(k.lag))
                     throw InvalidInput("discretized kernel: lag must be positive");
                   if (k.points < 1) throw InvalidInput("discretized kernel: at least one point required");
                 }},
             kernel);
}

int component_count(const KernelSpec& kernel) {
  return std::visit(overloaded{[](const ExponentialKernel&) { return 1; },
                               [](const GaussianBasisKernel& k) { return static_cast<int>(k.centers.size()); },
                               [](const DiscretizedKernel& k) { return k.points; }},
                    kernel);
}

double kernel_support(const KernelSpec& kernel) {
  return std::visit(overloaded{[](const ExponentialKernel&) { return kInfinity; },
                               [](const GaussianBasisKernel& k) { return k.support; },
                               [](const DiscretizedKernel& k) { return k.lag * k.points; }},
                    kernel);
}

double component_value(const KernelSpec& kernel, int m, double t) {
  return std::visit(overloaded{[t](const ExponentialKernel& k) {
                                 return t < 0.0 ? 0.0 : k.decay * std::exp(-k.decay * t);
                               },
                               [m, t](const GaussianBasisKernel& k) { return basis_value(k, m, t); },
                               [m, t](const DiscretizedKernel& k) {
                                 const double lo = m * k.lag;
                                 return (t >= lo && t < lo + k.lag) ? 1.0 : 0.0;
                               }},
                    kernel);
}

double component_integral(const KernelSpec& kernel, int m, double x) {
  if (x <= 0.0) return 0.0;
  return std::visit(overloaded{[x](const ExponentialKernel& k) { return -std::expm1(-k.decay * x); },
                               [m, x](const GaussianBasisKernel& k) {
                                 const double c = k.centers[m];
                                 const double hi = std::min(x, k.support);
                                 return (normal_cdf((hi - c) / k.bandwidth) - normal_cdf(-c / k.bandwidth)) /
                                        basis_normaliser(k, m);
                               },
                               [m, x](const DiscretizedKernel& k) {
                                 return std::clamp(x - m * k.lag, 0.0, k.lag);
                               }},
                    kernel);
}

double component_mass(const KernelSpec& kernel, int /*m*/) {
  if (const auto* d = std::get_if<DiscretizedKernel>(&kernel)) return d->lag;
  return 1.0;
}

double component_sup_from(const KernelSpec& kernel, int m, double x) {
  x = std::max(x, 0.0);
  return std::visit(overloaded{[x](const ExponentialKernel& k) { return k.decay * std::exp(-k.decay * x); },
                               [m, x](const GaussianBasisKernel& k) {
                                 if (x > k.support) return 0.0;
                                 return basis_value(k, m, std::clamp(k.centers[m], x, k.support));
                               },
                               [m, x](const DiscretizedKernel& k) { return x < (m + 1) * k.lag ? 1.0 : 0.0; }},
                    kernel);
}

}  // namespace hawkes
