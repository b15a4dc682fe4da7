#pragma once

#include <limits>
#include <variant>
#include <vector>

namespace hawkes {

// phi(t) = A * decay * exp(-decay * t); A is the infectivity itself.
struct ExponentialKernel {
  double decay = 1.0;
  bool operator==(const ExponentialKernel&) const = default;
};

// Gaussian bumps truncated to [0, support] and renormalised to unit mass.
struct GaussianBasisKernel {
  std::vector<double> centers;
  double bandwidth = 1.0;
  double support = 10.0;
  bool operator==(const GaussianBasisKernel&) const = default;
};

// Step function: value k holds on [k*lag, (k+1)*lag), zero beyond points*lag.
struct DiscretizedKernel {
  double lag = 1.0;
  int points = 1;
  bool operator==(const DiscretizedKernel&) const = default;
};

using KernelSpec = std::variant<ExponentialKernel, GaussianBasisKernel, DiscretizedKernel>;

inline bool is_exponential(const KernelSpec& k) { return std::holds_alternative<ExponentialKernel>(k); }
inline bool is_basis(const KernelSpec& k) { return std::holds_alternative<GaussianBasisKernel>(k); }
inline bool is_discretized(const KernelSpec& k) { return std::holds_alternative<DiscretizedKernel>(k); }

const char* kernel_type_name(const KernelSpec& kernel);

// Throws InvalidInput when parameters break the kernel invariants.
void validate_kernel(const KernelSpec& kernel);

// Number of coefficient matrices: 1, centers.size(), or points.
int component_count(const KernelSpec& kernel);

// Lag beyond which every component vanishes (infinity for exponential).
double kernel_support(const KernelSpec& kernel);

// Shape of component m at lag t. Zero for t < 0 and beyond the support.
double component_value(const KernelSpec& kernel, int m, double t);

// Integral of component m over [0, x].
double component_integral(const KernelSpec& kernel, int m, double x);

// Total mass of component m: 1 for exponential and basis, lag for discretized.
double component_mass(const KernelSpec& kernel, int m);

// sup over lags s >= x of component m; used for thinning bounds.
double component_sup_from(const KernelSpec& kernel, int m, double x);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace hawkes
