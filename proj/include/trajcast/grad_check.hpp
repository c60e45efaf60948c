#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "trajcast/nn.hpp"
#include "trajcast/rng.hpp"

namespace trajcast::nn {

struct GradCheckOptions {
  double tolerance = 1e-4;
  // Coordinates checked per parameter tensor (all of them if smaller).
  std::size_t samples_per_param = 24;
  std::uint64_t seed = 12345;
};

struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
  };
  std::vector<Entry> entries;
  double max_rel_err = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_err < tolerance; }

  std::string summary() const {
    std::string s;
    for (const auto& e : entries) {
      s += e.name + ": max_rel_err=" + std::to_string(e.max_rel_err) + "\n";
    }
    return s;
  }
};

// Central-difference check of analytic gradients. `loss` must run a pure
// forward pass; `compute_grads` must zero, then populate, every parameter
// gradient for the same loss. Coordinates are subsampled deterministically;
// h scales with the coordinate magnitude. Run in double precision.
template <typename T>
GradCheckReport grad_check(const std::function<T()>& loss,
                           const std::function<void()>& compute_grads,
                           const std::vector<Parameter<T>*>& params,
                           GradCheckOptions opts = {}) {
  compute_grads();
  std::vector<Tensor<T>> analytic;
  analytic.reserve(params.size());
  for (Parameter<T>* p : params) analytic.push_back(p->grad);

  Rng rng(opts.seed);
  GradCheckReport report;
  report.tolerance = opts.tolerance;

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter<T>& p = *params[pi];
    const std::size_t n = p.value.numel();
    std::vector<std::size_t> coords;
    if (n <= opts.samples_per_param) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      coords.reserve(opts.samples_per_param);
      for (std::size_t i = 0; i < opts.samples_per_param; ++i) {
        coords.push_back(rng.uniform_index(n));
      }
    }

    GradCheckReport::Entry entry;
    entry.name = p.name;
    for (std::size_t idx : coords) {
      const T saved = p.value[idx];
      const T h = static_cast<T>(1e-5) *
                  std::max(T(1), std::abs(saved));
      p.value[idx] = saved + h;
      const T up = loss();
      p.value[idx] = saved - h;
      const T down = loss();
      p.value[idx] = saved;
      if (!std::isfinite(static_cast<double>(up)) ||
          !std::isfinite(static_cast<double>(down))) {
        throw DataError("grad_check: non-finite loss at parameter " + p.name);
      }
      const double numeric =
          static_cast<double>(up - down) / (2.0 * static_cast<double>(h));
      const double a = static_cast<double>(analytic[pi][idx]);
      const double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > entry.max_rel_err) {
        entry.max_rel_err = rel;
        entry.worst_index = idx;
        entry.analytic = a;
        entry.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace trajcast::nn
