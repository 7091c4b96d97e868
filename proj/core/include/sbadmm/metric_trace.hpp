#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sbadmm/image_grid.hpp"

namespace sbadmm {

struct MetricRecord {
  int iter = 0;
  double cost = 0.0;
  // (cost - reference_cost) / reference_cost, or the absolute difference
  // when the reference cost is zero. NaN without a reference.
  double rel_cost_err = 0.0;
  // sqrt(mean((x - reference)^2)); NaN without a reference.
  double rmsd = 0.0;
  // ||H x - rhs|| / ||rhs|| of the last x-update (0 at iteration 0).
  double inner_residual = 0.0;
};

struct MetricTrace {
  std::vector<MetricRecord> records;
  // Set when the reference cost was zero and rel_cost_err holds absolute
  // differences instead.
  bool absolute_cost_error = false;

  std::size_t size() const { return records.size(); }
  const MetricRecord& back() const { return records.back(); }
  /// First iteration with rel_cost_err <= tolerance, if any.
  std::optional<int> iterations_to(double tolerance) const;
};

struct Reference {
  ImageGrid x;
  double cost = 0.0;
};

MetricRecord measure(int iter, const ImageGrid& x, double cost,
                     double inner_residual, const Reference* reference);

/// Columns iter,cost,rel_cost_err,rmsd,inner_residual at round-trip
/// precision.
void write_trace_csv(const std::filesystem::path& path,
                     const MetricTrace& trace);

}  // namespace sbadmm
