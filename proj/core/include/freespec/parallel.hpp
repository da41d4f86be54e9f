#pragma once

#include <cstddef>
#include <functional>

namespace freespec {

/// Worker count used when a caller passes 0: FREESPEC_WORKERS if set,
/// otherwise std::thread::hardware_concurrency().
unsigned default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index
/// is visited exactly once; callers write results into slot i so the
/// outcome does not depend on scheduling. The first exception thrown by
/// any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

/// Neumaier-compensated accumulator. Used for Monte Carlo aggregates so
/// that sums over trials are reproducible to ~1e-15 relative.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace freespec
