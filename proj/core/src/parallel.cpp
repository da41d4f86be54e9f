#include "freespec/parallel.hpp"

#include "freespec/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace freespec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SizeLimit: return "size_limit";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::Order: return "order";
    case ErrorCode::PartitionClass: return "partition_class";
    case ErrorCode::Kind: return "kind";
    case ErrorCode::HalfPlane: return "half_plane";
    case ErrorCode::BranchPoint: return "branch_point";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::InconsistentTransform: return "inconsistent_transform";
    case ErrorCode::Model: return "model";
    case ErrorCode::Input: return "input";
    case ErrorCode::Numerical: return "numerical";
  }
  return "unknown";
}

unsigned default_workers() {
  if (const char* env = std::getenv("FREESPEC_WORKERS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void CompensatedSum::add(double x) noexcept {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace freespec
