#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace btlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr cplx kI{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArgumentError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct IntegrationError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct BranchError : Error { using Error::Error; };
struct ClassificationError : Error { using Error::Error; };
struct ConsistencyError : Error { using Error::Error; };
struct UnsupportedDegree : Error { using Error::Error; };

// [[0,-I],[I,0]] in R^{2d}, coordinates ordered (x_1..x_d, y_1..y_d).
Mat J0(int d);

// Worker count: BTLAB_WORKERS if set and positive, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0,n). Each index must write only its own output slot;
// reductions happen afterwards in index order so results do not depend on the
// number of workers.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(w);
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace btlab
