#include "btlab/common.hpp"

#include <cstdlib>

namespace btlab {

Mat J0(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = -Mat::Identity(d, d);
  J.bottomLeftCorner(d, d) = Mat::Identity(d, d);
  return J;
}

int worker_count() {
  if (const char* s = std::getenv("BTLAB_WORKERS")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

}  // namespace btlab
