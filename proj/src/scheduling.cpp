#include "otfs/scheduling.hpp"

namespace otfs {

UserPool::UserPool(Eigen::MatrixXd gains_sq) : gains_(std::move(gains_sq)) {
  if (gains_.rows() < 1 || gains_.cols() < 1) throw InvalidArgument("user pool needs at least one user and subchannel");
  if ((gains_.array() < 0.0).any()) throw InvalidArgument("channel gains must be non-negative");
}

int greedy_schedule(const UserPool& pool) {
  int best = 0;
  double best_gain = pool.min_gain(0);
  for (int i = 1; i < pool.k_users(); ++i) {
    const double g = pool.min_gain(i);
    if (g > best_gain) {
      best = i;
      best_gain = g;
    }
  }
  return best;
}

std::vector<int> per_subchannel_schedule(const UserPool& pool) {
  const auto& g = pool.gains_sq();
  std::vector<int> out(pool.m());
  for (int m = 0; m < pool.m(); ++m) {
    int best = 0;
    for (int i = 1; i < pool.k_users(); ++i) {
      if (g(i, m) > g(best, m)) best = i;
    }
    out[m] = best;
  }
  return out;
}

}  // namespace otfs
