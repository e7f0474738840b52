#pragma once

#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "otfs/errors.hpp"

namespace otfs {

enum class Scheduler { Random, Greedy, PerSubchannel };

inline const char* to_string(Scheduler s) {
  switch (s) {
    case Scheduler::Random: return "random";
    case Scheduler::Greedy: return "greedy";
    case Scheduler::PerSubchannel: return "per_subchannel";
  }
  return "?";
}

/// K candidate users and their subchannel gains |D~_i^l|^2 (K x M). Indices are 0-based.
class UserPool {
 public:
  explicit UserPool(Eigen::MatrixXd gains_sq);

  int k_users() const noexcept { return static_cast<int>(gains_.rows()); }
  int m() const noexcept { return static_cast<int>(gains_.cols()); }
  const Eigen::MatrixXd& gains_sq() const noexcept { return gains_; }
  /// min_l |D~_i^l|^2
  double min_gain(int user) const { return gains_.row(user).minCoeff(); }

 private:
  Eigen::MatrixXd gains_;
};

/// M distinct users drawn uniformly without replacement; entry m occupies subchannel m.
template <class Rng>
std::vector<int> random_schedule(const UserPool& pool, Rng& rng) {
  const int k = pool.k_users(), m = pool.m();
  if (k < m) throw InvalidArgument("random scheduling needs K >= M");
  std::vector<int> users(k);
  std::iota(users.begin(), users.end(), 0);
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, k - 1);
    std::swap(users[i], users[pick(rng)]);
  }
  users.resize(m);
  return users;
}

/// argmax_i min_l |D~_i^l|^2, lowest index on ties. The winner occupies every subchannel.
int greedy_schedule(const UserPool& pool);

/// For each subchannel m, argmax_i |D~_i^m|^2 (lowest index on ties). Users may repeat.
std::vector<int> per_subchannel_schedule(const UserPool& pool);

}  // namespace otfs
