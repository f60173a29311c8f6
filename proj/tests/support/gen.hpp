#pragma once

#include <cstdint>
#include <random>
#include <string>

// Small seeded generators shared by the property tests.
namespace taftwin::testkit {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t u64() { return rng_(); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  std::string word(int min_len, int max_len) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz_0123456789";
    std::string s;
    const int n = integer(min_len, max_len);
    for (int i = 0; i < n; ++i) s += kAlphabet[integer(0, sizeof kAlphabet - 2)];
    return s;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace taftwin::testkit
