#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vqda/rng.hpp"

using vqda::SplitMix64;

TEST_CASE("same seed reproduces the stream exactly") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and forks give different streams") {
  SplitMix64 a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  REQUIRE(same == 0);

  SplitMix64 root(7);
  SplitMix64 f0 = root.fork(0), f1 = root.fork(1);
  REQUIRE(f0.next_u64() != f1.next_u64());

  // Forking is const: the parent stream is unaffected.
  SplitMix64 p(9), q(9);
  (void)p.fork(3);
  REQUIRE(p.next_u64() == q.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
  SplitMix64 rng(5);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  REQUIRE(lo < 0.01);
  REQUIRE(hi > 0.99);
  REQUIRE(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("angle covers [0, 2pi)") {
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.angle();
    REQUIRE(a >= 0.0);
    REQUIRE(a < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("bounded draws are in range and roughly uniform") {
  SplitMix64 rng(13);
  const std::uint64_t buckets = 8;
  std::vector<int> hist(buckets, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t v = rng.bounded(buckets);
    REQUIRE(v < buckets);
    ++hist[v];
  }
  for (int h : hist) {
    REQUIRE(h > n / (int)buckets * 0.9);
    REQUIRE(h < n / (int)buckets * 1.1);
  }
}

TEST_CASE("gaussian has sane first two moments") {
  SplitMix64 rng(17);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  REQUIRE(std::abs(mean) < 0.03);
  REQUIRE(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("permutation is a bijection and deterministic") {
  SplitMix64 a(23), b(23);
  auto pa = a.permutation(100);
  auto pb = b.permutation(100);
  REQUIRE(pa == pb);
  std::sort(pa.begin(), pa.end());
  for (std::size_t i = 0; i < pa.size(); ++i) REQUIRE(pa[i] == i);

  // Successive draws advance the stream.
  REQUIRE(b.permutation(100) != b.permutation(100));
}
