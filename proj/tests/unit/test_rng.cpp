#include "doctest.h"

#include <vector>

#include "culturefms/errors.hpp"
#include "culturefms/rng.hpp"

using namespace culturefms;

TEST_CASE("splitmix64 reference output") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("xoshiro256** stream matches reference implementation") {
  // Values from an independent Python port of the reference C code.
  RandomStream zero(0);
  CHECK(zero.next_u64() == 0x99ec5f36cb75f2b4ULL);
  CHECK(zero.next_u64() == 0xbf6e1f784956452aULL);
  CHECK(zero.next_u64() == 0x1a5f849d4933e6e0ULL);

  RandomStream answer(42);
  CHECK(answer.next_u64() == 0x15780b2e0c2ec716ULL);
  CHECK(answer.next_u64() == 0x6104d9866d113a7eULL);
}

TEST_CASE("uniform draws") {
  RandomStream ints(7);
  std::vector<std::uint64_t> got;
  for (int i = 0; i < 10; ++i) got.push_back(ints.uniform_int(3));
  CHECK(got == std::vector<std::uint64_t>{0, 2, 0, 1, 2, 2, 1, 1, 1, 1});

  RandomStream reals(7);
  CHECK(reals.uniform_real() == 0.7005764821796896);
  CHECK(reals.uniform_real() == 0.2787512294737843);

  RandomStream r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform_real();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.uniform_int(5) < 5);
  }
  CHECK(r.uniform_int(1) == 0);
  CHECK_THROWS_AS(r.uniform_int(0), ContractError);
}

TEST_CASE("same seed, same sequence") {
  RandomStream a(123), b(123), c(124);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CHECK(a == b);
  CHECK(a.seed() == 123);
}
