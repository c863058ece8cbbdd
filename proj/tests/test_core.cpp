#include <doctest.h>

#include "stablebench/core.hpp"

using namespace stablebench;

TEST_CASE("buffer size rejects zero and labels in binary units") {
  CHECK_THROWS_AS(BufferSize(0), ConfigError);
  CHECK(BufferSize(4096).label() == "4k");
  CHECK(BufferSize(16 * 1024 * 1024).label() == "16m");
  CHECK(BufferSize(1536).label() == "1536");
  CHECK(BufferSize(4096).kb() == 4.0);
}

TEST_CASE("parse_size accepts k/m/g suffixes as powers of 1024") {
  CHECK(parse_size("4096") == 4096);
  CHECK(parse_size("4k") == 4096);
  CHECK(parse_size("4K") == 4096);
  CHECK(parse_size("16m") == 16ULL << 20);
  CHECK(parse_size("1g") == 1ULL << 30);
  CHECK_THROWS_AS(parse_size(""), ConfigError);
  CHECK_THROWS_AS(parse_size("k"), ConfigError);
  CHECK_THROWS_AS(parse_size("4kb"), ConfigError);
  CHECK_THROWS_AS(parse_size("-4k"), ConfigError);
  CHECK_THROWS_AS(parse_size("99999999999999999999"), ConfigError);
}

TEST_CASE("default sweep has 13 sizes from 4 kB to 16 MB") {
  SweepConfig c;
  REQUIRE_NOTHROW(c.validate());
  CHECK(c.repetitions == 30);
  CHECK(c.sync_per_write);
  CHECK(c.bypass_cache);
  const auto sizes = c.swept_sizes();
  REQUIRE(sizes.size() == 13);
  CHECK(sizes.front().kb() == 4.0);
  CHECK(sizes.back().kb() == 16384.0);
  for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i].bytes() == 2 * sizes[i - 1].bytes());
}

TEST_CASE("sweep validation rejects inconsistent configurations") {
  SweepConfig c;
  SUBCASE("max above file size") {
    c.file_size = 8 << 20;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("min above max") {
    c.min_buffer = BufferSize(32 << 20);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("non power of two") {
    c.min_buffer = BufferSize(3000);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("file not a multiple of max") {
    c.file_size = (16 << 20) + 4096;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("zero repetitions") {
    c.repetitions = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("every accepted config sweeps sizes that divide the file size") {
  for (std::uint64_t lo = 1; lo <= (1 << 12); lo *= 4) {
    for (std::uint64_t hi = lo; hi <= (1 << 16); hi *= 2) {
      for (std::uint64_t mult : {1, 2, 8}) {
        SweepConfig c;
        c.min_buffer = BufferSize(lo);
        c.max_buffer = BufferSize(hi);
        c.file_size = hi * mult;
        REQUIRE_NOTHROW(c.validate());
        for (const auto& s : c.swept_sizes()) CHECK(c.file_size % s.bytes() == 0);
      }
    }
  }
}

TEST_CASE("run record invariants") {
  RunRecord r;
  r.buffer = BufferSize(4096);
  r.write_latencies_us = {10.0, 30.0};
  r.bytes_written = 8192;
  r.elapsed_us = 40.0;
  CHECK_NOTHROW(r.validate());
  CHECK(r.mean_latency_us() == 20.0);
  CHECK(r.throughput_kbps() == doctest::Approx(8.0 / 40e-6));

  r.elapsed_us = 20.0;  // shorter than the slowest write
  CHECK_THROWS_AS(r.validate(), DataError);
  r.elapsed_us = 40.0;
  r.bytes_written = 4096;
  CHECK_THROWS_AS(r.validate(), DataError);
}
