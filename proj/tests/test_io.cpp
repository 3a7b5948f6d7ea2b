#include <gtest/gtest.h>

#include <sstream>

#include "gpscatter/field.hpp"
#include "gpscatter/io.hpp"

using namespace gpscatter;

TEST(FieldFile, RoundTripIsExact) {
  const Grid g = make_grid(40.0, 64, -20.0);
  const auto f = preset_samples("dark:0.5", g);
  std::stringstream ss;
  write_field(ss, f);
  const auto back = read_field(ss);
  EXPECT_EQ(back.grid, g);
  for (int j = 0; j < g.n; ++j) EXPECT_EQ(back[j], f[j]);
}

TEST(FieldFile, HeaderFormat) {
  std::stringstream ss;
  write_field(ss, preset_samples("one", make_grid(2.0, 8, -1.0)));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "# gpfield v1 L=2 n=8 x0=-1");
}

TEST(FieldFile, RejectsMismatchedCount) {
  std::stringstream ss("# gpfield v1 L=2 n=4 x0=-1\n-1 1 0\n-0.5 1 0\n0 1 0\n");
  EXPECT_THROW(read_field(ss), InvalidArgument);
  std::stringstream more("# gpfield v1 L=2 n=2 x0=-1\n-1 1 0\n0 1 0\n0.5 1 0\n");
  EXPECT_THROW(read_field(more), InvalidArgument);
}

TEST(FieldFile, RejectsMalformedInput) {
  std::stringstream bad_header("# gpfield v2 L=2 n=2 x0=-1\n-1 1 0\n0 1 0\n");
  EXPECT_THROW(read_field(bad_header), InvalidArgument);
  std::stringstream bad_line("# gpfield v1 L=2 n=2 x0=-1\n-1 1\n0 1 0\n");
  EXPECT_THROW(read_field(bad_line), InvalidArgument);
  std::stringstream not_pow2("# gpfield v1 L=2 n=3 x0=-1\n-1 1 0\n0 1 0\n1 1 0\n");
  EXPECT_THROW(read_field(not_pow2), InvalidArgument);
  std::stringstream empty("");
  EXPECT_THROW(read_field(empty), InvalidArgument);
}
