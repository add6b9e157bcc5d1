#include <gtest/gtest.h>

#include "rfq/common.hpp"
#include "rfq/crc.hpp"

using namespace rfq;

TEST(Hex, RoundTripsLowercase) {
  Bytes b{0x00, 0xAB, 0x7f, 0xff};
  EXPECT_EQ(to_hex(b), "00ab7fff");
  EXPECT_EQ(from_hex("00AB7fFF"), b);
}

TEST(Hex, RejectsOddLengthAndGarbage) {
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Crc16, CcittFalseCheckValue) {
  std::string s = "123456789";
  Bytes b(s.begin(), s.end());
  EXPECT_EQ(crc16_ccitt(b), 0x29B1);
}

TEST(Crc16, AppendedLittleEndian) {
  std::string s = "123456789";
  Bytes b(s.begin(), s.end());
  append_crc16(b);
  ASSERT_EQ(b.size(), 11u);
  EXPECT_EQ(b[9], 0xB1);
  EXPECT_EQ(b[10], 0x29);
  EXPECT_TRUE(check_crc16(b));
  b[0] ^= 1;
  EXPECT_FALSE(check_crc16(b));
}
