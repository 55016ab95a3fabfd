// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "loginae/geo.hpp"

namespace geo = loginae::geo;

namespace {

// Independent encoder: quantize each axis to an integer cell index, then
// interleave the bits (longitude first) and map 5-bit groups to base32.
std::string oracle_encode(double lat, double lon, int precision) {
  const int bits = precision * 5;
  const int lon_bits = (bits + 1) / 2;
  const int lat_bits = bits / 2;
  auto cell = [](double v, double lo, double hi, int nbits) {
    const double scaled = (v - lo) / (hi - lo) * std::ldexp(1.0, nbits);
    const auto max = (std::uint64_t{1} << nbits) - 1;
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(scaled)), max);
  };
  const std::uint64_t lon_cell = cell(lon, -180.0, 180.0, lon_bits);
  const std::uint64_t lat_cell = cell(lat, -90.0, 90.0, lat_bits);
  std::string out;
  int value = 0, li = lon_bits, ai = lat_bits;
  for (int b = 0; b < bits; ++b) {
    int bit = 0;
    if (b % 2 == 0) bit = static_cast<int>((lon_cell >> --li) & 1);
    else bit = static_cast<int>((lat_cell >> --ai) & 1);
    value = value * 2 + bit;
    if (b % 5 == 4) {
      out += "0123456789bcdefghjkmnpqrstuvwxyz"[value];
      value = 0;
    }
  }
  return out;
}

}  // namespace

TEST(Geohash, ClassicPoint) {
  EXPECT_EQ(oracle_encode(57.64911, 10.40744, 11), "u4pruydqqvj");
  EXPECT_EQ(geo::geohash_encode(57.64911, 10.40744, 11).code(), "u4pruydqqvj");
}

TEST(Geohash, OriginFirstCell) {
  EXPECT_EQ(oracle_encode(0.0, 0.0, 1), "s");
  EXPECT_EQ(geo::geohash_encode(0.0, 0.0, 1).code(), "s");
  const auto box = geo::geohash_decode("s");
  EXPECT_DOUBLE_EQ(box.min_latitude, 0.0);
  EXPECT_DOUBLE_EQ(box.max_latitude, 45.0);
  EXPECT_DOUBLE_EQ(box.min_longitude, 0.0);
  EXPECT_DOUBLE_EQ(box.max_longitude, 45.0);
}

TEST(Geohash, MatchesOracleOnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
  std::uniform_int_distribution<int> prec(1, 12);
  for (int i = 0; i < 20000; ++i) {
    const double a = lat(rng), o = lon(rng);
    const int p = prec(rng);
    ASSERT_EQ(geo::geohash_encode(a, o, p).code(), oracle_encode(a, o, p)) << a << "," << o << " p=" << p;
  }
}

TEST(Geohash, PrecisionThreeSpan) {
  const auto box = geo::geohash_decode(geo::geohash_encode(45.5, -122.6, 3));
  EXPECT_TRUE(box.contains(geo::LatLon{45.5, -122.6}));
  EXPECT_DOUBLE_EQ(box.latitude_span(), 180.0 / 128.0);
  EXPECT_DOUBLE_EQ(box.latitude_span(), 1.40625);
  const double km = box.latitude_span() * geo::deg2rad(1.0) * geo::kEarthRadiusMiles * geo::kKmPerMile;
  EXPECT_NEAR(km, 156.0, 1.0);
}

TEST(Geohash, PrecisionFiveAboutFiveKm) {
  const auto box = geo::geohash_decode(geo::geohash_encode(0.01, 0.01, 5));
  const double km_per_deg = geo::deg2rad(1.0) * geo::kEarthRadiusMiles * geo::kKmPerMile;
  EXPECT_NEAR(box.latitude_span() * km_per_deg, 4.9, 0.1);
  EXPECT_NEAR(box.longitude_span() * km_per_deg, 4.9, 0.1);
}

TEST(Geohash, RejectsBadInput) {
  EXPECT_THROW(geo::geohash_encode(91.0, 0.0, 3), loginae::Error);
  EXPECT_THROW(geo::geohash_encode(0.0, -180.5, 3), loginae::Error);
  EXPECT_THROW(geo::geohash_encode(0.0, 0.0, 0), loginae::Error);
  EXPECT_THROW(geo::geohash_encode(0.0, 0.0, 13), loginae::Error);
  EXPECT_THROW(geo::geohash_decode("abc"), loginae::Error);  // 'a' is not in the alphabet
  EXPECT_THROW(geo::geohash_decode(""), loginae::Error);
}

TEST(Geohash, AxisExtremes) {
  for (double lat : {-90.0, 90.0}) {
    for (double lon : {-180.0, 180.0}) {
      for (int p = 1; p <= 12; ++p) {
        const auto h = geo::geohash_encode(lat, lon, p);
        EXPECT_TRUE(geo::geohash_decode(h).contains(geo::LatLon{lat, lon}));
      }
    }
  }
}

TEST(GeohashProperty, PrefixRefinementAndContainment) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
  for (int i = 0; i < 5000; ++i) {
    const geo::LatLon p{lat(rng), lon(rng)};
    geo::Geohash prev;
    geo::BoundingBox prev_box;
    for (int k = 1; k <= 12; ++k) {
      const auto h = geo::geohash_encode(p, k);
      const auto box = geo::geohash_decode(h);
      ASSERT_EQ(h.precision(), k);
      ASSERT_TRUE(box.contains(p));
      ASSERT_LE(box.min_latitude, box.max_latitude);
      ASSERT_LE(box.min_longitude, box.max_longitude);
      if (k > 1) {
        ASSERT_TRUE(h.has_prefix(prev));
        ASSERT_TRUE(prev_box.contains(box));
      }
      prev = h;
      prev_box = box;
    }
  }
}

TEST(Haversine, Basics) {
  const geo::LatLon a{45.0, -122.0}, b{40.7, -74.0};
  EXPECT_DOUBLE_EQ(geo::haversine_miles(a, a), 0.0);
  EXPECT_DOUBLE_EQ(geo::haversine_miles(a, b), geo::haversine_miles(b, a));
  const double quarter = 2.0 * M_PI * geo::kEarthRadiusMiles / 4.0;
  EXPECT_NEAR(geo::haversine_miles({0, 0}, {0, 90}), quarter, 1e-6);
  EXPECT_NEAR(quarter, 6218.0, 1.0);
}

TEST(Displace, ZeroDistanceAndMeridian) {
  const geo::LatLon o{45.0, -122.0};
  EXPECT_EQ(geo::displace(o, 0.0, 37.0), o);
  const auto north = geo::displace({0.0, 10.0}, 500.0, 0.0);
  EXPECT_NEAR(north.longitude, 10.0, 1e-9);
  EXPECT_GT(north.latitude, 0.0);
  EXPECT_THROW(geo::displace(o, -1.0, 0.0), loginae::Error);
}

TEST(Displace, ThousandMilesEast) {
  const geo::LatLon o{45.0, -122.0};
  EXPECT_NEAR(geo::haversine_miles(o, geo::displace(o, 1000.0, 90.0)), 1000.0, 1.0);
}

TEST(DisplaceProperty, DistanceWithinTenthOfPercent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-85.0, 85.0), lon(-180.0, 180.0), mi(0.5, 5000.0), br(0.0, 360.0);
  for (int i = 0; i < 20000; ++i) {
    const geo::LatLon o{lat(rng), lon(rng)};
    const double d = mi(rng);
    const auto r = geo::displace(o, d, br(rng));
    ASSERT_TRUE(geo::valid(r));
    ASSERT_NEAR(geo::haversine_miles(o, r), d, d * 1e-3);
  }
}
