// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_GEO_HPP
#define LOGINAE_GEO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "loginae/error.hpp"

namespace loginae::geo {

inline constexpr double kEarthRadiusMiles = 3958.8;
inline constexpr double kKmPerMile = 1.609344;
inline constexpr int kMaxPrecision = 12;
inline constexpr int kBitsPerChar = 5;
inline constexpr std::string_view kBase32 = "0123456789bcdefghjkmnpqrstuvwxyz";

struct LatLon {
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline bool valid(const LatLon& p) {
  return p.latitude >= -90.0 && p.latitude <= 90.0 && p.longitude >= -180.0 &&
         p.longitude <= 180.0;
}

struct BoundingBox {
  double min_latitude = -90.0;
  double max_latitude = 90.0;
  double min_longitude = -180.0;
  double max_longitude = 180.0;

  double latitude_span() const { return max_latitude - min_latitude; }
  double longitude_span() const { return max_longitude - min_longitude; }
  LatLon center() const {
    return {(min_latitude + max_latitude) / 2, (min_longitude + max_longitude) / 2};
  }
  bool contains(const LatLon& p) const {
    return p.latitude >= min_latitude && p.latitude <= max_latitude &&
           p.longitude >= min_longitude && p.longitude <= max_longitude;
  }
  bool contains(const BoundingBox& b) const {
    return b.min_latitude >= min_latitude && b.max_latitude <= max_latitude &&
           b.min_longitude >= min_longitude && b.max_longitude <= max_longitude;
  }
};

/// A base32 geohash. Precision is the number of characters, not bits.
class Geohash {
 public:
  Geohash() = default;

  /// Validates length and alphabet.
  explicit Geohash(std::string code) : code_(std::move(code)) {
    require(!code_.empty() && code_.size() <= kMaxPrecision,
            "geohash precision must be in [1, 12]");
    for (char c : code_) {
      require(kBase32.find(c) != std::string_view::npos,
              std::string("invalid geohash character '") + c + "'");
    }
  }

  const std::string& code() const { return code_; }
  int precision() const { return static_cast<int>(code_.size()); }
  bool has_prefix(const Geohash& other) const { return code_.starts_with(other.code_); }

  friend bool operator==(const Geohash&, const Geohash&) = default;
  friend auto operator<=>(const Geohash&, const Geohash&) = default;

 private:
  std::string code_;
};

// Bisection alternates longitude/latitude, longitude first. A value equal to the
// midpoint goes to the upper half.
inline Geohash geohash_encode(double latitude, double longitude, int precision) {
  require(precision >= 1 && precision <= kMaxPrecision, "geohash precision must be in [1, 12]");
  require(latitude >= -90.0 && latitude <= 90.0, "latitude out of range");
  require(longitude >= -180.0 && longitude <= 180.0, "longitude out of range");

  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;
  std::string code;
  code.reserve(static_cast<std::size_t>(precision));
  bool lon_bit = true;
  for (int c = 0; c < precision; ++c) {
    int value = 0;
    for (int b = 0; b < kBitsPerChar; ++b) {
      double& lo = lon_bit ? lon_lo : lat_lo;
      double& hi = lon_bit ? lon_hi : lat_hi;
      const double v = lon_bit ? longitude : latitude;
      const double mid = (lo + hi) / 2;
      value <<= 1;
      if (v >= mid) {
        value |= 1;
        lo = mid;
      } else {
        hi = mid;
      }
      lon_bit = !lon_bit;
    }
    code.push_back(kBase32[static_cast<std::size_t>(value)]);
  }
  return Geohash(std::move(code));
}

inline Geohash geohash_encode(const LatLon& p, int precision) {
  return geohash_encode(p.latitude, p.longitude, precision);
}

inline BoundingBox geohash_decode(const Geohash& hash) {
  require(hash.precision() >= 1, "cannot decode an empty geohash");
  BoundingBox box;
  bool lon_bit = true;
  for (char c : hash.code()) {
    const auto value = static_cast<int>(kBase32.find(c));
    for (int b = kBitsPerChar - 1; b >= 0; --b) {
      const bool upper = ((value >> b) & 1) != 0;
      double& lo = lon_bit ? box.min_longitude : box.min_latitude;
      double& hi = lon_bit ? box.max_longitude : box.max_latitude;
      const double mid = (lo + hi) / 2;
      (upper ? lo : hi) = mid;
      lon_bit = !lon_bit;
    }
  }
  return box;
}

inline BoundingBox geohash_decode(std::string_view code) { return geohash_decode(Geohash(std::string(code))); }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Great-circle distance on a sphere of radius kEarthRadiusMiles.
inline double haversine_miles(const LatLon& a, const LatLon& b) {
  const double phi1 = deg2rad(a.latitude);
  const double phi2 = deg2rad(b.latitude);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.longitude - a.longitude);
  const double s = std::sin(dphi / 2);
  const double t = std::sin(dlambda / 2);
  const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
  return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(std::min(1.0, h)));
}

inline double normalize_longitude(double lon) {
  if (lon >= -180.0 && lon <= 180.0) return lon;
  double x = std::fmod(lon + 180.0, 360.0);
  if (x < 0) x += 360.0;
  return x - 180.0;
}

/// Destination point reached by travelling `miles` along the great circle that
/// leaves `origin` at initial bearing `bearing_deg` (clockwise from north).
inline LatLon displace(const LatLon& origin, double miles, double bearing_deg) {
  require(miles >= 0.0, "displacement distance must be nonnegative");
  if (miles == 0.0) return origin;
  const double delta = miles / kEarthRadiusMiles;
  const double theta = deg2rad(bearing_deg);
  const double phi1 = deg2rad(origin.latitude);
  const double lambda1 = deg2rad(origin.longitude);
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * sin_phi2);
  return {std::clamp(rad2deg(phi2), -90.0, 90.0), normalize_longitude(rad2deg(lambda2))};
}

}  // namespace loginae::geo

#endif  // LOGINAE_GEO_HPP
