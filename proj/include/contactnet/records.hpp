#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace contactnet {

enum class Orientation { Woman, HeterosexualMan, MSM, Unknown };
enum class DetectionMode { RandomScreening, ContactTracing, Captation, Unknown };

/// Which endpoint of an edge named the other one during contact tracing.
enum class NamedBy { Src, Dst, Both, Unknown };

inline constexpr int kOrientationCount = 4;
inline constexpr int kDetectionModeCount = 4;

using Date = std::chrono::year_month_day;

struct VertexRecord {
  std::string id;
  Orientation orientation{Orientation::Unknown};
  DetectionMode detection_mode{DetectionMode::Unknown};
  std::optional<Date> detection_date;
  std::optional<int> age_at_detection;
  std::optional<std::string> region;
  std::optional<int> declared_partners;

  bool operator==(const VertexRecord&) const = default;
};

struct EdgeRecord {
  std::string src;
  std::string dst;
  NamedBy named_by{NamedBy::Unknown};

  bool operator==(const EdgeRecord&) const = default;
};

/// Columns of the vertex table that were present in the input header.
struct CovariateColumns {
  bool orientation{false};
  bool detection_mode{false};
  bool detection_date{false};
  bool age_at_detection{false};
  bool region{false};
  bool declared_partners{false};
  bool named_by{false};

  bool operator==(const CovariateColumns&) const = default;
};

// Wire labels used by the CSV schema.
std::string_view to_label(Orientation o);
std::string_view to_label(DetectionMode d);
std::string_view to_label(NamedBy n);
std::optional<Orientation> parse_orientation(std::string_view label);
std::optional<DetectionMode> parse_detection_mode(std::string_view label);
std::optional<NamedBy> parse_named_by(std::string_view label);

// Human-readable names used in reports and figure legends.
std::string_view display_name(Orientation o);
std::string_view display_name(DetectionMode d);

/// Strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Signed day count b - a.
int days_between(const Date& a, const Date& b);

}  // namespace contactnet
