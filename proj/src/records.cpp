#include "contactnet/records.hpp"

#include <charconv>
#include <cstdio>

namespace contactnet {

std::string_view to_label(Orientation o) {
  switch (o) {
    case Orientation::Woman: return "F";
    case Orientation::HeterosexualMan: return "HM";
    case Orientation::MSM: return "MSM";
    case Orientation::Unknown: return "U";
  }
  return "U";
}

std::string_view to_label(DetectionMode d) {
  switch (d) {
    case DetectionMode::RandomScreening: return "RANDOM";
    case DetectionMode::ContactTracing: return "CT";
    case DetectionMode::Captation: return "CAPT";
    case DetectionMode::Unknown: return "U";
  }
  return "U";
}

std::string_view to_label(NamedBy n) {
  switch (n) {
    case NamedBy::Src: return "SRC";
    case NamedBy::Dst: return "DST";
    case NamedBy::Both: return "BOTH";
    case NamedBy::Unknown: return "U";
  }
  return "U";
}

std::optional<Orientation> parse_orientation(std::string_view label) {
  if (label == "F") return Orientation::Woman;
  if (label == "HM") return Orientation::HeterosexualMan;
  if (label == "MSM") return Orientation::MSM;
  if (label == "U") return Orientation::Unknown;
  return std::nullopt;
}

std::optional<DetectionMode> parse_detection_mode(std::string_view label) {
  if (label == "RANDOM") return DetectionMode::RandomScreening;
  if (label == "CT") return DetectionMode::ContactTracing;
  if (label == "CAPT") return DetectionMode::Captation;
  if (label == "U") return DetectionMode::Unknown;
  return std::nullopt;
}

std::optional<NamedBy> parse_named_by(std::string_view label) {
  if (label == "SRC") return NamedBy::Src;
  if (label == "DST") return NamedBy::Dst;
  if (label == "BOTH") return NamedBy::Both;
  if (label == "U") return NamedBy::Unknown;
  return std::nullopt;
}

std::string_view display_name(Orientation o) {
  switch (o) {
    case Orientation::Woman: return "woman";
    case Orientation::HeterosexualMan: return "heterosexual_man";
    case Orientation::MSM: return "msm";
    case Orientation::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view display_name(DetectionMode d) {
  switch (d) {
    case DetectionMode::RandomScreening: return "random_screening";
    case DetectionMode::ContactTracing: return "contact_tracing";
    case DetectionMode::Captation: return "captation";
    case DetectionMode::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

int days_between(const Date& a, const Date& b) {
  return static_cast<int>((std::chrono::sys_days{b} - std::chrono::sys_days{a}).count());
}

}  // namespace contactnet
