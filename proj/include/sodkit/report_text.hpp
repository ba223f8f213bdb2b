// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "sodkit/sim.hpp"

namespace sodkit {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline constexpr std::string_view kReportCsvHeader =
    "assigner,priors,bin,lower_px,upper_px,gts,positives,mean_positives,positives_per_gt,share_pct";

/// One row per (assigner, bin), in report order.
inline std::string report_to_csv(const SimReport& r) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const auto& a : r.assigners) {
    for (const auto& b : a.bins) {
      out += a.name() + ',' + std::string(to_string(a.setup.priors)) + ',' + b.label + ',' +
             format_number(b.lower_px) + ',' + format_number(b.upper_px) + ',' +
             std::to_string(b.gts) + ',' + std::to_string(b.positives) + ',' +
             format_number(b.mean_positives) + ',' + format_number(b.positives_per_gt) + ',' +
             format_number(b.share_pct) + '\n';
    }
  }
  return out;
}

/// Fixed-width share table for terminals.
inline std::string report_to_table(const SimReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %-8s %10s %12s %10s\n", "assigner", "bin", "positives",
                "pos/GT", "share %");
  os << line;
  for (const auto& a : r.assigners) {
    for (const auto& b : a.bins) {
      std::snprintf(line, sizeof line, "%-18s %-8s %10lld %12.3f %10.2f\n", a.name().c_str(),
                    b.label.c_str(), static_cast<long long>(b.positives), b.positives_per_gt,
                    b.share_pct);
      os << line;
    }
  }
  return os.str();
}

namespace detail {

inline constexpr std::array<const char*, 6> kPalette{"#4c72b0", "#dd8452", "#55a868",
                                                     "#c44e52", "#8172b3", "#937860"};

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Grouped bar chart: mean positives per run for every bin, one colour per
/// assigner.
inline std::string report_to_bar_svg(const SimReport& r) {
  const double width = 720, height = 420, left = 60, right = 20, top = 40, bottom = 60;
  const std::size_t nbins = r.assigners.empty() ? 0 : r.assigners.front().bins.size();
  double vmax = 0.0;
  for (const auto& a : r.assigners)
    for (const auto& b : a.bins) vmax = std::max(vmax, b.mean_positives);
  if (vmax <= 0.0) vmax = 1.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">Mean positives per run by GT size</text>\n";
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
     << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">"
     << detail::fixed(vmax, 1) << "</text>\n";

  if (nbins > 0) {
    const double group_w = plot_w / static_cast<double>(nbins);
    const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, r.assigners.size()));
    for (std::size_t b = 0; b < nbins; ++b) {
      const double gx = left + group_w * static_cast<double>(b) + group_w * 0.1;
      for (std::size_t a = 0; a < r.assigners.size(); ++a) {
        const double v = r.assigners[a].bins[b].mean_positives;
        const double h = plot_h * v / vmax;
        os << "<rect x=\"" << detail::fixed(gx + bar_w * static_cast<double>(a)) << "\" y=\""
           << detail::fixed(top + plot_h - h) << "\" width=\"" << detail::fixed(bar_w)
           << "\" height=\"" << detail::fixed(h) << "\" fill=\""
           << detail::kPalette[a % detail::kPalette.size()] << "\"/>\n";
      }
      os << "<text x=\"" << detail::fixed(gx + group_w * 0.4) << "\" y=\"" << top + plot_h + 16
         << "\" text-anchor=\"middle\">"
         << detail::svg_escape(r.assigners.front().bins[b].label) << "</text>\n";
    }
  }
  for (std::size_t a = 0; a < r.assigners.size(); ++a) {
    const double y = height - 18;
    const double x = left + 180.0 * static_cast<double>(a);
    os << "<rect x=\"" << x << "\" y=\"" << y - 10 << "\" width=\"10\" height=\"10\" fill=\""
       << detail::kPalette[a % detail::kPalette.size()] << "\"/>\n";
    os << "<text x=\"" << x + 14 << "\" y=\"" << y << "\">"
       << detail::svg_escape(r.assigners[a].name()) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// One pie per assigner showing the share of positives per bin.
inline std::string report_to_pie_svg(const SimReport& r) {
  const double radius = 90, cell = 240;
  const double width = cell * static_cast<double>(std::max<std::size_t>(1, r.assigners.size()));
  const double height = 300;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t a = 0; a < r.assigners.size(); ++a) {
    const auto& rep = r.assigners[a];
    const double cx = cell * (static_cast<double>(a) + 0.5), cy = 140;
    os << "<text x=\"" << cx << "\" y=\"24\" text-anchor=\"middle\">"
       << detail::svg_escape(rep.name()) << "</text>\n";
    if (rep.total_positives == 0) {
      os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radius
         << "\" fill=\"#dddddd\"/>\n";
      continue;
    }
    double start = -std::numbers::pi / 2;
    for (std::size_t b = 0; b < rep.bins.size(); ++b) {
      const double frac = rep.bins[b].share_pct / 100.0;
      if (frac <= 0.0) continue;
      const char* colour = detail::kPalette[b % detail::kPalette.size()];
      if (frac >= 1.0 - 1e-12) {
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radius << "\" fill=\""
           << colour << "\"/>\n";
        break;
      }
      const double end = start + 2 * std::numbers::pi * frac;
      const double x0 = cx + radius * std::cos(start), y0 = cy + radius * std::sin(start);
      const double x1 = cx + radius * std::cos(end), y1 = cy + radius * std::sin(end);
      os << "<path d=\"M" << detail::fixed(cx) << ',' << detail::fixed(cy) << " L"
         << detail::fixed(x0) << ',' << detail::fixed(y0) << " A" << radius << ',' << radius
         << " 0 " << (frac > 0.5 ? 1 : 0) << ",1 " << detail::fixed(x1) << ','
         << detail::fixed(y1) << " Z\" fill=\"" << colour << "\"/>\n";
      start = end;
    }
    for (std::size_t b = 0; b < rep.bins.size(); ++b) {
      os << "<text x=\"" << cx - radius << "\" y=\"" << cy + radius + 18 + 13 * static_cast<double>(b)
         << "\" fill=\"" << detail::kPalette[b % detail::kPalette.size()] << "\">"
         << detail::svg_escape(rep.bins[b].label) << ": " << detail::fixed(rep.bins[b].share_pct, 1)
         << "%</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sodkit
