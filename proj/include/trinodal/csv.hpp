#pragma once

// CSV writers. One header row, LF line endings, fields in a fixed order.
// Floating-point fields use the shortest round-trip representation, so the
// bytes depend only on the values.

#include <array>
#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "trinodal/stats.hpp"
#include "trinodal/trace.hpp"

namespace trinodal {

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline void write_sequence_csv(std::ostream& out, const std::vector<NodalRow>& rows, bool header = true) {
  if (header) out << "N,m,n,lambda,nu,eta,loops,tiles,xi\n";
  for (const auto& r : rows) {
    out << r.index << ',' << r.mode.m << ',' << r.mode.n << ',' << r.lambda() << ',' << r.nu << ','
        << r.total_eta() << ',' << r.total_loops() << ',' << r.tiles << ',' << format_double(r.xi()) << '\n';
  }
}

// mass is count / total; the stratum columns are raw counts and sum to count.
inline void write_histogram_csv(std::ostream& out, const DistributionHistogram& h) {
  out << "bin_low,bin_high,mass,cumulative,count";
  for (const char* name : kTileClassNames) out << ',' << name;
  out << '\n';
  const auto cumulative = integrated_distribution(h);
  for (std::size_t i = 0; i < h.bins(); ++i) {
    out << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
        << format_double(h.mass(i)) << ',' << format_double(cumulative[i]) << ',' << h.counts[i];
    for (auto c : h.strata[i]) out << ',' << c;
    out << '\n';
  }
}

// Curve samples plus the fitted smooth part and the residual where defined.
inline void write_curve_csv(std::ostream& out, const CumulativeCurve& c, const SmoothFit* fit = nullptr) {
  out << "x,value";
  if (fit) out << ",smooth,residual";
  out << '\n';
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out << format_double(c.x[i]) << ',' << c.values[i];
    if (fit) {
      const double s = (*fit)(c.x[i]);
      out << ',' << format_double(s) << ',' << format_double(static_cast<double>(c.values[i]) - s);
    }
    out << '\n';
  }
}

inline void write_spectrum_csv(std::ostream& out, const PowerSpectrum& ps) {
  out << "l,power\n";
  for (std::size_t i = 0; i < ps.lengths.size(); ++i) {
    out << format_double(ps.lengths[i]) << ',' << format_double(ps.power[i]) << '\n';
  }
}

inline void write_peaks_csv(std::ostream& out, const std::vector<Peak>& peaks) {
  out << "l,power,class,p,q_or_n,matched\n";
  for (const auto& pk : peaks) {
    out << format_double(pk.length) << ',' << format_double(pk.power) << ',';
    if (pk.orbit) {
      out << to_string(pk.orbit->kind) << ',' << pk.orbit->p << ',' << pk.orbit->q << ",1\n";
    } else {
      out << "none,,,0\n";
    }
  }
}

}  // namespace trinodal
