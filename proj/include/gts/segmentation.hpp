#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gts/templates.hpp"

namespace gts {

inline constexpr int kChromosomeBits = 28;
inline constexpr int kCanvasArea = kCanvas * kCanvas;

// 28-bit genome [S_H:8][S_M:8][S_F:8][W_H][W_L][W_R][W_F], most significant
// bit first within each split field.
struct Chromosome {
  std::array<std::uint8_t, kChromosomeBits> bits{};

  static Chromosome random(Rng& rng) {
    Chromosome c;
    for (auto& b : c.bits) b = rng.bernoulli(0.5) ? 1 : 0;
    return c;
  }

  int field_u8(int offset) const {
    int d = 0;
    for (int i = 0; i < 8; ++i) d = (d << 1) | bits[offset + i];
    return d;
  }

  std::string to_string() const {
    std::string s(kChromosomeBits, '0');
    for (int i = 0; i < kChromosomeBits; ++i) s[i] = bits[i] ? '1' : '0';
    return s;
  }

  friend auto operator<=>(const Chromosome&, const Chromosome&) = default;
};

// Pixel ranges the three split variables may take. Rows for the head and leg
// boundaries, columns for the mid split; head range must end before the leg
// range starts so s_h < s_f holds for every decodable genome.
struct SplitBounds {
  int head_min = 12, head_max = 96;   // 5%..40% of canvas height
  int mid_min = 48, mid_max = 192;    // 20%..80% of canvas width
  int leg_min = 120, leg_max = 228;   // 50%..95% of canvas height
};

// Decoded region hypothesis: two row splits, one column split, four
// inclusion bits.
struct GtsHypothesis {
  int s_h = 0;
  int s_m = 0;
  int s_f = kCanvas;
  bool w_h = true, w_l = true, w_r = true, w_f = true;

  friend auto operator<=>(const GtsHypothesis&, const GtsHypothesis&) = default;
};

inline int decode_split(int d, int min_v, int max_v) {
  return round_half_up(min_v + (max_v - min_v) * static_cast<double>(d) / 255.0);
}

inline GtsHypothesis decode(const Chromosome& c, const SplitBounds& b = {}) {
  GtsHypothesis h;
  h.s_h = decode_split(c.field_u8(0), b.head_min, b.head_max);
  h.s_m = decode_split(c.field_u8(8), b.mid_min, b.mid_max);
  h.s_f = decode_split(c.field_u8(16), b.leg_min, b.leg_max);
  h.w_h = c.bits[24] != 0;
  h.w_l = c.bits[25] != 0;
  h.w_r = c.bits[26] != 0;
  h.w_f = c.bits[27] != 0;
  return h;
}

using RegionMask = Grid<std::uint8_t>;

// Region layout: head H = rows [0, s_h), legs F = rows [s_f, 240), mid-left
// L = rows [s_h, s_f) x cols [0, s_m), mid-right R = the remaining band.
// A pixel is kept iff its region's weight bit is set.
inline RegionMask build_mask(const GtsHypothesis& h) {
  RegionMask m(kCanvas, kCanvas);
  for (int r = 0; r < kCanvas; ++r) {
    std::uint8_t row_value;
    if (r < h.s_h) {
      row_value = h.w_h ? 1 : 0;
      for (int c = 0; c < kCanvas; ++c) m(r, c) = row_value;
    } else if (r >= h.s_f) {
      row_value = h.w_f ? 1 : 0;
      for (int c = 0; c < kCanvas; ++c) m(r, c) = row_value;
    } else {
      const std::uint8_t left = h.w_l ? 1 : 0, right = h.w_r ? 1 : 0;
      for (int c = 0; c < kCanvas; ++c) m(r, c) = c < h.s_m ? left : right;
    }
  }
  return m;
}

inline GaitTemplate apply_mask(const GaitTemplate& t, const RegionMask& m) {
  if (!t.pixels.same_shape(m)) throw DimensionMismatch();
  GaitTemplate out = t;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.pixels(r, c) = t.pixels(r, c) * m(r, c);
  return out;
}

inline double mask_area_fraction(const RegionMask& m) {
  std::size_t ones = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) ones += m(r, c) ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(m.size());
}

// ---------------------------------------------------------------------------
// Hypothesis text records: `view,s_h,s_m,s_f,w_h,w_l,w_r,w_f`, one per line.

inline std::string hypothesis_line(int view, const GtsHypothesis& h) {
  std::ostringstream os;
  os << view << ',' << h.s_h << ',' << h.s_m << ',' << h.s_f << ',' << (h.w_h ? 1 : 0) << ','
     << (h.w_l ? 1 : 0) << ',' << (h.w_r ? 1 : 0) << ',' << (h.w_f ? 1 : 0);
  return os.str();
}

inline std::pair<int, GtsHypothesis> parse_hypothesis_line(const std::string& line) {
  std::array<long, 8> v{};
  std::istringstream is(line);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(is >> v[i])) throw IoFailure("malformed hypothesis record: " + line);
    if (i + 1 < v.size()) {
      char comma = 0;
      if (!(is >> comma) || comma != ',') throw IoFailure("malformed hypothesis record: " + line);
    }
  }
  GtsHypothesis h;
  h.s_h = static_cast<int>(v[1]);
  h.s_m = static_cast<int>(v[2]);
  h.s_f = static_cast<int>(v[3]);
  h.w_h = v[4] != 0;
  h.w_l = v[5] != 0;
  h.w_r = v[6] != 0;
  h.w_f = v[7] != 0;
  return {static_cast<int>(v[0]), h};
}

inline void write_hypotheses(const std::filesystem::path& path,
                             const std::map<int, GtsHypothesis>& by_view,
                             std::uint64_t seed) {
  std::ofstream os(path);
  if (!os) throw IoFailure("cannot create " + path.string());
  os << "# seed=" << seed << "\n";
  for (const auto& [view, h] : by_view) os << hypothesis_line(view, h) << "\n";
  if (!os) throw IoFailure("write failed: " + path.string());
}

inline std::map<int, GtsHypothesis> read_hypotheses(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open " + path.string());
  std::map<int, GtsHypothesis> by_view;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto [view, h] = parse_hypothesis_line(line);
    by_view[view] = h;
  }
  return by_view;
}

}  // namespace gts
