#pragma once

#include <filesystem>
#include <fstream>

#include "gts/templates.hpp"

namespace gts {

// Flat binary template record: "GTB1", kind u8, covariate u8, view u16,
// seq u16, subject string, rows u32, cols u32, row-major 32-bit floats,
// everything little-endian.

inline void write_template(std::ostream& os, const GaitTemplate& t) {
  os.write("GTB1", 4);
  io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.kind));
  io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.covariate));
  io::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(t.view));
  io::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(t.seq));
  io::write_string(os, t.subject);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.pixels.rows()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.pixels.cols()));
  for (std::size_t i = 0; i < t.pixels.size(); ++i)
    io::write_f32(os, static_cast<float>(t.pixels.data()[i]));
  if (!os) throw IoFailure("template write failed");
}

inline GaitTemplate read_template(std::istream& is, bool header_only = false) {
  char magic[4];
  io::read_bytes(is, magic, 4);
  if (std::string(magic, 4) != "GTB1") throw IoFailure("not a gait template file");
  GaitTemplate t;
  t.kind = static_cast<TemplateKind>(io::read_le<std::uint8_t>(is));
  t.covariate = static_cast<Covariate>(io::read_le<std::uint8_t>(is));
  t.view = io::read_le<std::uint16_t>(is);
  t.seq = io::read_le<std::uint16_t>(is);
  t.subject = io::read_string(is);
  const auto rows = io::read_le<std::uint32_t>(is);
  const auto cols = io::read_le<std::uint32_t>(is);
  if (header_only) return t;
  t.pixels = Grid<double>(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < t.pixels.size(); ++i)
    t.pixels.data()[i] = static_cast<double>(io::read_f32(is));
  return t;
}

inline void write_template(const std::filesystem::path& path, const GaitTemplate& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot create " + path.string());
  write_template(os, t);
}

inline GaitTemplate read_template(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open " + path.string());
  return read_template(is);
}

inline std::string template_filename(const GaitTemplate& t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%s-%02d-%03d-%s.gtb", t.subject.c_str(),
                to_string(t.covariate), t.seq, t.view, to_string(t.kind));
  return buf;
}

// Directory of template records, indexed by header metadata. Pixel data is
// loaded on demand so a full corpus never has to fit in memory at once.
class TemplateStore {
 public:
  struct Entry {
    std::filesystem::path path;
    std::string subject;
    Covariate covariate = Covariate::Normal;
    int seq = 1;
    int view = 90;
    TemplateKind kind = TemplateKind::Gei;
  };

  static TemplateStore open(const std::filesystem::path& dir) {
    TemplateStore store;
    store.dir_ = dir;
    if (!std::filesystem::is_directory(dir)) throw IoFailure("no template store at " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".gtb") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      std::ifstream is(p, std::ios::binary);
      if (!is) throw IoFailure("cannot open " + p.string());
      const GaitTemplate header = read_template(is, /*header_only=*/true);
      store.entries_.push_back({p, header.subject, header.covariate, header.seq, header.view, header.kind});
    }
    return store;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  const std::filesystem::path& dir() const { return dir_; }

  GaitTemplate load(const Entry& e) const { return read_template(e.path); }

  template <typename Pred>
  std::vector<GaitTemplate> load_if(Pred pred) const {
    std::vector<GaitTemplate> out;
    for (const auto& e : entries_)
      if (pred(e)) out.push_back(load(e));
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

}  // namespace gts
