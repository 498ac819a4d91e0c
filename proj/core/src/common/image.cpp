#include "tabletop/common/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "tabletop/common/errors.hpp"

namespace tabletop {

void write_pgm(const MaskImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(img.width()));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) row[x] = img.at(x, y) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

namespace {

// Reads the next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return tok;
  tok.push_back(static_cast<char>(c));
  while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
  return tok;
}

}  // namespace

MaskImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2")
    throw Error(ErrorCode::ParseError, path.string() + ": not a PGM file (magic '" + magic + "')");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, path.string() + ": bad PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw Error(ErrorCode::ParseError, path.string() + ": unsupported PGM header");
  MaskImage img(w, h);
  if (magic == "P5") {
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw Error(ErrorCode::ParseError, path.string() + ": truncated PGM data");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        img.at(x, y) = buf[static_cast<size_t>(y) * w + x] ? 1 : 0;
  } else {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::string tok = next_token(in);
        if (tok.empty()) throw Error(ErrorCode::ParseError, path.string() + ": truncated PGM data");
        img.at(x, y) = std::stoi(tok) ? 1 : 0;
      }
    }
  }
  return img;
}

void write_pgm_scaled(const Image<double>& img, const std::filesystem::path& path) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : img.data()) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = (hi > lo) ? (hi - lo) : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(img.width()));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = img.at(x, y);
      const double s = std::isfinite(v) ? (v - lo) / span : 0.0;
      row[x] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

int mask_area(const MaskImage& mask) {
  int n = 0;
  for (auto v : mask.data())
    if (v) ++n;
  return n;
}

std::pair<double, double> mask_centroid(const MaskImage& mask) {
  double sx = 0, sy = 0;
  long n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  return {sx / n, sy / n};
}

}  // namespace tabletop
