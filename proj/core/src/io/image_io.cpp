#include "plenocal/io/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "plenocal/error.hpp"

namespace plenocal {
namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

int next_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then reads one unsigned integer.
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

Image load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open image: " + path);
  std::string magic;
  in >> magic;
  require(magic == "P5" || magic == "P2", ErrorCode::Io, "unsupported PGM magic in " + path);
  const int w = next_pnm_token(in);
  const int h = next_pnm_token(in);
  const int maxval = next_pnm_token(in);
  require(w > 0 && h > 0 && maxval > 0 && maxval < 65536, ErrorCode::Io,
          "malformed PGM header in " + path);
  Image img(w, h);
  const float scale = 1.f / static_cast<float>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const int v = next_pnm_token(in);
      require(v >= 0, ErrorCode::Io, "truncated PGM data in " + path);
      img.px[i] = static_cast<float>(v) * scale;
    }
    return img;
  }
  in.get();  // single whitespace byte after maxval
  if (maxval < 256) {
    std::vector<std::uint8_t> buf(img.size());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(in.gcount() == static_cast<std::streamsize>(buf.size()), ErrorCode::Io,
            "truncated PGM data in " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) img.px[i] = buf[i] * scale;
  } else {
    // 16-bit PGM samples are big endian.
    std::vector<std::uint8_t> buf(img.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(in.gcount() == static_cast<std::streamsize>(buf.size()), ErrorCode::Io,
            "truncated PGM data in " + path);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const int v = (buf[2 * i] << 8) | buf[2 * i + 1];
      img.px[i] = static_cast<float>(v) * scale;
    }
  }
  return img;
}

void save_pgm(const std::string& path, const Image& image, int bit_depth) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write image: " + path);
  const int maxval = bit_depth == 8 ? 255 : 65535;
  out << "P5\n" << image.width << " " << image.height << "\n" << maxval << "\n";
  for (float v : image.px) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    const int q = static_cast<int>(std::lround(c * maxval));
    if (bit_depth == 8) {
      out.put(static_cast<char>(q));
    } else {
      out.put(static_cast<char>((q >> 8) & 0xff));
      out.put(static_cast<char>(q & 0xff));
    }
  }
  require(out.good(), ErrorCode::Io, "short write: " + path);
}

}  // namespace

Image load_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "pgm" || ext == "pnm") return load_pgm(path);

  cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
  require(!raw.empty(), ErrorCode::Io, "cannot decode image: " + path);
  require(raw.channels() == 1, ErrorCode::Io, "expected single-channel grayscale image: " + path);

  Image img(raw.cols, raw.rows);
  if (raw.depth() == CV_8U) {
    for (int y = 0; y < raw.rows; ++y)
      for (int x = 0; x < raw.cols; ++x) img.at(x, y) = raw.at<std::uint8_t>(y, x) / 255.f;
  } else if (raw.depth() == CV_16U) {
    for (int y = 0; y < raw.rows; ++y)
      for (int x = 0; x < raw.cols; ++x) img.at(x, y) = raw.at<std::uint16_t>(y, x) / 65535.f;
  } else {
    fail(ErrorCode::Io, "unsupported image depth (want 8- or 16-bit): " + path);
  }
  return img;
}

void save_image(const std::string& path, const Image& image, int bit_depth) {
  require(bit_depth == 8 || bit_depth == 16, ErrorCode::Validation, "bit_depth must be 8 or 16");
  require(image.width > 0 && image.height > 0, ErrorCode::Validation, "empty image");
  const std::string ext = lower_ext(path);
  if (ext == "pgm" || ext == "pnm") {
    save_pgm(path, image, bit_depth);
    return;
  }
  cv::Mat out(image.height, image.width, bit_depth == 8 ? CV_8U : CV_16U);
  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double c = std::clamp(static_cast<double>(image.at(x, y)), 0.0, 1.0);
      const int q = static_cast<int>(std::lround(c * maxval));
      if (bit_depth == 8)
        out.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(q);
      else
        out.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(q);
    }
  }
  require(cv::imwrite(path, out), ErrorCode::Io, "cannot encode image: " + path);
}

}  // namespace plenocal
