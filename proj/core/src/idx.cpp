#include <fstream>
#include <iterator>
#include <string>

#include "arc/data.hpp"
#include "arc/error.hpp"

namespace arc {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) raise(ErrorCode::Truncated, path.string() + ": header cut short");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

Dataset idx_load(const std::filesystem::path& images, const std::filesystem::path& labels,
                 int num_classes) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);

  if (const auto magic = read_be32(img, 0, images); magic != kImageMagic) {
    raise(ErrorCode::BadMagic, images.string() + ": expected image magic 0x00000803");
  }
  if (const auto magic = read_be32(lab, 0, labels); magic != kLabelMagic) {
    raise(ErrorCode::BadMagic, labels.string() + ": expected label magic 0x00000801");
  }
  const std::size_t n_images = read_be32(img, 4, images);
  const std::size_t rows = read_be32(img, 8, images);
  const std::size_t cols = read_be32(img, 12, images);
  const std::size_t n_labels = read_be32(lab, 4, labels);
  if (n_images != n_labels) {
    raise(ErrorCode::CountMismatch, std::to_string(n_images) + " images but " +
                                        std::to_string(n_labels) + " labels");
  }
  const std::size_t dim = rows * cols;
  if (img.size() < 16 + n_images * dim) {
    raise(ErrorCode::Truncated, images.string() + ": pixel data cut short");
  }
  if (lab.size() < 8 + n_labels) raise(ErrorCode::Truncated, labels.string() + ": labels cut short");

  Dataset out;
  out.dim = dim;
  out.num_classes = num_classes;
  out.features.resize(n_images * dim);
  for (std::size_t i = 0; i < out.features.size(); ++i) {
    out.features[i] = (img[16 + i] / 255.0 - kIdxPixelMean) / kIdxPixelStd;
  }
  out.labels.resize(n_labels);
  for (std::size_t i = 0; i < n_labels; ++i) out.labels[i] = lab[8 + i];
  out.validate();
  return out;
}

void idx_write_images(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t cols,
                      std::span<const std::uint8_t> pixels) {
  const std::size_t per_image = std::size_t{rows} * cols;
  if (per_image == 0 || pixels.size() % per_image != 0) {
    raise(ErrorCode::InvalidArgument, "pixel buffer is not a whole number of images");
  }
  std::vector<std::uint8_t> bytes;
  put_be32(bytes, kImageMagic);
  put_be32(bytes, static_cast<std::uint32_t>(pixels.size() / per_image));
  put_be32(bytes, rows);
  put_be32(bytes, cols);
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  write_all(path, bytes);
}

void idx_write_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> bytes;
  put_be32(bytes, kLabelMagic);
  put_be32(bytes, static_cast<std::uint32_t>(labels.size()));
  bytes.insert(bytes.end(), labels.begin(), labels.end());
  write_all(path, bytes);
}

}  // namespace arc
