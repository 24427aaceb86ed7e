#include "vqda/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vqda/rng.hpp"

namespace vqda {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

std::uint32_t be_u32(const std::vector<unsigned char>& bytes, size_t offset,
                     const std::string& path) {
  if (offset + 4 > bytes.size())
    throw std::runtime_error(path + ": truncated at byte " + std::to_string(offset) +
                             " (wanted a 4-byte field)");
  return ((std::uint32_t)bytes[offset] << 24) | ((std::uint32_t)bytes[offset + 1] << 16) |
         ((std::uint32_t)bytes[offset + 2] << 8) | (std::uint32_t)bytes[offset + 3];
}

}  // namespace

RawImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
  std::vector<unsigned char> img = read_file(images_path);
  std::uint32_t magic = be_u32(img, 0, images_path);
  if (magic != 0x00000803)
    throw std::runtime_error(images_path + ": bad magic at byte 0 (got 0x" +
                             [&] { std::ostringstream o; o << std::hex << magic; return o.str(); }() +
                             ", expected 0x803)");
  std::uint32_t count = be_u32(img, 4, images_path);
  std::uint32_t rows = be_u32(img, 8, images_path);
  std::uint32_t cols = be_u32(img, 12, images_path);
  size_t expected = 16 + (size_t)count * rows * cols;
  if (img.size() < expected)
    throw std::runtime_error(images_path + ": truncated at byte " +
                             std::to_string(img.size()) + " (header promises " +
                             std::to_string(expected) + " bytes)");

  std::vector<unsigned char> lab = read_file(labels_path);
  std::uint32_t lab_magic = be_u32(lab, 0, labels_path);
  if (lab_magic != 0x00000801)
    throw std::runtime_error(labels_path + ": bad magic at byte 0 (got 0x" +
                             [&] { std::ostringstream o; o << std::hex << lab_magic; return o.str(); }() +
                             ", expected 0x801)");
  std::uint32_t lab_count = be_u32(lab, 4, labels_path);
  if (lab.size() < 8 + (size_t)lab_count)
    throw std::runtime_error(labels_path + ": truncated at byte " +
                             std::to_string(lab.size()));
  if (lab_count != count)
    throw std::runtime_error("count mismatch: " + std::to_string(count) + " images in " +
                             images_path + " vs " + std::to_string(lab_count) +
                             " labels in " + labels_path);

  RawImageSet set;
  set.images.reserve(count);
  set.labels.reserve(count);
  size_t offset = 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    RawImage im;
    im.width = (int)cols;
    im.height = (int)rows;
    im.channels = 1;
    im.pixels.reserve((size_t)rows * cols);
    for (std::uint32_t p = 0; p < rows * cols; ++p)
      im.pixels.push_back((double)img[offset + p]);
    offset += (size_t)rows * cols;
    set.images.push_back(std::move(im));
    set.labels.push_back((int)lab[8 + i]);
  }
  return set;
}

RawImageSet load_csv(const std::string& path, int width, int height, int channels) {
  if (width < 1 || height < 1 || channels < 1)
    throw std::invalid_argument("csv image shape must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  RawImageSet set;
  const size_t n_pixels = (size_t)width * height * channels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<double> values;
    values.reserve(n_pixels + 1);
    while (std::getline(row, field, ','))
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": unparsable field '" + field + "'");
      }
    if (values.size() != n_pixels + 1)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(n_pixels + 1) + " fields, got " +
                               std::to_string(values.size()));
    double label = values[0];
    if (label != std::floor(label))
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": non-integer label " + std::to_string(label));
    RawImage im;
    im.width = width;
    im.height = height;
    im.channels = channels;
    im.pixels.assign(values.begin() + 1, values.end());
    set.images.push_back(std::move(im));
    set.labels.push_back((int)label);
  }
  return set;
}

RawImage downsample_box(const RawImage& image, int target_size) {
  if (target_size < 1) throw std::invalid_argument("target size must be positive");
  if (image.width < 1 || image.height < 1 || (int)image.pixels.size() !=
      image.width * image.height * image.channels)
    throw std::invalid_argument("malformed raw image");

  RawImage out;
  out.width = target_size;
  out.height = target_size;
  out.channels = image.channels;
  out.pixels.assign((size_t)target_size * target_size * image.channels, 0.0);

  const double sy = (double)image.height / target_size;
  const double sx = (double)image.width / target_size;
  for (int R = 0; R < target_size; ++R) {
    double y0 = R * sy, y1 = (R + 1) * sy;
    int r_lo = (int)std::floor(y0), r_hi = std::min((int)std::ceil(y1), image.height);
    for (int C = 0; C < target_size; ++C) {
      double x0 = C * sx, x1 = (C + 1) * sx;
      int c_lo = (int)std::floor(x0), c_hi = std::min((int)std::ceil(x1), image.width);
      for (int ch = 0; ch < image.channels; ++ch) {
        double total = 0.0;
        for (int r = r_lo; r < r_hi; ++r) {
          double wy = std::min(y1, (double)r + 1) - std::max(y0, (double)r);
          for (int c = c_lo; c < c_hi; ++c) {
            double wx = std::min(x1, (double)c + 1) - std::max(x0, (double)c);
            total += wy * wx *
                     image.pixels[((size_t)r * image.width + c) * image.channels + ch];
          }
        }
        out.pixels[((size_t)R * target_size + C) * image.channels + ch] =
            total / (sy * sx);
      }
    }
  }
  return out;
}

AmplitudeTarget preprocess(const RawImage& image, int target_size) {
  RawImage small = downsample_box(image, target_size);
  std::vector<double> flat = std::move(small.pixels);
  size_t dim = 1;
  while (dim < flat.size()) dim <<= 1;
  flat.resize(dim, 0.0);
  return AmplitudeTarget::from_raw(std::move(flat));
}

DomainDataset make_binary_task(const RawImageSet& set, int digit_a, int digit_b,
                               int target_size, const std::string& domain,
                               const std::string& task, int limit) {
  if (digit_a == digit_b)
    throw std::invalid_argument("binary task needs two distinct digits");
  if (set.images.size() != set.labels.size())
    throw std::invalid_argument("image set has " + std::to_string(set.images.size()) +
                                " images but " + std::to_string(set.labels.size()) +
                                " labels");
  DomainDataset out;
  out.domain = domain;
  out.task = task;
  bool saw_a = false, saw_b = false;
  for (size_t i = 0; i < set.images.size(); ++i) {
    int lab = set.labels[i];
    if (lab != digit_a && lab != digit_b) continue;
    (lab == digit_a ? saw_a : saw_b) = true;
    // The cap trims what we keep, not what counts as present in the set.
    if (limit >= 0 && (int)out.samples.size() >= limit) continue;
    out.samples.push_back(preprocess(set.images[i], target_size));
    out.labels.push_back(lab == digit_a ? 0 : 1);
  }
  if (!saw_a || !saw_b)
    throw std::runtime_error("digit " + std::to_string(saw_a ? digit_b : digit_a) +
                             " absent from the image set");
  return out;
}

namespace {

std::vector<double> class_template(int side, int label) {
  const double hi = 1.0, lo = 0.2;
  std::vector<double> img((size_t)side * side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      int parity = label == 0 ? c % 2 : r % 2;
      img[(size_t)r * side + c] = parity == 0 ? hi : lo;
    }
  return img;
}

std::vector<double> gaussian_kernel(double width) {
  int radius = (int)std::ceil(3.0 * width);
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    kernel[d + radius] = std::exp(-0.5 * (d * d) / (width * width));
    norm += kernel[d + radius];
  }
  for (double& k : kernel) k /= norm;
  return kernel;
}

// One separable pass; along_rows smears within each row (column direction),
// otherwise within each column.
std::vector<double> blur_1d(const std::vector<double>& img, int side, double width,
                            bool along_rows) {
  if (width <= 0.0) return img;
  std::vector<double> kernel = gaussian_kernel(width);
  int radius = ((int)kernel.size() - 1) / 2;
  auto clamp = [side](int v) { return std::min(std::max(v, 0), side - 1); };
  std::vector<double> out(img.size());
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        int rr = along_rows ? r : clamp(r + d);
        int cc = along_rows ? clamp(c + d) : c;
        acc += kernel[d + radius] * img[(size_t)rr * side + cc];
      }
      out[(size_t)r * side + c] = acc;
    }
  return out;
}

std::vector<double> gaussian_blur(const std::vector<double>& img, int side, double width) {
  return blur_1d(blur_1d(img, side, width, true), side, width, false);
}

DomainDataset synth_subset(int side, int n, bool shifted, const SyntheticShift& shift,
                           SplitMix64 rng, const std::string& domain,
                           const std::string& task) {
  DomainDataset out;
  out.domain = domain;
  out.task = task;
  std::vector<std::vector<double>> templates = {class_template(side, 0),
                                                class_template(side, 1)};
  std::vector<std::vector<double>> shifted_templates;
  if (shifted)
    for (const auto& t : templates)
      shifted_templates.push_back(
          blur_1d(gaussian_blur(t, side, shift.blur), side, shift.blur_rows, true));

  for (int i = 0; i < n; ++i) {
    int label = i % 2;
    const std::vector<double>& base = shifted ? shifted_templates[label] : templates[label];
    double sigma = shifted ? shift.noise_target : shift.noise_source;
    double offset = shifted ? shift.brightness : 0.0;
    double ramp = shifted ? shift.ramp : 0.0;
    std::vector<double> img(base.size());
    for (size_t p = 0; p < base.size(); ++p) {
      double row_frac = side > 1 ? (double)(p / side) / (double)(side - 1) : 0.0;
      img[p] = std::max(0.0, base[p] + offset + ramp * (row_frac - 0.5) +
                                 sigma * rng.gaussian());
    }
    out.samples.push_back(AmplitudeTarget::from_raw(std::move(img)));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticDomainSpec& spec) {
  if (spec.n_qubits < 2 || spec.n_qubits % 2 != 0)
    throw std::domain_error("synthetic generator needs an even qubit count >= 2, got " +
                            std::to_string(spec.n_qubits));
  if (spec.n_source_train < 1 || spec.n_target_train < 1)
    throw std::domain_error("synthetic generator needs at least 1 training sample per domain");
  int side = 1 << (spec.n_qubits / 2);

  SplitMix64 root(spec.seed);
  SyntheticData data;
  data.source_train = synth_subset(side, spec.n_source_train, false, spec.shift,
                                   root.fork(0), "source", "synthetic");
  data.source_test = synth_subset(side, spec.n_source_test, false, spec.shift,
                                  root.fork(1), "source", "synthetic");
  data.target_train = synth_subset(side, spec.n_target_train, true, spec.shift,
                                   root.fork(2), "target", "synthetic");
  data.target_test = synth_subset(side, spec.n_target_test, true, spec.shift,
                                  root.fork(3), "target", "synthetic");
  return data;
}

}  // namespace vqda
