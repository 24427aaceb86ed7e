#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqda/encoder.hpp"

namespace vqda {

// Row-major pixel grid, channels interleaved per pixel.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;
};

struct RawImageSet {
  std::vector<RawImage> images;
  std::vector<int> labels;
};

// IDX image/label pair (the classic big-endian ubyte layout). Errors name
// the file and byte offset of the malformed field.
RawImageSet load_idx(const std::string& images_path, const std::string& labels_path);

// One sample per line: label, then width*height*channels pixel values.
RawImageSet load_csv(const std::string& path, int width, int height, int channels);

// Area-average resampling; each output pixel averages its (possibly
// fractional) source footprint. Resampling to the native size is exact.
RawImage downsample_box(const RawImage& image, int target_size);

// Downsample to target_size x target_size, flatten, zero-pad to the next
// power of two, L2-normalize into an amplitude target.
AmplitudeTarget preprocess(const RawImage& image, int target_size);

struct DomainDataset {
  std::vector<AmplitudeTarget> samples;
  std::vector<int> labels;  // empty when the domain ships unlabeled
  std::string domain;       // "source" | "target"
  std::string task;

  bool labeled() const { return !labels.empty(); }
  std::size_t size() const { return samples.size(); }
};

// Keep only two digits, relabel digit_a -> 0 and digit_b -> 1, preprocess
// every survivor. limit < 0 keeps all matches.
DomainDataset make_binary_task(const RawImageSet& set, int digit_a, int digit_b,
                               int target_size, const std::string& domain,
                               const std::string& task, int limit = -1);

// Covariate shift applied to the target domain: blur, brightness offset,
// a vertical illumination ramp, and independent pixel noise. The ramp adds
// ramp * (row / (side - 1) - 1/2), darkening the top half and brightening
// the bottom, which displaces the encoded states without erasing the
// stripe signal itself. blur_rows is a horizontal motion blur: it smears
// along each row, so it damps column-direction contrast while leaving
// row-direction contrast alone.
struct SyntheticShift {
  double brightness = 0.3;
  double blur = 0.6;
  double blur_rows = 0.0;
  double ramp = 0.0;
  double noise_source = 0.05;
  double noise_target = 0.05;
};

struct SyntheticDomainSpec {
  int n_qubits = 4;  // even; image side is 2^(n_qubits/2)
  int n_source_train = 200;
  int n_source_test = 200;
  int n_target_train = 200;
  int n_target_test = 200;
  SyntheticShift shift;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  DomainDataset source_train;
  DomainDataset source_test;
  DomainDataset target_train;
  DomainDataset target_test;
};

// Two-class stripe images: class 0 vertical, class 1 horizontal. Source
// draws add pixel noise to the template; target draws are blurred,
// brightened and noised. Fully determined by the seed.
SyntheticData gen_synthetic(const SyntheticDomainSpec& spec);

}  // namespace vqda
