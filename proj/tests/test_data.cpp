#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqda/data.hpp"

using namespace vqda;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "vqda-data-tests";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), (std::streamsize)bytes.size());
}

void push_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back((unsigned char)(v >> 24));
  out.push_back((unsigned char)(v >> 16));
  out.push_back((unsigned char)(v >> 8));
  out.push_back((unsigned char)v);
}

// Two 2x2 images with labels 3 and 6 in the classic big-endian layout.
std::pair<fs::path, fs::path> write_tiny_idx() {
  std::vector<unsigned char> img;
  push_be32(img, 0x803);
  push_be32(img, 2);
  push_be32(img, 2);
  push_be32(img, 2);
  for (unsigned char p : {10, 20, 30, 40, 50, 60, 70, 80}) img.push_back(p);

  std::vector<unsigned char> lab;
  push_be32(lab, 0x801);
  push_be32(lab, 2);
  lab.push_back(3);
  lab.push_back(6);

  fs::path ip = temp_dir() / "tiny-images-idx3-ubyte";
  fs::path lp = temp_dir() / "tiny-labels-idx1-ubyte";
  write_bytes(ip, img);
  write_bytes(lp, lab);
  return {ip, lp};
}

}  // namespace

TEST_CASE("idx round trip") {
  auto [ip, lp] = write_tiny_idx();
  RawImageSet set = load_idx(ip.string(), lp.string());
  REQUIRE(set.images.size() == 2);
  REQUIRE(set.labels == std::vector<int>{3, 6});
  REQUIRE(set.images[0].width == 2);
  REQUIRE(set.images[0].height == 2);
  REQUIRE(set.images[0].pixels == std::vector<double>{10, 20, 30, 40});
  REQUIRE(set.images[1].pixels == std::vector<double>{50, 60, 70, 80});
}

TEST_CASE("idx error messages name the problem") {
  auto [ip, lp] = write_tiny_idx();

  {
    std::vector<unsigned char> bad;
    push_be32(bad, 0x802);
    push_be32(bad, 0);
    push_be32(bad, 2);
    push_be32(bad, 2);
    fs::path p = temp_dir() / "bad-magic";
    write_bytes(p, bad);
    REQUIRE_THROWS_WITH(load_idx(p.string(), lp.string()),
                        Catch::Matchers::ContainsSubstring("bad magic"));
  }
  {
    std::vector<unsigned char> trunc;
    push_be32(trunc, 0x803);
    push_be32(trunc, 5);  // promises 5 images, delivers none
    push_be32(trunc, 2);
    push_be32(trunc, 2);
    fs::path p = temp_dir() / "truncated";
    write_bytes(p, trunc);
    REQUIRE_THROWS_WITH(load_idx(p.string(), lp.string()),
                        Catch::Matchers::ContainsSubstring("truncated"));
  }
  {
    std::vector<unsigned char> lab;
    push_be32(lab, 0x801);
    push_be32(lab, 3);  // three labels vs two images
    lab.push_back(1);
    lab.push_back(2);
    lab.push_back(3);
    fs::path p = temp_dir() / "mismatch-labels";
    write_bytes(p, lab);
    REQUIRE_THROWS_WITH(load_idx(ip.string(), p.string()),
                        Catch::Matchers::ContainsSubstring("count mismatch"));
  }
  REQUIRE_THROWS_WITH(load_idx((temp_dir() / "nope").string(), lp.string()),
                      Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("csv loading and errors") {
  fs::path p = temp_dir() / "tiny.csv";
  {
    std::ofstream out(p);
    out << "3,0.1,0.2,0.3,0.4\n";
    out << "\n";  // blank lines are skipped
    out << "6,1,2,3,4\n";
  }
  RawImageSet set = load_csv(p.string(), 2, 2, 1);
  REQUIRE(set.images.size() == 2);
  REQUIRE(set.labels == std::vector<int>{3, 6});
  REQUIRE(set.images[0].pixels == std::vector<double>{0.1, 0.2, 0.3, 0.4});

  fs::path bad_fields = temp_dir() / "bad-fields.csv";
  {
    std::ofstream out(bad_fields);
    out << "3,0.1,0.2\n";
  }
  REQUIRE_THROWS_WITH(load_csv(bad_fields.string(), 2, 2, 1),
                      Catch::Matchers::ContainsSubstring("line 1"));

  fs::path bad_value = temp_dir() / "bad-value.csv";
  {
    std::ofstream out(bad_value);
    out << "3,0.1,0.2,0.3,0.4\n";
    out << "6,0.1,oops,0.3,0.4\n";
  }
  REQUIRE_THROWS_WITH(load_csv(bad_value.string(), 2, 2, 1),
                      Catch::Matchers::ContainsSubstring("line 2"));

  fs::path bad_label = temp_dir() / "bad-label.csv";
  {
    std::ofstream out(bad_label);
    out << "3.5,0.1,0.2,0.3,0.4\n";
  }
  REQUIRE_THROWS_WITH(load_csv(bad_label.string(), 2, 2, 1),
                      Catch::Matchers::ContainsSubstring("non-integer label"));

  REQUIRE_THROWS(load_csv((temp_dir() / "missing.csv").string(), 2, 2, 1));
}

TEST_CASE("box downsampling") {
  // 2x2 -> 1x1 is the plain mean.
  RawImage img;
  img.width = 2;
  img.height = 2;
  img.pixels = {1.0, 3.0, 5.0, 7.0};
  RawImage one = downsample_box(img, 1);
  REQUIRE(one.pixels.size() == 1);
  REQUIRE(one.pixels[0] == Approx(4.0).margin(1e-12));

  // 4x4 -> 2x2 averages disjoint 2x2 blocks.
  RawImage big;
  big.width = 4;
  big.height = 4;
  big.pixels.resize(16);
  for (int i = 0; i < 16; ++i) big.pixels[i] = i;
  RawImage half = downsample_box(big, 2);
  REQUIRE(half.pixels[0] == Approx((0 + 1 + 4 + 5) / 4.0).margin(1e-12));
  REQUIRE(half.pixels[1] == Approx((2 + 3 + 6 + 7) / 4.0).margin(1e-12));
  REQUIRE(half.pixels[2] == Approx((8 + 9 + 12 + 13) / 4.0).margin(1e-12));
  REQUIRE(half.pixels[3] == Approx((10 + 11 + 14 + 15) / 4.0).margin(1e-12));

  // Native size is exact.
  RawImage same = downsample_box(big, 4);
  for (int i = 0; i < 16; ++i) REQUIRE(same.pixels[i] == Approx(big.pixels[i]).margin(1e-12));

  // Fractional footprints preserve the total mass (mean invariance).
  RawImage odd;
  odd.width = 3;
  odd.height = 3;
  odd.pixels = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  RawImage two = downsample_box(odd, 2);
  double in_mean = 0.0, out_mean = 0.0;
  for (double v : odd.pixels) in_mean += v / odd.pixels.size();
  for (double v : two.pixels) out_mean += v / two.pixels.size();
  REQUIRE(out_mean == Approx(in_mean).margin(1e-12));

  REQUIRE_THROWS(downsample_box(img, 0));
}

TEST_CASE("preprocess pads to a power of two and normalizes") {
  RawImage img;
  img.width = 3;
  img.height = 3;
  img.pixels.assign(9, 2.0);
  AmplitudeTarget t = preprocess(img, 3);  // 9 values pad to 16
  REQUIRE(t.normalized.size() == 16);
  REQUIRE(t.n_qubits() == 4);
  for (int i = 9; i < 16; ++i) REQUIRE(t.normalized[i] == 0.0);
  double norm_sq = 0.0;
  for (double v : t.normalized) norm_sq += v * v;
  REQUIRE(norm_sq == Approx(1.0).margin(1e-12));

  RawImage zero;
  zero.width = 2;
  zero.height = 2;
  zero.pixels.assign(4, 0.0);
  REQUIRE_THROWS(preprocess(zero, 2));
}

TEST_CASE("binary task construction") {
  auto [ip, lp] = write_tiny_idx();
  RawImageSet set = load_idx(ip.string(), lp.string());
  set.images.push_back(set.images[0]);
  set.labels.push_back(8);  // an unrelated digit that must be dropped

  DomainDataset task = make_binary_task(set, 3, 6, 2, "source", "digits-3v6");
  REQUIRE(task.size() == 2);
  REQUIRE(task.labels == std::vector<int>{0, 1});
  REQUIRE(task.domain == "source");
  REQUIRE(task.task == "digits-3v6");
  REQUIRE(task.labeled());

  // Reversing the digit order flips the labels.
  DomainDataset rev = make_binary_task(set, 6, 3, 2, "source", "digits-6v3");
  REQUIRE(rev.labels == std::vector<int>{1, 0});

  // A digit absent from the set is an error, not silence.
  REQUIRE_THROWS_WITH(make_binary_task(set, 3, 7, 2, "source", "t"),
                      Catch::Matchers::ContainsSubstring("absent"));
  REQUIRE_THROWS(make_binary_task(set, 3, 3, 2, "source", "t"));

  // The limit caps total kept samples.
  DomainDataset capped = make_binary_task(set, 3, 6, 2, "source", "t", 1);
  REQUIRE(capped.size() == 1);
}

TEST_CASE("synthetic data generation") {
  SyntheticDomainSpec spec;
  spec.n_qubits = 4;
  spec.n_source_train = 10;
  spec.n_source_test = 6;
  spec.n_target_train = 10;
  spec.n_target_test = 6;
  spec.seed = 42;

  SyntheticData d1 = gen_synthetic(spec);
  REQUIRE(d1.source_train.size() == 10);
  REQUIRE(d1.source_test.size() == 6);
  REQUIRE(d1.target_train.size() == 10);
  REQUIRE(d1.target_test.size() == 6);
  REQUIRE(d1.source_train.domain == "source");
  REQUIRE(d1.target_train.domain == "target");

  // Labels alternate, so both classes are always present and balanced.
  for (int i = 0; i < 10; ++i) REQUIRE(d1.source_train.labels[i] == i % 2);

  // Sample width matches the qubit count.
  REQUIRE(d1.source_train.samples[0].n_qubits() == 4);
  REQUIRE(d1.source_train.samples[0].normalized.size() == 16);

  // Bitwise deterministic per seed; a new seed moves the draws.
  SyntheticData d2 = gen_synthetic(spec);
  REQUIRE(d1.source_train.samples[0].raw == d2.source_train.samples[0].raw);
  REQUIRE(d1.target_test.samples[5].raw == d2.target_test.samples[5].raw);
  spec.seed = 43;
  SyntheticData d3 = gen_synthetic(spec);
  REQUIRE(d1.source_train.samples[0].raw != d3.source_train.samples[0].raw);

  // The four subsets use independent streams: source train and source test
  // differ even at matching indices.
  REQUIRE(d1.source_train.samples[0].raw != d1.source_test.samples[0].raw);

  SyntheticDomainSpec odd = spec;
  odd.n_qubits = 3;
  REQUIRE_THROWS(gen_synthetic(odd));
  SyntheticDomainSpec empty = spec;
  empty.n_source_train = 0;
  REQUIRE_THROWS(gen_synthetic(empty));
}

TEST_CASE("directional shift components act on the target only") {
  SyntheticDomainSpec spec;
  spec.n_qubits = 4;  // 4x4 images
  spec.n_source_train = 2;
  spec.n_source_test = 1;
  spec.n_target_train = 2;
  spec.n_target_test = 1;
  spec.seed = 11;
  spec.shift.brightness = 0.0;
  spec.shift.blur = 0.0;
  spec.shift.noise_source = 0.0;
  spec.shift.noise_target = 0.0;

  SECTION("vertical ramp tilts rows by its amplitude") {
    spec.shift.ramp = 0.8;
    SyntheticData d = gen_synthetic(spec);
    const std::vector<double>& src = d.source_train.samples[0].raw;
    const std::vector<double>& tgt = d.target_train.samples[0].raw;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        double want = src[(size_t)r * 4 + c] + 0.8 * (r / 3.0 - 0.5);
        REQUIRE(tgt[(size_t)r * 4 + c] == Approx(std::max(0.0, want)).margin(1e-12));
      }
  }

  SECTION("row blur damps vertical stripes and leaves horizontal ones exact") {
    spec.shift.blur_rows = 1.0;
    SyntheticData d = gen_synthetic(spec);

    // Label 1 rows are constant, so smearing along a row changes nothing.
    const std::vector<double>& src_h = d.source_train.samples[1].raw;
    const std::vector<double>& tgt_h = d.target_train.samples[1].raw;
    for (size_t p = 0; p < 16; ++p) REQUIRE(tgt_h[p] == Approx(src_h[p]).margin(1e-12));

    // Label 0 columns alternate, so the same smear shrinks the contrast.
    auto range_of = [](const std::vector<double>& img) {
      return *std::max_element(img.begin(), img.end()) -
             *std::min_element(img.begin(), img.end());
    };
    const std::vector<double>& src_v = d.source_train.samples[0].raw;
    const std::vector<double>& tgt_v = d.target_train.samples[0].raw;
    REQUIRE(range_of(src_v) == Approx(0.8).margin(1e-12));
    REQUIRE(range_of(tgt_v) < 0.55 * range_of(src_v));
    REQUIRE(range_of(tgt_v) > 0.0);
  }
}

TEST_CASE("synthetic task is linearly learnable and the domains differ") {
  SyntheticDomainSpec spec;
  spec.n_qubits = 4;
  spec.n_source_train = 60;
  spec.n_source_test = 40;
  spec.n_target_train = 60;
  spec.n_target_test = 40;
  spec.seed = 5;
  SyntheticData d = gen_synthetic(spec);

  // Least-squares probe on the normalized source images.
  auto design = [](const DomainDataset& ds) {
    Eigen::MatrixXd x((Eigen::Index)ds.size(), 17);
    for (Eigen::Index i = 0; i < (Eigen::Index)ds.size(); ++i) {
      for (int j = 0; j < 16; ++j) x(i, j) = ds.samples[i].normalized[j];
      x(i, 16) = 1.0;  // bias column
    }
    return x;
  };
  auto targets = [](const DomainDataset& ds) {
    Eigen::VectorXd y((Eigen::Index)ds.size());
    for (Eigen::Index i = 0; i < (Eigen::Index)ds.size(); ++i)
      y(i) = ds.labels[i] == 0 ? 1.0 : -1.0;
    return y;
  };
  Eigen::MatrixXd x = design(d.source_train);
  Eigen::VectorXd w =
      (x.transpose() * x + 1e-6 * Eigen::MatrixXd::Identity(17, 17))
          .ldlt()
          .solve(x.transpose() * targets(d.source_train));

  auto accuracy = [&](const DomainDataset& ds) {
    Eigen::VectorXd scores = design(ds) * w;
    int correct = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      int pred = scores(i) >= 0.0 ? 0 : 1;
      if (pred == ds.labels[i]) ++correct;
    }
    return (double)correct / (double)ds.size();
  };
  REQUIRE(accuracy(d.source_test) >= 0.9);

  // The covariate shift is real: the average target image sits measurably
  // away from the average source image after normalization.
  std::vector<double> mean_src(16, 0.0), mean_tgt(16, 0.0);
  for (const auto& s : d.source_train.samples)
    for (int j = 0; j < 16; ++j) mean_src[j] += s.normalized[j] / d.source_train.size();
  for (const auto& s : d.target_train.samples)
    for (int j = 0; j < 16; ++j) mean_tgt[j] += s.normalized[j] / d.target_train.size();
  double gap = 0.0;
  for (int j = 0; j < 16; ++j) gap += (mean_src[j] - mean_tgt[j]) * (mean_src[j] - mean_tgt[j]);
  REQUIRE(std::sqrt(gap) > 0.03);
}
