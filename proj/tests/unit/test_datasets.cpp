#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <unistd.h>

#include "nsqn/datasets.hpp"
#include "nsqn/errors.hpp"

using namespace nsqn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("nsqn_ds_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// n tiny images whose pixel (r, c) of image i is (i + r·cols + c) mod 256.
void write_synthetic(const fs::path& dir, std::size_t n, std::size_t rows, std::size_t cols) {
    std::vector<std::uint8_t> px(n * rows * cols), lab(n);
    for (std::size_t i = 0; i < n; ++i) {
        lab[i] = static_cast<std::uint8_t>(i % 10);
        for (std::size_t p = 0; p < rows * cols; ++p) px[i * rows * cols + p] = static_cast<std::uint8_t>((i + p) % 256);
    }
    write_idx_images(dir / "img", rows, cols, px);
    write_idx_labels(dir / "lab", lab);
}

void patch_byte(const fs::path& file, std::size_t offset, char value) {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(offset));
    f.put(value);
}

}  // namespace

TEST_CASE("gen_counting: labels equal an independent ones-count") {
    SeededRng rng(7);
    const SequenceDataset d = gen_counting(500, 20, rng);
    CHECK(d.n_classes == 21);
    CHECK(d.samples.n_in == 1);
    CHECK(d.samples.steps == 20);
    for (std::size_t i = 0; i < d.size(); ++i) {
        int ones = 0;
        for (std::size_t t = 0; t < 20; ++t) {
            const double x = d.samples.input(i, t, 0);
            REQUIRE((x == 0.0 || x == 1.0));
            ones += x == 1.0;
        }
        CHECK(d.samples.targets[i] == ones);
    }
}

TEST_CASE("gen_counting: mean label is T/2") {
    SeededRng rng(99);
    const SequenceDataset d = gen_counting(100000, 20, rng);
    const double mean =
        std::accumulate(d.samples.targets.begin(), d.samples.targets.end(), 0.0) / static_cast<double>(d.size());
    CHECK(std::abs(mean - 10.0) < 0.1);
}

TEST_CASE("gen_counting: T = 1 gives two balanced classes") {
    SeededRng rng(3);
    const SequenceDataset d = gen_counting(10000, 1, rng);
    CHECK(d.n_classes == 2);
    const auto ones = std::count(d.samples.targets.begin(), d.samples.targets.end(), 1);
    CHECK(std::abs(static_cast<double>(ones) / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("IDX round trip and the sequencers") {
    TempDir tmp;
    write_synthetic(tmp.path, 5, 4, 6);
    const MnistDataset m = load_mnist_idx(tmp.path / "img", tmp.path / "lab");
    REQUIRE(m.n == 5);
    CHECK(m.rows == 4);
    CHECK(m.cols == 6);
    CHECK(m.labels == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(m.pixel(2, 1, 3) == doctest::Approx((2 + 6 + 3) / 255.0));
    CHECK(m.head(2).n == 2);
    CHECK(m.head(99).n == 5);

    const SequenceDataset rows = row_sequencer(m);
    CHECK(rows.samples.steps == 4);
    CHECK(rows.samples.n_in == 6);
    CHECK(rows.n_classes == 10);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 6; ++c) CHECK(rows.samples.input(3, r, c) == m.pixel(3, r, c));

    const SequenceDataset pix = pixel_sequencer(m);
    CHECK(pix.samples.steps == 24);
    CHECK(pix.samples.n_in == 1);
    CHECK(pix.samples.input(1, 7, 0) == m.pixel(1, 1, 1));

    const SequenceDataset small = pixel_sequencer(m, 2);
    CHECK(small.samples.steps == 4);
    // Block (0, 1) of image 0 covers rows 0..1, cols 3..5.
    double mean = 0.0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 3; c < 6; ++c) mean += m.pixel(0, r, c) / 6.0;
    CHECK(small.samples.input(0, 1, 0) == doctest::Approx(mean).epsilon(1e-14));
    CHECK_THROWS_AS(pixel_sequencer(m, 5), ParameterError);
}

TEST_CASE("pixel sequencer on 28x28: 784 and 196 steps") {
    TempDir tmp;
    write_synthetic(tmp.path, 2, 28, 28);
    const MnistDataset m = load_mnist_idx(tmp.path / "img", tmp.path / "lab");
    CHECK(pixel_sequencer(m).samples.steps == 784);
    const SequenceDataset d = pixel_sequencer(m, 14);
    CHECK(d.samples.steps == 196);
    const double block = (m.pixel(0, 0, 0) + m.pixel(0, 0, 1) + m.pixel(0, 1, 0) + m.pixel(0, 1, 1)) / 4.0;
    CHECK(d.samples.input(0, 0, 0) == doctest::Approx(block).epsilon(1e-14));
}

TEST_CASE("IDX error cases") {
    TempDir tmp;
    write_synthetic(tmp.path, 3, 2, 2);
    CHECK_THROWS_AS(load_mnist_idx(tmp.path / "missing", tmp.path / "lab"), IoError);

    SUBCASE("bad magic") {
        patch_byte(tmp.path / "img", 3, 0x01);
        CHECK_THROWS_AS(load_mnist_idx(tmp.path / "img", tmp.path / "lab"), FormatError);
    }
    SUBCASE("label count mismatch") {
        const std::uint8_t lab[] = {1, 2};
        write_idx_labels(tmp.path / "lab", lab);
        CHECK_THROWS_AS(load_mnist_idx(tmp.path / "img", tmp.path / "lab"), ConsistencyError);
    }
    SUBCASE("truncated pixel data") {
        fs::resize_file(tmp.path / "img", fs::file_size(tmp.path / "img") - 1);
        CHECK_THROWS_AS(load_mnist_idx(tmp.path / "img", tmp.path / "lab"), IoError);
    }
}

TEST_CASE("minibatches") {
    const BatchPlan p = minibatches(100, 50, 1, 0);
    CHECK(p.batch_count() == 2);
    std::vector<std::size_t> all = p.order;
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 100; ++i) CHECK(all[i] == i);

    CHECK(minibatches(100, 30, 1, 0).batch_count() == 3);
    CHECK(minibatches(100, 50, 1, 0).order == p.order);
    CHECK(minibatches(100, 50, 1, 1).order != p.order);
    CHECK(minibatches(100, 50, 2, 0).order != p.order);
    CHECK_THROWS_AS(minibatches(10, 0, 1, 0), ParameterError);
    CHECK_THROWS_AS(minibatches(10, 11, 1, 0), ParameterError);
}

TEST_CASE("SequenceBatch::subset keeps the listed rows in order") {
    SeededRng rng(2);
    const SequenceDataset d = gen_counting(10, 4, rng);
    const std::size_t rows[] = {7, 2};
    const SequenceBatch s = d.samples.subset(rows);
    CHECK(s.batch == 2);
    CHECK(s.targets[0] == d.samples.targets[7]);
    for (std::size_t t = 0; t < 4; ++t) CHECK(s.input(1, t, 0) == d.samples.input(2, t, 0));
}
