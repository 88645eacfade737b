#include "nsqn/datasets.hpp"

#include <array>
#include <fstream>
#include <numeric>
#include <string>

#include "nsqn/errors.hpp"

namespace nsqn {

SequenceDataset gen_counting(std::size_t n, std::size_t steps, SeededRng& rng) {
    if (n == 0 || steps == 0) throw ParameterError("gen_counting: n and T must be >= 1");
    SequenceDataset ds;
    ds.n_classes = steps + 1;
    auto& s = ds.samples;
    s.batch = n;
    s.steps = steps;
    s.n_in = 1;
    s.inputs.resize(n * steps);
    s.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int ones = 0;
        for (std::size_t t = 0; t < steps; ++t) {
            const bool bit = rng.bernoulli(0.5);
            s.inputs[i * steps + t] = bit ? 1.0 : 0.0;
            ones += bit ? 1 : 0;
        }
        s.targets[i] = ones;
    }
    return ds;
}

MnistDataset MnistDataset::head(std::size_t count) const {
    if (count >= n) return *this;
    MnistDataset out;
    out.n = count;
    out.rows = rows;
    out.cols = cols;
    out.images.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(count * rows * cols));
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
        throw IoError("truncated IDX header in " + path.string());
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                                static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::string hex(std::uint32_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xF];
    return s;
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t count, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(count);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count))) {
        throw IoError("truncated IDX payload in " + path.string() + " (expected " + std::to_string(count) +
                      " bytes)");
    }
    return bytes;
}

}  // namespace

MnistDataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    std::ifstream img = open_input(images);
    const std::uint32_t img_magic = read_be32(img, images);
    if (img_magic != kImageMagic) {
        throw FormatError("bad image magic " + hex(img_magic) + " in " + images.string() + ", expected " +
                          hex(kImageMagic));
    }
    const std::size_t n = read_be32(img, images);
    const std::size_t rows = read_be32(img, images);
    const std::size_t cols = read_be32(img, images);

    std::ifstream lab = open_input(labels);
    const std::uint32_t lab_magic = read_be32(lab, labels);
    if (lab_magic != kLabelMagic) {
        throw FormatError("bad label magic " + hex(lab_magic) + " in " + labels.string() + ", expected " +
                          hex(kLabelMagic));
    }
    const std::size_t n_labels = read_be32(lab, labels);
    if (n_labels != n) {
        throw ConsistencyError("image file has " + std::to_string(n) + " items but label file has " +
                               std::to_string(n_labels));
    }

    const auto pixels = read_payload(img, n * rows * cols, images);
    const auto label_bytes = read_payload(lab, n, labels);

    MnistDataset ds;
    ds.n = n;
    ds.rows = rows;
    ds.cols = cols;
    ds.images.resize(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) ds.images[i] = static_cast<double>(pixels[i]) / 255.0;
    ds.labels.assign(label_bytes.begin(), label_bytes.end());
    return ds;
}

void write_idx_images(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels) {
    if (rows == 0 || cols == 0 || pixels.size() % (rows * cols) != 0) {
        throw ParameterError("write_idx_images: pixel count is not a multiple of rows*cols");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_be32(out, kImageMagic);
    write_be32(out, static_cast<std::uint32_t>(pixels.size() / (rows * cols)));
    write_be32(out, static_cast<std::uint32_t>(rows));
    write_be32(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_be32(out, kLabelMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

SequenceDataset row_sequencer(const MnistDataset& data) {
    SequenceDataset ds;
    ds.n_classes = 10;
    auto& s = ds.samples;
    s.batch = data.n;
    s.steps = data.rows;
    s.n_in = data.cols;
    // [n × rows × cols] is already [batch × T × n_in].
    s.inputs = data.images;
    s.targets = data.labels;
    return ds;
}

SequenceDataset pixel_sequencer(const MnistDataset& data, std::optional<std::size_t> side) {
    std::size_t out_rows = data.rows, out_cols = data.cols;
    if (side) {
        if (*side == 0 || data.rows % *side != 0 || data.cols % *side != 0) {
            throw ParameterError("pixel_sequencer: side " + std::to_string(*side) + " does not divide " +
                                 std::to_string(data.rows) + "x" + std::to_string(data.cols));
        }
        out_rows = out_cols = *side;
    }
    const std::size_t br = data.rows / out_rows, bc = data.cols / out_cols;
    const double inv_block = 1.0 / static_cast<double>(br * bc);

    SequenceDataset ds;
    ds.n_classes = 10;
    auto& s = ds.samples;
    s.batch = data.n;
    s.steps = out_rows * out_cols;
    s.n_in = 1;
    s.inputs.resize(data.n * s.steps);
    s.targets = data.labels;
    for (std::size_t i = 0; i < data.n; ++i) {
        for (std::size_t r = 0; r < out_rows; ++r) {
            for (std::size_t c = 0; c < out_cols; ++c) {
                double acc = 0.0;
                for (std::size_t dr = 0; dr < br; ++dr)
                    for (std::size_t dc = 0; dc < bc; ++dc) acc += data.pixel(i, r * br + dr, c * bc + dc);
                s.inputs[i * s.steps + r * out_cols + c] = br * bc == 1 ? acc : acc * inv_block;
            }
        }
    }
    return ds;
}

BatchPlan minibatches(std::size_t n, std::size_t b, std::uint64_t seed, std::uint64_t epoch) {
    if (b < 1 || b > n) {
        throw ParameterError("minibatches: batch size " + std::to_string(b) + " must be in [1, " +
                             std::to_string(n) + "]");
    }
    BatchPlan plan;
    plan.batch_size = b;
    plan.order.resize(n);
    std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
    SeededRng rng = SeededRng(seed).derive("shuffle").derive("epoch/" + std::to_string(epoch));
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(plan.order[i - 1], plan.order[j]);
    }
    return plan;
}

}  // namespace nsqn
