#include "orbinspect/weights.hpp"

#include "orbinspect/errors.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

namespace orbinspect::policy {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "container assumes IEEE-754 floats");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32(const char* what) {
        if (pos_ + 4 > bytes_.size()) throw TruncatedPayload(std::string("container ends inside ") + what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 4;
        return v;
    }

    template <class Tensor>
    void fill(Tensor& t, const char* what) {
        const std::size_t n = static_cast<std::size_t>(t.size());
        if (pos_ + 4 * n > bytes_.size()) throw TruncatedPayload(std::string("container ends inside ") + what);
        for (std::size_t i = 0; i < n; ++i) t.data()[i] = std::bit_cast<float>(u32(what));
    }

    std::size_t position() const noexcept { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

template <class Tensor>
void put_tensor(std::vector<std::uint8_t>& out, const Tensor& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) put_f32(out, t.data()[i]);
}

void check_shape(Eigen::Index rows, Eigen::Index cols, std::uint32_t want_rows, std::uint32_t want_cols,
                 const char* name) {
    if (rows != want_rows || cols != want_cols)
        throw DimensionMismatch(std::string("tensor ") + name + " has shape " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", expected " + std::to_string(want_rows) + "x" +
                                std::to_string(want_cols));
}

}  // namespace

RecurrentQWeights RecurrentQWeights::zeros(const NetworkDims& d) {
    RecurrentQWeights w;
    w.dims = d;
    w.w1 = MatrixF::Zero(d.hidden1, d.input);
    w.b1 = VectorF::Zero(d.hidden1);
    w.w2 = MatrixF::Zero(d.hidden2, d.hidden1);
    w.b2 = VectorF::Zero(d.hidden2);
    w.wg = MatrixF::Zero(4 * d.cell, d.hidden2 + d.cell);
    w.bg = VectorF::Zero(4 * d.cell);
    w.wh = MatrixF::Zero(d.actions, d.cell);
    w.bh = VectorF::Zero(d.actions);
    return w;
}

RecurrentQWeights RecurrentQWeights::random(const NetworkDims& dims, std::uint64_t seed, float scale) {
    RecurrentQWeights w = zeros(dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-scale, scale);
    auto fill = [&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
    };
    fill(w.w1), fill(w.b1), fill(w.w2), fill(w.b2), fill(w.wg), fill(w.bg), fill(w.wh), fill(w.bh);
    return w;
}

void RecurrentQWeights::validate() const {
    const NetworkDims& d = dims;
    if (d.input == 0 || d.hidden1 == 0 || d.hidden2 == 0 || d.cell == 0 || d.actions == 0)
        throw DimensionMismatch("network dimensions must be positive");
    check_shape(w1.rows(), w1.cols(), d.hidden1, d.input, "W1");
    check_shape(b1.rows(), 1, d.hidden1, 1, "b1");
    check_shape(w2.rows(), w2.cols(), d.hidden2, d.hidden1, "W2");
    check_shape(b2.rows(), 1, d.hidden2, 1, "b2");
    check_shape(wg.rows(), wg.cols(), 4 * d.cell, d.hidden2 + d.cell, "Wg");
    check_shape(bg.rows(), 1, 4 * d.cell, 1, "bg");
    check_shape(wh.rows(), wh.cols(), d.actions, d.cell, "Wh");
    check_shape(bh.rows(), 1, d.actions, 1, "bh");
}

void RecurrentQWeights::bind(std::size_t observation_size) const {
    validate();
    if (dims.input != observation_size)
        throw DimensionMismatch("weights expect input width " + std::to_string(dims.input) +
                                " but the environment produces " + std::to_string(observation_size));
}

RecurrentQWeights decode_weights(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) throw TruncatedPayload("container shorter than its magic");
    if (!std::equal(kWeightsMagic.begin(), kWeightsMagic.end(), bytes.begin(),
                    [](char c, std::uint8_t b) { return static_cast<std::uint8_t>(c) == b; }))
        throw BadMagic("weight container magic is not MAIQ");
    Reader r(bytes);
    r.u32("magic");
    const std::uint32_t version = r.u32("version");
    if (version != kWeightsVersion)
        throw VersionUnsupported("weight container version " + std::to_string(version) + " is not supported");
    NetworkDims d;
    d.input = r.u32("header");
    d.hidden1 = r.u32("header");
    d.hidden2 = r.u32("header");
    d.cell = r.u32("header");
    d.actions = r.u32("header");
    if (d.input == 0 || d.hidden1 == 0 || d.hidden2 == 0 || d.cell == 0 || d.actions == 0)
        throw DimensionMismatch("weight container declares a zero dimension");

    // Check the declared size before allocating anything.
    const std::uint64_t floats = std::uint64_t{d.hidden1} * d.input + d.hidden1 + std::uint64_t{d.hidden2} * d.hidden1 +
                                 d.hidden2 + 4ull * d.cell * (d.hidden2 + d.cell) + 4ull * d.cell +
                                 std::uint64_t{d.actions} * d.cell + d.actions;
    const std::uint64_t need = r.position() + 4 * floats;
    if (bytes.size() < need) throw TruncatedPayload("weight payload shorter than its header declares");
    if (bytes.size() > need) throw DimensionMismatch("weight payload longer than its header declares");

    RecurrentQWeights w = RecurrentQWeights::zeros(d);
    r.fill(w.w1, "W1");
    r.fill(w.b1, "b1");
    r.fill(w.w2, "W2");
    r.fill(w.b2, "b2");
    r.fill(w.wg, "Wg");
    r.fill(w.bg, "bg");
    r.fill(w.wh, "Wh");
    r.fill(w.bh, "bh");
    return w;
}

std::vector<std::uint8_t> encode_weights(const RecurrentQWeights& w) {
    w.validate();
    std::vector<std::uint8_t> out(kWeightsMagic.begin(), kWeightsMagic.end());
    put_u32(out, kWeightsVersion);
    put_u32(out, w.dims.input);
    put_u32(out, w.dims.hidden1);
    put_u32(out, w.dims.hidden2);
    put_u32(out, w.dims.cell);
    put_u32(out, w.dims.actions);
    put_tensor(out, w.w1);
    put_tensor(out, w.b1);
    put_tensor(out, w.w2);
    put_tensor(out, w.b2);
    put_tensor(out, w.wg);
    put_tensor(out, w.bg);
    put_tensor(out, w.wh);
    put_tensor(out, w.bh);
    return out;
}

RecurrentQWeights load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_weights(bytes);
}

void save_weights(const RecurrentQWeights& weights, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_weights(weights);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace orbinspect::policy
