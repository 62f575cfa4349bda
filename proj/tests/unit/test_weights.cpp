#include <doctest.h>

#include "orbinspect/errors.hpp"
#include "orbinspect/weights.hpp"

#include <cstring>
#include <filesystem>

using namespace orbinspect;
using namespace orbinspect::policy;

namespace {

const NetworkDims kSmall{7, 5, 4, 3, 6};

std::size_t float_count(const NetworkDims& d) {
    return std::size_t{d.hidden1} * d.input + d.hidden1 + std::size_t{d.hidden2} * d.hidden1 + d.hidden2 +
           4ull * d.cell * (d.hidden2 + d.cell) + 4ull * d.cell + std::size_t{d.actions} * d.cell + d.actions;
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return std::uint32_t(b[off]) | std::uint32_t(b[off + 1]) << 8 | std::uint32_t(b[off + 2]) << 16 |
           std::uint32_t(b[off + 3]) << 24;
}

float read_f32(const std::vector<std::uint8_t>& b, std::size_t off) {
    const std::uint32_t u = read_u32(b, off);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

}  // namespace

TEST_CASE("container layout") {
    const RecurrentQWeights w = RecurrentQWeights::random(kSmall, 3);
    const auto bytes = encode_weights(w);
    REQUIRE(bytes.size() == 28 + 4 * float_count(kSmall));
    CHECK(std::memcmp(bytes.data(), "MAIQ", 4) == 0);
    CHECK(read_u32(bytes, 4) == 1);
    CHECK(read_u32(bytes, 8) == 7);
    CHECK(read_u32(bytes, 12) == 5);
    CHECK(read_u32(bytes, 16) == 4);
    CHECK(read_u32(bytes, 20) == 3);
    CHECK(read_u32(bytes, 24) == 6);
    // row-major: W1(0, 1) follows W1(0, 0)
    CHECK(read_f32(bytes, 28) == w.w1(0, 0));
    CHECK(read_f32(bytes, 32) == w.w1(0, 1));
    CHECK(read_f32(bytes, 28 + 4 * 7) == w.w1(1, 0));
    CHECK(read_f32(bytes, bytes.size() - 4) == w.bh[5]);
}

TEST_CASE("encode and decode round-trip byte for byte") {
    const RecurrentQWeights w = RecurrentQWeights::random(kSmall, 11);
    const auto bytes = encode_weights(w);
    const RecurrentQWeights back = decode_weights(bytes);
    CHECK(back.dims == kSmall);
    CHECK(back.w1 == w.w1);
    CHECK(back.wg == w.wg);
    CHECK(back.bh == w.bh);
    CHECK(encode_weights(back) == bytes);

    const auto path = std::filesystem::temp_directory_path() / "orbinspect_weights_roundtrip.maiq";
    save_weights(w, path);
    CHECK(encode_weights(load_weights(path)) == bytes);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_weights(path), IoError);
}

TEST_CASE("malformed containers") {
    const auto good = encode_weights(RecurrentQWeights::random(kSmall, 1));

    CHECK_THROWS_AS(decode_weights({}), TruncatedPayload);
    CHECK_THROWS_AS(decode_weights({'M', 'A'}), TruncatedPayload);
    CHECK_THROWS_AS(decode_weights(std::vector<std::uint8_t>(good.begin(), good.begin() + 20)), TruncatedPayload);
    CHECK_THROWS_AS(decode_weights(std::vector<std::uint8_t>(good.begin(), good.end() - 1)), TruncatedPayload);

    auto magic = good;
    magic[0] = 'X';
    CHECK_THROWS_AS(decode_weights(magic), BadMagic);

    auto version = good;
    version[4] = 2;
    CHECK_THROWS_AS(decode_weights(version), VersionUnsupported);

    auto zero = good;
    std::fill(zero.begin() + 8, zero.begin() + 12, 0);
    CHECK_THROWS_AS(decode_weights(zero), DimensionMismatch);

    auto longer = good;
    longer.insert(longer.end(), {0, 0, 0, 0});
    CHECK_THROWS_AS(decode_weights(longer), DimensionMismatch);
}

TEST_CASE("shape checks") {
    RecurrentQWeights w = RecurrentQWeights::zeros(kSmall);
    CHECK_NOTHROW(w.validate());
    CHECK_NOTHROW(w.bind(7));
    CHECK_THROWS_AS(w.bind(8), DimensionMismatch);
    w.wg.resize(12, 6);
    CHECK_THROWS_AS(w.validate(), DimensionMismatch);
    CHECK_THROWS_AS(encode_weights(w), DimensionMismatch);

    const RecurrentQWeights z = RecurrentQWeights::zeros(NetworkDims{426});
    CHECK(z.w1.rows() == 64);
    CHECK(z.w1.cols() == 426);
    CHECK(z.wg.rows() == 256);
    CHECK(z.wg.cols() == 128);
    CHECK(z.wh.rows() == 20);
    CHECK(RecurrentQWeights::random(kSmall, 5).w2 == RecurrentQWeights::random(kSmall, 5).w2);
    CHECK_FALSE(RecurrentQWeights::random(kSmall, 5).w2 == RecurrentQWeights::random(kSmall, 6).w2);
}
