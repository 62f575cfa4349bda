#pragma once

// Recurrent Q-network parameters and their on-disk container.
//
// Container layout, all integers and floats little-endian:
//   bytes 0-3   magic "MAIQ"
//   u32         version (1)
//   u32 x 5     input, hidden1, hidden2, cell, actions
//   f32 tensors, row-major, in this order:
//     W1 [hidden1 x input]     b1 [hidden1]
//     W2 [hidden2 x hidden1]   b2 [hidden2]
//     Wg [4*cell x (hidden2 + cell)]  bg [4*cell]
//     Wh [actions x cell]      bh [actions]
// Gate rows of Wg/bg are stacked input, forget, candidate, output; the
// columns of Wg multiply [x; h_prev].

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orbinspect::policy {

inline constexpr std::array<char, 4> kWeightsMagic{'M', 'A', 'I', 'Q'};
inline constexpr std::uint32_t kWeightsVersion = 1;

struct NetworkDims {
    std::uint32_t input = 0;
    std::uint32_t hidden1 = 64;
    std::uint32_t hidden2 = 64;
    std::uint32_t cell = 64;
    std::uint32_t actions = 20;

    friend bool operator==(const NetworkDims&, const NetworkDims&) = default;
};

using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorF = Eigen::VectorXf;

struct RecurrentQWeights {
    NetworkDims dims;
    MatrixF w1;
    VectorF b1;
    MatrixF w2;
    VectorF b2;
    MatrixF wg;
    VectorF bg;
    MatrixF wh;
    VectorF bh;

    /// Zero-filled tensors of the right shapes.
    static RecurrentQWeights zeros(const NetworkDims& dims);
    /// Small uniform weights from a seeded generator.
    static RecurrentQWeights random(const NetworkDims& dims, std::uint64_t seed, float scale = 0.2f);

    /// Throws DimensionMismatch when a tensor disagrees with `dims`.
    void validate() const;
    /// Throws DimensionMismatch unless the input width equals `observation_size`.
    void bind(std::size_t observation_size) const;
};

RecurrentQWeights decode_weights(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_weights(const RecurrentQWeights& weights);

RecurrentQWeights load_weights(const std::filesystem::path& path);
void save_weights(const RecurrentQWeights& weights, const std::filesystem::path& path);

}  // namespace orbinspect::policy
