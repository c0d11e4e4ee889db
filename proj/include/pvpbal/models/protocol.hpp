#pragma once

#include "pvpbal/nn/adam.hpp"

namespace pvpbal::models {

// Training scalar for all model networks. Gradient-check tests instantiate
// the same templates with double.
using Real = float;

// Paper protocol defaults: 100 epochs, Adam, linear lr decay 0.00025 -> 0.
struct TrainProtocol {
    int epochs = 100;
    double lr_initial = 0.00025;
    int batch_size = 256;
    nn::AdamConfig adam;

    nn::LrSchedule schedule() const { return {lr_initial, epochs}; }
};

// Hidden widths. Two tanh layers suffice for the synthetic games'
// nonlinearity; 64 keeps the full evaluation grid inside the runtime budget
// on a single core. PairWin gets more capacity since reproducing its
// train/test overfit gap depends on partially memorizing pairs.
inline constexpr int kRatingHidden = 64;
inline constexpr int kPairWinHidden = 128;
inline constexpr int kEncoderHidden = 64;
inline constexpr int kDecoderHidden = 64;
inline constexpr int kEmbeddingDim = 8;

}  // namespace pvpbal::models
