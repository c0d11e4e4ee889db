#pragma once

#include <cmath>
#include <vector>

#include "pvpbal/common.hpp"
#include "pvpbal/kernels/kernels.hpp"
#include "pvpbal/nn/net.hpp"

namespace pvpbal::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Moment accumulators for one set of parameter blocks. Layout is bound to
// the block list on first use and asserted afterwards.
template <typename T>
class AdamState {
  public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    // One update over all blocks; zeroes gradients afterwards. Throws
    // NonFiniteError before touching parameters if any gradient is NaN/Inf.
    void step(std::vector<ParamBlock<T>> blocks, T lr) {
        bind(blocks);
        for (const auto& blk : blocks) {
            if (!kernels::all_finite(blk.grads, blk.size))
                throw NonFiniteError("non-finite gradient in Adam step");
        }
        ++step_;
        const double b1 = cfg_.beta1, b2 = cfg_.beta2;
        const T bias1 = static_cast<T>(1.0 / (1.0 - std::pow(b1, static_cast<double>(step_))));
        const T bias2 = static_cast<T>(1.0 / (1.0 - std::pow(b2, static_cast<double>(step_))));
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            auto& blk = blocks[i];
            kernels::adam_update(blk.values, m_[i].data(), v_[i].data(), blk.grads,
                                 static_cast<int>(blk.size), lr, static_cast<T>(b1),
                                 static_cast<T>(b2), static_cast<T>(cfg_.eps), bias1, bias2);
            std::fill(blk.grads, blk.grads + blk.size, T(0));
        }
    }

  private:
    void bind(const std::vector<ParamBlock<T>>& blocks) {
        if (m_.empty()) {
            for (const auto& blk : blocks) {
                m_.emplace_back(blk.size, T(0));
                v_.emplace_back(blk.size, T(0));
            }
            return;
        }
        if (m_.size() != blocks.size()) throw DimensionError("Adam state shape mismatch");
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (m_[i].size() != blocks[i].size)
                throw DimensionError("Adam state shape mismatch");
        }
    }

    AdamConfig cfg_;
    std::int64_t step_ = 0;
    std::vector<std::vector<T>> m_;
    std::vector<std::vector<T>> v_;
};

// Paper protocol: linear decay to zero across the training run.
struct LrSchedule {
    double initial = 0.00025;
    int total_epochs = 100;

    double rate(int epoch) const {
        const double r = initial * (1.0 - static_cast<double>(epoch) / total_epochs);
        return r > 0.0 ? r : 0.0;
    }
};

}  // namespace pvpbal::nn
