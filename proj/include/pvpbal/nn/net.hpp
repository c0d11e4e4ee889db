#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pvpbal/common.hpp"
#include "pvpbal/kernels/kernels.hpp"
#include "pvpbal/rng.hpp"

namespace pvpbal::nn {

enum class Activation : std::int32_t { identity = 0, tanh = 1, exp = 2 };

struct LayerSpec {
    int in;
    int out;
    Activation act;
};

// Exponential heads clamp their pre-activation so an untrained or diverging
// rating cannot overflow; the trained range never gets near the bound.
inline constexpr double kExpClamp = 30.0;

template <typename T>
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<T> v;

    void resize(int r, int c) {
        rows = r;
        cols = c;
        v.assign(static_cast<std::size_t>(r) * c, T(0));
    }
    void zero() { std::fill(v.begin(), v.end(), T(0)); }
    T* row(int i) { return v.data() + static_cast<std::size_t>(i) * cols; }
    const T* row(int i) const { return v.data() + static_cast<std::size_t>(i) * cols; }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }
};

template <typename T>
struct ParamBlock {
    T* values;
    T* grads;
    std::size_t size;
};

// Fixed-topology fully connected network with analytic gradients. One
// instance is mutated by exactly one trainer; forward is const and reentrant
// given a caller-owned cache.
template <typename T>
class DenseNet {
  public:
    DenseNet() = default;

    explicit DenseNet(std::vector<LayerSpec> specs) : specs_(std::move(specs)) {
        if (specs_.empty()) throw DimensionError("DenseNet needs at least one layer");
        layers_.resize(specs_.size());
        for (std::size_t l = 0; l < specs_.size(); ++l) {
            const auto& s = specs_[l];
            if (s.in <= 0 || s.out <= 0) throw DimensionError("non-positive layer dimension");
            if (l > 0 && specs_[l - 1].out != s.in)
                throw DimensionError("layer dimensions do not chain");
            auto& ly = layers_[l];
            const std::size_t wn = static_cast<std::size_t>(s.in) * s.out;
            ly.w.assign(wn, T(0));
            ly.wt.assign(wn, T(0));
            ly.b.assign(s.out, T(0));
            ly.gw.assign(wn, T(0));
            ly.gb.assign(s.out, T(0));
        }
    }

    int input_dim() const { return specs_.front().in; }
    int output_dim() const { return specs_.back().out; }
    const std::vector<LayerSpec>& specs() const { return specs_; }

    // Glorot-uniform weights, zero biases. Draw order is row-major per layer,
    // so a seed pins the full parameter vector.
    void init_weights(Rng& rng) {
        for (std::size_t l = 0; l < specs_.size(); ++l) {
            const auto& s = specs_[l];
            const double bound = std::sqrt(6.0 / (s.in + s.out));
            for (auto& w : layers_[l].w) w = static_cast<T>(rng.next_range(-bound, bound));
            std::fill(layers_[l].b.begin(), layers_[l].b.end(), T(0));
            sync_transposed(l);
        }
    }

    struct Cache {
        Tensor2<T> input;
        std::vector<Tensor2<T>> z;  // pre-activation per layer
        std::vector<Tensor2<T>> y;  // post-activation per layer
        Tensor2<T> scratch_a;       // backward workspaces
        Tensor2<T> scratch_b;
    };

    // x: rows x input_dim. Returns post-activation of the last layer (owned
    // by the cache).
    const Tensor2<T>& forward(const Tensor2<T>& x, Cache& cache) const {
        if (x.cols != input_dim()) throw DimensionError("input width mismatch");
        const int rows = x.rows;
        cache.input = x;
        cache.z.resize(layers_.size());
        cache.y.resize(layers_.size());
        const Tensor2<T>* cur = &cache.input;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& s = specs_[l];
            auto& z = cache.z[l];
            z.resize(rows, s.out);
            for (int i = 0; i < rows; ++i)
                std::memcpy(z.row(i), layers_[l].b.data(), sizeof(T) * s.out);
            kernels::gemm_acc(z.data(), cur->data(), layers_[l].wt.data(), rows, s.in, s.out);
            auto& y = cache.y[l];
            y.resize(rows, s.out);
            apply_activation(s.act, z, y);
            cur = &y;
        }
        return cache.y.back();
    }

    // dy: gradient wrt the last layer's output, rows matching the cached
    // forward. Accumulates into parameter gradients. If dx is non-null it
    // receives the gradient wrt the input block.
    void backward(const Cache& cache, const Tensor2<T>& dy, Tensor2<T>* dx) {
        const int rows = dy.rows;
        Tensor2<T>& wa = const_cast<Cache&>(cache).scratch_a;
        Tensor2<T>& wb = const_cast<Cache&>(cache).scratch_b;
        wa = dy;
        Tensor2<T>* dcur = &wa;
        for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
            const auto& s = specs_[l];
            // d(pre-activation)
            activation_backward(s.act, cache.z[l], cache.y[l], *dcur);
            // bias gradient
            for (int i = 0; i < rows; ++i)
                kernels::axpy(layers_[l].gb.data(), T(1), dcur->row(i), s.out);
            // weight gradient: gW[out][in] += dZ^T * X
            const Tensor2<T>& xprev = (l == 0) ? cache.input : cache.y[l - 1];
            kernels::gemm_tn_acc(layers_[l].gw.data(), dcur->data(), xprev.data(), rows, s.out,
                                 s.in);
            if (l == 0) {
                if (dx != nullptr) {
                    dx->resize(rows, s.in);
                    kernels::gemm_acc(dx->data(), dcur->data(), layers_[l].w.data(), rows, s.out,
                                      s.in);
                }
                break;
            }
            Tensor2<T>* dnext = (dcur == &wa) ? &wb : &wa;
            dnext->resize(rows, s.in);
            dnext->zero();
            kernels::gemm_acc(dnext->data(), dcur->data(), layers_[l].w.data(), rows, s.out,
                              s.in);
            dcur = dnext;
        }
    }

    std::vector<ParamBlock<T>> param_blocks() {
        std::vector<ParamBlock<T>> blocks;
        for (auto& ly : layers_) {
            blocks.push_back({ly.w.data(), ly.gw.data(), ly.w.size()});
            blocks.push_back({ly.b.data(), ly.gb.data(), ly.b.size()});
        }
        return blocks;
    }

    void zero_grads() {
        for (auto& ly : layers_) {
            std::fill(ly.gw.begin(), ly.gw.end(), T(0));
            std::fill(ly.gb.begin(), ly.gb.end(), T(0));
        }
    }

    // Call after any external mutation of the canonical weights.
    void sync_transposed() {
        for (std::size_t l = 0; l < layers_.size(); ++l) sync_transposed(l);
    }

    void save(std::ostream& os) const {
        const char magic[8] = {'P', 'V', 'P', 'B', 'N', 'E', 'T', '1'};
        os.write(magic, 8);
        const std::int32_t width = sizeof(T);
        const std::int32_t nl = static_cast<std::int32_t>(specs_.size());
        os.write(reinterpret_cast<const char*>(&width), 4);
        os.write(reinterpret_cast<const char*>(&nl), 4);
        for (const auto& s : specs_) {
            const std::int32_t f[3] = {s.in, s.out, static_cast<std::int32_t>(s.act)};
            os.write(reinterpret_cast<const char*>(f), 12);
        }
        for (const auto& ly : layers_) {
            os.write(reinterpret_cast<const char*>(ly.w.data()), sizeof(T) * ly.w.size());
            os.write(reinterpret_cast<const char*>(ly.b.data()), sizeof(T) * ly.b.size());
        }
    }

    static DenseNet load(std::istream& is) {
        char magic[8];
        is.read(magic, 8);
        if (!is || std::memcmp(magic, "PVPBNET1", 8) != 0)
            throw ParseError("bad network file header");
        std::int32_t width = 0, nl = 0;
        is.read(reinterpret_cast<char*>(&width), 4);
        is.read(reinterpret_cast<char*>(&nl), 4);
        if (width != sizeof(T)) throw ParseError("network scalar width mismatch");
        if (nl <= 0 || nl > 64) throw ParseError("bad layer count");
        std::vector<LayerSpec> specs;
        for (int l = 0; l < nl; ++l) {
            std::int32_t f[3];
            is.read(reinterpret_cast<char*>(f), 12);
            specs.push_back({f[0], f[1], static_cast<Activation>(f[2])});
        }
        DenseNet net(specs);
        for (auto& ly : net.layers_) {
            is.read(reinterpret_cast<char*>(ly.w.data()), sizeof(T) * ly.w.size());
            is.read(reinterpret_cast<char*>(ly.b.data()), sizeof(T) * ly.b.size());
        }
        if (!is) throw ParseError("truncated network file");
        net.sync_transposed();
        return net;
    }

    bool operator==(const DenseNet& other) const {
        if (specs_.size() != other.specs_.size()) return false;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            if (std::memcmp(&specs_[l], &other.specs_[l], sizeof(LayerSpec)) != 0) return false;
            if (layers_[l].w != other.layers_[l].w) return false;
            if (layers_[l].b != other.layers_[l].b) return false;
        }
        return true;
    }

  private:
    struct Layer {
        std::vector<T> w;   // out x in
        std::vector<T> wt;  // in x out, kept in sync for the forward pass
        std::vector<T> b;
        std::vector<T> gw;
        std::vector<T> gb;
    };

    void sync_transposed(std::size_t l) {
        const auto& s = specs_[l];
        auto& ly = layers_[l];
        for (int o = 0; o < s.out; ++o)
            for (int k = 0; k < s.in; ++k)
                ly.wt[static_cast<std::size_t>(k) * s.out + o] =
                    ly.w[static_cast<std::size_t>(o) * s.in + k];
    }

    static void apply_activation(Activation act, const Tensor2<T>& z, Tensor2<T>& y) {
        const int n = z.rows * z.cols;
        switch (act) {
            case Activation::identity:
                std::memcpy(y.data(), z.data(), sizeof(T) * n);
                break;
            case Activation::tanh:
                kernels::tanh_map(y.data(), z.data(), n);
                break;
            case Activation::exp:
                for (int i = 0; i < n; ++i) {
                    const T zc = std::min(T(kExpClamp), std::max(T(-kExpClamp), z.data()[i]));
                    y.data()[i] = std::exp(zc);
                }
                break;
        }
    }

    static void activation_backward(Activation act, const Tensor2<T>& z, const Tensor2<T>& y,
                                    Tensor2<T>& d) {
        const int n = d.rows * d.cols;
        switch (act) {
            case Activation::identity:
                break;
            case Activation::tanh:
                kernels::tanh_backward(d.data(), d.data(), y.data(), n);
                break;
            case Activation::exp:
                for (int i = 0; i < n; ++i) {
                    const bool clamped = std::fabs(double(z.data()[i])) > kExpClamp;
                    d.data()[i] = clamped ? T(0) : d.data()[i] * y.data()[i];
                }
                break;
        }
    }

    std::vector<LayerSpec> specs_;
    std::vector<Layer> layers_;
};

}  // namespace pvpbal::nn
