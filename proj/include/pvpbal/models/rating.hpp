#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvpbal/data/dataset.hpp"
#include "pvpbal/models/protocol.hpp"
#include "pvpbal/nn/net.hpp"

namespace pvpbal::models {

enum class RatingVariant { bt_linear, nrt };

// Bradley-Terry win probability from two positive strengths. Canonicalized
// so bt_win_prob(ra, rb) + bt_win_prob(rb, ra) == 1 exactly.
double bt_win_prob(double ra, double rb);

// Strength table R(c) = e^{lambda(c)}: a network with an exponential head,
// linear in the features for the BT variant and two tanh layers deep for the
// non-linear rating table.
class RatingModel {
  public:
    RatingModel() = default;
    RatingModel(RatingVariant variant, int input_dim);

    RatingVariant variant() const { return variant_; }
    int input_dim() const { return net_.input_dim(); }

    double rating(const data::Features& comp) const;
    std::vector<double> ratings(const std::vector<data::Features>& comps) const;

    double bt_predict(const data::Features& a, const data::Features& b) const;

    nn::DenseNet<Real>& net() { return net_; }
    const nn::DenseNet<Real>& net() const { return net_; }

    void save(std::ostream& os) const;
    static RatingModel load(std::istream& is);

  private:
    RatingVariant variant_ = RatingVariant::nrt;
    nn::DenseNet<Real> net_;
};

// Single-composition win value regressor (tanh head mapped to [0,1]).
class WinValueModel {
  public:
    WinValueModel() = default;
    explicit WinValueModel(int input_dim);

    double predict(const data::Features& comp) const;
    std::vector<double> predict_many(const std::vector<data::Features>& comps) const;

    nn::DenseNet<Real>& net() { return net_; }
    void save(std::ostream& os) const;
    static WinValueModel load(std::istream& is);

  private:
    nn::DenseNet<Real> net_;
};

// Ordered-pair win value regressor on concatenated encodings.
class PairWinModel {
  public:
    PairWinModel() = default;
    explicit PairWinModel(int input_dim);

    int input_dim() const { return net_.input_dim() / 2; }
    double predict(const data::Features& a, const data::Features& b) const;
    // rows of already-concatenated pairs
    std::vector<double> predict_rows(const nn::Tensor2<Real>& rows) const;

    nn::DenseNet<Real>& net() { return net_; }
    void save(std::ostream& os) const;
    static PairWinModel load(std::istream& is);

  private:
    nn::DenseNet<Real> net_;
};

// Siamese MSE training of the Bradley-Terry objective, with per-epoch swap
// augmentation. Deterministic per seed.
RatingModel train_rating(RatingVariant variant, const data::Dataset& train, std::uint64_t seed,
                         const TrainProtocol& protocol = {});

WinValueModel train_winvalue(const data::Dataset& train, std::uint64_t seed,
                             const TrainProtocol& protocol = {});

PairWinModel train_pairwin(const data::Dataset& train, std::uint64_t seed,
                           const TrainProtocol& protocol = {});

}  // namespace pvpbal::models
