#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pvpbal/data/dataset.hpp"
#include "pvpbal/models/rating.hpp"

namespace pvpbal::models {

struct CounterConfig {
    int table_size = 9;  // M
    double beta_n = 0.01;
    double beta_m = 0.25;
    int embedding_dim = kEmbeddingDim;
};

// M embedding vectors with nearest-neighbour lookup (ties break to the
// lowest index).
class Codebook {
  public:
    Codebook() = default;
    Codebook(int entries, int dim);

    int entries() const { return m_; }
    int dim() const { return d_; }
    const Real* entry(int k) const { return e_.data() + static_cast<std::size_t>(k) * d_; }
    Real* entry_mut(int k) { return e_.data() + static_cast<std::size_t>(k) * d_; }
    std::vector<Real>& values() { return e_; }
    const std::vector<Real>& values() const { return e_; }

    void init_uniform(Rng& rng, double bound = 0.1);

    // Mean embedding vector (the VQ Mean Loss anchor).
    std::vector<Real> mean_entry() const;

    int quantize(const Real* z) const;

  private:
    int m_ = 0;
    int d_ = 0;
    std::vector<Real> e_;
};

// Neural counter table: discrete category encoder (VQ over the codebook) and
// a Siamese residual decoder whose halved difference of the two pass orders
// makes every prediction antisymmetric by construction.
class CounterModel {
  public:
    CounterModel() = default;
    CounterModel(int input_dim, const CounterConfig& config);

    const CounterConfig& config() const { return config_; }
    int input_dim() const { return encoder_.input_dim(); }

    nn::DenseNet<Real>& encoder() { return encoder_; }
    const nn::DenseNet<Real>& encoder() const { return encoder_; }
    nn::DenseNet<Real>& decoder() { return decoder_; }
    const nn::DenseNet<Real>& decoder() const { return decoder_; }
    Codebook& codebook() { return codebook_; }
    const Codebook& codebook() const { return codebook_; }

    std::vector<Real> encode(const data::Features& comp) const;
    int category(const data::Features& comp) const;
    std::vector<int> categories(const std::vector<data::Features>& comps) const;

    // (x1 - x2) / 2 with shared decoder weights; exactly antisymmetric and
    // zero for equal codes.
    double residual_decode(const Real* zq_a, const Real* zq_b) const;

    void save(std::ostream& os) const;
    static CounterModel load(std::istream& is);

  private:
    CounterConfig config_;
    nn::DenseNet<Real> encoder_;
    nn::DenseNet<Real> decoder_;
    Codebook codebook_;
};

// M x M residual table plus the category assignment used to index it.
struct MaterializedCounterTable {
    int size = 0;                    // M
    std::vector<double> residuals;   // size x size, antisymmetric, zero diagonal
    std::vector<int> selection_counts;  // per category, over the comp set given

    double at(int k, int l) const { return residuals[static_cast<std::size_t>(k) * size + l]; }
    int utilized() const;
};

// Residual regression target of Eq-style two-stage learning: the gap between
// the observed outcome and the frozen rating model's prediction.
double residual_target(const data::MatchRecord& record, const RatingModel& rating);

CounterModel train_counter(const RatingModel& rating, const data::Dataset& train,
                           const CounterConfig& config, std::uint64_t seed,
                           const TrainProtocol& protocol = {});

// Decodes every category pair. selection_counts covers `comps` (pass the
// dataset's distinct compositions).
MaterializedCounterTable materialize(const CounterModel& model,
                                     const std::vector<data::Features>& comps);

int utilized_m(const CounterModel& model, const std::vector<data::Features>& comps);

// Unclamped combined win value; complement-exact:
// nct_predict_raw(a,b) + nct_predict_raw(b,a) == 1.
double nct_predict_raw(double rating_a, double rating_b, int cat_a, int cat_b,
                       const MaterializedCounterTable& table);

// Reporting boundary: clamped to [0,1].
double nct_predict_clamped(double rating_a, double rating_b, int cat_a, int cat_b,
                           const MaterializedCounterTable& table);

}  // namespace pvpbal::models
