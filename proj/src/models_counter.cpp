#include "pvpbal/models/counter.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include "pvpbal/rng.hpp"

namespace pvpbal::models {

namespace {

double sqdist(const Real* a, const Real* b, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        const double t = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += t * t;
    }
    return acc;
}

}  // namespace

Codebook::Codebook(int entries, int dim) : m_(entries), d_(dim) {
    if (entries < 1) throw SizeError("codebook needs at least one entry");
    e_.assign(static_cast<std::size_t>(entries) * dim, Real(0));
}

void Codebook::init_uniform(Rng& rng, double bound) {
    for (auto& v : e_) v = static_cast<Real>(rng.next_range(-bound, bound));
}

std::vector<Real> Codebook::mean_entry() const {
    std::vector<Real> mean(d_, Real(0));
    std::vector<double> acc(d_, 0.0);
    for (int k = 0; k < m_; ++k) {
        const Real* row = entry(k);
        for (int i = 0; i < d_; ++i) acc[i] += row[i];
    }
    for (int i = 0; i < d_; ++i) mean[i] = static_cast<Real>(acc[i] / m_);
    return mean;
}

int Codebook::quantize(const Real* z) const {
    int best = 0;
    double best_d = sqdist(z, entry(0), d_);
    for (int k = 1; k < m_; ++k) {
        const double dk = sqdist(z, entry(k), d_);
        if (dk < best_d) {  // strict: ties keep the lowest index
            best_d = dk;
            best = k;
        }
    }
    return best;
}

CounterModel::CounterModel(int input_dim, const CounterConfig& config) : config_(config) {
    using nn::Activation;
    if (config.table_size < 1) throw SizeError("table_size must be >= 1");
    const int d = config.embedding_dim;
    encoder_ = nn::DenseNet<Real>({{input_dim, kEncoderHidden, Activation::tanh},
                                   {kEncoderHidden, kEncoderHidden, Activation::tanh},
                                   {kEncoderHidden, d, Activation::identity}});
    decoder_ = nn::DenseNet<Real>({{2 * d, kDecoderHidden, Activation::tanh},
                                   {kDecoderHidden, 1, Activation::tanh}});
    codebook_ = Codebook(config.table_size, d);
}

std::vector<Real> CounterModel::encode(const data::Features& comp) const {
    nn::Tensor2<Real> x;
    x.resize(1, encoder_.input_dim());
    std::memcpy(x.row(0), comp.data(), sizeof(float) * comp.size());
    typename nn::DenseNet<Real>::Cache cache;
    const auto& out = encoder_.forward(x, cache);
    return std::vector<Real>(out.row(0), out.row(0) + config_.embedding_dim);
}

int CounterModel::category(const data::Features& comp) const {
    return codebook_.quantize(encode(comp).data());
}

std::vector<int> CounterModel::categories(const std::vector<data::Features>& comps) const {
    nn::Tensor2<Real> x;
    x.resize(static_cast<int>(comps.size()), encoder_.input_dim());
    for (std::size_t i = 0; i < comps.size(); ++i)
        std::memcpy(x.row(static_cast<int>(i)), comps[i].data(),
                    sizeof(float) * comps[i].size());
    typename nn::DenseNet<Real>::Cache cache;
    const auto& z = encoder_.forward(x, cache);
    std::vector<int> cats(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i)
        cats[i] = codebook_.quantize(z.row(static_cast<int>(i)));
    return cats;
}

double CounterModel::residual_decode(const Real* zq_a, const Real* zq_b) const {
    const int d = config_.embedding_dim;
    nn::Tensor2<Real> x;
    x.resize(2, 2 * d);
    std::memcpy(x.row(0), zq_a, sizeof(Real) * d);
    std::memcpy(x.row(0) + d, zq_b, sizeof(Real) * d);
    std::memcpy(x.row(1), zq_b, sizeof(Real) * d);
    std::memcpy(x.row(1) + d, zq_a, sizeof(Real) * d);
    typename nn::DenseNet<Real>::Cache cache;
    const auto& y = decoder_.forward(x, cache);
    return 0.5 * (static_cast<double>(y.row(0)[0]) - static_cast<double>(y.row(1)[0]));
}

void CounterModel::save(std::ostream& os) const {
    os.write("PVPBMDL4", 8);
    const std::int32_t f[2] = {config_.table_size, config_.embedding_dim};
    os.write(reinterpret_cast<const char*>(f), 8);
    const double betas[2] = {config_.beta_n, config_.beta_m};
    os.write(reinterpret_cast<const char*>(betas), 16);
    encoder_.save(os);
    decoder_.save(os);
    os.write(reinterpret_cast<const char*>(codebook_.values().data()),
             sizeof(Real) * codebook_.values().size());
}

CounterModel CounterModel::load(std::istream& is) {
    char tag[8];
    is.read(tag, 8);
    if (!is || std::memcmp(tag, "PVPBMDL4", 8) != 0)
        throw ParseError("bad counter model tag");
    std::int32_t f[2];
    is.read(reinterpret_cast<char*>(f), 8);
    double betas[2];
    is.read(reinterpret_cast<char*>(betas), 16);
    CounterModel model;
    model.config_ = CounterConfig{f[0], betas[0], betas[1], f[1]};
    model.encoder_ = nn::DenseNet<Real>::load(is);
    model.decoder_ = nn::DenseNet<Real>::load(is);
    model.codebook_ = Codebook(f[0], f[1]);
    is.read(reinterpret_cast<char*>(model.codebook_.values().data()),
            sizeof(Real) * model.codebook_.values().size());
    if (!is) throw ParseError("truncated counter model file");
    return model;
}

double residual_target(const data::MatchRecord& record, const RatingModel& rating) {
    return record.outcome - rating.bt_predict(record.comp_a.features, record.comp_b.features);
}

int MaterializedCounterTable::utilized() const {
    int used = 0;
    for (int c : selection_counts) used += c > 0;
    return used;
}

CounterModel train_counter(const RatingModel& rating, const data::Dataset& train,
                           const CounterConfig& config, std::uint64_t seed,
                           const TrainProtocol& protocol) {
    if (rating.input_dim() != train.schema().dimension())
        throw SchemaMismatchError("rating model and dataset disagree on encoding width");
    CounterModel model(train.schema().dimension(), config);
    Rng root(seed);
    Rng init_rng = root.stream(0);
    model.encoder().init_weights(init_rng);
    model.decoder().init_weights(init_rng);
    Rng cb_rng = root.stream(2);
    model.codebook().init_uniform(cb_rng);

    const auto& comps = train.comps();
    const auto& matches = train.matches();
    const int dim = train.schema().dimension();
    const int d = config.embedding_dim;
    const int m_entries = config.table_size;

    // The rating model is frozen; its per-match predictions are constants of
    // the run. Residual targets of swapped records are the negations.
    const std::vector<double> comp_rating = rating.ratings(comps);
    std::vector<float> resid(matches.size());
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const auto& m = matches[i];
        resid[i] = static_cast<float>(m.outcome - bt_win_prob(comp_rating[m.a],
                                                              comp_rating[m.b]));
    }

    const auto schedule = protocol.schedule();
    nn::AdamState<Real> adam_enc(protocol.adam);
    nn::AdamState<Real> adam_dec(protocol.adam);
    nn::AdamState<Real> adam_cb(protocol.adam);

    std::vector<std::uint32_t> order(matches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng train_rng = root.stream(1);

    const int bs = protocol.batch_size;
    nn::Tensor2<Real> x, dec_in, dec_dy, g_zq, g_ze;
    typename nn::DenseNet<Real>::Cache enc_cache, dec_cache;
    nn::Tensor2<Real> dec_dx;
    std::vector<std::uint32_t> sa(bs), sb(bs);
    std::vector<float> target(bs);
    std::vector<int> slot_code;
    std::vector<int> slot_sides;
    std::vector<std::uint32_t> slot_of(comps.size());
    std::vector<std::uint64_t> stamp(comps.size(), 0);
    std::uint64_t batch_no = 0;
    std::vector<Real> cb_grad(static_cast<std::size_t>(m_entries) * d);

    for (int epoch = 0; epoch < protocol.epochs; ++epoch) {
        const Real lr = static_cast<Real>(schedule.rate(epoch));
        train_rng.shuffle(order);
        for (std::size_t begin = 0; begin < matches.size(); begin += bs) {
            const int nb = static_cast<int>(std::min<std::size_t>(bs, matches.size() - begin));
            ++batch_no;
            int nslots = 0;
            x.resize(2 * nb, dim);
            auto slot_for = [&](std::uint32_t comp) {
                if (stamp[comp] == batch_no) return slot_of[comp];
                stamp[comp] = batch_no;
                const auto s = static_cast<std::uint32_t>(nslots++);
                slot_of[comp] = s;
                std::memcpy(x.row(static_cast<int>(s)), comps[comp].data(),
                            sizeof(float) * dim);
                return s;
            };
            for (int i = 0; i < nb; ++i) {
                const auto idx = order[begin + i];
                const auto& m = matches[idx];
                const bool coin = train_rng.next_coin();
                sa[i] = slot_for(coin ? m.b : m.a);
                sb[i] = slot_for(coin ? m.a : m.b);
                target[i] = coin ? -resid[idx] : resid[idx];
            }
            x.rows = nslots;

            // encoder + vector quantization
            const auto& z = model.encoder().forward(x, enc_cache);
            slot_code.assign(nslots, 0);
            slot_sides.assign(nslots, 0);
            for (int s = 0; s < nslots; ++s) slot_code[s] = model.codebook().quantize(z.row(s));
            for (int i = 0; i < nb; ++i) {
                ++slot_sides[sa[i]];
                ++slot_sides[sb[i]];
            }

            // residual decoder on quantized codes, both argument orders
            dec_in.resize(2 * nb, 2 * d);
            for (int i = 0; i < nb; ++i) {
                const Real* ea = model.codebook().entry(slot_code[sa[i]]);
                const Real* eb = model.codebook().entry(slot_code[sb[i]]);
                std::memcpy(dec_in.row(2 * i), ea, sizeof(Real) * d);
                std::memcpy(dec_in.row(2 * i) + d, eb, sizeof(Real) * d);
                std::memcpy(dec_in.row(2 * i + 1), eb, sizeof(Real) * d);
                std::memcpy(dec_in.row(2 * i + 1) + d, ea, sizeof(Real) * d);
            }
            const auto& dec_out = model.decoder().forward(dec_in, dec_cache);

            dec_dy.resize(2 * nb, 1);
            for (int i = 0; i < nb; ++i) {
                const double x1 = dec_out.row(2 * i)[0];
                const double x2 = dec_out.row(2 * i + 1)[0];
                const double pred = 0.5 * (x1 - x2);
                const double dldc = 2.0 * (pred - target[i]) / nb;
                dec_dy.row(2 * i)[0] = static_cast<Real>(0.5 * dldc);
                dec_dy.row(2 * i + 1)[0] = static_cast<Real>(-0.5 * dldc);
            }
            model.decoder().backward(dec_cache, dec_dy, &dec_dx);

            // straight-through: the gradient that reached each quantized code
            // is copied to the encoder output that produced it
            g_zq.resize(nslots, d);
            for (int i = 0; i < nb; ++i) {
                kernels::axpy(g_zq.row(static_cast<int>(sa[i])), Real(1), dec_dx.row(2 * i), d);
                kernels::axpy(g_zq.row(static_cast<int>(sa[i])), Real(1),
                              dec_dx.row(2 * i + 1) + d, d);
                kernels::axpy(g_zq.row(static_cast<int>(sb[i])), Real(1),
                              dec_dx.row(2 * i) + d, d);
                kernels::axpy(g_zq.row(static_cast<int>(sb[i])), Real(1), dec_dx.row(2 * i + 1),
                              d);
            }

            // encoder-side pull toward the selected codes, weight beta_n
            g_ze = g_zq;
            const double bn = model.config().beta_n;
            for (int s = 0; s < nslots; ++s) {
                const Real* e = model.codebook().entry(slot_code[s]);
                const double wgt = bn * slot_sides[s] / nb;
                for (int j = 0; j < d; ++j)
                    g_ze.row(s)[j] += static_cast<Real>(wgt * (z.row(s)[j] - e[j]));
            }
            model.encoder().backward(enc_cache, g_ze, nullptr);

            // codebook: selected-code pull toward z_e plus the mean-loss pull
            // shared by every entry (dead codes included)
            std::fill(cb_grad.begin(), cb_grad.end(), Real(0));
            std::vector<double> side_sum(d, 0.0);
            for (int s = 0; s < nslots; ++s) {
                const int k = slot_code[s];
                const double wgt = static_cast<double>(slot_sides[s]) / nb;
                const Real* e = model.codebook().entry(k);
                Real* gk = cb_grad.data() + static_cast<std::size_t>(k) * d;
                for (int j = 0; j < d; ++j) {
                    gk[j] += static_cast<Real>(wgt * (e[j] - z.row(s)[j]));
                    side_sum[j] += slot_sides[s] * static_cast<double>(z.row(s)[j]);
                }
            }
            const double bm = model.config().beta_m;
            if (bm != 0.0) {
                const auto mean = model.codebook().mean_entry();
                for (int j = 0; j < d; ++j) {
                    // sum over sides of (mean - z_e), spread over all M rows
                    const double pull =
                        bm * (2.0 * mean[j] - side_sum[j] / nb) / m_entries;
                    for (int k = 0; k < m_entries; ++k)
                        cb_grad[static_cast<std::size_t>(k) * d + j] += static_cast<Real>(pull);
                }
            }

            adam_dec.step(model.decoder().param_blocks(), lr);
            model.decoder().sync_transposed();
            adam_enc.step(model.encoder().param_blocks(), lr);
            model.encoder().sync_transposed();
            std::vector<nn::ParamBlock<Real>> cb_block{
                {model.codebook().values().data(), cb_grad.data(), cb_grad.size()}};
            adam_cb.step(cb_block, lr);
        }
    }
    return model;
}

MaterializedCounterTable materialize(const CounterModel& model,
                                     const std::vector<data::Features>& comps) {
    const int m = model.config().table_size;
    MaterializedCounterTable table;
    table.size = m;
    table.residuals.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
        for (int l = k + 1; l < m; ++l) {
            const double r =
                model.residual_decode(model.codebook().entry(k), model.codebook().entry(l));
            table.residuals[static_cast<std::size_t>(k) * m + l] = r;
            table.residuals[static_cast<std::size_t>(l) * m + k] = -r;
        }
    }
    table.selection_counts.assign(m, 0);
    if (!comps.empty()) {
        for (int cat : model.categories(comps)) ++table.selection_counts[cat];
    }
    return table;
}

int utilized_m(const CounterModel& model, const std::vector<data::Features>& comps) {
    std::vector<bool> used(model.config().table_size, false);
    for (int cat : model.categories(comps)) used[cat] = true;
    int count = 0;
    for (bool u : used) count += u;
    return count;
}

double nct_predict_raw(double rating_a, double rating_b, int cat_a, int cat_b,
                       const MaterializedCounterTable& table) {
    // Same canonicalization idea as bt_win_prob: evaluate one orientation and
    // complement the other so the pair sums to exactly 1.
    const bool canonical =
        rating_a < rating_b || (rating_a == rating_b && cat_a <= cat_b);
    if (canonical) {
        const double p = rating_a / (rating_a + rating_b);
        return p + table.at(cat_a, cat_b);
    }
    const double p = rating_b / (rating_b + rating_a);
    return 1.0 - (p + table.at(cat_b, cat_a));
}

double nct_predict_clamped(double rating_a, double rating_b, int cat_a, int cat_b,
                           const MaterializedCounterTable& table) {
    return std::clamp(nct_predict_raw(rating_a, rating_b, cat_a, cat_b, table), 0.0, 1.0);
}

}  // namespace pvpbal::models
