#include "pvpbal/models/rating.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "pvpbal/rng.hpp"

namespace pvpbal::models {

namespace {

void write_tag(std::ostream& os, const char (&tag)[9]) { os.write(tag, 8); }

void expect_tag(std::istream& is, const char (&tag)[9]) {
    char buf[8];
    is.read(buf, 8);
    if (!is || std::memcmp(buf, tag, 8) != 0) throw ParseError("bad model file tag");
}

// Maps comp index -> dense slot index within one batch, reset in O(1).
class SlotMap {
  public:
    explicit SlotMap(std::size_t comps) : slot_(comps, 0), stamp_(comps, 0) {}

    void next_batch() {
        ++cur_;
        count_ = 0;
    }

    // Returns the slot for this comp, appending its features to x when first
    // seen in the batch.
    std::uint32_t get(std::uint32_t comp, const std::vector<data::Features>& feats,
                      nn::Tensor2<Real>& x) {
        if (stamp_[comp] == cur_) return slot_[comp];
        stamp_[comp] = cur_;
        const std::uint32_t s = count_++;
        slot_[comp] = s;
        const auto& f = feats[comp];
        std::memcpy(x.row(static_cast<int>(s)), f.data(), sizeof(float) * f.size());
        return s;
    }

    std::uint32_t count() const { return count_; }

  private:
    std::vector<std::uint32_t> slot_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t cur_ = 0;
    std::uint32_t count_ = 0;
};

struct BatchStream {
    const data::Dataset& ds;
    std::vector<std::uint32_t> order;
    Rng rng;

    BatchStream(const data::Dataset& dataset, Rng train_rng)
        : ds(dataset), order(dataset.size()), rng(train_rng) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    }

    void start_epoch() { rng.shuffle(order); }
};

}  // namespace

double bt_win_prob(double ra, double rb) {
    // Evaluate the smaller-rating side and complement the other so the pair
    // of predictions sums to exactly 1.
    if (ra <= rb) return ra / (ra + rb);
    return 1.0 - rb / (rb + ra);
}

RatingModel::RatingModel(RatingVariant variant, int input_dim) : variant_(variant) {
    using nn::Activation;
    if (variant == RatingVariant::bt_linear) {
        net_ = nn::DenseNet<Real>({{input_dim, 1, Activation::exp}});
    } else {
        net_ = nn::DenseNet<Real>({{input_dim, kRatingHidden, Activation::tanh},
                                   {kRatingHidden, kRatingHidden, Activation::tanh},
                                   {kRatingHidden, 1, Activation::exp}});
    }
}

double RatingModel::rating(const data::Features& comp) const {
    nn::Tensor2<Real> x;
    x.resize(1, net_.input_dim());
    if (static_cast<int>(comp.size()) != net_.input_dim())
        throw DimensionError("composition width mismatch");
    std::memcpy(x.row(0), comp.data(), sizeof(float) * comp.size());
    typename nn::DenseNet<Real>::Cache cache;
    return static_cast<double>(net_.forward(x, cache).row(0)[0]);
}

std::vector<double> RatingModel::ratings(const std::vector<data::Features>& comps) const {
    nn::Tensor2<Real> x;
    x.resize(static_cast<int>(comps.size()), net_.input_dim());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (static_cast<int>(comps[i].size()) != net_.input_dim())
            throw DimensionError("composition width mismatch");
        std::memcpy(x.row(static_cast<int>(i)), comps[i].data(),
                    sizeof(float) * comps[i].size());
    }
    typename nn::DenseNet<Real>::Cache cache;
    const auto& out = net_.forward(x, cache);
    std::vector<double> r(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i)
        r[i] = static_cast<double>(out.row(static_cast<int>(i))[0]);
    return r;
}

double RatingModel::bt_predict(const data::Features& a, const data::Features& b) const {
    return bt_win_prob(rating(a), rating(b));
}

void RatingModel::save(std::ostream& os) const {
    write_tag(os, "PVPBMDL1");
    const std::int32_t kind = variant_ == RatingVariant::bt_linear ? 0 : 1;
    os.write(reinterpret_cast<const char*>(&kind), 4);
    net_.save(os);
}

RatingModel RatingModel::load(std::istream& is) {
    expect_tag(is, "PVPBMDL1");
    std::int32_t kind = 0;
    is.read(reinterpret_cast<char*>(&kind), 4);
    if (kind != 0 && kind != 1) throw ParseError("bad rating model kind");
    RatingModel model;
    model.variant_ = kind == 0 ? RatingVariant::bt_linear : RatingVariant::nrt;
    model.net_ = nn::DenseNet<Real>::load(is);
    return model;
}

WinValueModel::WinValueModel(int input_dim) {
    using nn::Activation;
    net_ = nn::DenseNet<Real>({{input_dim, kRatingHidden, Activation::tanh},
                               {kRatingHidden, kRatingHidden, Activation::tanh},
                               {kRatingHidden, 1, Activation::tanh}});
}

double WinValueModel::predict(const data::Features& comp) const {
    nn::Tensor2<Real> x;
    x.resize(1, net_.input_dim());
    std::memcpy(x.row(0), comp.data(), sizeof(float) * comp.size());
    typename nn::DenseNet<Real>::Cache cache;
    const double y = net_.forward(x, cache).row(0)[0];
    return 0.5 * (y + 1.0);
}

std::vector<double> WinValueModel::predict_many(const std::vector<data::Features>& comps) const {
    nn::Tensor2<Real> x;
    x.resize(static_cast<int>(comps.size()), net_.input_dim());
    for (std::size_t i = 0; i < comps.size(); ++i)
        std::memcpy(x.row(static_cast<int>(i)), comps[i].data(),
                    sizeof(float) * comps[i].size());
    typename nn::DenseNet<Real>::Cache cache;
    const auto& out = net_.forward(x, cache);
    std::vector<double> r(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i)
        r[i] = 0.5 * (static_cast<double>(out.row(static_cast<int>(i))[0]) + 1.0);
    return r;
}

void WinValueModel::save(std::ostream& os) const {
    write_tag(os, "PVPBMDL2");
    net_.save(os);
}

WinValueModel WinValueModel::load(std::istream& is) {
    expect_tag(is, "PVPBMDL2");
    WinValueModel model;
    model.net_ = nn::DenseNet<Real>::load(is);
    return model;
}

PairWinModel::PairWinModel(int input_dim) {
    using nn::Activation;
    net_ = nn::DenseNet<Real>({{2 * input_dim, kPairWinHidden, Activation::tanh},
                               {kPairWinHidden, kPairWinHidden, Activation::tanh},
                               {kPairWinHidden, 1, Activation::tanh}});
}

double PairWinModel::predict(const data::Features& a, const data::Features& b) const {
    nn::Tensor2<Real> x;
    x.resize(1, net_.input_dim());
    std::memcpy(x.row(0), a.data(), sizeof(float) * a.size());
    std::memcpy(x.row(0) + a.size(), b.data(), sizeof(float) * b.size());
    typename nn::DenseNet<Real>::Cache cache;
    const double y = net_.forward(x, cache).row(0)[0];
    return 0.5 * (y + 1.0);
}

std::vector<double> PairWinModel::predict_rows(const nn::Tensor2<Real>& rows) const {
    typename nn::DenseNet<Real>::Cache cache;
    const auto& out = net_.forward(rows, cache);
    std::vector<double> r(rows.rows);
    for (int i = 0; i < rows.rows; ++i)
        r[i] = 0.5 * (static_cast<double>(out.row(i)[0]) + 1.0);
    return r;
}

void PairWinModel::save(std::ostream& os) const {
    write_tag(os, "PVPBMDL3");
    net_.save(os);
}

PairWinModel PairWinModel::load(std::istream& is) {
    expect_tag(is, "PVPBMDL3");
    PairWinModel model;
    model.net_ = nn::DenseNet<Real>::load(is);
    return model;
}

RatingModel train_rating(RatingVariant variant, const data::Dataset& train, std::uint64_t seed,
                         const TrainProtocol& protocol) {
    RatingModel model(variant, train.schema().dimension());
    Rng root(seed);
    Rng init_rng = root.stream(0);
    model.net().init_weights(init_rng);

    const auto& comps = train.comps();
    const auto& matches = train.matches();
    const auto schedule = protocol.schedule();
    nn::AdamState<Real> adam(protocol.adam);
    BatchStream stream(train, root.stream(1));
    SlotMap slots(comps.size());

    nn::Tensor2<Real> x, dy;
    typename nn::DenseNet<Real>::Cache cache;
    const int bs = protocol.batch_size;
    std::vector<std::uint32_t> sa(bs), sb(bs);
    std::vector<float> w(bs);

    for (int epoch = 0; epoch < protocol.epochs; ++epoch) {
        const Real lr = static_cast<Real>(schedule.rate(epoch));
        stream.start_epoch();
        for (std::size_t begin = 0; begin < matches.size(); begin += bs) {
            const int nb = static_cast<int>(std::min<std::size_t>(bs, matches.size() - begin));
            slots.next_batch();
            x.resize(2 * nb, train.schema().dimension());
            for (int i = 0; i < nb; ++i) {
                const auto& m = matches[stream.order[begin + i]];
                const bool coin = stream.rng.next_coin();
                const std::uint32_t ca = coin ? m.b : m.a;
                const std::uint32_t cb = coin ? m.a : m.b;
                sa[i] = slots.get(ca, comps, x);
                sb[i] = slots.get(cb, comps, x);
                w[i] = coin ? 1.0f - m.outcome : m.outcome;
            }
            const int nslots = static_cast<int>(slots.count());
            x.rows = nslots;  // shrink to the deduplicated block
            const auto& out = model.net().forward(x, cache);
            dy.resize(nslots, 1);
            for (int i = 0; i < nb; ++i) {
                const double ra = out.row(static_cast<int>(sa[i]))[0];
                const double rb = out.row(static_cast<int>(sb[i]))[0];
                const double s = ra + rb;
                const double p = ra / s;
                const double dldp = 2.0 * (p - w[i]) / nb;
                dy.row(static_cast<int>(sa[i]))[0] += static_cast<Real>(dldp * rb / (s * s));
                dy.row(static_cast<int>(sb[i]))[0] -= static_cast<Real>(dldp * ra / (s * s));
            }
            model.net().backward(cache, dy, nullptr);
            adam.step(model.net().param_blocks(), lr);
            model.net().sync_transposed();
        }
    }
    return model;
}

WinValueModel train_winvalue(const data::Dataset& train, std::uint64_t seed,
                             const TrainProtocol& protocol) {
    WinValueModel model(train.schema().dimension());
    Rng root(seed);
    Rng init_rng = root.stream(0);
    model.net().init_weights(init_rng);

    const auto& comps = train.comps();
    const auto& matches = train.matches();
    const auto schedule = protocol.schedule();
    nn::AdamState<Real> adam(protocol.adam);
    BatchStream stream(train, root.stream(1));
    SlotMap slots(comps.size());

    nn::Tensor2<Real> x, dy;
    typename nn::DenseNet<Real>::Cache cache;
    const int bs = protocol.batch_size;
    std::vector<std::uint32_t> sc(bs);
    std::vector<float> w(bs);

    for (int epoch = 0; epoch < protocol.epochs; ++epoch) {
        const Real lr = static_cast<Real>(schedule.rate(epoch));
        stream.start_epoch();
        for (std::size_t begin = 0; begin < matches.size(); begin += bs) {
            const int nb = static_cast<int>(std::min<std::size_t>(bs, matches.size() - begin));
            slots.next_batch();
            x.resize(nb, train.schema().dimension());
            for (int i = 0; i < nb; ++i) {
                const auto& m = matches[stream.order[begin + i]];
                const bool coin = stream.rng.next_coin();
                sc[i] = slots.get(coin ? m.b : m.a, comps, x);
                w[i] = coin ? 1.0f - m.outcome : m.outcome;
            }
            const int nslots = static_cast<int>(slots.count());
            x.rows = nslots;
            const auto& out = model.net().forward(x, cache);
            dy.resize(nslots, 1);
            for (int i = 0; i < nb; ++i) {
                const double q = 0.5 * (out.row(static_cast<int>(sc[i]))[0] + 1.0);
                dy.row(static_cast<int>(sc[i]))[0] +=
                    static_cast<Real>((q - w[i]) / nb);  // 2*(q-w)/nb * dq/dy(=0.5)
            }
            model.net().backward(cache, dy, nullptr);
            adam.step(model.net().param_blocks(), lr);
            model.net().sync_transposed();
        }
    }
    return model;
}

PairWinModel train_pairwin(const data::Dataset& train, std::uint64_t seed,
                           const TrainProtocol& protocol) {
    PairWinModel model(train.schema().dimension());
    Rng root(seed);
    Rng init_rng = root.stream(0);
    model.net().init_weights(init_rng);

    const auto& comps = train.comps();
    const auto& matches = train.matches();
    const int dim = train.schema().dimension();
    const auto schedule = protocol.schedule();
    nn::AdamState<Real> adam(protocol.adam);
    BatchStream stream(train, root.stream(1));

    nn::Tensor2<Real> x, dy;
    typename nn::DenseNet<Real>::Cache cache;
    const int bs = protocol.batch_size;
    std::vector<float> w(bs);

    for (int epoch = 0; epoch < protocol.epochs; ++epoch) {
        const Real lr = static_cast<Real>(schedule.rate(epoch));
        stream.start_epoch();
        for (std::size_t begin = 0; begin < matches.size(); begin += bs) {
            const int nb = static_cast<int>(std::min<std::size_t>(bs, matches.size() - begin));
            x.resize(nb, 2 * dim);
            for (int i = 0; i < nb; ++i) {
                const auto& m = matches[stream.order[begin + i]];
                const bool coin = stream.rng.next_coin();
                const auto& fa = comps[coin ? m.b : m.a];
                const auto& fb = comps[coin ? m.a : m.b];
                std::memcpy(x.row(i), fa.data(), sizeof(float) * dim);
                std::memcpy(x.row(i) + dim, fb.data(), sizeof(float) * dim);
                w[i] = coin ? 1.0f - m.outcome : m.outcome;
            }
            const auto& out = model.net().forward(x, cache);
            dy.resize(nb, 1);
            for (int i = 0; i < nb; ++i) {
                const double q = 0.5 * (out.row(i)[0] + 1.0);
                dy.row(i)[0] = static_cast<Real>((q - w[i]) / nb);
            }
            model.net().backward(cache, dy, nullptr);
            adam.step(model.net().param_blocks(), lr);
            model.net().sync_transposed();
        }
    }
    return model;
}

}  // namespace pvpbal::models
