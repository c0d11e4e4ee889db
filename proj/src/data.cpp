#include "pvpbal/data/dataset.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pvpbal/rng.hpp"

namespace pvpbal::data {

namespace {

std::string feature_key(const Features& f) {
    return std::string(reinterpret_cast<const char*>(f.data()), f.size() * sizeof(float));
}

bool is_zero_or_one(float v) { return v == 0.0f || v == 1.0f; }

}  // namespace

Schema::Schema(std::string id, std::vector<SegmentSpec> segments)
    : id_(std::move(id)), segments_(std::move(segments)) {
    for (const auto& seg : segments_) {
        if (seg.size <= 0) throw SchemaError("schema segment with non-positive size");
        dim_ += seg.size;
    }
    if (dim_ == 0) throw SchemaError("schema '" + id_ + "' declares no features");
}

void Schema::validate(const Features& features) const {
    if (static_cast<int>(features.size()) != dim_)
        throw SchemaError("encoding has " + std::to_string(features.size()) +
                          " entries, schema '" + id_ + "' declares " + std::to_string(dim_));
    int offset = 0;
    for (const auto& seg : segments_) {
        int ones = 0;
        for (int i = 0; i < seg.size; ++i) {
            const float v = features[offset + i];
            if (!is_zero_or_one(v))
                throw SchemaError("entry " + std::to_string(offset + i) +
                                  " is not 0 or 1 in schema '" + id_ + "'");
            ones += v == 1.0f;
        }
        if (seg.kind == SegmentSpec::Kind::one_hot && ones != 1)
            throw SchemaError("one-hot segment at offset " + std::to_string(offset) +
                              " has " + std::to_string(ones) + " set entries");
        offset += seg.size;
    }
}

Schema Schema::builtin(const std::string& name) {
    using Kind = SegmentSpec::Kind;
    if (name == "simple") return Schema("simple", {{Kind::binary, 20}});
    if (name == "rps") return Schema("rps", {{Kind::one_hot, 3}});
    if (name == "advanced")
        return Schema("advanced", {{Kind::binary, 20}, {Kind::one_hot, 3}});
    throw SchemaError("unknown builtin schema '" + name + "'");
}

Schema Schema::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file '" + path + "'");
    std::string id;
    std::vector<SegmentSpec> segments;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "schema_id") {
            id = value;
        } else if (key == "segments") {
            std::stringstream ss(value);
            std::string part;
            while (std::getline(ss, part, ',')) {
                part = trim(part);
                const auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw SchemaError("bad segment spec '" + part + "' in " + path);
                const std::string kind = part.substr(0, colon);
                const int size = std::stoi(part.substr(colon + 1));
                if (kind == "binary")
                    segments.push_back({SegmentSpec::Kind::binary, size});
                else if (kind == "onehot" || kind == "one_hot")
                    segments.push_back({SegmentSpec::Kind::one_hot, size});
                else
                    throw SchemaError("unknown segment kind '" + kind + "' in " + path);
            }
        }
    }
    if (id.empty()) throw SchemaError("schema file '" + path + "' is missing schema_id");
    return Schema(id, std::move(segments));
}

MatchRecord swap_augment(const MatchRecord& record, bool coin) {
    if (!coin) return record;
    return MatchRecord{record.comp_b, record.comp_a, 1.0 - record.outcome};
}

Dataset::Builder::Builder(Schema schema, std::string source)
    : schema_(std::make_shared<Schema>(std::move(schema))),
      source_(std::move(source)),
      comps_(std::make_shared<std::vector<Features>>()) {}

std::uint32_t Dataset::Builder::intern(const Features& comp) {
    const auto [it, inserted] =
        index_.try_emplace(feature_key(comp), static_cast<std::uint32_t>(comps_->size()));
    if (inserted) comps_->push_back(comp);
    return it->second;
}

void Dataset::Builder::add(const Features& comp_a, const Features& comp_b, double outcome) {
    schema_->validate(comp_a);
    schema_->validate(comp_b);
    if (outcome != 0.0 && outcome != 0.5 && outcome != 1.0)
        throw ParseError("outcome must be 0, 0.5 or 1");
    add_indexed(intern(comp_a), intern(comp_b), outcome);
}

void Dataset::Builder::add_indexed(std::uint32_t a, std::uint32_t b, double outcome) {
    matches_.push_back({a, b, static_cast<float>(outcome)});
}

Dataset Dataset::Builder::build() {
    if (matches_.empty()) throw SchemaError("dataset is empty");
    return Dataset(schema_, std::move(source_), comps_, std::move(matches_));
}

Dataset::Dataset(std::shared_ptr<Schema> schema, std::string source,
                 std::shared_ptr<std::vector<Features>> comps, std::vector<Match> matches)
    : schema_(std::move(schema)),
      source_(std::move(source)),
      comps_(std::move(comps)),
      matches_(std::move(matches)) {}

MatchRecord Dataset::record(std::size_t i) const {
    const Match& m = matches_.at(i);
    return MatchRecord{{(*comps_)[m.a], schema_->id()},
                       {(*comps_)[m.b], schema_->id()},
                       static_cast<double>(m.outcome)};
}

Dataset Dataset::with_matches(std::vector<Match> matches, std::string source) const {
    if (matches.empty()) throw SchemaError("dataset is empty");
    return Dataset(schema_, std::move(source), comps_, std::move(matches));
}

std::vector<FoldSplit> kfold_split(const Dataset& dataset, int k, std::uint64_t seed) {
    if (k < 2) throw SizeError("kfold_split needs k >= 2");
    const std::size_t n = dataset.size();
    if (n < static_cast<std::size_t>(k))
        throw SizeError("dataset of size " + std::to_string(n) + " cannot be split into " +
                        std::to_string(k) + " folds");
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::vector<FoldSplit> splits;
    std::size_t begin = 0;
    for (int fold = 0; fold < k; ++fold) {
        const std::size_t len = base + (static_cast<std::size_t>(fold) < extra ? 1 : 0);
        std::vector<Dataset::Match> test_matches;
        std::vector<Dataset::Match> train_matches;
        test_matches.reserve(len);
        train_matches.reserve(n - len);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& m = dataset.matches()[order[i]];
            if (i >= begin && i < begin + len)
                test_matches.push_back(m);
            else
                train_matches.push_back(m);
        }
        const std::string tag = "fold" + std::to_string(fold);
        splits.push_back({dataset.with_matches(std::move(train_matches), tag + "/train"),
                          dataset.with_matches(std::move(test_matches), tag + "/test"), fold});
        begin += len;
    }
    return splits;
}

Dataset load_csv(const std::string& path, const Schema& schema, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Dataset::Builder builder(schema, path);
    const int dim = schema.dimension();
    const std::size_t want = static_cast<std::size_t>(dim) * 2 + 1;
    std::string line;
    std::size_t row = 0;
    std::size_t parsed = 0;
    std::vector<double> fields;
    Features fa(dim), fb(dim);
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && has_header) continue;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fields.clear();
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            const char* stop = p;
            while (stop < end && *stop != ',') ++stop;
            double value = 0.0;
            const char* vend = stop;
            while (vend > p && (vend[-1] == ' ' || vend[-1] == '\t' || vend[-1] == '\r')) --vend;
            const auto res = std::from_chars(p, vend, value);
            if (res.ec != std::errc() || res.ptr != vend)
                throw ParseError("row " + std::to_string(row) + ": bad number '" +
                                 std::string(p, vend) + "'");
            fields.push_back(value);
            p = stop < end ? stop + 1 : end;
        }
        if (fields.size() != want)
            throw SchemaError("row " + std::to_string(row) + ": expected " +
                              std::to_string(want) + " columns, got " +
                              std::to_string(fields.size()));
        for (int i = 0; i < dim; ++i) {
            fa[i] = static_cast<float>(fields[i]);
            fb[i] = static_cast<float>(fields[dim + i]);
        }
        const double outcome = fields[want - 1];
        try {
            builder.add(fa, fb, outcome);
        } catch (const Error& e) {
            throw ParseError("row " + std::to_string(row) + ": " + e.what());
        }
        ++parsed;
    }
    if (parsed == 0) throw SchemaError("'" + path + "' contains no match rows");
    return builder.build();
}

void save_csv(const Dataset& dataset, const std::string& path, bool with_header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    const int dim = dataset.schema().dimension();
    if (with_header) {
        for (int i = 0; i < dim; ++i) out << "a" << i << ",";
        for (int i = 0; i < dim; ++i) out << "b" << i << ",";
        out << "outcome\n";
    }
    for (const auto& m : dataset.matches()) {
        const auto& a = dataset.comps()[m.a];
        const auto& b = dataset.comps()[m.b];
        for (int i = 0; i < dim; ++i) out << a[i] << ",";
        for (int i = 0; i < dim; ++i) out << b[i] << ",";
        const double w = m.outcome;
        out << (w == 0.5 ? "0.5" : (w == 1.0 ? "1" : "0")) << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pvpbal::data
