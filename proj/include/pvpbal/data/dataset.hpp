#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pvpbal/common.hpp"

namespace pvpbal::data {

using Features = std::vector<float>;

struct SegmentSpec {
    enum class Kind { binary, one_hot };
    Kind kind;
    int size;
};

// Declares the encoding layout of one game: a sequence of binary and one-hot
// segments. Built-ins cover the synthetic games; CSV ingestion accepts a
// schema file in the same key=value form the CLI config uses.
class Schema {
  public:
    Schema() = default;
    Schema(std::string id, std::vector<SegmentSpec> segments);

    const std::string& id() const { return id_; }
    int dimension() const { return dim_; }
    const std::vector<SegmentSpec>& segments() const { return segments_; }

    // Enforces the encoding invariants: declared dimension, entries in
    // {0,1}, one-hot segments with exactly one set entry.
    void validate(const Features& features) const;

    static Schema builtin(const std::string& name);
    static Schema parse_file(const std::string& path);

  private:
    std::string id_;
    std::vector<SegmentSpec> segments_;
    int dim_ = 0;
};

struct CompositionEncoding {
    Features features;
    std::string schema_id;
};

// Win value of comp_a: 0 loss, 0.5 tie, 1 win.
struct MatchRecord {
    CompositionEncoding comp_a;
    CompositionEncoding comp_b;
    double outcome;
};

MatchRecord swap_augment(const MatchRecord& record, bool coin);

// Compact match storage: compositions are interned once per dataset and
// matches reference them by index. Immutable after construction; fold splits
// share the composition table.
class Dataset {
  public:
    struct Match {
        std::uint32_t a;
        std::uint32_t b;
        float outcome;
    };

    class Builder {
      public:
        Builder(Schema schema, std::string source);
        void add(const Features& comp_a, const Features& comp_b, double outcome);
        // Index-level variant for generators that already intern comps.
        std::uint32_t intern(const Features& comp);
        void add_indexed(std::uint32_t a, std::uint32_t b, double outcome);
        Dataset build();

      private:
        std::shared_ptr<Schema> schema_;
        std::string source_;
        std::shared_ptr<std::vector<Features>> comps_;
        std::unordered_map<std::string, std::uint32_t> index_;
        std::vector<Match> matches_;
    };

    const Schema& schema() const { return *schema_; }
    const std::string& schema_id() const { return schema_->id(); }
    const std::string& source() const { return source_; }
    std::size_t size() const { return matches_.size(); }
    const std::vector<Match>& matches() const { return matches_; }
    // Distinct compositions observed in the parent dataset (shared across
    // fold splits).
    const std::vector<Features>& comps() const { return *comps_; }
    std::size_t comp_count() const { return comps_->size(); }

    MatchRecord record(std::size_t i) const;

    Dataset with_matches(std::vector<Match> matches, std::string source) const;

  private:
    friend class Builder;
    Dataset(std::shared_ptr<Schema> schema, std::string source,
            std::shared_ptr<std::vector<Features>> comps, std::vector<Match> matches);

    std::shared_ptr<Schema> schema_;
    std::string source_;
    std::shared_ptr<std::vector<Features>> comps_;
    std::vector<Match> matches_;
};

struct FoldSplit {
    Dataset train;
    Dataset test;
    int fold_index;
};

// Seeded shuffle, then contiguous slices; each match lands in exactly one
// test fold. Throws SizeError when the dataset has fewer matches than folds.
std::vector<FoldSplit> kfold_split(const Dataset& dataset, int k, std::uint64_t seed);

// CSV row layout: comp_a features, comp_b features, outcome.
Dataset load_csv(const std::string& path, const Schema& schema, bool has_header = false);
void save_csv(const Dataset& dataset, const std::string& path, bool with_header = false);

}  // namespace pvpbal::data
