#pragma once

#include "evidex/embedding_vector.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <memory>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

namespace evidex {

struct VectorKey {
    std::string doc_id;
    int ordinal = 0;

    auto operator<=>(const VectorKey&) const = default;
};

struct VectorEntry {
    VectorKey key;
    EmbeddingVector vector;
};

struct HnswParams {
    std::size_t M = 16;
    std::size_t ef_construction = 200;
    std::size_t ef_search = 100;
    std::uint64_t seed = 42;

    /// Base layer keeps up to 2·M links (doubled-degree convention).
    std::size_t max_degree(int layer) const noexcept { return layer == 0 ? 2 * M : M; }
    double level_factor() const noexcept;
};

struct KnnResult {
    VectorKey key;
    double cosine = 0.0;

    bool operator==(const KnnResult&) const = default;
};

/// Graph-level facts used by invariant checks.
struct GraphReport {
    std::size_t nodes = 0;
    std::size_t reachable = 0;   // from the entry point, over all layers
    std::size_t degree_violations = 0;
    std::size_t dangling_links = 0;
    int top_layer = -1;
};

/// HNSW over unit vectors with distance 1 − dot. Level sampling uses a
/// seeded mt19937_64 so graphs are reproducible; there is no deletion.
class VectorIndex {
public:
    static constexpr int kFormatVersion = 1;

    explicit VectorIndex(HnswParams params = {});

    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    const HnswParams& params() const noexcept { return params_; }

    /// Throws DuplicateSegment or InvalidVector.
    void insert_vector(const VectorEntry& entry);
    /// Inserts all entries under one exclusive lock so readers see all or none.
    void insert_batch(const std::vector<VectorEntry>& entries);

    std::vector<KnnResult> knn_search(const EmbeddingVector& query, std::size_t k, std::size_t ef) const;
    std::vector<KnnResult> knn_search(const EmbeddingVector& query, std::size_t k) const {
        return knn_search(query, k, params_.ef_search);
    }
    std::vector<KnnResult> exact_knn(const EmbeddingVector& query, std::size_t k) const;

    std::size_t size() const;
    bool contains(const VectorKey& key) const;
    std::optional<EmbeddingVector> vector_of(const VectorKey& key) const;
    GraphReport inspect() const;

    void save(const std::filesystem::path& dir) const;
    static std::unique_ptr<VectorIndex> load(const std::filesystem::path& dir);
    nlohmann::json manifest() const;

private:
    struct Node {
        VectorKey key;
        int level = 0;
        std::vector<std::vector<std::uint32_t>> links;  // per layer
    };
    struct Candidate {
        double distance;
        std::uint32_t id;
        auto operator<=>(const Candidate&) const = default;
    };

    void insert_locked(const VectorEntry& entry);
    int sample_level();
    double distance(std::span<const float> q, std::uint32_t id) const noexcept;
    std::span<const float> vec(std::uint32_t id) const noexcept;
    std::vector<Candidate> search_layer(std::span<const float> q, const std::vector<Candidate>& entry,
                                        std::size_t ef, int layer) const;
    std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates, std::size_t m) const;
    static std::vector<KnnResult> rank(std::vector<KnnResult> results, std::size_t k);

    HnswParams params_;
    std::mt19937_64 rng_;
    mutable std::shared_mutex mutex_;
    std::vector<Node> nodes_;
    std::vector<float> data_;
    std::map<VectorKey, std::uint32_t> ids_;
    std::int64_t entry_ = -1;
    int top_layer_ = -1;
};

} // namespace evidex
