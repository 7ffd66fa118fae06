#include "evidex/vector_index.hpp"

#include "detail/io.hpp"
#include "evidex/embedding.hpp"
#include "evidex/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>

namespace evidex {

double HnswParams::level_factor() const noexcept { return 1.0 / std::log(static_cast<double>(M)); }

VectorIndex::VectorIndex(HnswParams params) : params_(params), rng_(params.seed) {
    if (params_.M < 2) throw Error(ErrorCode::InvalidArgument, "HNSW requires M >= 2");
    if (params_.ef_construction < params_.M) throw Error(ErrorCode::InvalidArgument, "HNSW requires ef_construction >= M");
}

std::span<const float> VectorIndex::vec(std::uint32_t id) const noexcept {
    return {data_.data() + static_cast<std::size_t>(id) * kEmbeddingDim, kEmbeddingDim};
}

double VectorIndex::distance(std::span<const float> q, std::uint32_t id) const noexcept {
    auto v = vec(id);
    double dot = 0.0;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) dot += static_cast<double>(q[i]) * static_cast<double>(v[i]);
    return 1.0 - std::clamp(dot, -1.0, 1.0);
}

int VectorIndex::sample_level() {
    // 53-bit uniform in (0, 1]; avoids implementation-defined distributions.
    const double u = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    return static_cast<int>(std::floor(-std::log(u) * params_.level_factor()));
}

std::vector<VectorIndex::Candidate> VectorIndex::search_layer(std::span<const float> q,
                                                              const std::vector<Candidate>& entry, std::size_t ef,
                                                              int layer) const {
    std::vector<char> visited(nodes_.size(), 0);
    std::priority_queue<Candidate> results;  // max-heap: furthest on top
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
    for (const auto& c : entry) {
        visited[c.id] = 1;
        results.push(c);
        frontier.push(c);
    }
    while (results.size() > ef) results.pop();

    while (!frontier.empty()) {
        auto current = frontier.top();
        if (results.size() >= ef && results.top() < current) break;
        frontier.pop();
        for (auto n : nodes_[current.id].links[static_cast<std::size_t>(layer)]) {
            if (visited[n]) continue;
            visited[n] = 1;
            Candidate c{distance(q, n), n};
            if (results.size() < ef || c < results.top()) {
                frontier.push(c);
                results.push(c);
                if (results.size() > ef) results.pop();
            }
        }
    }
    std::vector<Candidate> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> VectorIndex::select_neighbors(std::vector<Candidate> candidates, std::size_t m) const {
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::uint32_t> selected;
    std::vector<std::uint32_t> pruned;
    for (const auto& c : candidates) {
        if (selected.size() >= m) break;
        bool keep = true;
        for (auto s : selected) {
            if (distance(vec(c.id), s) < c.distance) {
                keep = false;
                break;
            }
        }
        (keep ? selected : pruned).push_back(c.id);
    }
    // Fill remaining slots with the closest pruned candidates.
    for (auto id : pruned) {
        if (selected.size() >= m) break;
        selected.push_back(id);
    }
    return selected;
}

void VectorIndex::insert_locked(const VectorEntry& entry) {
    if (ids_.count(entry.key)) {
        throw Error(ErrorCode::DuplicateSegment,
                    "segment (" + entry.key.doc_id + ", " + std::to_string(entry.key.ordinal) + ") already indexed");
    }
    auto values = entry.vector.values();
    if (values.size() != kEmbeddingDim || !is_unit_norm(values)) {
        throw Error(ErrorCode::InvalidVector, "vector for '" + entry.key.doc_id + "' is not a 384-d unit vector");
    }

    const auto id = static_cast<std::uint32_t>(nodes_.size());
    const int level = sample_level();
    nodes_.push_back({entry.key, level, std::vector<std::vector<std::uint32_t>>(static_cast<std::size_t>(level) + 1)});
    data_.insert(data_.end(), values.begin(), values.end());
    ids_.emplace(entry.key, id);

    if (entry_ < 0) {
        entry_ = id;
        top_layer_ = level;
        return;
    }

    auto q = vec(id);
    std::vector<Candidate> eps{{distance(q, static_cast<std::uint32_t>(entry_)), static_cast<std::uint32_t>(entry_)}};
    for (int layer = top_layer_; layer > level; --layer) {
        eps = search_layer(q, eps, 1, layer);
    }
    for (int layer = std::min(level, top_layer_); layer >= 0; --layer) {
        auto candidates = search_layer(q, eps, params_.ef_construction, layer);
        auto neighbors = select_neighbors(candidates, params_.M);
        nodes_[id].links[static_cast<std::size_t>(layer)] = neighbors;
        const auto cap = params_.max_degree(layer);
        for (auto n : neighbors) {
            auto& links = nodes_[n].links[static_cast<std::size_t>(layer)];
            links.push_back(id);
            if (links.size() > cap) {
                std::vector<Candidate> pool;
                pool.reserve(links.size());
                for (auto l : links) pool.push_back({distance(vec(n), l), l});
                links = select_neighbors(std::move(pool), cap);
            }
        }
        eps = std::move(candidates);
    }
    if (level > top_layer_) {
        top_layer_ = level;
        entry_ = id;
    }
}

void VectorIndex::insert_vector(const VectorEntry& entry) {
    std::unique_lock lock(mutex_);
    insert_locked(entry);
}

void VectorIndex::insert_batch(const std::vector<VectorEntry>& entries) {
    std::unique_lock lock(mutex_);
    std::set<VectorKey> batch;
    for (const auto& e : entries) {
        if (ids_.count(e.key) || !batch.insert(e.key).second) {
            throw Error(ErrorCode::DuplicateSegment,
                        "segment (" + e.key.doc_id + ", " + std::to_string(e.key.ordinal) + ") already indexed");
        }
        if (!is_unit_norm(e.vector.values())) throw Error(ErrorCode::InvalidVector, "vector is not unit norm");
    }
    for (const auto& e : entries) insert_locked(e);
}

std::vector<KnnResult> VectorIndex::rank(std::vector<KnnResult> results, std::size_t k) {
    auto order = [](const KnnResult& a, const KnnResult& b) {
        return a.cosine != b.cosine ? a.cosine > b.cosine : a.key < b.key;
    };
    const auto limit = std::min(k, results.size());
    std::partial_sort(results.begin(), results.begin() + static_cast<std::ptrdiff_t>(limit), results.end(), order);
    results.resize(limit);
    return results;
}

std::vector<KnnResult> VectorIndex::knn_search(const EmbeddingVector& query, std::size_t k, std::size_t ef) const {
    std::shared_lock lock(mutex_);
    if (k == 0 || entry_ < 0) return {};
    auto q = query.values();
    std::vector<Candidate> eps{{distance(q, static_cast<std::uint32_t>(entry_)), static_cast<std::uint32_t>(entry_)}};
    for (int layer = top_layer_; layer > 0; --layer) eps = search_layer(q, eps, 1, layer);
    auto found = search_layer(q, eps, std::max(ef, k), 0);

    std::vector<KnnResult> results;
    results.reserve(found.size());
    for (const auto& c : found) results.push_back({nodes_[c.id].key, 1.0 - c.distance});
    return rank(std::move(results), k);
}

std::vector<KnnResult> VectorIndex::exact_knn(const EmbeddingVector& query, std::size_t k) const {
    std::shared_lock lock(mutex_);
    auto q = query.values();
    std::vector<KnnResult> results;
    results.reserve(nodes_.size());
    for (std::uint32_t id = 0; id < nodes_.size(); ++id) results.push_back({nodes_[id].key, 1.0 - distance(q, id)});
    return rank(std::move(results), k);
}

std::size_t VectorIndex::size() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
}

bool VectorIndex::contains(const VectorKey& key) const {
    std::shared_lock lock(mutex_);
    return ids_.count(key) > 0;
}

std::optional<EmbeddingVector> VectorIndex::vector_of(const VectorKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = ids_.find(key);
    if (it == ids_.end()) return std::nullopt;
    auto v = vec(it->second);
    return EmbeddingVector::from_unit(std::vector<float>(v.begin(), v.end()));
}

GraphReport VectorIndex::inspect() const {
    std::shared_lock lock(mutex_);
    GraphReport report;
    report.nodes = nodes_.size();
    report.top_layer = top_layer_;
    for (const auto& node : nodes_) {
        for (std::size_t layer = 0; layer < node.links.size(); ++layer) {
            if (node.links[layer].size() > params_.max_degree(static_cast<int>(layer))) ++report.degree_violations;
            for (auto n : node.links[layer]) {
                if (n >= nodes_.size() || nodes_[n].level < static_cast<int>(layer)) ++report.dangling_links;
            }
        }
    }
    if (entry_ >= 0) {
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(entry_)};
        seen[static_cast<std::size_t>(entry_)] = 1;
        while (!stack.empty()) {
            auto id = stack.back();
            stack.pop_back();
            ++report.reachable;
            for (const auto& layer : nodes_[id].links) {
                for (auto n : layer) {
                    if (n < nodes_.size() && !seen[n]) {
                        seen[n] = 1;
                        stack.push_back(n);
                    }
                }
            }
        }
    }
    return report;
}

nlohmann::json VectorIndex::manifest() const {
    std::shared_lock lock(mutex_);
    return {{"format_version", kFormatVersion},
            {"dim", kEmbeddingDim},
            {"count", nodes_.size()},
            {"params",
             {{"M", params_.M},
              {"ef_construction", params_.ef_construction},
              {"ef_search", params_.ef_search},
              {"seed", params_.seed}}}};
}

void VectorIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    detail::write_file_atomic(dir / "manifest.json", manifest().dump(2) + "\n");

    std::shared_lock lock(mutex_);
    std::string nodes;
    for (const auto& node : nodes_) {
        nodes += nlohmann::json{{"doc_id", node.key.doc_id}, {"ordinal", node.key.ordinal}, {"level", node.level},
                                {"links", node.links}}
                     .dump();
        nodes += '\n';
    }
    detail::write_file_atomic(dir / "nodes.jsonl", nodes);
    detail::write_file_atomic(dir / "graph.json",
                              nlohmann::json{{"entry_point", entry_}, {"top_layer", top_layer_}}.dump() + "\n");

    std::string bytes;
    bytes.reserve(data_.size() * 4);
    for (float f : data_) {
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    detail::write_file_atomic(dir / "vectors.f32", bytes);

    std::ostringstream rng_state;
    rng_state << rng_;
    detail::write_file_atomic(dir / "rng.state", rng_state.str());
}

std::unique_ptr<VectorIndex> VectorIndex::load(const std::filesystem::path& dir) {
    auto manifest = nlohmann::json::parse(detail::read_file(dir / "manifest.json"));
    if (manifest.value("format_version", 0) != kFormatVersion) {
        throw Error(ErrorCode::FormatMismatch, "vector index format " +
                                                   std::to_string(manifest.value("format_version", 0)) +
                                                   " does not match supported format " + std::to_string(kFormatVersion));
    }
    if (manifest.at("dim").get<std::size_t>() != kEmbeddingDim) {
        throw Error(ErrorCode::DimensionMismatch, "vector index dimension does not match 384");
    }
    const auto& p = manifest.at("params");
    HnswParams params{p.at("M").get<std::size_t>(), p.at("ef_construction").get<std::size_t>(),
                      p.at("ef_search").get<std::size_t>(), p.at("seed").get<std::uint64_t>()};
    auto index = std::make_unique<VectorIndex>(params);

    detail::for_each_line(dir / "nodes.jsonl", [&](const std::string& line) {
        auto j = nlohmann::json::parse(line);
        Node node{{j.at("doc_id").get<std::string>(), j.at("ordinal").get<int>()}, j.at("level").get<int>(),
                  j.at("links").get<std::vector<std::vector<std::uint32_t>>>()};
        index->ids_.emplace(node.key, static_cast<std::uint32_t>(index->nodes_.size()));
        index->nodes_.push_back(std::move(node));
    });
    auto bytes = detail::read_file(dir / "vectors.f32");
    if (bytes.size() != index->nodes_.size() * kEmbeddingDim * 4) {
        throw Error(ErrorCode::FormatMismatch, "vectors.f32 size does not match node count");
    }
    index->data_.resize(bytes.size() / 4);
    for (std::size_t i = 0; i < index->data_.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
        std::memcpy(&index->data_[i], &bits, sizeof bits);
    }
    auto graph = nlohmann::json::parse(detail::read_file(dir / "graph.json"));
    index->entry_ = graph.at("entry_point").get<std::int64_t>();
    index->top_layer_ = graph.at("top_layer").get<int>();
    std::istringstream rng_state(detail::read_file(dir / "rng.state"));
    rng_state >> index->rng_;
    if (index->nodes_.size() != manifest.at("count").get<std::size_t>()) {
        throw Error(ErrorCode::FormatMismatch, "vector index node count does not match manifest");
    }
    return index;
}

} // namespace evidex
