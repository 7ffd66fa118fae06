#pragma once

#include "evidex/embedding.hpp"
#include "evidex/model.hpp"
#include "evidex/schema.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixtures {

class TempDir {
public:
    explicit TempDir(const std::string& tag = "evidex") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Document on the Enron schema with hashed segment vectors and spans laid
// out back to back.
inline evidex::Document make_doc(const std::string& id, const std::vector<std::string>& segments,
                                 std::map<std::string, evidex::FieldValue> fields = {}) {
    evidex::Document d;
    d.doc_id = id;
    d.fields = std::move(fields);
    d.fields["message_id"] = id;
    std::string body;
    std::size_t offset = 0;
    int ordinal = 0;
    for (const auto& text : segments) {
        evidex::Segment s;
        s.ordinal = ordinal++;
        s.text = text;
        s.vector = evidex::embed_hashing(text);
        s.span = {offset, offset + text.size()};
        offset += text.size() + 1;
        body += (body.empty() ? "" : " ") + text;
        d.segments.push_back(std::move(s));
    }
    if (!d.fields.contains("body")) d.fields["body"] = body;
    return d;
}

inline std::vector<std::string> make_vocab(std::size_t n, const std::string& prefix = "w") {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

// Zipf-ish draw so document frequencies spread out.
inline std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& vocab, int min_words,
                               int max_words) {
    std::uniform_int_distribution<int> len(min_words, max_words);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int n = len(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(std::pow(u(rng), 2.0) * static_cast<double>(vocab.size()));
        if (idx >= vocab.size()) idx = vocab.size() - 1;
        out += (i ? " " : "") + vocab[idx];
    }
    return out;
}

inline std::vector<float> random_unit(std::mt19937_64& rng, std::size_t dim = evidex::kEmbeddingDim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> raw(dim);
    for (auto& x : raw) x = g(rng);
    auto v = evidex::EmbeddingVector::normalize(std::span<const double>(raw));
    return {v.values().begin(), v.values().end()};
}

} // namespace fixtures
