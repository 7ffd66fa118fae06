#pragma once

#include "evidex/fusion.hpp"
#include "evidex/schema.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evidex::dsl {

/// Heap-allocated value with deep copy, for recursive AST nodes.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() noexcept { return *ptr_; }
    const T& operator*() const noexcept { return *ptr_; }
    T* operator->() noexcept { return ptr_.get(); }
    const T* operator->() const noexcept { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

private:
    std::unique_ptr<T> ptr_;
};

using Scalar = std::variant<std::string, std::int64_t>;

struct Query;

struct Bool {
    std::vector<Query> must;
    std::vector<Query> should;
    std::vector<Query> must_not;
    std::vector<Query> filter;

    bool operator==(const Bool&) const;
};

struct Match {
    std::string field;
    std::string text;
    bool operator==(const Match&) const = default;
};

struct Term {
    std::string field;
    Scalar value;
    bool operator==(const Term&) const = default;
};

struct Range {
    std::string field;
    std::optional<Scalar> gte;
    std::optional<Scalar> lte;
    bool operator==(const Range&) const = default;
};

struct Nested {
    std::string path;
    Box<Query> query;
    bool operator==(const Nested&) const = default;
};

struct Knn {
    std::string field;
    std::string query_text;
    int k = 100;
    bool operator==(const Knn&) const = default;
};

struct Query {
    std::variant<Bool, Match, Term, Range, Nested, Knn> node;

    Query(Bool b) : node(std::move(b)) {}      // NOLINT
    Query(Match m) : node(std::move(m)) {}     // NOLINT
    Query(Term t) : node(std::move(t)) {}      // NOLINT
    Query(Range r) : node(std::move(r)) {}     // NOLINT
    Query(Nested n) : node(std::move(n)) {}    // NOLINT
    Query(Knn k) : node(std::move(k)) {}       // NOLINT

    template <typename T>
    bool is() const noexcept { return std::holds_alternative<T>(node); }
    template <typename T>
    const T& as() const { return std::get<T>(node); }
    template <typename T>
    T& as() { return std::get<T>(node); }

    bool operator==(const Query&) const = default;
};

inline bool Bool::operator==(const Bool& o) const {
    return must == o.must && should == o.should && must_not == o.must_not && filter == o.filter;
}

inline constexpr int kDefaultSize = 10;
inline constexpr int kDefaultFrom = 0;
inline constexpr int kMaxWindow = 10000;

struct Request {
    Query query = Bool{};
    int size = kDefaultSize;
    int from = kDefaultFrom;
    std::optional<FusionConfig> fusion;

    bool operator==(const Request&) const = default;
};

/// Strict parse of the supported subset. Throws Error{ParseError} whose
/// details carry `json_path` and `reason`.
Request parse_request(std::string_view json_text);
Request parse_request(const nlohmann::json& j);
inline Request parse_request(const std::string& json_text) { return parse_request(std::string_view(json_text)); }
inline Request parse_request(const char* json_text) { return parse_request(std::string_view(json_text)); }
Query parse_query_node(const nlohmann::json& j, const std::string& json_path);

nlohmann::json to_json(const Query& q);
nlohmann::json to_json(const Request& r);
/// Canonical bytes: sorted keys, no whitespace, defaults materialized,
/// empty bool clause lists omitted.
std::string serialize(const Request& r);
std::string serialize(const Query& q);

/// Field-reference and type checks against `schema`; violations are
/// reported with json paths in `Violation::field`.
ValidationReport validate(const Request& r, const IndexSchema& schema);
ValidationReport validate(const Query& q, const IndexSchema& schema, const std::string& json_path = "$.query");

/// True for YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ.
bool is_date_literal(std::string_view s) noexcept;

/// JSON-Schema describing the wire grammar (shipped in resources/).
std::string_view grammar_json_schema() noexcept;

} // namespace evidex::dsl
