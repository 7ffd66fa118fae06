#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

enum class JobState { Queued, Claimed, Done, Failed };

std::string_view to_string(JobState state) noexcept;

struct IngestJob {
    std::uint64_t job_id = 0;
    std::string source_uri;
    int attempt = 0;  // number of deliveries so far
    JobState state = JobState::Queued;
    std::string worker;
    std::int64_t deadline_ms = 0;  // visibility deadline while claimed
    std::string last_error;
};

struct QueueOptions {
    std::chrono::milliseconds visibility_timeout{60'000};
    int max_attempts = 5;
};

struct QueueCounts {
    std::size_t queued = 0;
    std::size_t claimed = 0;
    std::size_t done = 0;
    std::size_t failed = 0;
};

/// At-least-once work queue journaled to a JSON-lines file. Every state
/// change is appended and flushed before the call returns; opening an
/// existing journal replays it. A claimed job becomes claimable again once
/// its visibility deadline passes. All operations are serialized by one mutex.
class JobQueue {
public:
    using Clock = std::function<std::int64_t()>;  // milliseconds since epoch

    /// Throws QueueUnavailable when the journal cannot be opened or replayed.
    explicit JobQueue(std::filesystem::path journal, QueueOptions options = {}, Clock clock = {});

    /// Throws NotFound when `source_uri` is not a readable file.
    IngestJob enqueue(const std::string& source_uri);
    /// Oldest claimable job, or nothing when none is available.
    std::optional<IngestJob> claim_next(const std::string& worker_id);
    void complete(std::uint64_t job_id);
    /// Requeues the job, or marks it failed once max_attempts deliveries were
    /// used or when `retryable` is false.
    IngestJob fail(std::uint64_t job_id, const std::string& reason, bool retryable = true);

    std::optional<IngestJob> job(std::uint64_t job_id) const;
    std::vector<IngestJob> jobs() const;
    QueueCounts counts() const;
    /// No job is queued or claimed.
    bool drained() const;

    const QueueOptions& options() const noexcept { return options_; }

    static std::int64_t system_now_ms();

private:
    void append(const std::string& line);
    void replay();
    void expire_locked(std::int64_t now);
    IngestJob& find_locked(std::uint64_t job_id);

    std::filesystem::path path_;
    QueueOptions options_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::ofstream out_;
    std::map<std::uint64_t, IngestJob> jobs_;
    std::uint64_t next_id_ = 1;
};

} // namespace evidex
