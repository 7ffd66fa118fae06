#include "evidex/job_queue.hpp"

#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <nlohmann/json.hpp>

namespace evidex {

std::string_view to_string(JobState state) noexcept {
    switch (state) {
    case JobState::Queued: return "queued";
    case JobState::Claimed: return "claimed";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
    }
    return "queued";
}

std::int64_t JobQueue::system_now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

JobQueue::JobQueue(std::filesystem::path journal, QueueOptions options, Clock clock)
    : path_(std::move(journal)), options_(options), clock_(clock ? std::move(clock) : Clock(system_now_ms)) {
    if (options_.max_attempts < 1)
        throw Error(ErrorCode::InvalidArgument, "max_attempts must be at least 1");
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    if (std::filesystem::exists(path_)) replay();
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) throw Error(ErrorCode::QueueUnavailable, "cannot open queue journal", {{"path", path_.string()}});
}

void JobQueue::replay() {
    try {
        detail::for_each_line(path_, [&](const std::string& line) {
            if (line.empty()) return;
            auto e = nlohmann::json::parse(line, nullptr, false);
            // A torn final write is ignored; everything before it is intact.
            if (e.is_discarded()) return;
            auto id = e.at("job").get<std::uint64_t>();
            auto op = e.at("op").get<std::string>();
            if (op == "enqueue") {
                IngestJob job;
                job.job_id = id;
                job.source_uri = e.at("uri").get<std::string>();
                jobs_[id] = job;
                next_id_ = std::max(next_id_, id + 1);
                return;
            }
            auto it = jobs_.find(id);
            if (it == jobs_.end()) return;
            auto& job = it->second;
            if (op == "claim") {
                job.state = JobState::Claimed;
                job.worker = e.at("worker").get<std::string>();
                job.deadline_ms = e.at("deadline_ms").get<std::int64_t>();
                job.attempt = e.at("attempt").get<int>();
            } else if (op == "done") {
                job.state = JobState::Done;
            } else if (op == "retry") {
                job.state = JobState::Queued;
                job.last_error = e.value("reason", "");
            } else if (op == "failed") {
                job.state = JobState::Failed;
                job.last_error = e.value("reason", "");
            }
        });
    } catch (const Error& e) {
        throw Error(ErrorCode::QueueUnavailable, "cannot replay queue journal",
                    {{"path", path_.string()}, {"reason", e.what()}});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::QueueUnavailable, "corrupt queue journal",
                    {{"path", path_.string()}, {"reason", e.what()}});
    }
}

void JobQueue::append(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::QueueUnavailable, "cannot write queue journal", {{"path", path_.string()}});
}

IngestJob& JobQueue::find_locked(std::uint64_t job_id) {
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "unknown job", {{"job_id", job_id}});
    return it->second;
}

void JobQueue::expire_locked(std::int64_t now) {
    for (auto& [id, job] : jobs_) {
        if (job.state != JobState::Claimed || job.deadline_ms > now) continue;
        if (job.attempt >= options_.max_attempts) {
            append(nlohmann::json{{"op", "failed"}, {"job", id}, {"reason", "visibility timeout"}}.dump());
            job.state = JobState::Failed;
            job.last_error = "visibility timeout";
        } else {
            job.state = JobState::Queued;
        }
    }
}

IngestJob JobQueue::enqueue(const std::string& source_uri) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(source_uri, ec))
        throw Error(ErrorCode::NotFound, "source is not a readable file", {{"source_uri", source_uri}});
    std::lock_guard lock(mutex_);
    IngestJob job;
    job.job_id = next_id_++;
    job.source_uri = source_uri;
    append(nlohmann::json{{"op", "enqueue"}, {"job", job.job_id}, {"uri", source_uri}}.dump());
    jobs_[job.job_id] = job;
    return job;
}

std::optional<IngestJob> JobQueue::claim_next(const std::string& worker_id) {
    std::lock_guard lock(mutex_);
    auto now = clock_();
    expire_locked(now);
    for (auto& [id, job] : jobs_) {
        if (job.state != JobState::Queued) continue;
        auto deadline = now + options_.visibility_timeout.count();
        append(nlohmann::json{{"op", "claim"},
                              {"job", id},
                              {"worker", worker_id},
                              {"deadline_ms", deadline},
                              {"attempt", job.attempt + 1}}
                   .dump());
        job.state = JobState::Claimed;
        job.worker = worker_id;
        job.deadline_ms = deadline;
        ++job.attempt;
        return job;
    }
    return std::nullopt;
}

void JobQueue::complete(std::uint64_t job_id) {
    std::lock_guard lock(mutex_);
    auto& job = find_locked(job_id);
    if (job.state == JobState::Done) return;
    append(nlohmann::json{{"op", "done"}, {"job", job_id}}.dump());
    job.state = JobState::Done;
}

IngestJob JobQueue::fail(std::uint64_t job_id, const std::string& reason, bool retryable) {
    std::lock_guard lock(mutex_);
    auto& job = find_locked(job_id);
    if (job.state == JobState::Done || job.state == JobState::Failed) return job;
    bool terminal = !retryable || job.attempt >= options_.max_attempts;
    append(nlohmann::json{{"op", terminal ? "failed" : "retry"}, {"job", job_id}, {"reason", reason}}.dump());
    job.state = terminal ? JobState::Failed : JobState::Queued;
    job.last_error = reason;
    return job;
}

std::optional<IngestJob> JobQueue::job(std::uint64_t job_id) const {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

std::vector<IngestJob> JobQueue::jobs() const {
    std::lock_guard lock(mutex_);
    std::vector<IngestJob> out;
    out.reserve(jobs_.size());
    for (const auto& [id, job] : jobs_) out.push_back(job);
    return out;
}

QueueCounts JobQueue::counts() const {
    std::lock_guard lock(mutex_);
    QueueCounts c;
    for (const auto& [id, job] : jobs_) {
        switch (job.state) {
        case JobState::Queued: ++c.queued; break;
        case JobState::Claimed: ++c.claimed; break;
        case JobState::Done: ++c.done; break;
        case JobState::Failed: ++c.failed; break;
        }
    }
    return c;
}

bool JobQueue::drained() const {
    auto c = counts();
    return c.queued == 0 && c.claimed == 0;
}

} // namespace evidex
