#include "evidex/ingestion.hpp"

#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace evidex {

IndexSchema maildir_schema() {
    auto base = default_enron_schema();
    SchemaRegistry registry(base);
    auto fields = base.fields;
    fields.emplace("x_headers", FieldType::Keyword);
    registry.update(std::move(fields));
    return registry.current();
}

std::string disentangled_payload(const std::vector<std::string>& units) {
    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += units[i];
    }
    return out;
}

Document build_document(const ParsedEmail& email, const ChunkProfile& profile, const Embedder& embedder,
                        const std::string& source_uri) {
    Document doc;
    doc.doc_id = email.message_id;
    doc.source_uri = source_uri;
    doc.fields["message_id"] = email.message_id;
    if (!email.sender.empty()) doc.fields["sender"] = email.sender;
    if (!email.recipients.empty()) doc.fields["recipients"] = email.recipients;
    if (!email.people.empty()) doc.fields["people"] = email.people;
    if (!email.subject.empty()) doc.fields["subject"] = email.subject;
    if (!email.body.empty()) doc.fields["body"] = email.body;
    if (email.sent_date) doc.fields["sent_date"] = *email.sent_date;
    if (email.folder) doc.fields["folder"] = *email.folder;
    if (!email.x_headers.empty()) {
        std::vector<std::string> values;
        for (const auto& [name, value] : email.x_headers) values.push_back(name + ": " + value);
        doc.fields["x_headers"] = std::move(values);
    }

    auto units = disentangle_thread(email.body);
    std::vector<std::string> texts;
    std::size_t offset = 0;
    for (const auto& unit : units) {
        for (auto& chunk : chunk_heuristic(unit, profile)) {
            Segment seg;
            seg.ordinal = static_cast<int>(doc.segments.size());
            seg.span = {offset + chunk.span.start, offset + chunk.span.end};
            seg.text = std::move(chunk.text);
            texts.push_back(seg.text);
            doc.segments.push_back(std::move(seg));
        }
        offset += unit.size() + 2;
    }
    auto vectors = embedder.embed_batch(texts);
    if (vectors.size() != doc.segments.size())
        throw Error(ErrorCode::EmbedderUnavailable, "embedder returned a wrong number of vectors",
                    {{"expected", doc.segments.size()}, {"actual", vectors.size()}});
    for (std::size_t i = 0; i < vectors.size(); ++i) doc.segments[i].vector = std::move(vectors[i]);
    return doc;
}

Document prepare_message(const std::filesystem::path& file, const ChunkProfile& profile, const Embedder& embedder) {
    RawMessage raw{file.string(), detail::read_file(file)};
    return build_document(parse_rfc822(raw), profile, embedder, raw.source_uri);
}

std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw Error(ErrorCode::NotFound, "corpus directory not found", {{"path", dir.string()}});
    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(dir); it != std::filesystem::recursive_directory_iterator();
         ++it) {
        const auto name = it->path().filename().string();
        if (!name.empty() && name[0] == '.') {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file()) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

Ingestor::Ingestor(SearchEngine& engine, JobQueue& queue, ChunkProfile profile)
    : engine_(engine), queue_(queue), profile_(std::move(profile)) {
    validate_profile(profile_);
}

IngestReport Ingestor::run(int workers) {
    workers = std::max(1, workers);

    struct Ready {
        std::optional<Document> doc;
        std::optional<IngestFailure> failure;
    };

    std::vector<std::uint64_t> order;
    for (const auto& job : queue_.jobs())
        if (job.state == JobState::Queued || job.state == JobState::Claimed) order.push_back(job.job_id);
    const std::set<std::uint64_t> ordered(order.begin(), order.end());

    std::mutex mutex;
    std::map<std::uint64_t, Ready> ready;
    std::size_t cursor = 0;
    IngestReport report;

    auto commit = [&](std::uint64_t id, Ready& r) {
        if (r.failure) {
            ++report.failed;
            report.failures.push_back(*r.failure);
            return;
        }
        try {
            if (engine_.add_document(*r.doc)) ++report.indexed;
            else ++report.duplicates;
            queue_.complete(id);
        } catch (const Error& e) {
            queue_.fail(id, e.what(), false);
            ++report.failed;
            report.failures.push_back({r.doc->source_uri, std::string(to_string(e.code())), e.what()});
        }
    };

    auto drain = [&] {
        while (cursor < order.size()) {
            auto id = order[cursor];
            auto it = ready.find(id);
            if (it == ready.end()) {
                auto job = queue_.job(id);
                if (job && job->state == JobState::Failed) {
                    ++report.failed;
                    report.failures.push_back({job->source_uri, "Failed", job->last_error});
                    ++cursor;
                    continue;
                }
                break;
            }
            commit(id, it->second);
            ready.erase(it);
            ++cursor;
        }
    };

    std::atomic<bool> stop{false};
    std::exception_ptr error;

    auto worker = [&](int n) {
        const auto name = "worker-" + std::to_string(n);
        try {
            while (!stop) {
                auto job = queue_.claim_next(name);
                if (!job) {
                    {
                        std::lock_guard lock(mutex);
                        drain();
                        if (queue_.drained()) return;
                    }
                    std::this_thread::sleep_for(std::chrono::milliseconds(2));
                    continue;
                }
                {
                    std::lock_guard lock(mutex);
                    if (ready.contains(job->job_id)) continue;
                }
                Ready r;
                try {
                    r.doc = prepare_message(job->source_uri, profile_, engine_.embedder());
                } catch (const Error& e) {
                    bool retryable = e.code() != ErrorCode::DimensionMismatch && e.code() != ErrorCode::SchemaMismatch;
                    auto after = queue_.fail(job->job_id, e.what(), retryable);
                    if (after.state != JobState::Failed) continue;
                    r.failure = IngestFailure{job->source_uri, std::string(to_string(e.code())), e.what()};
                } catch (const std::exception& e) {
                    auto after = queue_.fail(job->job_id, e.what(), true);
                    if (after.state != JobState::Failed) continue;
                    r.failure = IngestFailure{job->source_uri, "Io", e.what()};
                }
                std::lock_guard lock(mutex);
                if (ordered.contains(job->job_id)) {
                    ready.emplace(job->job_id, std::move(r));
                    drain();
                } else {
                    commit(job->job_id, r);
                }
            }
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!error) error = std::current_exception();
            stop = true;
        }
    };

    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker, i);
    worker(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    std::lock_guard lock(mutex);
    drain();
    return report;
}

IngestReport ingest_corpus(const std::filesystem::path& corpus, SearchEngine& engine,
                           const std::filesystem::path& queue_journal, const ChunkProfile& profile, int workers,
                           QueueOptions queue_options) {
    auto files = list_corpus(corpus);
    std::error_code ec;
    std::filesystem::remove(queue_journal, ec);
    JobQueue queue(queue_journal, queue_options);
    for (const auto& f : files) queue.enqueue(f.string());
    Ingestor ingestor(engine, queue, profile);
    return ingestor.run(workers);
}

} // namespace evidex
