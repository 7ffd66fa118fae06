#pragma once

#include "evidex/chunking.hpp"
#include "evidex/email.hpp"
#include "evidex/embedding.hpp"
#include "evidex/job_queue.hpp"
#include "evidex/model.hpp"
#include "evidex/schema.hpp"
#include "evidex/search_engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace evidex {

/// The Enron schema plus `x_headers`, a multi-valued keyword field holding
/// every technical header as "Name: value". Built through the registry, so
/// its version is 2.
IndexSchema maildir_schema();

/// Message units joined by blank lines; segment spans index into this text.
std::string disentangled_payload(const std::vector<std::string>& units);

/// Level-1 fields from the parsed headers and the raw body; one Level-2
/// segment per chunk of each disentangled unit, embedded with `embedder`.
Document build_document(const ParsedEmail& email, const ChunkProfile& profile, const Embedder& embedder,
                        const std::string& source_uri = {});

/// Reads, parses and builds the document for one message file.
Document prepare_message(const std::filesystem::path& file, const ChunkProfile& profile, const Embedder& embedder);

/// Regular files below `dir` in lexicographic path order, skipping names
/// starting with '.'. Throws NotFound when `dir` is not a directory.
std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& dir);

struct IngestFailure {
    std::string source_uri;
    std::string code;
    std::string message;
};

struct IngestReport {
    std::size_t indexed = 0;
    std::size_t duplicates = 0;
    std::size_t failed = 0;
    std::vector<IngestFailure> failures;
};

/// Consumes a job queue with a pool of workers. Parsing, chunking and
/// embedding run in parallel; commits are funneled through one writer in job
/// order, so the resulting index does not depend on the worker count.
/// Retryable failures (everything except DimensionMismatch and schema
/// violations) go back to the queue until max_attempts is reached.
class Ingestor {
public:
    Ingestor(SearchEngine& engine, JobQueue& queue, ChunkProfile profile = {});

    /// Runs until no job is queued or claimed.
    IngestReport run(int workers = 1);

private:
    SearchEngine& engine_;
    JobQueue& queue_;
    ChunkProfile profile_;
};

/// Enqueues every file of `corpus` into a fresh queue journal and runs an
/// Ingestor over it.
IngestReport ingest_corpus(const std::filesystem::path& corpus, SearchEngine& engine,
                           const std::filesystem::path& queue_journal, const ChunkProfile& profile = {},
                           int workers = 1, QueueOptions queue_options = {});

} // namespace evidex
