#include "evidex/error.hpp"
#include "evidex/job_queue.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;

TEST_CASE("enqueue, claim, complete") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "a", "x");
    fixtures::write_file(tmp / "b", "y");
    JobQueue q(tmp / "q.jsonl");
    auto ja = q.enqueue((tmp / "a").string());
    q.enqueue((tmp / "b").string());
    auto c = q.claim_next("w1");
    REQUIRE(c);
    CHECK(c->job_id == ja.job_id);
    CHECK(c->attempt == 1);
    q.complete(c->job_id);
    CHECK(q.counts().done == 1);
    CHECK(q.counts().queued == 1);
    CHECK_FALSE(q.drained());
    CHECK_THROWS_AS(q.enqueue((tmp / "missing").string()), Error);
}

TEST_CASE("visibility timeout redelivers") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "a", "x");
    std::int64_t now = 1000;
    JobQueue q(tmp / "q.jsonl", {std::chrono::milliseconds(100), 5}, [&] { return now; });
    q.enqueue((tmp / "a").string());
    auto first = q.claim_next("w1");
    REQUIRE(first);
    CHECK_FALSE(q.claim_next("w2"));
    now += 101;
    auto second = q.claim_next("w2");
    REQUIRE(second);
    CHECK(second->attempt == 2);
}

TEST_CASE("failures retry until max attempts") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "a", "x");
    JobQueue q(tmp / "q.jsonl", {std::chrono::milliseconds(60000), 2});
    q.enqueue((tmp / "a").string());
    auto j = q.claim_next("w");
    CHECK(q.fail(j->job_id, "boom").state == JobState::Queued);
    j = q.claim_next("w");
    CHECK(q.fail(j->job_id, "boom").state == JobState::Failed);
    CHECK(q.drained());

    q.enqueue((tmp / "a").string());
    j = q.claim_next("w");
    CHECK(q.fail(j->job_id, "schema", false).state == JobState::Failed);
}

TEST_CASE("journal replay restores state") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "a", "x");
    fixtures::write_file(tmp / "b", "y");
    {
        JobQueue q(tmp / "q.jsonl");
        q.enqueue((tmp / "a").string());
        q.enqueue((tmp / "b").string());
        q.complete(q.claim_next("w")->job_id);
    }
    JobQueue q(tmp / "q.jsonl");
    CHECK(q.counts().done == 1);
    CHECK(q.counts().queued == 1);
    auto next = q.enqueue((tmp / "a").string());
    CHECK(next.job_id == 3);
}

TEST_CASE("unwritable journal") {
    CHECK_THROWS_AS(JobQueue("/proc/definitely/not/here.jsonl"), Error);
}
