#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace crowdagg {

enum class Condition { Indv, Simul };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);  // throws UnknownCondition

// One five-point rating of a target on a criterion by a worker.
struct Response {
    std::string worker_id;
    std::string target_id;
    std::string criterion_id;
    int grade = 1;  // 1..5
    Condition condition = Condition::Simul;

    auto operator<=>(const Response&) const = default;
};

// Integer view of a response against the dataset's sorted id indexes.
struct ResponseCoord {
    int worker = 0;
    int target = 0;
    int criterion = 0;
    int grade = 1;
    Condition condition = Condition::Simul;
};

// Immutable, canonically ordered collection of responses. Indexes are the
// sorted distinct ids, so two datasets with equal response sets compare equal
// field-by-field regardless of input order.
class RatingDataset {
public:
    RatingDataset() = default;

    // Indexes derived from the responses themselves.
    explicit RatingDataset(std::vector<Response> responses);

    // Explicit indexes; responses may cover only part of the grid (or be
    // empty), but every referenced id must be present in its index.
    RatingDataset(std::vector<Response> responses,
                  std::vector<std::string> workers,
                  std::vector<std::string> targets,
                  std::vector<std::string> criteria);

    const std::vector<Response>& responses() const { return responses_; }
    const std::vector<ResponseCoord>& coords() const { return coords_; }

    const std::vector<std::string>& workers() const { return workers_; }
    const std::vector<std::string>& targets() const { return targets_; }
    const std::vector<std::string>& criteria() const { return criteria_; }

    int worker_count() const { return static_cast<int>(workers_.size()); }
    int target_count() const { return static_cast<int>(targets_.size()); }
    int criterion_count() const { return static_cast<int>(criteria_.size()); }

    // -1 when the id is not in the index.
    int worker_index(const std::string& id) const;
    int target_index(const std::string& id) const;
    int criterion_index(const std::string& id) const;

    bool operator==(const RatingDataset&) const = default;

private:
    void validate_and_build();

    std::vector<Response> responses_;
    std::vector<std::string> workers_;
    std::vector<std::string> targets_;
    std::vector<std::string> criteria_;
    std::vector<ResponseCoord> coords_;
    bool explicit_indexes_ = false;
};

// CSV schema: header `worker_id,target_id,criterion_id,grade,condition`,
// UTF-8, LF or CRLF, no quoting (ids must not contain commas).
RatingDataset load_csv(const std::string& path);
RatingDataset parse_csv(const std::string& text);
void save_csv(const RatingDataset& ds, const std::string& path);
std::string write_csv(const RatingDataset& ds);

// Draws n workers uniformly without replacement from those whose `condition`
// responses cover every (target, criterion) pair present in ds; returns only
// the selected workers' responses under that condition.
RatingDataset subsample_workers(const RatingDataset& ds, int n, uint64_t seed,
                                Condition condition);

// The eligible pool itself (sorted worker ids), for introspection and tests.
std::vector<std::string> eligible_workers(const RatingDataset& ds, Condition condition);

}  // namespace crowdagg
