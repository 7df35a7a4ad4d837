#include "crowdagg/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "crowdagg/errors.hpp"

namespace crowdagg {

std::string to_string(Condition c) {
    return c == Condition::Indv ? "INDV" : "SIMUL";
}

Condition condition_from_string(const std::string& s) {
    if (s == "INDV") return Condition::Indv;
    if (s == "SIMUL") return Condition::Simul;
    raise(ErrorCode::UnknownCondition, "unknown condition '" + s + "' (expected INDV or SIMUL)");
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

int index_of(const std::vector<std::string>& sorted_ids, const std::string& id) {
    auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
    if (it == sorted_ids.end() || *it != id) return -1;
    return static_cast<int>(it - sorted_ids.begin());
}

}  // namespace

RatingDataset::RatingDataset(std::vector<Response> responses)
    : responses_(std::move(responses)) {
    std::vector<std::string> w, t, c;
    w.reserve(responses_.size());
    t.reserve(responses_.size());
    c.reserve(responses_.size());
    for (const auto& r : responses_) {
        w.push_back(r.worker_id);
        t.push_back(r.target_id);
        c.push_back(r.criterion_id);
    }
    workers_ = sorted_unique(std::move(w));
    targets_ = sorted_unique(std::move(t));
    criteria_ = sorted_unique(std::move(c));
    validate_and_build();
}

RatingDataset::RatingDataset(std::vector<Response> responses,
                             std::vector<std::string> workers,
                             std::vector<std::string> targets,
                             std::vector<std::string> criteria)
    : responses_(std::move(responses)),
      workers_(sorted_unique(std::move(workers))),
      targets_(sorted_unique(std::move(targets))),
      criteria_(sorted_unique(std::move(criteria))),
      explicit_indexes_(true) {
    validate_and_build();
}

void RatingDataset::validate_and_build() {
    if (workers_.empty() || targets_.empty() || criteria_.empty())
        raise(ErrorCode::ShapeMismatch, "dataset requires at least one worker, target, and criterion");

    std::sort(responses_.begin(), responses_.end());

    coords_.clear();
    coords_.reserve(responses_.size());
    for (const auto& r : responses_) {
        if (r.grade < 1 || r.grade > 5)
            raise(ErrorCode::GradeOutOfRange,
                  "grade " + std::to_string(r.grade) + " out of range 1..5 for worker '" +
                      r.worker_id + "', target '" + r.target_id + "'");
        ResponseCoord rc;
        rc.worker = index_of(workers_, r.worker_id);
        rc.target = index_of(targets_, r.target_id);
        rc.criterion = index_of(criteria_, r.criterion_id);
        rc.grade = r.grade;
        rc.condition = r.condition;
        if (rc.worker < 0 || rc.target < 0 || rc.criterion < 0)
            raise(ErrorCode::ShapeMismatch, "response references an id missing from the indexes");
        coords_.push_back(rc);
    }

    for (size_t i = 1; i < responses_.size(); ++i) {
        const auto& a = responses_[i - 1];
        const auto& b = responses_[i];
        if (a.worker_id == b.worker_id && a.target_id == b.target_id &&
            a.criterion_id == b.criterion_id && a.condition == b.condition)
            raise(ErrorCode::DuplicateResponse,
                  "duplicate response for worker '" + a.worker_id + "', target '" + a.target_id +
                      "', criterion '" + a.criterion_id + "', condition " + to_string(a.condition));
    }
}

int RatingDataset::worker_index(const std::string& id) const { return index_of(workers_, id); }
int RatingDataset::target_index(const std::string& id) const { return index_of(targets_, id); }
int RatingDataset::criterion_index(const std::string& id) const { return index_of(criteria_, id); }

namespace {

constexpr const char* kCsvHeader = "worker_id,target_id,criterion_id,grade,condition";

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

int parse_grade(const std::string& s, size_t line_no) {
    if (s.empty()) raise(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": empty grade");
    size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(s, &pos);
    } catch (const std::exception&) {
        raise(ErrorCode::MalformedRow,
              "line " + std::to_string(line_no) + ": non-integer grade '" + s + "'");
    }
    if (pos != s.size())
        raise(ErrorCode::MalformedRow,
              "line " + std::to_string(line_no) + ": non-integer grade '" + s + "'");
    return value;
}

}  // namespace

RatingDataset parse_csv(const std::string& text) {
    std::vector<Response> responses;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();  // CRLF
        if (!saw_header) {
            if (line != kCsvHeader)
                raise(ErrorCode::MalformedRow,
                      "line 1: expected header '" + std::string(kCsvHeader) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != 5)
            raise(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected 5 fields, got " +
                                               std::to_string(fields.size()));
        Response r;
        r.worker_id = fields[0];
        r.target_id = fields[1];
        r.criterion_id = fields[2];
        r.grade = parse_grade(fields[3], line_no);
        if (r.grade < 1 || r.grade > 5)
            raise(ErrorCode::GradeOutOfRange,
                  "line " + std::to_string(line_no) + ": grade " + std::to_string(r.grade) +
                      " out of range 1..5");
        r.condition = condition_from_string(fields[4]);
        responses.push_back(std::move(r));
    }
    if (!saw_header) raise(ErrorCode::MalformedRow, "empty file: missing header row");
    return RatingDataset(std::move(responses));
}

RatingDataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string write_csv(const RatingDataset& ds) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : ds.responses()) {
        out << r.worker_id << ',' << r.target_id << ',' << r.criterion_id << ',' << r.grade << ','
            << to_string(r.condition) << '\n';
    }
    return out.str();
}

void save_csv(const RatingDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << write_csv(ds);
}

std::vector<std::string> eligible_workers(const RatingDataset& ds, Condition condition) {
    std::set<std::pair<int, int>> required;  // (target, criterion) pairs present anywhere in ds
    for (const auto& rc : ds.coords()) required.insert({rc.target, rc.criterion});

    std::vector<std::set<std::pair<int, int>>> covered(ds.worker_count());
    for (const auto& rc : ds.coords()) {
        if (rc.condition == condition) covered[rc.worker].insert({rc.target, rc.criterion});
    }

    std::vector<std::string> pool;
    for (int w = 0; w < ds.worker_count(); ++w) {
        if (std::includes(covered[w].begin(), covered[w].end(), required.begin(), required.end()))
            pool.push_back(ds.workers()[w]);
    }
    return pool;
}

RatingDataset subsample_workers(const RatingDataset& ds, int n, uint64_t seed,
                                Condition condition) {
    if (n < 1) raise(ErrorCode::NotEnoughEligibleWorkers, "subsample size must be >= 1");
    auto pool = eligible_workers(ds, condition);
    if (static_cast<int>(pool.size()) < n)
        raise(ErrorCode::NotEnoughEligibleWorkers,
              "eligible pool has " + std::to_string(pool.size()) + " workers, need " +
                  std::to_string(n));

    // Partial Fisher-Yates over the sorted pool; same seed, same selection.
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    std::unordered_set<std::string> selected(pool.begin(), pool.begin() + n);

    std::vector<Response> kept;
    for (const auto& r : ds.responses()) {
        if (r.condition == condition && selected.count(r.worker_id)) kept.push_back(r);
    }
    return RatingDataset(std::move(kept));
}

}  // namespace crowdagg
