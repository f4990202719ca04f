#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace psylex::ratings {

struct ParticipantRow {
    std::string participant_id;
    std::string agent_id;
    double duration_seconds = 0.0;
    int attention_missed = 0;
    int attention_total = 0;
    std::vector<int> responses;  // 1..4, one per descriptor column
};

struct RatingMatrix {
    std::vector<std::string> descriptor_ids;  // column order
    std::vector<ParticipantRow> rows;
};

struct LoadOutcome {
    RatingMatrix matrix;
    std::vector<std::string> rejected;  // row-level diagnostics for dropped rows
};

// CSV `participant_id,agent_id,duration_seconds,attention_missed,attention_total,
// <descriptor>...`. Rows with missing or out-of-range responses are dropped and
// reported; structural problems (ragged rows, non-integer responses, duplicate
// participant ids, no data rows) raise.
LoadOutcome load_ratings(const std::filesystem::path& path);

void write_ratings(const std::filesystem::path& path, const RatingMatrix& matrix);

struct FilterOutcome {
    RatingMatrix kept;
    // participant_id -> reasons ("duration", "attention"), input row order
    std::vector<std::pair<std::string, std::vector<std::string>>> excluded;
    std::vector<std::string> notes;  // e.g. rows with no attention checks at all
};

// Drop rows with duration_seconds < min_duration_s or
// attention_missed/attention_total > max_missed_fraction (both strict).
FilterOutcome filter_participants(const RatingMatrix& matrix, double min_duration_s = 480,
                                  double max_missed_fraction = 0.25);

void write_filter_report(const std::filesystem::path& path, const FilterOutcome& outcome);

struct CorrelationMatrix {
    std::vector<std::string> descriptor_ids;
    Eigen::MatrixXd r;  // symmetric, unit diagonal

    int order() const { return static_cast<int>(descriptor_ids.size()); }
    void validate() const;
};

// Pearson correlations over the integer coding; needs >= 3 participants and
// nonzero variance in every column.
CorrelationMatrix correlation_matrix(const RatingMatrix& matrix);

}  // namespace psylex::ratings
