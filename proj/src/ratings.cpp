#include "psylex/ratings.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "psylex/csv.hpp"
#include "psylex/errors.hpp"

namespace psylex::ratings {

namespace {

const std::vector<std::string> kMetaColumns = {
    "participant_id", "agent_id", "duration_seconds", "attention_missed", "attention_total"};

long parse_long(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        long value = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError(context + ": '" + text + "' is not an integer");
    }
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(value)) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError(context + ": '" + text + "' is not a finite number");
    }
}

}  // namespace

LoadOutcome load_ratings(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    if (table.header.size() < kMetaColumns.size() + 1)
        throw ValidationError(path.string() + ": header needs " +
                              std::to_string(kMetaColumns.size()) +
                              " metadata columns plus at least one descriptor");
    for (std::size_t i = 0; i < kMetaColumns.size(); ++i)
        if (table.header[i] != kMetaColumns[i])
            throw ValidationError(path.string() + ": column " + std::to_string(i + 1) +
                                  " must be '" + kMetaColumns[i] + "', got '" + table.header[i] +
                                  "'");

    LoadOutcome outcome;
    auto& matrix = outcome.matrix;
    matrix.descriptor_ids.assign(table.header.begin() + kMetaColumns.size(), table.header.end());
    {
        std::set<std::string> unique;
        for (const auto& id : matrix.descriptor_ids) {
            if (id.empty())
                throw ValidationError(path.string() + ": empty descriptor column name");
            if (!unique.insert(id).second)
                throw ValidationError(path.string() + ": duplicate descriptor column '" + id + "'");
        }
    }
    if (table.rows.empty()) throw ValidationError(path.string() + ": no participants");

    const std::size_t expected = kMetaColumns.size() + matrix.descriptor_ids.size();
    std::set<std::string> seen_ids;
    for (const auto& row : table.rows) {
        const std::string where = path.string() + " line " + std::to_string(row.line);
        if (row.fields.size() != expected)
            throw ValidationError(where + ": expected " + std::to_string(expected) +
                                  " fields, got " + std::to_string(row.fields.size()));
        ParticipantRow p;
        p.participant_id = row.fields[0];
        if (p.participant_id.empty()) throw ValidationError(where + ": empty participant_id");
        if (!seen_ids.insert(p.participant_id).second)
            throw ValidationError(where + ": duplicate participant_id '" + p.participant_id + "'");
        p.agent_id = row.fields[1];
        p.duration_seconds = parse_double(row.fields[2], where + " duration_seconds");
        if (p.duration_seconds < 0)
            throw ValidationError(where + ": negative duration_seconds");
        p.attention_missed = static_cast<int>(parse_long(row.fields[3], where + " attention_missed"));
        p.attention_total = static_cast<int>(parse_long(row.fields[4], where + " attention_total"));
        if (p.attention_missed < 0 || p.attention_total < 0 ||
            p.attention_missed > p.attention_total)
            throw ValidationError(where + ": need 0 <= attention_missed <= attention_total");

        std::string reject;
        p.responses.reserve(matrix.descriptor_ids.size());
        for (std::size_t c = 0; c < matrix.descriptor_ids.size(); ++c) {
            const auto& cell = row.fields[kMetaColumns.size() + c];
            if (cell.empty()) {
                reject = "missing response for '" + matrix.descriptor_ids[c] + "'";
                break;
            }
            long value = parse_long(cell, where + " '" + matrix.descriptor_ids[c] + "'");
            if (value < 1 || value > 4) {
                reject = "response " + std::to_string(value) + " out of range for '" +
                         matrix.descriptor_ids[c] + "'";
                break;
            }
            p.responses.push_back(static_cast<int>(value));
        }
        if (!reject.empty()) {
            outcome.rejected.push_back("participant " + p.participant_id + " (line " +
                                       std::to_string(row.line) + "): " + reject);
            continue;
        }
        matrix.rows.push_back(std::move(p));
    }
    return outcome;
}

void write_ratings(const std::filesystem::path& path, const RatingMatrix& matrix) {
    std::vector<std::string> header = kMetaColumns;
    header.insert(header.end(), matrix.descriptor_ids.begin(), matrix.descriptor_ids.end());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(matrix.rows.size());
    for (const auto& p : matrix.rows) {
        std::vector<std::string> fields = {p.participant_id, p.agent_id};
        double rounded = std::round(p.duration_seconds);
        if (rounded == p.duration_seconds) {
            fields.push_back(std::to_string(static_cast<long long>(rounded)));
        } else {
            fields.push_back(std::to_string(p.duration_seconds));
        }
        fields.push_back(std::to_string(p.attention_missed));
        fields.push_back(std::to_string(p.attention_total));
        for (int r : p.responses) fields.push_back(std::to_string(r));
        rows.push_back(std::move(fields));
    }
    csv::write_file(path, header, rows);
}

FilterOutcome filter_participants(const RatingMatrix& matrix, double min_duration_s,
                                  double max_missed_fraction) {
    if (min_duration_s < 0 || max_missed_fraction < 0)
        throw ValidationError("filter thresholds must be non-negative");
    FilterOutcome outcome;
    outcome.kept.descriptor_ids = matrix.descriptor_ids;
    for (const auto& p : matrix.rows) {
        std::vector<std::string> reasons;
        if (p.duration_seconds < min_duration_s) reasons.push_back("duration");
        if (p.attention_total == 0) {
            outcome.notes.push_back("participant " + p.participant_id +
                                    ": no attention checks, attention criterion skipped");
        } else {
            double missed = static_cast<double>(p.attention_missed) / p.attention_total;
            if (missed > max_missed_fraction) reasons.push_back("attention");
        }
        if (reasons.empty()) {
            outcome.kept.rows.push_back(p);
        } else {
            outcome.excluded.emplace_back(p.participant_id, std::move(reasons));
        }
    }
    return outcome;
}

void write_filter_report(const std::filesystem::path& path, const FilterOutcome& outcome) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(outcome.excluded.size());
    for (const auto& [id, reasons] : outcome.excluded) {
        std::string joined;
        for (const auto& r : reasons) {
            if (!joined.empty()) joined.push_back(';');
            joined += r;
        }
        rows.push_back({id, joined});
    }
    csv::write_file(path, {"participant_id", "reasons"}, rows);
}

void CorrelationMatrix::validate() const {
    const int p = order();
    if (r.rows() != p || r.cols() != p)
        throw ValidationError("correlation matrix shape does not match descriptor count");
    for (int i = 0; i < p; ++i) {
        if (r(i, i) != 1.0)
            throw ValidationError("correlation diagonal must be exactly 1 (descriptor '" +
                                  descriptor_ids[i] + "')");
        for (int j = 0; j < p; ++j) {
            if (!std::isfinite(r(i, j)))
                throw ValidationError("non-finite correlation entry");
            if (r(i, j) != r(j, i)) throw ValidationError("correlation matrix not symmetric");
            if (std::abs(r(i, j)) > 1.0)
                throw ValidationError("correlation entry out of [-1, 1]");
        }
    }
    if (p > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(r, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -1e-8)
            throw ValidationError("correlation matrix is not positive semidefinite");
    }
}

CorrelationMatrix correlation_matrix(const RatingMatrix& matrix) {
    const std::size_t n = matrix.rows.size();
    const std::size_t p = matrix.descriptor_ids.size();
    if (n < 3) throw ValidationError("correlation needs at least 3 participants, got " +
                                     std::to_string(n));

    std::vector<double> mean(p, 0.0);
    for (const auto& row : matrix.rows)
        for (std::size_t c = 0; c < p; ++c) mean[c] += row.responses[c];
    for (auto& m : mean) m /= static_cast<double>(n);

    std::vector<double> variance(p, 0.0);
    for (const auto& row : matrix.rows)
        for (std::size_t c = 0; c < p; ++c) {
            double d = row.responses[c] - mean[c];
            variance[c] += d * d;
        }
    for (std::size_t c = 0; c < p; ++c)
        if (variance[c] == 0.0)
            throw ValidationError("descriptor '" + matrix.descriptor_ids[c] +
                                  "' has zero variance");

    CorrelationMatrix out;
    out.descriptor_ids = matrix.descriptor_ids;
    out.r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            double cross = 0.0;
            for (const auto& row : matrix.rows)
                cross += (row.responses[i] - mean[i]) * (row.responses[j] - mean[j]);
            double r = cross / std::sqrt(variance[i] * variance[j]);
            r = std::clamp(r, -1.0, 1.0);
            out.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
            out.r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
        }
    }
    return out;
}

}  // namespace psylex::ratings
