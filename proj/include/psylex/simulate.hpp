#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psylex/ratings.hpp"

namespace psylex::simulate {

struct PlantedModel {
    Eigen::MatrixXd pattern;  // P x k
    Eigen::MatrixXd phi;      // k x k correlation matrix
    Eigen::VectorXd uniqueness;  // 1 - diag(pattern * phi * pattern^T), all >= 0
    std::uint64_t seed = 0;
    std::vector<std::string> descriptor_ids;  // defaults to d01..dP

    // implied correlation: pattern * phi * pattern^T + diag(uniqueness)
    Eigen::MatrixXd implied_correlation() const;
    double planted_variance_explained() const;  // mean communality

    static PlantedModel load(const std::filesystem::path& path);
    void validate() const;
};

// N x P latent multivariate-normal sample with correlation implied by the
// model, via its symmetric square root; reproducible from the model seed.
Eigen::MatrixXd sample_latent(const PlantedModel& model, int n);

// Latent sample discretized into 1..4 at population quartile cuts
// (-0.6745, 0, 0.6745), wrapped as a rating matrix that passes loading and
// participant filters.
ratings::RatingMatrix generate_ratings(const PlantedModel& model, int n);

struct CongruenceResult {
    Eigen::MatrixXd table;            // raw signed congruences, k x k
    std::vector<int> matching;        // column of b matched to each column of a
    std::vector<double> matched;      // |congruence| per matched pair
    bool greedy = false;              // true above the exhaustive-match limit
    bool zero_column = false;         // some column had zero norm
};

// Column congruence c_pq = <a_p, b_q> / (|a_p| |b_q|) with a one-to-one
// matching maximizing total |c| (exhaustive up to 6 columns, greedy above).
CongruenceResult tucker_congruence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace psylex::simulate
