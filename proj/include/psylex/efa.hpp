#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psylex/ratings.hpp"

namespace psylex::efa {

struct EigenSpectrum {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // column j pairs with eigenvalues[j]
};

// Full spectrum of a finite symmetric matrix, descending.
EigenSpectrum eigen_decompose(const Eigen::MatrixXd& matrix);

// l_j^ref = max(((P - sum_{i<j} lambda_i) / (P - j + 1)) * (1 + sqrt(P/N))^2, 1)
std::vector<double> ekc_reference_values(const std::vector<double>& eigenvalues, int sample_size);

// Count of leading eigenvalues strictly above their reference value, stopping
// at the first failure. May be 0.
int empirical_kaiser_criterion(const std::vector<double>& eigenvalues, int sample_size);

struct PafOptions {
    double tolerance = 1e-6;
    int max_iterations = 200;
    // Override the squared-multiple-correlation start (testing hook).
    std::optional<std::vector<double>> initial_communalities;
};

struct PafResult {
    Eigen::MatrixXd loadings;       // P x k, each column's largest-|.| entry positive
    Eigen::VectorXd communalities;  // final h^2, in [0, 1]
    bool converged = false;
    int iterations = 0;
    bool smc_start = true;   // false: R singular, fell back to max |r_ij| start
    bool heywood = false;    // some h^2 clamped to 0.9995
};

PafResult principal_axis_factoring(const Eigen::MatrixXd& r, int k, const PafOptions& options = {});

struct RotationOptions {
    double gamma = 0.0;  // 0 = quartimin
    double tolerance = 1e-6;
    int max_iterations = 1000;
    bool kaiser_normalize = false;
    int starts = 1;           // extra random starts beyond the identity start
    std::uint64_t seed = 0;   // drives the random starts
};

struct RotationResult {
    Eigen::MatrixXd pattern;  // P x k
    Eigen::MatrixXd phi;      // k x k factor correlations
    bool converged = false;
    int iterations = 0;
    double criterion = 0.0;
    std::vector<double> criterion_trace;  // initial value plus each accepted step
};

// Gradient-projection minimization of the oblimin criterion over oblique
// rotations; deterministic (identity start, optional seeded multi-start).
RotationResult oblimin_rotate(const Eigen::MatrixXd& loadings, const RotationOptions& options = {});

double oblimin_criterion(const Eigen::MatrixXd& pattern, double gamma);

// Per row, 1-based factor of the largest |loading| when it clears
// loading_threshold and beats the runner-up by gap_threshold; 0 = unassigned.
std::vector<int> assign_descriptors(const Eigen::MatrixXd& pattern,
                                    double loading_threshold = 0.30,
                                    double gap_threshold = 0.20);

double variance_explained(const Eigen::MatrixXd& unrotated);
double variance_explained(const Eigen::MatrixXd& pattern, const Eigen::MatrixXd& phi);

struct FitOptions {
    int k = 0;  // 0: choose by the empirical Kaiser criterion
    PafOptions paf;
    RotationOptions rotation;
    double loading_threshold = 0.30;
    double gap_threshold = 0.20;
};

struct FactorSolution {
    std::vector<std::string> descriptor_ids;
    int k = 0;
    int sample_size = 0;
    Eigen::MatrixXd pattern;    // rotated
    Eigen::MatrixXd phi;
    Eigen::MatrixXd unrotated;
    Eigen::VectorXd communalities;
    double variance_explained = 0.0;
    std::vector<int> assignments;  // per descriptor, 1-based factor or 0
    bool paf_converged = false;
    int paf_iterations = 0;
    bool rotation_converged = false;
    int rotation_iterations = 0;
    bool smc_start = true;
    bool heywood = false;
    FitOptions config;

    bool converged() const { return paf_converged && rotation_converged; }
    std::string to_json() const;
    static FactorSolution from_json(const std::string& text, const std::string& origin);
    void save(const std::filesystem::path& path) const;
    static FactorSolution load(const std::filesystem::path& path);
};

FactorSolution fit(const ratings::CorrelationMatrix& r, int sample_size,
                   const FitOptions& options = {});

// Rounded to two decimals without a leading zero: -0.47 -> "-.47", 0.7 -> ".70".
std::string format_loading(double value);

struct ReportTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string report_markdown(const FactorSolution& solution, int top_n = 20);
ReportTable report_loadings_table(const FactorSolution& solution, int top_n = 20);
ReportTable report_phi_table(const FactorSolution& solution);

}  // namespace psylex::efa
