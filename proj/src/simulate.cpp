#include "psylex/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "psylex/errors.hpp"
#include "psylex/rng.hpp"

namespace psylex::simulate {

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty())
        throw ValidationError(what + " must be a non-empty array of rows");
    if (!rows.front().is_array()) throw ValidationError(what + " rows must be arrays");
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.front().size());
    if (c == 0) throw ValidationError(what + " rows must be non-empty");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ValidationError(what + " rows have inconsistent lengths");
        for (Eigen::Index j = 0; j < c; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_number()) throw ValidationError(what + " has a non-numeric entry");
            m(i, j) = cell.get<double>();
        }
    }
    if (!m.allFinite()) throw ValidationError(what + " has non-finite entries");
    return m;
}

std::string padded_id(const char* prefix, int index, int width) {
    std::ostringstream out;
    out << prefix;
    std::string digits = std::to_string(index);
    for (int i = static_cast<int>(digits.size()); i < width; ++i) out << '0';
    out << digits;
    return out.str();
}

int width_for(int count) {
    int width = 1;
    for (int v = count; v >= 10; v /= 10) ++width;
    return std::max(width, 2);
}

}  // namespace

Eigen::MatrixXd PlantedModel::implied_correlation() const {
    Eigen::MatrixXd sigma = pattern * phi * pattern.transpose();
    sigma += Eigen::MatrixXd(uniqueness.asDiagonal());
    return sigma;
}

double PlantedModel::planted_variance_explained() const {
    return (pattern * phi * pattern.transpose()).diagonal().mean();
}

PlantedModel PlantedModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
    PlantedModel model;
    if (!doc.contains("pattern") || !doc.contains("phi") || !doc.contains("seed"))
        throw ValidationError(path.string() + ": needs fields pattern, phi, seed");
    model.pattern = matrix_from_json(doc.at("pattern"), path.string() + ": pattern");
    model.phi = matrix_from_json(doc.at("phi"), path.string() + ": phi");
    if (!doc.at("seed").is_number_integer())
        throw ValidationError(path.string() + ": seed must be an integer");
    model.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("descriptors")) {
        model.descriptor_ids = doc.at("descriptors").get<std::vector<std::string>>();
        if (static_cast<Eigen::Index>(model.descriptor_ids.size()) != model.pattern.rows())
            throw ValidationError(path.string() +
                                  ": descriptors length must match pattern rows");
    }
    if (model.descriptor_ids.empty()) {
        const int p = static_cast<int>(model.pattern.rows());
        const int width = width_for(p);
        for (int i = 1; i <= p; ++i)
            model.descriptor_ids.push_back(padded_id("d", i, width));
    }
    Eigen::VectorXd common = (model.pattern * model.phi * model.pattern.transpose()).diagonal();
    model.uniqueness = Eigen::VectorXd::Ones(model.pattern.rows()) - common;
    model.validate();
    return model;
}

void PlantedModel::validate() const {
    const Eigen::Index p = pattern.rows();
    const Eigen::Index k = pattern.cols();
    if (p < 1 || k < 1) throw ValidationError("planted model needs a non-empty pattern");
    if (phi.rows() != k || phi.cols() != k)
        throw ValidationError("phi must be square with one row per factor");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(phi(i, i) - 1.0) > 1e-12)
            throw ValidationError("phi diagonal must be 1");
        for (Eigen::Index j = 0; j < k; ++j)
            if (std::abs(phi(i, j) - phi(j, i)) > 1e-12)
                throw ValidationError("phi must be symmetric");
    }
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(phi, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -1e-10)
            throw ValidationError("phi is not positive semidefinite");
    }
    if (static_cast<Eigen::Index>(uniqueness.size()) != p)
        throw ValidationError("uniqueness length must match pattern rows");
    for (Eigen::Index i = 0; i < p; ++i)
        if (uniqueness[i] < 0)
            throw ValidationError("communality above 1 at variable " + std::to_string(i + 1) +
                                  "; scale the planted loadings down");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(implied_correlation(),
                                                          Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw ValidationError("implied correlation matrix is not positive semidefinite");
    if (static_cast<Eigen::Index>(descriptor_ids.size()) != p)
        throw ValidationError("descriptor id list must match pattern rows");
}

Eigen::MatrixXd sample_latent(const PlantedModel& model, int n) {
    model.validate();
    if (n < 10) throw ValidationError("sample size must be at least 10");
    const Eigen::Index p = model.pattern.rows();

    Eigen::MatrixXd sigma = model.implied_correlation();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    if (solver.info() != Eigen::Success)
        throw ValidationError("eigendecomposition of the implied correlation failed");
    Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd root = solver.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
                           solver.eigenvectors().transpose();

    rng::Normal normal(model.seed);
    Eigen::MatrixXd sample(n, p);
    Eigen::VectorXd z(p);
    for (int row = 0; row < n; ++row) {
        for (Eigen::Index j = 0; j < p; ++j) z[j] = normal();
        sample.row(row) = (root * z).transpose();
    }
    return sample;
}

ratings::RatingMatrix generate_ratings(const PlantedModel& model, int n) {
    Eigen::MatrixXd latent = sample_latent(model, n);
    const Eigen::Index p = latent.cols();

    ratings::RatingMatrix matrix;
    matrix.descriptor_ids = model.descriptor_ids;
    matrix.rows.reserve(static_cast<std::size_t>(n));
    const int width = width_for(n);
    for (int row = 0; row < n; ++row) {
        ratings::ParticipantRow participant;
        participant.participant_id = padded_id("p", row + 1, width);
        participant.agent_id = "sim";
        participant.duration_seconds = 600;
        participant.attention_missed = 0;
        participant.attention_total = 4;
        participant.responses.reserve(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) {
            double z = latent(row, j);
            int rating = 1 + (z > -0.6745 ? 1 : 0) + (z > 0.0 ? 1 : 0) + (z > 0.6745 ? 1 : 0);
            participant.responses.push_back(rating);
        }
        matrix.rows.push_back(std::move(participant));
    }
    return matrix;
}

CongruenceResult tucker_congruence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows()) throw ValidationError("loading matrices must share row count");
    if (a.cols() != b.cols())
        throw ValidationError("loading matrices must share column count for matching");
    const int k = static_cast<int>(a.cols());
    if (k < 1) throw ValidationError("need at least one column");

    CongruenceResult result;
    result.table.resize(k, k);
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) {
            double na = a.col(p).norm();
            double nb = b.col(q).norm();
            if (na == 0.0 || nb == 0.0) {
                result.table(p, q) = 0.0;
                result.zero_column = true;
            } else {
                result.table(p, q) = a.col(p).dot(b.col(q)) / (na * nb);
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    if (k <= 6) {
        std::vector<int> best = order;
        double best_total = -1.0;
        std::vector<int> perm = order;
        do {
            double total = 0.0;
            for (int p = 0; p < k; ++p)
                total += std::abs(result.table(p, perm[static_cast<std::size_t>(p)]));
            if (total > best_total) {
                best_total = total;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        result.matching = best;
    } else {
        result.greedy = true;
        std::vector<bool> taken(static_cast<std::size_t>(k), false);
        result.matching.assign(static_cast<std::size_t>(k), -1);
        for (int p = 0; p < k; ++p) {
            int arg = -1;
            double best = -1.0;
            for (int q = 0; q < k; ++q) {
                if (taken[static_cast<std::size_t>(q)]) continue;
                double v = std::abs(result.table(p, q));
                if (v > best) {
                    best = v;
                    arg = q;
                }
            }
            result.matching[static_cast<std::size_t>(p)] = arg;
            taken[static_cast<std::size_t>(arg)] = true;
        }
    }
    for (int p = 0; p < k; ++p)
        result.matched.push_back(
            std::abs(result.table(p, result.matching[static_cast<std::size_t>(p)])));
    return result;
}

}  // namespace psylex::simulate
