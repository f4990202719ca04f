#include "psylex/efa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "psylex/errors.hpp"
#include "psylex/rng.hpp"

namespace psylex::efa {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const std::string& what) {
    if (m.rows() != m.cols()) throw ValidationError(what + " must be square");
    if (!m.allFinite()) throw ValidationError(what + " has non-finite entries");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12)
                throw ValidationError(what + " is not symmetric");
}

void require_correlation_shape(const Eigen::MatrixXd& r) {
    require_symmetric(r, "correlation matrix");
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        if (std::abs(r(i, i) - 1.0) > 1e-8)
            throw ValidationError("correlation matrix diagonal must be 1");
}

// Largest-magnitude entry of each column made positive.
void fix_column_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index arg = 0;
        m.col(j).cwiseAbs().maxCoeff(&arg);
        if (m(arg, j) < 0) m.col(j) = -m.col(j);
    }
}

struct CriterionValue {
    double f = 0.0;
    Eigen::MatrixXd gradient;  // with respect to the pattern matrix
};

CriterionValue oblimin_value(const Eigen::MatrixXd& pattern, double gamma) {
    const Eigen::Index p = pattern.rows();
    const Eigen::Index k = pattern.cols();
    Eigen::MatrixXd squared = pattern.cwiseProduct(pattern);
    // X = C * squared * N with C = I - (gamma/p) * ones, N = ones - I
    Eigen::MatrixXd cross = squared * (Eigen::MatrixXd::Ones(k, k) - Eigen::MatrixXd::Identity(k, k));
    if (gamma != 0.0) {
        Eigen::RowVectorXd colmean = cross.colwise().mean();
        cross -= gamma * Eigen::VectorXd::Ones(p) * colmean;
    }
    CriterionValue value;
    value.f = 0.5 * (squared.cwiseProduct(cross)).sum();
    value.gradient = 2.0 * pattern.cwiseProduct(cross);
    return value;
}

struct GpaRun {
    Eigen::MatrixXd t;
    double f = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace;
};

GpaRun gradient_projection(const Eigen::MatrixXd& a, Eigen::MatrixXd t,
                           const RotationOptions& options) {
    auto pattern_for = [&](const Eigen::MatrixXd& rotation,
                           Eigen::MatrixXd& inverse) -> bool {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(rotation);
        if (!lu.isInvertible()) return false;
        inverse = lu.inverse();
        return true;
    };

    GpaRun run;
    Eigen::MatrixXd t_inv;
    if (!pattern_for(t, t_inv)) throw ValidationError("singular starting rotation");
    Eigen::MatrixXd pattern = a * t_inv.transpose();
    CriterionValue value = oblimin_value(pattern, options.gamma);
    Eigen::MatrixXd g = -(pattern.transpose() * value.gradient * t_inv).transpose();
    run.trace.push_back(value.f);

    double step = 1.0;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Eigen::RowVectorXd column_dots = (t.cwiseProduct(g)).colwise().sum();
        Eigen::MatrixXd projected = g - t * column_dots.asDiagonal();
        double s = projected.norm();
        if (s < options.tolerance) {
            run.converged = true;
            break;
        }
        step *= 2.0;
        bool accepted = false;
        Eigen::MatrixXd t_next, t_next_inv, pattern_next;
        CriterionValue value_next;
        while (step > 1e-16) {
            Eigen::MatrixXd candidate = t - step * projected;
            Eigen::RowVectorXd norms = candidate.colwise().norm();
            if ((norms.array() < 1e-12).any()) {
                step /= 2.0;
                continue;
            }
            candidate = candidate * norms.cwiseInverse().asDiagonal();
            Eigen::MatrixXd candidate_inv;
            if (!pattern_for(candidate, candidate_inv)) {
                step /= 2.0;
                continue;
            }
            pattern_next = a * candidate_inv.transpose();
            value_next = oblimin_value(pattern_next, options.gamma);
            if (value_next.f < value.f - 0.5 * s * s * step) {
                t_next = std::move(candidate);
                t_next_inv = std::move(candidate_inv);
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if (!accepted) break;  // step size underflow: keep best iterate
        t = std::move(t_next);
        t_inv = std::move(t_next_inv);
        pattern = std::move(pattern_next);
        value = value_next;
        g = -(pattern.transpose() * value.gradient * t_inv).transpose();
        run.iterations = iter;
        run.trace.push_back(value.f);
    }
    run.t = std::move(t);
    run.f = value.f;
    return run;
}

std::string format_signed(double value) {
    double rounded = std::round(value * 100.0) / 100.0;
    if (rounded == 0.0) rounded = 0.0;  // normalize -0
    std::ostringstream out;
    if (rounded < 0) out << '-';
    double mag = std::abs(rounded);
    long whole = static_cast<long>(mag + 1e-9);
    long frac = std::lround((mag - whole) * 100.0);
    if (frac == 100) {
        ++whole;
        frac = 0;
    }
    if (whole > 0) out << whole;
    out << '.' << (frac < 10 ? "0" : "") << frac;
    return out.str();
}

}  // namespace

EigenSpectrum eigen_decompose(const Eigen::MatrixXd& matrix) {
    require_symmetric(matrix, "matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success)
        throw ValidationError("eigendecomposition failed to converge");
    const Eigen::Index p = matrix.rows();
    EigenSpectrum spectrum;
    spectrum.eigenvalues = solver.eigenvalues().reverse();
    spectrum.eigenvectors.resize(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        spectrum.eigenvectors.col(j) = solver.eigenvectors().col(p - 1 - j);
    return spectrum;
}

std::vector<double> ekc_reference_values(const std::vector<double>& eigenvalues,
                                         int sample_size) {
    if (sample_size <= 1) throw ValidationError("sample size must exceed 1");
    const std::size_t p = eigenvalues.size();
    if (p == 0) throw ValidationError("empty eigenvalue list");
    for (std::size_t j = 1; j < p; ++j)
        if (eigenvalues[j] > eigenvalues[j - 1] + 1e-10)
            throw ValidationError("eigenvalues must be in descending order");
    const double inflation =
        std::pow(1.0 + std::sqrt(static_cast<double>(p) / sample_size), 2.0);
    std::vector<double> reference(p);
    double consumed = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double remaining = (static_cast<double>(p) - consumed) / static_cast<double>(p - j);
        reference[j] = std::max(remaining * inflation, 1.0);
        consumed += eigenvalues[j];
    }
    return reference;
}

int empirical_kaiser_criterion(const std::vector<double>& eigenvalues, int sample_size) {
    auto reference = ekc_reference_values(eigenvalues, sample_size);
    int k = 0;
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        if (eigenvalues[j] > reference[j])
            ++k;
        else
            break;
    }
    return k;
}

PafResult principal_axis_factoring(const Eigen::MatrixXd& r, int k, const PafOptions& options) {
    require_correlation_shape(r);
    const Eigen::Index p = r.rows();
    if (k < 1) throw ValidationError("factor count must be at least 1");
    if (k >= p) throw ValidationError("factor count must be below the variable count");
    if (options.tolerance <= 0 || options.max_iterations < 1)
        throw ValidationError("invalid iteration settings");

    PafResult result;
    Eigen::VectorXd h2(p);
    if (options.initial_communalities) {
        if (static_cast<Eigen::Index>(options.initial_communalities->size()) != p)
            throw ValidationError("initial communalities length mismatch");
        for (Eigen::Index i = 0; i < p; ++i) {
            double v = (*options.initial_communalities)[i];
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("initial communalities must lie in [0, 1]");
            h2[i] = v;
        }
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(r);
        if (lu.isInvertible()) {
            Eigen::MatrixXd inverse = lu.inverse();
            for (Eigen::Index i = 0; i < p; ++i) h2[i] = 1.0 - 1.0 / inverse(i, i);
        } else {
            result.smc_start = false;  // squared multiple correlations undefined
            for (Eigen::Index i = 0; i < p; ++i) {
                double best = 0.0;
                for (Eigen::Index j = 0; j < p; ++j)
                    if (j != i) best = std::max(best, std::abs(r(i, j)));
                h2[i] = best;
            }
        }
    }

    Eigen::MatrixXd reduced = r;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        result.iterations = iter;
        reduced.diagonal() = h2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
        if (solver.info() != Eigen::Success)
            throw ValidationError("eigendecomposition failed during factoring");
        Eigen::MatrixXd loadings(p, k);
        for (int j = 0; j < k; ++j) {
            double eigenvalue = std::max(solver.eigenvalues()(p - 1 - j), 0.0);
            loadings.col(j) = solver.eigenvectors().col(p - 1 - j) * std::sqrt(eigenvalue);
        }
        Eigen::VectorXd next = loadings.rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < p; ++i) {
            if (next[i] > 1.0) {
                next[i] = 0.9995;
                result.heywood = true;
            }
        }
        double delta = (next - h2).cwiseAbs().maxCoeff();
        h2 = next;
        result.loadings = std::move(loadings);
        if (delta < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    fix_column_signs(result.loadings);
    result.communalities = h2;
    return result;
}

double oblimin_criterion(const Eigen::MatrixXd& pattern, double gamma) {
    return oblimin_value(pattern, gamma).f;
}

RotationResult oblimin_rotate(const Eigen::MatrixXd& loadings, const RotationOptions& options) {
    const Eigen::Index k = loadings.cols();
    if (k < 1) throw ValidationError("rotation needs at least one factor column");
    if (!loadings.allFinite()) throw ValidationError("loadings have non-finite entries");
    if (options.max_iterations < 1 || options.tolerance <= 0 || options.starts < 1)
        throw ValidationError("invalid rotation settings");

    RotationResult result;
    if (k == 1) {
        result.pattern = loadings;
        result.phi = Eigen::MatrixXd::Identity(1, 1);
        result.converged = true;
        result.criterion = 0.0;
        result.criterion_trace = {0.0};
        return result;
    }

    Eigen::MatrixXd a = loadings;
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(loadings.rows());
    if (options.kaiser_normalize) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double norm = a.row(i).norm();
            if (norm > 0) {
                weights[i] = norm;
                a.row(i) /= norm;
            }
        }
    }

    GpaRun best;
    bool have_best = false;
    rng::Normal normal(options.seed);
    for (int start = 0; start < options.starts; ++start) {
        Eigen::MatrixXd t0 = Eigen::MatrixXd::Identity(k, k);
        if (start > 0) {
            // Random oblique start: standard-normal columns scaled to unit norm.
            for (int attempt = 0;; ++attempt) {
                for (Eigen::Index i = 0; i < k; ++i)
                    for (Eigen::Index j = 0; j < k; ++j) t0(i, j) = normal();
                Eigen::RowVectorXd norms = t0.colwise().norm();
                if ((norms.array() < 1e-12).any()) continue;
                t0 = t0 * norms.cwiseInverse().asDiagonal();
                if (Eigen::FullPivLU<Eigen::MatrixXd>(t0).isInvertible()) break;
                if (attempt > 100) throw ValidationError("could not draw an invertible start");
            }
        }
        GpaRun run = gradient_projection(a, t0, options);
        if (!have_best || run.f < best.f) {
            best = std::move(run);
            have_best = true;
        }
    }

    Eigen::MatrixXd t_inv = Eigen::FullPivLU<Eigen::MatrixXd>(best.t).inverse();
    result.pattern = a * t_inv.transpose();
    if (options.kaiser_normalize) result.pattern = weights.asDiagonal() * result.pattern;
    result.phi = best.t.transpose() * best.t;
    result.converged = best.converged;
    result.iterations = best.iterations;
    result.criterion = best.f;
    result.criterion_trace = std::move(best.trace);
    return result;
}

std::vector<int> assign_descriptors(const Eigen::MatrixXd& pattern, double loading_threshold,
                                    double gap_threshold) {
    if (!pattern.allFinite()) throw ValidationError("pattern has non-finite entries");
    std::vector<int> assignments(static_cast<std::size_t>(pattern.rows()), 0);
    const Eigen::Index k = pattern.cols();
    for (Eigen::Index i = 0; i < pattern.rows(); ++i) {
        Eigen::Index arg = 0;
        double a = 0.0, b = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            double v = std::abs(pattern(i, j));
            if (v > a) {
                b = a;
                a = v;
                arg = j;
            } else if (v > b) {
                b = v;
            }
        }
        bool tied = false;
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != arg && std::abs(pattern(i, j)) == a) tied = true;
        if (!tied && a >= loading_threshold && a - b >= gap_threshold)
            assignments[static_cast<std::size_t>(i)] = static_cast<int>(arg) + 1;
    }
    return assignments;
}

double variance_explained(const Eigen::MatrixXd& unrotated) {
    if (unrotated.rows() == 0) throw ValidationError("empty loading matrix");
    return unrotated.rowwise().squaredNorm().sum() / static_cast<double>(unrotated.rows());
}

double variance_explained(const Eigen::MatrixXd& pattern, const Eigen::MatrixXd& phi) {
    if (pattern.rows() == 0) throw ValidationError("empty loading matrix");
    Eigen::MatrixXd implied = pattern * phi * pattern.transpose();
    return implied.diagonal().sum() / static_cast<double>(pattern.rows());
}

FactorSolution fit(const ratings::CorrelationMatrix& r, int sample_size,
                   const FitOptions& options) {
    r.validate();
    if (sample_size <= 1) throw ValidationError("sample size must exceed 1");
    const int p = r.order();
    if (p < 2) throw ValidationError("need at least 2 descriptors");

    auto spectrum = eigen_decompose(r.r);
    std::vector<double> eigenvalues(spectrum.eigenvalues.data(),
                                    spectrum.eigenvalues.data() + p);
    int k = options.k;
    if (k == 0) {
        k = empirical_kaiser_criterion(eigenvalues, sample_size);
        if (k == 0)
            throw ValidationError(
                "factor selection found no factor above its reference eigenvalue; "
                "specify a factor count explicitly to proceed");
    }
    if (k < 0) throw ValidationError("factor count must be non-negative");
    if (k >= p)
        throw ValidationError("factor count " + std::to_string(k) +
                              " must be below the descriptor count " + std::to_string(p));

    auto paf = principal_axis_factoring(r.r, k, options.paf);
    auto rotation = oblimin_rotate(paf.loadings, options.rotation);

    FactorSolution solution;
    solution.descriptor_ids = r.descriptor_ids;
    solution.k = k;
    solution.sample_size = sample_size;
    solution.pattern = rotation.pattern;
    solution.phi = rotation.phi;
    solution.unrotated = paf.loadings;
    solution.communalities = paf.communalities;
    solution.variance_explained =
        paf.communalities.sum() / static_cast<double>(p);
    solution.assignments =
        assign_descriptors(rotation.pattern, options.loading_threshold, options.gap_threshold);
    solution.paf_converged = paf.converged;
    solution.paf_iterations = paf.iterations;
    solution.rotation_converged = rotation.converged;
    solution.rotation_iterations = rotation.iterations;
    solution.smc_start = paf.smc_start;
    solution.heywood = paf.heywood;
    solution.config = options;
    return solution;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty())
        throw ValidationError(what + " must be a non-empty array of rows");
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ValidationError(what + " rows have inconsistent lengths");
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

}  // namespace

std::string FactorSolution::to_json() const {
    nlohmann::json doc;
    doc["descriptors"] = descriptor_ids;
    doc["k"] = k;
    doc["sample_size"] = sample_size;
    doc["pattern"] = matrix_to_json(pattern);
    doc["phi"] = matrix_to_json(phi);
    doc["unrotated"] = matrix_to_json(unrotated);
    nlohmann::json h2 = nlohmann::json::array();
    for (Eigen::Index i = 0; i < communalities.size(); ++i) h2.push_back(communalities[i]);
    doc["communalities"] = std::move(h2);
    doc["variance_explained"] = variance_explained;
    nlohmann::json assigned = nlohmann::json::object();
    for (std::size_t i = 0; i < descriptor_ids.size(); ++i) {
        if (assignments[i] > 0)
            assigned[descriptor_ids[i]] = assignments[i];
        else
            assigned[descriptor_ids[i]] = "unassigned";
    }
    doc["assignments"] = std::move(assigned);
    doc["convergence"] = {
        {"paf_converged", paf_converged},
        {"paf_iterations", paf_iterations},
        {"rotation_converged", rotation_converged},
        {"rotation_iterations", rotation_iterations},
        {"smc_start", smc_start},
        {"heywood", heywood},
    };
    doc["config"] = {
        {"requested_k", config.k},
        {"paf_tolerance", config.paf.tolerance},
        {"paf_max_iterations", config.paf.max_iterations},
        {"gamma", config.rotation.gamma},
        {"rotation_tolerance", config.rotation.tolerance},
        {"rotation_max_iterations", config.rotation.max_iterations},
        {"kaiser_normalize", config.rotation.kaiser_normalize},
        {"rotation_starts", config.rotation.starts},
        {"seed", config.rotation.seed},
        {"loading_threshold", config.loading_threshold},
        {"gap_threshold", config.gap_threshold},
    };
    return doc.dump(2) + "\n";
}

FactorSolution FactorSolution::from_json(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    FactorSolution s;
    try {
        s.descriptor_ids = doc.at("descriptors").get<std::vector<std::string>>();
        s.k = doc.at("k").get<int>();
        s.sample_size = doc.at("sample_size").get<int>();
        s.pattern = matrix_from_json(doc.at("pattern"), "pattern");
        s.phi = matrix_from_json(doc.at("phi"), "phi");
        s.unrotated = matrix_from_json(doc.at("unrotated"), "unrotated");
        auto h2 = doc.at("communalities").get<std::vector<double>>();
        s.communalities = Eigen::Map<Eigen::VectorXd>(h2.data(),
                                                      static_cast<Eigen::Index>(h2.size()));
        s.variance_explained = doc.at("variance_explained").get<double>();
        const auto& assigned = doc.at("assignments");
        s.assignments.resize(s.descriptor_ids.size(), 0);
        for (std::size_t i = 0; i < s.descriptor_ids.size(); ++i) {
            const auto& value = assigned.at(s.descriptor_ids[i]);
            s.assignments[i] = value.is_number_integer() ? value.get<int>() : 0;
        }
        const auto& conv = doc.at("convergence");
        s.paf_converged = conv.at("paf_converged").get<bool>();
        s.paf_iterations = conv.at("paf_iterations").get<int>();
        s.rotation_converged = conv.at("rotation_converged").get<bool>();
        s.rotation_iterations = conv.at("rotation_iterations").get<int>();
        s.smc_start = conv.at("smc_start").get<bool>();
        s.heywood = conv.at("heywood").get<bool>();
        const auto& config = doc.at("config");
        s.config.k = config.at("requested_k").get<int>();
        s.config.paf.tolerance = config.at("paf_tolerance").get<double>();
        s.config.paf.max_iterations = config.at("paf_max_iterations").get<int>();
        s.config.rotation.gamma = config.at("gamma").get<double>();
        s.config.rotation.tolerance = config.at("rotation_tolerance").get<double>();
        s.config.rotation.max_iterations = config.at("rotation_max_iterations").get<int>();
        s.config.rotation.kaiser_normalize = config.at("kaiser_normalize").get<bool>();
        s.config.rotation.starts = config.at("rotation_starts").get<int>();
        s.config.rotation.seed = config.at("seed").get<std::uint64_t>();
        s.config.loading_threshold = config.at("loading_threshold").get<double>();
        s.config.gap_threshold = config.at("gap_threshold").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    if (s.pattern.rows() != static_cast<Eigen::Index>(s.descriptor_ids.size()) ||
        s.pattern.cols() != s.k || s.phi.rows() != s.k || s.phi.cols() != s.k)
        throw ValidationError(origin + ": solution dimensions are inconsistent");
    return s;
}

void FactorSolution::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << to_json();
}

FactorSolution FactorSolution::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str(), path.string());
}

std::string format_loading(double value) { return format_signed(value); }

namespace {

struct RankedLoading {
    std::string lemma;
    double value = 0.0;
};

std::vector<std::vector<RankedLoading>> top_loadings(const FactorSolution& solution, int top_n) {
    const int p = static_cast<int>(solution.descriptor_ids.size());
    const int n = std::min(top_n, p);
    std::vector<std::vector<RankedLoading>> per_factor;
    for (int j = 0; j < solution.k; ++j) {
        std::vector<int> order(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double va = std::abs(solution.pattern(a, j));
            double vb = std::abs(solution.pattern(b, j));
            if (va != vb) return va > vb;
            return solution.descriptor_ids[static_cast<std::size_t>(a)] <
                   solution.descriptor_ids[static_cast<std::size_t>(b)];
        });
        std::vector<RankedLoading> column;
        for (int rank = 0; rank < n; ++rank) {
            int row = order[static_cast<std::size_t>(rank)];
            column.push_back({solution.descriptor_ids[static_cast<std::size_t>(row)],
                              solution.pattern(row, j)});
        }
        per_factor.push_back(std::move(column));
    }
    return per_factor;
}

}  // namespace

std::string report_markdown(const FactorSolution& solution, int top_n) {
    if (top_n < 1) throw ValidationError("top_n must be at least 1");
    auto ranked = top_loadings(solution, top_n);
    std::ostringstream out;
    out << "# Factor solution\n\n";
    out << "Factors: " << solution.k << "\n";
    out << "Descriptors: " << solution.descriptor_ids.size() << "\n";
    out << "Sample size: " << solution.sample_size << "\n";
    out << "Variance explained: " << format_signed(solution.variance_explained) << "\n\n";

    out << "## Top descriptors\n\n";
    out << "| rank |";
    for (int j = 1; j <= solution.k; ++j) out << " Factor " << j << " |";
    out << "\n|";
    for (int j = 0; j <= solution.k; ++j) out << " --- |";
    out << "\n";
    const std::size_t rows = ranked.empty() ? 0 : ranked.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        out << "| " << (r + 1) << " |";
        for (const auto& column : ranked)
            out << " " << column[r].lemma << " (" << format_signed(column[r].value) << ") |";
        out << "\n";
    }

    out << "\n## Factor correlations\n\n";
    if (solution.k < 2) {
        out << "Single factor; no correlations.\n";
    } else {
        out << "| factor |";
        for (int j = 1; j < solution.k; ++j) out << " " << j << " |";
        out << "\n|";
        for (int j = 0; j < solution.k; ++j) out << " --- |";
        out << "\n";
        for (int i = 2; i <= solution.k; ++i) {
            out << "| " << i << " |";
            for (int j = 1; j < solution.k; ++j) {
                if (j < i)
                    out << " " << format_signed(solution.phi(i - 1, j - 1)) << " |";
                else
                    out << "  |";
            }
            out << "\n";
        }
    }

    out << "\n## Unassigned descriptors\n\n";
    bool any = false;
    for (std::size_t i = 0; i < solution.descriptor_ids.size(); ++i) {
        if (solution.assignments[i] == 0) {
            out << "- " << solution.descriptor_ids[i] << "\n";
            any = true;
        }
    }
    if (!any) out << "None.\n";
    return out.str();
}

ReportTable report_loadings_table(const FactorSolution& solution, int top_n) {
    if (top_n < 1) throw ValidationError("top_n must be at least 1");
    auto ranked = top_loadings(solution, top_n);
    ReportTable table;
    table.header = {"factor", "rank", "descriptor", "loading"};
    for (int j = 0; j < solution.k; ++j) {
        for (std::size_t r = 0; r < ranked[static_cast<std::size_t>(j)].size(); ++r) {
            const auto& entry = ranked[static_cast<std::size_t>(j)][r];
            table.rows.push_back({std::to_string(j + 1), std::to_string(r + 1), entry.lemma,
                                  format_signed(entry.value)});
        }
    }
    return table;
}

ReportTable report_phi_table(const FactorSolution& solution) {
    ReportTable table;
    table.header = {"factor_i", "factor_j", "phi"};
    for (int i = 2; i <= solution.k; ++i)
        for (int j = 1; j < i; ++j)
            table.rows.push_back({std::to_string(i), std::to_string(j),
                                  format_signed(solution.phi(i - 1, j - 1))});
    return table;
}

}  // namespace psylex::efa
