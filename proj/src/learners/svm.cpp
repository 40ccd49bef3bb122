#include <algorithm>
#include <cmath>
#include <limits>

#include "../errors.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

double rbf_gamma_scale(const Matrix& x) {
    if (x.rows == 0 || x.cols == 0) raise(Errc::DimensionMismatch, "empty matrix");
    double mean = 0;
    for (double v : x.data) mean += v;
    mean /= static_cast<double>(x.data.size());
    double var = 0;
    for (double v : x.data) {
        double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(x.data.size());
    if (var == 0.0) raise(Errc::ZeroVariance, "matrix has zero element variance");
    return 1.0 / (static_cast<double>(x.cols) * var);
}

// Maximal-violating-pair SMO on the dual
//   min 0.5 a'Qa - e'a  s.t. 0 <= a <= C, y'a = 0,  Q_ij = y_i y_j K_ij.
// Stop when m(a) - M(a) <= tol, the standard optimality gap.
SmoResult smo_solve(const Matrix& kernel, const std::vector<int>& y_pm, double c, double tol,
                    size_t max_iter) {
    const size_t n = y_pm.size();
    if (kernel.rows != n || kernel.cols != n)
        raise(Errc::DimensionMismatch, "kernel matrix must be n x n");
    if (!(tol > 0)) raise(Errc::ConfigMissingRequired, "tol must be positive");
    for (int v : y_pm)
        if (v != 1 && v != -1) raise(Errc::NonBinaryLabel, "labels must be -1 or +1");

    const double tau = 1e-12;
    SmoResult res;
    res.alphas.assign(n, 0.0);
    std::vector<double> grad(n, -1.0); // G_i = (Qa)_i - 1 at a = 0

    auto q = [&](size_t i, size_t j) {
        return static_cast<double>(y_pm[i] * y_pm[j]) * kernel.at(i, j);
    };

    double m_final = 0, big_m_final = 0;
    for (;;) {
        // i: argmax -y_i G_i over I_up, j: argmin -y_j G_j over I_low.
        double m = -std::numeric_limits<double>::infinity();
        double big_m = std::numeric_limits<double>::infinity();
        size_t sel_i = n, sel_j = n;
        for (size_t t = 0; t < n; ++t) {
            double v = -static_cast<double>(y_pm[t]) * grad[t];
            bool in_up = (y_pm[t] == 1 && res.alphas[t] < c) || (y_pm[t] == -1 && res.alphas[t] > 0);
            bool in_low = (y_pm[t] == -1 && res.alphas[t] < c) || (y_pm[t] == 1 && res.alphas[t] > 0);
            if (in_up && v > m) {
                m = v;
                sel_i = t;
            }
            if (in_low && v < big_m) {
                big_m = v;
                sel_j = t;
            }
        }
        m_final = m;
        big_m_final = big_m;
        if (sel_i == n || sel_j == n || m - big_m <= tol) {
            res.converged = true;
            break;
        }
        if (res.iterations >= max_iter) break;
        ++res.iterations;

        size_t i = sel_i, j = sel_j;
        double old_i = res.alphas[i], old_j = res.alphas[j];
        if (y_pm[i] != y_pm[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0) quad = tau;
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = old_i - old_j;
            res.alphas[i] += delta;
            res.alphas[j] += delta;
            if (diff > 0) {
                if (res.alphas[j] < 0) {
                    res.alphas[j] = 0;
                    res.alphas[i] = diff;
                }
            } else {
                if (res.alphas[i] < 0) {
                    res.alphas[i] = 0;
                    res.alphas[j] = -diff;
                }
            }
            if (diff > 0) {
                if (res.alphas[i] > c) {
                    res.alphas[i] = c;
                    res.alphas[j] = c - diff;
                }
            } else {
                if (res.alphas[j] > c) {
                    res.alphas[j] = c;
                    res.alphas[i] = c + diff;
                }
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0) quad = tau;
            double delta = (grad[i] - grad[j]) / quad;
            double sum = old_i + old_j;
            res.alphas[i] -= delta;
            res.alphas[j] += delta;
            if (sum > c) {
                if (res.alphas[i] > c) {
                    res.alphas[i] = c;
                    res.alphas[j] = sum - c;
                }
            } else {
                if (res.alphas[j] < 0) {
                    res.alphas[j] = 0;
                    res.alphas[i] = sum;
                }
            }
            if (sum > c) {
                if (res.alphas[j] > c) {
                    res.alphas[j] = c;
                    res.alphas[i] = sum - c;
                }
            } else {
                if (res.alphas[i] < 0) {
                    res.alphas[i] = 0;
                    res.alphas[j] = sum;
                }
            }
        }

        double di = res.alphas[i] - old_i;
        double dj = res.alphas[j] - old_j;
        for (size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }

    res.bias = (m_final + big_m_final) / 2.0;
    if (!std::isfinite(res.bias)) res.bias = 0;
    return res;
}

namespace {

Matrix rbf_kernel(const Matrix& x, double gamma) {
    Matrix k(x.rows, x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        k.at(i, i) = 1.0;
        for (size_t j = i + 1; j < x.rows; ++j) {
            double v = std::exp(-gamma * squared_distance(x.row(i), x.row(j)));
            k.at(i, j) = v;
            k.at(j, i) = v;
        }
    }
    return k;
}

} // namespace

std::vector<double> SvmModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        double f = bias;
        for (size_t s = 0; s < support_vectors.rows; ++s)
            f += dual_coef[s] * std::exp(-gamma * squared_distance(x.row(i), support_vectors.row(s)));
        scores[i] = f;
    }
    return scores;
}

nlohmann::json SvmModel::hyperparameters_json() const {
    nlohmann::json j{{"kernel", "rbf"}, {"C", spec.c}, {"tol", spec.tol},
                     {"max_iter", spec.max_iter}};
    if (spec.gamma == 0.0)
        j["gamma"] = "scale";
    else
        j["gamma"] = spec.gamma;
    return j;
}

nlohmann::json SvmModel::parameters_json() const {
    return {{"gamma", gamma},
            {"bias", bias},
            {"dual_coef", dual_coef},
            {"support_vectors",
             {{"rows", support_vectors.rows},
              {"cols", support_vectors.cols},
              {"data", support_vectors.data}}}};
}

std::unique_ptr<Model> fit_svm(const SvmSpec& spec, const Matrix& x, const std::vector<int>& y,
                               uint64_t) {
    detail::require_positive(spec.c, "C");
    detail::require_positive(spec.tol, "tol");
    if (spec.gamma < 0) raise(Errc::ConfigMissingRequired, "gamma must be positive or 0 (scale)");

    auto model = std::make_unique<SvmModel>();
    model->spec = spec;
    model->gamma = spec.gamma == 0.0 ? rbf_gamma_scale(x) : spec.gamma;

    std::vector<int> y_pm(y.size());
    for (size_t i = 0; i < y.size(); ++i) y_pm[i] = y[i] == 1 ? 1 : -1;

    Matrix kernel = rbf_kernel(x, model->gamma);
    SmoResult res = smo_solve(kernel, y_pm, spec.c, spec.tol, spec.max_iter);
    model->converged_ = res.converged;
    model->bias = res.bias;
    for (size_t i = 0; i < x.rows; ++i) {
        if (res.alphas[i] <= 0) continue;
        model->support_vectors.push_row(x.row(i));
        model->dual_coef.push_back(res.alphas[i] * static_cast<double>(y_pm[i]));
    }
    return model;
}

} // namespace attrikit
