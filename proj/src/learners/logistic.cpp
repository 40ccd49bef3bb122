#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

namespace {

// log(1 + exp(t)) without overflow.
double log1pexp(double t) {
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double dot(const std::vector<double>& w, std::span<const double> row) {
    double s = 0;
    for (size_t j = 0; j < w.size(); ++j) s += w[j] * row[j];
    return s;
}

} // namespace

LossGrad logistic_loss_grad(const std::vector<double>& w, double b, const Matrix& x,
                            const std::vector<int>& y, double c) {
    if (w.size() != x.cols) raise(Errc::DimensionMismatch, "weight vector width mismatch");
    if (y.size() != x.rows) raise(Errc::LengthMismatch, "label count mismatch");

    LossGrad out;
    out.grad_w = w;
    double wsq = 0;
    for (double v : w) wsq += v * v;
    out.loss = 0.5 * wsq;

    for (size_t i = 0; i < x.rows; ++i) {
        double ypm = y[i] == 1 ? 1.0 : -1.0;
        double t = -ypm * (dot(w, x.row(i)) + b);
        out.loss += c * log1pexp(t);
        double coef = c * -ypm * sigmoid(t);
        auto row = x.row(i);
        for (size_t j = 0; j < x.cols; ++j) out.grad_w[j] += coef * row[j];
        out.grad_b += coef;
    }
    return out;
}

namespace {

// Gradient descent with Barzilai-Borwein steps and Armijo backtracking;
// monotone in the objective, stops on the gradient infinity norm.
struct GdResult {
    std::vector<double> w;
    double b = 0;
    bool converged = false;
};

GdResult minimize_logistic(const Matrix& x, const std::vector<int>& y, double c, double tol,
                           size_t max_iter) {
    GdResult cur;
    cur.w.assign(x.cols, 0.0);
    LossGrad lg = logistic_loss_grad(cur.w, cur.b, x, y, c);

    double step = 1.0 / (1.0 + c * static_cast<double>(x.rows));

    for (size_t iter = 0; iter < max_iter; ++iter) {
        double gmax = std::abs(lg.grad_b);
        for (double g : lg.grad_w) gmax = std::max(gmax, std::abs(g));
        if (gmax <= tol) {
            cur.converged = true;
            break;
        }

        double gsq = lg.grad_b * lg.grad_b;
        for (double g : lg.grad_w) gsq += g * g;

        double t = step;
        std::vector<double> w_next(x.cols);
        double b_next = 0;
        LossGrad lg_next;
        bool improved = false;
        for (int back = 0; back < 60; ++back) {
            for (size_t j = 0; j < x.cols; ++j) w_next[j] = cur.w[j] - t * lg.grad_w[j];
            b_next = cur.b - t * lg.grad_b;
            lg_next = logistic_loss_grad(w_next, b_next, x, y, c);
            if (lg_next.loss <= lg.loss - 1e-4 * t * gsq) {
                improved = true;
                break;
            }
            t /= 2.0;
        }
        if (!improved) break;

        // BB1 step for the next iterate: s = x_new - x_old = -t*g, y = g_new - g_old.
        double ss = 0, sy = 0;
        for (size_t j = 0; j < x.cols; ++j) {
            double s = w_next[j] - cur.w[j];
            ss += s * s;
            sy += s * (lg_next.grad_w[j] - lg.grad_w[j]);
        }
        double sb = b_next - cur.b;
        ss += sb * sb;
        sy += sb * (lg_next.grad_b - lg.grad_b);
        step = sy > 0 ? std::clamp(ss / sy, 1e-12, 1e12) : t;

        cur.w = std::move(w_next);
        cur.b = b_next;
        lg = std::move(lg_next);
    }
    return cur;
}

} // namespace

std::vector<double> LogisticModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows);
    for (size_t i = 0; i < x.rows; ++i) scores[i] = sigmoid(dot(w, x.row(i)) + b);
    return scores;
}

nlohmann::json LogisticModel::hyperparameters_json() const {
    return {{"C", spec.l2_c}, {"tol", spec.tol}, {"max_iter", spec.max_iter},
            {"penalty", "l2"}};
}

nlohmann::json LogisticModel::parameters_json() const {
    return {{"weights", w}, {"bias", b}};
}

std::unique_ptr<Model> fit_logistic(const LogisticRegressionSpec& spec, const Matrix& x,
                                    const std::vector<int>& y, uint64_t) {
    detail::require_positive(spec.l2_c, "C");
    detail::require_positive(spec.tol, "tol");
    detail::require_count(spec.max_iter, "max_iter");

    auto model = std::make_unique<LogisticModel>();
    model->spec = spec;
    GdResult res = minimize_logistic(x, y, spec.l2_c, spec.tol, spec.max_iter);
    model->w = std::move(res.w);
    model->b = res.b;
    model->converged_ = res.converged;
    return model;
}

} // namespace attrikit
