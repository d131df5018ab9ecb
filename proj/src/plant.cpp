#include "dosetc/plant.hpp"

#include <utility>

namespace dosetc {

namespace {

Matrix reachability_matrix(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.rows();
    Matrix block(n, n * b.cols());
    Matrix power = b;
    for (std::size_t k = 0; k < n; ++k) {
        block.set_block(0, k * b.cols(), power);
        power = a * power;
    }
    return block;
}

}  // namespace

bool check_controllability(const Matrix& a, const Matrix& b) {
    if (!a.is_square() || b.rows() != a.rows()) {
        throw dimension_error("check_controllability: shape mismatch");
    }
    return numerical_rank(reachability_matrix(a, b)) == a.rows();
}

bool check_observability(const Matrix& a, const Matrix& c_stack) {
    if (!a.is_square() || c_stack.cols() != a.rows()) {
        throw dimension_error("check_observability: shape mismatch");
    }
    return check_controllability(a.transpose(), c_stack.transpose());
}

PlantModel::PlantModel(Matrix a, Matrix b, std::vector<Matrix> channels)
    : a_(std::move(a)), b_(std::move(b)), channels_(std::move(channels)) {
    if (!a_.is_square()) {
        throw dimension_error("PlantModel: A must be square");
    }
    if (b_.rows() != a_.rows()) {
        throw dimension_error("PlantModel: B row count must match A");
    }
    if (channels_.empty()) {
        throw dimension_error("PlantModel: at least one output channel required");
    }
    for (const Matrix& c : channels_) {
        if (c.cols() != a_.rows()) {
            throw dimension_error("PlantModel: channel column count must match A");
        }
    }
    if (!check_controllability(a_, b_)) {
        throw rank_error("PlantModel: (A, B) not controllable");
    }
    if (!check_observability(a_, stacked_output())) {
        throw rank_error("PlantModel: (A, C) not observable");
    }
}

Matrix PlantModel::stacked_output() const {
    std::size_t total = 0;
    for (const Matrix& c : channels_) total += c.rows();
    Matrix stack(total, a_.rows());
    std::size_t r = 0;
    for (const Matrix& c : channels_) {
        stack.set_block(r, 0, c);
        r += c.rows();
    }
    return stack;
}

std::vector<double> PlantModel::derivative(const std::vector<double>& x_p,
                                           const std::vector<double>& u,
                                           const std::vector<double>& w) const {
    if (x_p.size() != state_dim() || u.size() != input_dim() || w.size() != state_dim()) {
        throw dimension_error("PlantModel::derivative: vector size mismatch");
    }
    std::vector<double> dx = a_.apply(x_p);
    const std::vector<double> bu = b_.apply(u);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += bu[i] + w[i];
    return dx;
}

}  // namespace dosetc
