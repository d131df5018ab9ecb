#pragma once

#include <vector>

#include "dosetc/matrix.hpp"

namespace dosetc {

/// Multi-output LTI plant  xdot = A x + B u + w,  y_i = C_i x.
/// Construction enforces controllability of (A, B) and observability of
/// (A, [C_1; ...; C_ns]).
class PlantModel {
public:
    PlantModel(Matrix a, Matrix b, std::vector<Matrix> channels);

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& channel(std::size_t i) const { return channels_.at(i); }
    const std::vector<Matrix>& channels() const { return channels_; }

    std::size_t state_dim() const { return a_.rows(); }
    std::size_t input_dim() const { return b_.cols(); }
    std::size_t channel_count() const { return channels_.size(); }
    std::size_t output_dim(std::size_t i) const { return channels_.at(i).rows(); }

    Matrix stacked_output() const;

    std::vector<double> derivative(const std::vector<double>& x_p,
                                   const std::vector<double>& u,
                                   const std::vector<double>& w) const;

private:
    Matrix a_;
    Matrix b_;
    std::vector<Matrix> channels_;
};

bool check_controllability(const Matrix& a, const Matrix& b);
bool check_observability(const Matrix& a, const Matrix& c_stack);

}  // namespace dosetc
