// shared test helpers
#pragma once

#include "polaron/config.hpp"
#include "polaron/experiments.hpp"

#include <Eigen/Dense>

namespace testing {

// desk-small toy model, built once per process
inline const polaron::ToyModel& desk_small() {
    static const polaron::ToyModel model(polaron::preset_config("desk-small"));
    return model;
}

// Dense matrix of a field operator, by applying it to unit vectors.
template <class Op>
Eigen::MatrixXcd dense_field_operator(const polaron::Grid3& g, Op op) {
    const Eigen::Index n = g.size();
    Eigen::MatrixXcd A(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        polaron::Field e(g);
        e.values[j] = 1.0;
        A.col(j) = op(e).values;
    }
    return A;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
