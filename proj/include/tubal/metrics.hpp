#ifndef TUBAL_METRICS_HPP
#define TUBAL_METRICS_HPP

#include "tubal/errors.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/// Recovery error ||X - X_hat||_F / ||X||_F against ground truth X.
template <class Real>
Real recovery_error(const Tensor3<Real>& x_hat, const Tensor3<Real>& x) {
    x_hat.check_same_dims(x, "recovery_error");
    const Real denom = fro_norm(x);
    if (denom == Real(0))
        throw ArgumentError("recovery_error: ground truth has zero norm");
    return fro_norm(x - x_hat) / denom;
}

}  // namespace tubal

#endif
