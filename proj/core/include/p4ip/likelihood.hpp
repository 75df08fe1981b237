#pragma once

#include "p4ip/image.hpp"
#include "p4ip/operators.hpp"

namespace p4ip {

/// ln(t) for t >= epsilon; below the knee, the quadratic
/// a t^2 + b t + c with a = -1/(2 eps^2), b = 2/eps, c = ln(eps) - 3/2,
/// which matches ln in value and first two derivatives at t = epsilon.
/// Keeps the Poisson log-likelihood finite (and concave) for any real t.
double safe_log(double t, double epsilon);
/// Derivative of safe_log: 1/t above the knee, 2*a*t + b below.
double safe_log_d1(double t, double epsilon);

/// Scale-aware default knee: 1e-8 * (mean(y) + 1).
double default_epsilon(const Image& y);

/// Poisson negative log-likelihood for counts y under degradation H,
/// l(x) = sum_i [ -y_i * safe_log((Hx)_i) + (Hx)_i ],
/// with the x-independent Gamma(y+1) term dropped. The safe_log surrogate
/// makes value and gradient finite for all real x. Immutable; value/grad
/// are pure and reentrant.
class PoissonNll {
public:
    /// epsilon <= 0 selects default_epsilon(y).
    PoissonNll(Image y, LinearOperator op, double epsilon = 0.0);

    double value(const Image& x) const;
    /// -H^T(y .* safe_log_d1(Hx)) + H^T 1; the quadratic coupling term of
    /// the ADMM x-step is added by the solver.
    Image grad(const Image& x) const;

    double epsilon() const { return epsilon_; }
    const Image& counts() const { return y_; }
    const LinearOperator& op() const { return op_; }

private:
    Image y_;
    LinearOperator op_;
    double epsilon_;
    Image adjoint_ones_; // H^T 1, fixed per operator
};

} // namespace p4ip
