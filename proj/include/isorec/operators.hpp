#pragma once

#include <string>
#include <variant>

namespace isorec {

/// Constant coefficients of P(D) = D^2 + p D + q.
struct OperatorSpec {
    double p = 0.0;
    double q = 0.0;
};

/// P(D) = (D - alpha)^2.
struct DoubleRoot {
    double alpha = 0.0;
};

/// P(D) = (D - alpha)(D - beta), alpha < beta.
struct DistinctReal {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Characteristic roots alpha +- i beta, beta > 0. The Green's kernel is
/// e^{-alpha t} sin(beta t) / beta, which pins P(D) = D^2 - 2 alpha D + alpha^2 + beta^2.
struct ComplexPair {
    double alpha = 0.0;
    double beta = 1.0;
};

/// Root-type classification of a second-order operator. Construct through the
/// named factories (which validate the variant invariants) or via classify().
class OperatorClass {
public:
    using Variant = std::variant<DoubleRoot, DistinctReal, ComplexPair>;

    static OperatorClass double_root(double alpha);
    static OperatorClass distinct_real(double alpha, double beta);
    static OperatorClass complex_pair(double alpha, double beta);

    const Variant& variant() const noexcept { return variant_; }

    /// Coefficients (p, q) reconstructed from the root parametrization.
    OperatorSpec coefficients() const noexcept;

    /// Mean root sigma: every kernel is e^{-sigma t} times an even function of kappa t.
    double mean_root() const noexcept;

    /// kappa^2 = p^2/4 - q; negative for complex pairs.
    double half_gap_squared() const noexcept;

    /// p == 0 within `tol` relative to the root scale.
    bool is_self_adjoint(double tol = 1e-12) const noexcept;

    /// Short human-readable form such as "D^2-1" or "(D-0.5)(D-2)".
    std::string describe() const;

private:
    explicit OperatorClass(Variant v) : variant_(v) {}
    Variant variant_;
};

double default_classification_tolerance(OperatorSpec spec) noexcept;

/// Splits on the sign of the discriminant p^2 - 4q (|disc| <= tol is a double root).
OperatorClass classify(OperatorSpec spec);
OperatorClass classify(OperatorSpec spec, double tol);

/// Green's kernel g with g(0) = 0, g'(0) = 1.
double green_kernel(const OperatorClass& op, double t);
double green_kernel_derivative(const OperatorClass& op, double t);
/// G(t) = integral of g over [0, t].
double green_antiderivative(const OperatorClass& op, double t);

/// Right end of the largest interval [0, delta) on which g is strictly
/// increasing (the first zero of g'). +infinity when g' never vanishes.
double monotonicity_threshold(const OperatorClass& op) noexcept;

/// Unique t0 in (0, a) with g(t0) = g(a) / 2. Throws out-of-range for a >= delta.
double t_zero(const OperatorClass& op, double a);

/// sup |h(0)| over the univariate class with h(a) = h'(a) = 0.
double ext1(const OperatorClass& op, double a);
/// Same supremum with the extra constraint h'(0) = 0: G(a) - 2 G(t0).
double ext2(const OperatorClass& op, double a);

/// Univariate extremal data for one operator and segment length a.
struct ExtremalProfile {
    OperatorClass op;
    double a;
    double delta;
    double t0;
    double ext1;
    double ext2;

    /// Extremal function: G(a-t) - 2G(t0-t) on [0,t0], G(a-t) on (t0,a], 0 beyond.
    double h_tilde(double t) const;
    double h_tilde_derivative(double t) const;
    /// Piecewise second derivative (right-continuous at the kinks t0 and a).
    double h_tilde_second_derivative(double t) const;
};

ExtremalProfile extremal_profile(const OperatorClass& op, double a);

double h_tilde(const OperatorClass& op, double a, double t);

}  // namespace isorec
