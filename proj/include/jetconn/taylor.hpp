#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "jetconn/errors.hpp"

namespace jetconn {

/// Truncated multivariate Taylor scalar: value plus all partial derivatives
/// up to `order()` (0..3) with respect to a flat list of `nvars()` seed
/// variables. Mixed partials are stored once in canonical (sorted) index
/// order; the accessors sort their arguments, so symmetry of mixed partials
/// holds identically. Arithmetic is exact truncated-Taylor algebra:
/// products follow the Leibniz rule, compositions the chain rule, both to
/// the stored order.
class Taylor {
public:
    Taylor() : nv_(0), order_(0), coef_(1, 0.0) {}

    static Taylor constant(double v, int nvars, int order) {
        Taylor t;
        t.nv_ = nvars;
        t.order_ = order;
        t.coef_.assign(size_for(nvars, order), 0.0);
        t.coef_[0] = v;
        return t;
    }

    /// Seed variable `index` (0-based in the flat list) at value `v`.
    static Taylor variable(double v, int index, int nvars, int order) {
        Taylor t = constant(v, nvars, order);
        if (order >= 1) {
            if (index < 0 || index >= nvars) throw DimensionError("Taylor::variable: index out of range");
            t.coef_[1 + index] = 1.0;
        }
        return t;
    }

    int nvars() const { return nv_; }
    int order() const { return order_; }
    double value() const { return coef_[0]; }

    double d1(int a) const {
        if (order_ < 1) return 0.0;
        return coef_[1 + a];
    }

    double d2(int a, int b) const {
        if (order_ < 2) return 0.0;
        if (a > b) std::swap(a, b);
        return coef_[off2() + idx2(a, b)];
    }

    double d3(int a, int b, int c) const {
        if (order_ < 3) return 0.0;
        sort3(a, b, c);
        return coef_[off3() + idx3(a, b, c)];
    }

    bool is_constant() const {
        for (std::size_t k = 1; k < coef_.size(); ++k)
            if (coef_[k] != 0.0) return false;
        return true;
    }

    bool is_finite() const {
        for (double c : coef_)
            if (!std::isfinite(c)) return false;
        return true;
    }

    /// Partial derivative with respect to seed `a`, as a Taylor of one
    /// order less. Requires order() >= 1.
    Taylor derive(int a) const {
        if (order_ < 1) throw UnsupportedOrder("Taylor::derive: needs order >= 1");
        Taylor r = constant(d1(a), nv_, order_ - 1);
        if (r.order_ >= 1)
            for (int x = 0; x < nv_; ++x) r.coef_[1 + x] = d2(a, x);
        if (r.order_ >= 2)
            for (int y = 0; y < nv_; ++y)
                for (int x = 0; x <= y; ++x) r.coef_[r.off2() + idx2(x, y)] = d3(a, x, y);
        return r;
    }

    /// Truncate to a lower order (no-op if already lower).
    Taylor truncated(int order) const {
        if (order >= order_) return *this;
        Taylor r = constant(0.0, nv_, order);
        std::copy(coef_.begin(), coef_.begin() + static_cast<std::ptrdiff_t>(r.coef_.size()), r.coef_.begin());
        return r;
    }

    // ---- arithmetic ------------------------------------------------------

    Taylor operator-() const {
        Taylor r = *this;
        for (double& c : r.coef_) c = -c;
        return r;
    }

    friend Taylor operator+(const Taylor& a, const Taylor& b) {
        auto [x, y] = align(a, b);
        for (std::size_t k = 0; k < x.coef_.size(); ++k) x.coef_[k] += y.coef_[k];
        return x;
    }

    friend Taylor operator-(const Taylor& a, const Taylor& b) {
        auto [x, y] = align(a, b);
        for (std::size_t k = 0; k < x.coef_.size(); ++k) x.coef_[k] -= y.coef_[k];
        return x;
    }

    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        auto [f, g] = align(a, b);
        const int nv = f.nv_, ord = f.order_;
        Taylor r = constant(0.0, nv, ord);
        r.coef_[0] = f.coef_[0] * g.coef_[0];
        if (ord >= 1)
            for (int x = 0; x < nv; ++x)
                r.coef_[1 + x] = f.d1(x) * g.value() + f.value() * g.d1(x);
        if (ord >= 2)
            for (int y = 0; y < nv; ++y)
                for (int x = 0; x <= y; ++x)
                    r.coef_[r.off2() + idx2(x, y)] = f.d2(x, y) * g.value() + f.value() * g.d2(x, y) +
                                                     f.d1(x) * g.d1(y) + f.d1(y) * g.d1(x);
        if (ord >= 3)
            for (int z = 0; z < nv; ++z)
                for (int y = 0; y <= z; ++y)
                    for (int x = 0; x <= y; ++x)
                        r.coef_[r.off3() + idx3(x, y, z)] =
                            f.d3(x, y, z) * g.value() + f.value() * g.d3(x, y, z) +
                            f.d2(x, y) * g.d1(z) + f.d2(x, z) * g.d1(y) + f.d2(y, z) * g.d1(x) +
                            g.d2(x, y) * f.d1(z) + g.d2(x, z) * f.d1(y) + g.d2(y, z) * f.d1(x);
        return r;
    }

    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        if (b.value() == 0.0) throw DomainError("division by zero");
        const double u = b.value();
        const double iu = 1.0 / u;
        return a * chain(b, iu, -iu * iu, 2.0 * iu * iu * iu, -6.0 * iu * iu * iu * iu);
    }

    friend Taylor operator+(const Taylor& a, double s) { Taylor r = a; r.coef_[0] += s; return r; }
    friend Taylor operator+(double s, const Taylor& a) { return a + s; }
    friend Taylor operator-(const Taylor& a, double s) { Taylor r = a; r.coef_[0] -= s; return r; }
    friend Taylor operator-(double s, const Taylor& a) { Taylor r = -a; r.coef_[0] += s; return r; }
    friend Taylor operator*(const Taylor& a, double s) {
        Taylor r = a;
        for (double& c : r.coef_) c *= s;
        return r;
    }
    friend Taylor operator*(double s, const Taylor& a) { return a * s; }
    friend Taylor operator/(const Taylor& a, double s) {
        if (s == 0.0) throw DomainError("division by zero");
        return a * (1.0 / s);
    }
    friend Taylor operator/(double s, const Taylor& a) { return constant(s, a.nv_, a.order_) / a; }

    Taylor& operator+=(const Taylor& o) { *this = *this + o; return *this; }
    Taylor& operator-=(const Taylor& o) { *this = *this - o; return *this; }
    Taylor& operator*=(const Taylor& o) { *this = *this * o; return *this; }
    Taylor& operator/=(const Taylor& o) { *this = *this / o; return *this; }
    Taylor& operator+=(double s) { coef_[0] += s; return *this; }
    Taylor& operator*=(double s) { for (double& c : coef_) c *= s; return *this; }

    /// Univariate chain rule: given f with derivatives f0..f3 at u.value(),
    /// produce f(u) as a Taylor in u's seed variables.
    static Taylor chain(const Taylor& u, double f0, double f1, double f2, double f3) {
        const int nv = u.nv_, ord = u.order_;
        Taylor r = constant(f0, nv, ord);
        if (ord >= 1)
            for (int x = 0; x < nv; ++x) r.coef_[1 + x] = f1 * u.d1(x);
        if (ord >= 2)
            for (int y = 0; y < nv; ++y)
                for (int x = 0; x <= y; ++x)
                    r.coef_[r.off2() + idx2(x, y)] = f2 * u.d1(x) * u.d1(y) + f1 * u.d2(x, y);
        if (ord >= 3)
            for (int z = 0; z < nv; ++z)
                for (int y = 0; y <= z; ++y)
                    for (int x = 0; x <= y; ++x)
                        r.coef_[r.off3() + idx3(x, y, z)] =
                            f3 * u.d1(x) * u.d1(y) * u.d1(z) +
                            f2 * (u.d2(x, y) * u.d1(z) + u.d2(x, z) * u.d1(y) + u.d2(y, z) * u.d1(x)) +
                            f1 * u.d3(x, y, z);
        return r;
    }

private:
    int nv_;
    int order_;
    // coef_[0] value; [1..nv] gradient; then packed symmetric order-2 and
    // order-3 blocks (index tuples sorted ascending).
    std::vector<double> coef_;

    std::size_t off2() const { return 1 + static_cast<std::size_t>(nv_); }
    std::size_t off3() const { return off2() + static_cast<std::size_t>(nv_) * (nv_ + 1) / 2; }

    static std::size_t idx2(int a, int b) { return static_cast<std::size_t>(b) * (b + 1) / 2 + a; }
    static std::size_t idx3(int a, int b, int c) {
        return static_cast<std::size_t>(c) * (c + 1) * (c + 2) / 6 + static_cast<std::size_t>(b) * (b + 1) / 2 + a;
    }

    static void sort3(int& a, int& b, int& c) {
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
    }

    static std::size_t size_for(int nv, int order) {
        std::size_t s = 1;
        if (order >= 1) s += static_cast<std::size_t>(nv);
        if (order >= 2) s += static_cast<std::size_t>(nv) * (nv + 1) / 2;
        if (order >= 3) s += static_cast<std::size_t>(nv) * (nv + 1) * (nv + 2) / 6;
        return s;
    }

    /// Bring two operands to a common (nvars, order); constants broadcast.
    static std::pair<Taylor, Taylor> align(const Taylor& a, const Taylor& b) {
        Taylor x = a, y = b;
        if (x.nv_ != y.nv_) {
            if (x.nv_ == 0 && x.is_constant()) x = constant(x.value(), y.nv_, y.order_);
            else if (y.nv_ == 0 && y.is_constant()) y = constant(y.value(), x.nv_, x.order_);
            else throw DimensionError("Taylor: mixed seed spaces");
        }
        const int ord = std::min(x.order_, y.order_);
        return {x.truncated(ord), y.truncated(ord)};
    }
};

// ---- elementary functions ----------------------------------------------

inline Taylor sin(const Taylor& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return Taylor::chain(u, s, c, -s, -c);
}

inline Taylor cos(const Taylor& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return Taylor::chain(u, c, -s, -c, s);
}

inline Taylor tan(const Taylor& u) {
    const double t = std::tan(u.value());
    if (!std::isfinite(t)) throw DomainError("tan: pole");
    const double w = 1.0 + t * t;
    // tan' = w, tan'' = 2 t w, tan''' = w (2 w + 4 t^2)
    return Taylor::chain(u, t, w, 2.0 * t * w, w * (2.0 * w + 4.0 * t * t));
}

inline Taylor exp(const Taylor& u) {
    const double e = std::exp(u.value());
    return Taylor::chain(u, e, e, e, e);
}

inline Taylor log(const Taylor& u) {
    const double v = u.value();
    if (v <= 0.0) throw DomainError("log: nonpositive argument");
    const double iv = 1.0 / v;
    return Taylor::chain(u, std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Taylor sqrt(const Taylor& u) {
    const double v = u.value();
    if (v < 0.0) throw DomainError("sqrt: negative argument");
    if (v == 0.0 && u.order() >= 1 && !u.is_constant()) throw DomainError("sqrt: derivative at zero");
    const double r = std::sqrt(v);
    if (v == 0.0) return Taylor::chain(u, 0.0, 0.0, 0.0, 0.0);
    return Taylor::chain(u, r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v));
}

inline Taylor abs(const Taylor& u) {
    const double sgn = u.value() < 0.0 ? -1.0 : 1.0;
    return Taylor::chain(u, std::fabs(u.value()), sgn, 0.0, 0.0);
}

/// Integer power by the direct power rule; valid for negative bases.
inline Taylor pow_int(const Taylor& u, long long k) {
    const double v = u.value();
    if (k < 0 && v == 0.0) throw DomainError("pow: zero base, negative exponent");
    auto ipow = [](double x, long long e) {
        if (e == 0) return 1.0;
        bool neg = e < 0;
        unsigned long long m = neg ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
        double r = 1.0, b = x;
        while (m) {
            if (m & 1ULL) r *= b;
            b *= b;
            m >>= 1;
        }
        return neg ? 1.0 / r : r;
    };
    const double kd = static_cast<double>(k);
    // u^(k-j) factors; 0^0 := 1 inside the falling-factorial products.
    auto term = [&](int j) {
        double c = 1.0;
        for (int i = 0; i < j; ++i) c *= (kd - i);
        if (c == 0.0) return 0.0;
        return c * ipow(v, k - j);
    };
    return Taylor::chain(u, term(0), term(1), term(2), term(3));
}

inline Taylor pow(const Taylor& a, const Taylor& b) {
    if (b.is_constant()) {
        const double e = b.value();
        if (e == std::nearbyint(e) && std::fabs(e) <= 1024.0)
            return pow_int(a, static_cast<long long>(std::llrint(e)));
        if (a.value() <= 0.0) throw DomainError("pow: nonpositive base with non-integer exponent");
        return exp(b.truncated(a.order()) * log(a));
    }
    if (a.value() <= 0.0) throw DomainError("pow: nonpositive base with variable exponent");
    return exp(b * log(a));
}

inline Taylor pow(const Taylor& a, double e) { return pow(a, Taylor::constant(e, a.nvars(), a.order())); }

// ---- smooth-field utilities ----------------------------------------------

/// A scalar field over a flat list of variables, evaluated in Taylor
/// arithmetic. Evaluation must be deterministic and side-effect-free.
using FlatField = std::function<Taylor(std::span<const Taylor>)>;

/// Seed every coordinate of `point` as an independent Taylor variable.
inline std::vector<Taylor> seed_point(std::span<const double> point, int order) {
    const int nv = static_cast<int>(point.size());
    std::vector<Taylor> vars;
    vars.reserve(point.size());
    for (int i = 0; i < nv; ++i) vars.push_back(Taylor::variable(point[i], i, nv, order));
    return vars;
}

/// All partial derivatives of `field` at `point` up to `order` (1..3),
/// exact to machine rounding. Order 0 is served by the order-1 path.
inline Taylor eval_derivatives(const FlatField& field, std::span<const double> point, int order) {
    if (order < 0 || order > 3) throw DimensionError("eval_derivatives: order must be in 0..3");
    const int eff = std::max(order, 1);
    auto vars = seed_point(point, eff);
    Taylor r = field(vars);
    if (!r.is_finite()) throw DomainError("eval_derivatives: non-finite result");
    return order == 0 ? r.truncated(0) : r;
}

/// AD-versus-central-difference deviation report for orders 1 and 2.
/// Used by the test suite, not by production paths.
struct FdReport {
    double max_rel_dev = 0.0;    // max over both orders
    double dev_order1 = 0.0;
    double dev_order2 = 0.0;
};

inline FdReport fd_check(const FlatField& field, std::span<const double> point, double step) {
    if (!(step > 0.0)) throw DimensionError("fd_check: step must be positive");
    const int nv = static_cast<int>(point.size());
    Taylor ad = eval_derivatives(field, point, 2);

    auto value_at = [&](std::span<const double> p) {
        auto vars = seed_point(p, 1); // order-1 seeds; only the value is used
        return field(vars).value();
    };
    std::vector<double> p(point.begin(), point.end());
    auto shifted = [&](int a, double da, int b, double db) {
        std::vector<double> q = p;
        q[a] += da;
        if (b >= 0) q[b] += db;
        return q;
    };

    FdReport rep;
    auto track = [](double& slot, double ad_v, double fd_v) {
        const double dev = std::fabs(ad_v - fd_v) / std::max(1.0, std::fabs(ad_v));
        slot = std::max(slot, dev);
    };

    const double f0 = value_at(p);
    for (int a = 0; a < nv; ++a) {
        const double fp = value_at(shifted(a, step, -1, 0.0));
        const double fm = value_at(shifted(a, -step, -1, 0.0));
        track(rep.dev_order1, ad.d1(a), (fp - fm) / (2.0 * step));
        track(rep.dev_order2, ad.d2(a, a), (fp - 2.0 * f0 + fm) / (step * step));
        for (int b = 0; b < a; ++b) {
            const double fpp = value_at(shifted(a, step, b, step));
            const double fpm = value_at(shifted(a, step, b, -step));
            const double fmp = value_at(shifted(a, -step, b, step));
            const double fmm = value_at(shifted(a, -step, b, -step));
            track(rep.dev_order2, ad.d2(a, b), (fpp - fpm - fmp + fmm) / (4.0 * step * step));
        }
    }
    rep.max_rel_dev = std::max(rep.dev_order1, rep.dev_order2);
    return rep;
}

/// Multivariate chain rule: compose a function's Taylor data (in k inner
/// variables) with k Taylor arguments sharing a common outer seed space.
/// outer.d*(e,..) are read as the function's partials with respect to its
/// own arguments.
inline Taylor compose_multi(const Taylor& outer, std::span<const Taylor> args) {
    const int k = outer.nvars();
    if (static_cast<int>(args.size()) != k) throw DimensionError("compose_multi: argument count mismatch");
    if (k == 0) return outer;
    const int nv = args[0].nvars();
    int ord = outer.order();
    for (const Taylor& a : args) {
        if (a.nvars() != nv) throw DimensionError("compose_multi: mixed outer seed spaces");
        ord = std::min(ord, a.order());
    }
    std::vector<Taylor> A;
    A.reserve(args.size());
    for (const Taylor& a : args) A.push_back(a.truncated(ord));

    Taylor r = Taylor::constant(outer.value(), nv, ord);
    if (ord < 1) return r;

    // grad
    std::vector<double> g(static_cast<std::size_t>(nv), 0.0);
    for (int e = 0; e < k; ++e) {
        const double fe = outer.d1(e);
        if (fe == 0.0) continue;
        for (int x = 0; x < nv; ++x) g[x] += fe * A[e].d1(x);
    }
    Taylor acc = r;
    // write via chain on a fake variable would be awkward; rebuild by sums of
    // products instead: r = f0 + sum_e f_e*(A_e - a_e) + ... is wrong beyond
    // order 1. Assemble coefficients directly through accessors below.
    struct Builder {
        int nv, ord;
        Taylor t;
        Builder(double v, int nv_, int ord_) : nv(nv_), ord(ord_), t(Taylor::constant(v, nv_, ord_)) {}
    };
    (void)acc;

    // Direct coefficient assembly.
    // order 1
    std::vector<double> h;   // packed order-2
    std::vector<double> c3;  // packed order-3
    if (ord >= 2) h.assign(static_cast<std::size_t>(nv) * (nv + 1) / 2, 0.0);
    if (ord >= 3) c3.assign(static_cast<std::size_t>(nv) * (nv + 1) * (nv + 2) / 6, 0.0);

    auto h_at = [&](int x, int y) -> double& {
        if (x > y) std::swap(x, y);
        return h[static_cast<std::size_t>(y) * (y + 1) / 2 + x];
    };
    auto c_at = [&](int x, int y, int z) -> double& {
        if (x > y) std::swap(x, y);
        if (y > z) std::swap(y, z);
        if (x > y) std::swap(x, y);
        return c3[static_cast<std::size_t>(z) * (z + 1) * (z + 2) / 6 + static_cast<std::size_t>(y) * (y + 1) / 2 + x];
    };

    if (ord >= 2) {
        for (int e = 0; e < k; ++e) {
            const double fe = outer.d1(e);
            if (fe != 0.0)
                for (int y = 0; y < nv; ++y)
                    for (int x = 0; x <= y; ++x) h_at(x, y) += fe * A[e].d2(x, y);
            for (int f = 0; f < k; ++f) {
                const double fef = outer.d2(e, f);
                if (fef == 0.0) continue;
                for (int y = 0; y < nv; ++y)
                    for (int x = 0; x <= y; ++x) h_at(x, y) += fef * A[e].d1(x) * A[f].d1(y);
            }
        }
    }
    if (ord >= 3) {
        for (int e = 0; e < k; ++e) {
            const double fe = outer.d1(e);
            if (fe != 0.0)
                for (int z = 0; z < nv; ++z)
                    for (int y = 0; y <= z; ++y)
                        for (int x = 0; x <= y; ++x) c_at(x, y, z) += fe * A[e].d3(x, y, z);
            for (int f = 0; f < k; ++f) {
                const double fef = outer.d2(e, f);
                if (fef != 0.0)
                    for (int z = 0; z < nv; ++z)
                        for (int y = 0; y <= z; ++y)
                            for (int x = 0; x <= y; ++x)
                                c_at(x, y, z) += fef * (A[e].d2(x, y) * A[f].d1(z) + A[e].d2(x, z) * A[f].d1(y) +
                                                        A[e].d2(y, z) * A[f].d1(x));
                for (int gg = 0; gg < k; ++gg) {
                    const double fefg = outer.d3(e, f, gg);
                    if (fefg == 0.0) continue;
                    for (int z = 0; z < nv; ++z)
                        for (int y = 0; y <= z; ++y)
                            for (int x = 0; x <= y; ++x)
                                c_at(x, y, z) += fefg * A[e].d1(x) * A[f].d1(y) * A[gg].d1(z);
                }
            }
        }
    }

    // Pack into a Taylor via variable/chain-free reconstruction: start from
    // the constant and add basis contributions using arithmetic identities.
    // Cheaper: poke through a helper constructed coefficient vector.
    Taylor out = Taylor::constant(outer.value(), nv, ord);
    // Use derive-free injection: rebuild via sum of monomial seeds would lose
    // exactness; instead expose a raw setter through friendship-free path:
    // reconstruct with the same layout by arithmetic on seeded variables is
    // overkill, so rely on the fact that Taylor's storage is private and add
    // a dedicated raw factory.
    out = Taylor::from_raw(outer.value(), g, h, c3, nv, ord);
    return out;
}

} // namespace jetconn
