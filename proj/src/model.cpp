#include "mawhf/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mawhf {

double NegativeMixture::total_weight() const {
    double w = 0.0;
    for (const auto& c : components) w += c.weight;
    return w;
}

double NegativeMixture::mean(int side) const {
    double mu = 0.0;
    for (const auto& c : components) {
        if (c.kind == MixtureComponent::Kind::atom) {
            mu += c.weight * c.location;
        } else {
            mu += c.weight * side * static_cast<double>(c.shape) / c.rate;
        }
    }
    return mu;
}

Complex NegativeMixture::laplace(Complex u, int side) const {
    Complex acc{0.0, 0.0};
    for (const auto& c : components) {
        if (c.kind == MixtureComponent::Kind::atom) {
            acc += c.weight * std::exp(u * c.location);
        } else {
            // X = side * Gamma(shape, rate)
            const Complex ratio = c.rate / (c.rate - static_cast<double>(side) * u);
            acc += c.weight * std::pow(ratio, c.shape);
        }
    }
    return acc;
}

double NegativeMixture::min_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : components) {
        if (c.kind == MixtureComponent::Kind::erlang) r = std::min(r, c.rate);
    }
    return r;
}

bool NegativeMixture::has_nonzero_atoms() const {
    for (const auto& c : components) {
        if (c.kind == MixtureComponent::Kind::atom && c.location != 0.0) return true;
    }
    return false;
}

double SwitchJumpLaw::mean(int side) const { return (1.0 - atom0) * neg.mean(side); }

Complex SwitchJumpLaw::laplace(Complex u, int side) const {
    Complex v = atom0;
    if (atom0 < 1.0) v += (1.0 - atom0) * neg.laplace(u, side);
    return v;
}

ModelSpec ModelSpec::make(int m) {
    ModelSpec s;
    s.m = m;
    s.nu = Vector::Ones(m);
    s.embedded = Matrix::Zero(m, m);
    if (m == 1) {
        s.embedded(0, 0) = 1.0;
    } else {
        for (int k = 0; k < m; ++k)
            for (int r = 0; r < m; ++r)
                if (k != r) s.embedded(k, r) = 1.0 / (m - 1);
    }
    s.a = -Vector::Ones(m);
    s.b2 = Vector::Zero(m);
    s.lambda = Vector::Zero(m);
    s.c = Vector::Ones(m);
    s.pos_weight = Vector::Ones(m);
    s.neg_jump.assign(m, NegativeMixture{});
    s.switch_jump.assign(m, std::vector<SwitchJumpLaw>(m));
    return s;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.field << ": " << v.rule << '\n';
    return os.str();
}

namespace {

constexpr double kMassTol = 1e-12;

void check_mixture(const NegativeMixture& mix, int side, const std::string& field, bool zero_drift,
                   std::vector<Violation>& out) {
    if (mix.components.empty()) {
        out.push_back({field, "mixture has no components"});
        return;
    }
    for (std::size_t i = 0; i < mix.components.size(); ++i) {
        const auto& c = mix.components[i];
        const std::string f = field + "[" + std::to_string(i) + "]";
        if (!(c.weight > 0.0)) out.push_back({f, "mixture weight must be positive"});
        if (c.kind == MixtureComponent::Kind::atom) {
            if (!(side * c.location > 0.0))
                out.push_back({f, "atom must lie strictly inside the mixture half-line"});
            if (zero_drift) out.push_back({f, "zero_drift mode requires atomless (Erlang) jump laws"});
        } else {
            if (!(c.rate > 0.0) || !std::isfinite(c.rate)) out.push_back({f, "erlang rate must be positive"});
            if (c.shape < 1) out.push_back({f, "erlang shape must be >= 1"});
        }
    }
    if (std::abs(mix.total_weight() - 1.0) > kMassTol) out.push_back({field, "mixture weights must sum to 1"});
}

bool strongly_connected(const Matrix& q) {
    const int m = static_cast<int>(q.rows());
    auto reach = [&](bool transpose) {
        std::vector<char> seen(m, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            for (int r = 0; r < m; ++r) {
                const double w = transpose ? q(r, k) : q(k, r);
                if (r != k && w > 0.0 && !seen[r]) {
                    seen[r] = 1;
                    stack.push_back(r);
                }
            }
        }
        for (char c : seen)
            if (!c) return false;
        return true;
    };
    return reach(false) && reach(true);
}

}  // namespace

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport rep;
    auto& out = rep.violations;
    const int m = spec.m;
    if (m < 1) {
        out.push_back({"m", "number of states must be >= 1"});
        return rep;
    }
    auto check_len = [&](const Vector& v, const char* name) {
        if (v.size() != m) {
            out.push_back({name, "length must equal m"});
            return false;
        }
        return true;
    };
    bool shapes = check_len(spec.nu, "nu") & check_len(spec.a, "a") & check_len(spec.lambda, "lambda") &
                  check_len(spec.c, "c") & check_len(spec.pos_weight, "pos_weight");
    if (spec.b2.size() != 0) shapes &= check_len(spec.b2, "b2");
    if (spec.embedded.rows() != m || spec.embedded.cols() != m) {
        out.push_back({"embedded", "must be m x m"});
        shapes = false;
    }
    if (static_cast<int>(spec.neg_jump.size()) != m) {
        out.push_back({"neg_jump", "one mixture per state required"});
        shapes = false;
    }
    if (static_cast<int>(spec.switch_jump.size()) != m) {
        out.push_back({"switch_jump", "must be m x m"});
        shapes = false;
    } else {
        for (const auto& row : spec.switch_jump)
            if (static_cast<int>(row.size()) != m) {
                out.push_back({"switch_jump", "must be m x m"});
                shapes = false;
                break;
            }
    }
    if (!shapes) return rep;

    const int sigma = orientation_sign(spec.orientation);
    const int side = -sigma;

    for (int k = 0; k < m; ++k) {
        double row = 0.0;
        for (int r = 0; r < m; ++r) {
            if (!(spec.embedded(k, r) >= 0.0)) out.push_back({"embedded", "entries must be nonnegative"});
            row += spec.embedded(k, r);
        }
        if (std::abs(row - 1.0) > kMassTol)
            out.push_back({"embedded", "row stochasticity violated in row " + std::to_string(k)});
    }
    for (int k = 0; k < m; ++k) {
        const std::string sk = "[" + std::to_string(k) + "]";
        if (!(spec.nu(k) > 0.0) || !std::isfinite(spec.nu(k))) out.push_back({"nu" + sk, "sojourn rate must be positive"});
        if (spec.b2.size() == m && spec.b2(k) != 0.0) out.push_back({"b2" + sk, "Brownian part must vanish"});
        if (!(spec.lambda(k) >= 0.0) || !std::isfinite(spec.lambda(k)))
            out.push_back({"lambda" + sk, "jump intensity must be nonnegative"});
        if (!(spec.c(k) > 0.0) || !std::isfinite(spec.c(k)))
            out.push_back({"c" + sk, "exponential jump rate must be positive"});
        if (!(spec.pos_weight(k) >= 0.0 && spec.pos_weight(k) <= 1.0))
            out.push_back({"pos_weight" + sk, "must lie in [0,1]"});
        const double drift = sigma * spec.a(k);
        if (spec.zero_drift) {
            if (spec.a(k) != 0.0) out.push_back({"a" + sk, "zero_drift mode requires a_k = 0"});
        } else if (!(drift < 0.0)) {
            out.push_back({"a" + sk, sigma > 0 ? "drift must be negative" : "drift must be positive (lower orientation)"});
        }
        const bool needs_mixture = spec.lambda(k) > 0.0 && spec.pos_weight(k) < 1.0;
        if (needs_mixture) {
            check_mixture(spec.neg_jump[k], side, "neg_jump" + sk, spec.zero_drift, out);
        } else if (!spec.neg_jump[k].empty()) {
            check_mixture(spec.neg_jump[k], side, "neg_jump" + sk, spec.zero_drift, out);
        }
        for (int r = 0; r < m; ++r) {
            const auto& law = spec.switch_jump[k][r];
            const std::string f = "switch_jump[" + std::to_string(k) + "][" + std::to_string(r) + "]";
            if (!(law.atom0 >= 0.0 && law.atom0 <= 1.0)) out.push_back({f, "atom0 must lie in [0,1]"});
            if (law.atom0 < 1.0) check_mixture(law.neg, side, f + ".neg", spec.zero_drift, out);
        }
    }
    if (m > 1) {
        if (!strongly_connected(build_generator(spec))) out.push_back({"embedded", "chain must be irreducible"});
    }
    if (spec.zero_drift) {
        bool moves = false;
        for (int k = 0; k < m; ++k) {
            if (spec.lambda(k) > 0.0) moves = true;
            for (int r = 0; r < m; ++r)
                if (spec.embedded(k, r) > 0.0 && spec.switch_jump[k][r].atom0 < 1.0) moves = true;
        }
        if (!moves) out.push_back({"zero_drift", "process is identically zero"});
    }
    return rep;
}

void require_valid(const ModelSpec& spec) {
    auto rep = validate_model(spec);
    if (!rep.ok()) throw DomainError("invalid model:\n" + rep.to_string());
}

Matrix build_generator(const ModelSpec& spec) {
    const int m = spec.m;
    return spec.nu.asDiagonal() * (spec.embedded - Matrix::Identity(m, m));
}

Matrix resolvent_Ps(const ModelSpec& spec, double s) {
    if (!(s > 0.0)) throw DomainError("resolvent_Ps: s must be positive");
    const int m = spec.m;
    const Matrix q = build_generator(spec);
    return s * checked_inverse(Matrix(s * Matrix::Identity(m, m) - q), "sI - Q");
}

Matrix switch_zero_matrix(const ModelSpec& spec) {
    Matrix f = Matrix::Zero(spec.m, spec.m);
    for (int k = 0; k < spec.m; ++k)
        for (int r = 0; r < spec.m; ++r) f(k, r) = spec.embedded(k, r) * spec.switch_jump[k][r].atom0;
    return f;
}

Matrix exponential_intensity(const ModelSpec& spec) {
    return spec.lambda.cwiseProduct(spec.pos_weight).asDiagonal();
}

DriftStats stationary_distribution(const ModelSpec& spec) {
    const int m = spec.m;
    const Matrix q = build_generator(spec);
    DriftStats st;
    // pi Q = 0 with sum(pi) = 1: replace the last column of Q by ones.
    Matrix a = q;
    a.col(m - 1).setOnes();
    RowVector rhs = RowVector::Zero(m);
    rhs(m - 1) = 1.0;
    st.pi = right_solve(rhs, a, "stationary distribution (reducible chain?)");
    for (int k = 0; k < m; ++k)
        if (!(st.pi(k) > 0.0)) throw DomainError("stationary distribution: chain is reducible");

    const int sigma = orientation_sign(spec.orientation);
    const int side = -sigma;
    st.m_kr = Matrix::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        const double w = spec.pos_weight(k);
        double jump_mean = w * sigma / spec.c(k);
        if (w < 1.0 && !spec.neg_jump[k].empty()) jump_mean += (1.0 - w) * spec.neg_jump[k].mean(side);
        st.m_kr(k, k) += spec.a(k) + spec.lambda(k) * jump_mean;
        for (int r = 0; r < m; ++r) st.m_kr(k, r) += spec.nu(k) * spec.embedded(k, r) * spec.switch_jump[k][r].mean(side);
    }
    st.M1 = st.m_kr;
    st.m1 = (st.pi * st.m_kr * Vector::Ones(m))(0);
    st.P0 = Vector::Ones(m) * st.pi;
    return st;
}

ModelSpec mirror_model(const ModelSpec& spec) {
    ModelSpec out = spec;
    out.orientation = spec.orientation == Orientation::upper ? Orientation::lower : Orientation::upper;
    out.a = -spec.a;
    auto flip = [](NegativeMixture& mix) {
        for (auto& c : mix.components)
            if (c.kind == MixtureComponent::Kind::atom) c.location = -c.location;
    };
    for (auto& mix : out.neg_jump) flip(mix);
    for (auto& row : out.switch_jump)
        for (auto& law : row) flip(law.neg);
    return out;
}

}  // namespace mawhf
