#include "quasiherm/models.hpp"

#include <numbers>

namespace quasiherm {

ModelSpec make_model(ModelKind kind, int dim) {
    ModelSpec spec{kind, dim};
    validate(spec);
    return spec;
}

void validate(const ModelSpec& spec) {
    if (spec.dim < 2) {
        throw InputError("model dimension must be at least 2, got " + std::to_string(spec.dim));
    }
    if (spec.kind == ModelKind::CrunchBang && spec.dim != kCrunchBangDim) {
        throw InputError("crunchbang model is defined only for n = 8, got " +
                         std::to_string(spec.dim));
    }
}

std::string_view kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Bang: return "bang";
        case ModelKind::Cyclic: return "cyclic";
        case ModelKind::CrunchBang: return "crunchbang";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "bang") return ModelKind::Bang;
    if (name == "cyclic") return ModelKind::Cyclic;
    if (name == "crunchbang") return ModelKind::CrunchBang;
    throw InputError("unknown model kind '" + std::string(name) +
                     "' (expected bang, cyclic or crunchbang)");
}

CMatrix build_q(const ModelSpec& spec, double t) { return build_q_as<double>(spec, t); }

CMatrix build_q_time_derivative(const ModelSpec& spec, double t) {
    validate(spec);
    if (!std::isfinite(t)) throw InputError("build_q_time_derivative: time must be finite");
    const int n = spec.dim;
    CMatrix dq = CMatrix::Zero(n, n);

    if (spec.kind == ModelKind::CrunchBang) {
        if (t == 0.0) throw DomainError("crunchbang Q(t) is not differentiable at t = 0");
        const double sign = t > 0.0 ? 1.0 : -1.0;
        const double dsuper[7] = {-1.0, -1.0, -sign, -sign, -sign, -1.0, -1.0};
        const double dsub[7] = {1.0, 1.0, sign, sign, sign, 1.0, 1.0};
        for (int k = 0; k < 7; ++k) {
            dq(k, k + 1) = dsuper[k];
            dq(k + 1, k) = dsub[k];
        }
        return dq;
    }

    // d/dt sqrt(f(t)) = f'(t) / (2 sqrt(f(t))) on the principal branch.
    Complex ds;
    if (spec.kind == ModelKind::Bang) {
        if (t == 1.0) throw DomainError("bang Q(t) is not differentiable at t = 1");
        ds = -1.0 / (2.0 * detail::principal_sqrt(1.0 - t));
    } else {
        if (std::abs(t) == 1.0) throw DomainError("cyclic Q(t) is not differentiable at t = +-1");
        ds = -t / detail::principal_sqrt(1.0 - t * t);
    }
    for (int k = 0; k + 1 < n; ++k) {
        const Complex v = std::sqrt(double((k + 1) * (n - k - 1))) * ds;
        dq(k, k + 1) = v;
        dq(k + 1, k) = -v;
    }
    return dq;
}

std::vector<Complex> oracle_spectrum(const ModelSpec& spec, double t) {
    validate(spec);
    if (!std::isfinite(t)) throw InputError("oracle_spectrum: time must be finite");
    const int n = spec.dim;
    std::vector<Complex> values;
    values.reserve(n);

    switch (spec.kind) {
        case ModelKind::Bang: {
            const Complex root = detail::principal_sqrt(t);
            for (int k = 0; k < n; ++k) values.push_back(double(2 * k - n + 1) * root);
            break;
        }
        case ModelKind::Cyclic:
            for (int k = 0; k < n; ++k) values.emplace_back(double(2 * k - n + 1) * std::abs(t));
            break;
        case ModelKind::CrunchBang: {
            if (!(t > 0.0 && t < 1.0)) {
                throw DomainError("crunchbang closed-form spectrum is available only on (0, 1)");
            }
            const double amp = 2.0 * std::sqrt(t * (1.0 - t));
            for (int k = 1; k <= n; ++k) {
                values.emplace_back(amp * std::cos(k * std::numbers::pi / (n + 1)));
            }
            break;
        }
    }
    sort_spectrum(values, 0.0);
    return values;
}

}  // namespace quasiherm
