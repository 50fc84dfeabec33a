#include "naphtha/optimizer.hpp"

#include <cmath>
#include <cstring>

#include "naphtha/error.hpp"

namespace naphtha {

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) raise(ErrorCode::DegenerateConfig, "learning rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0)) raise(ErrorCode::DegenerateConfig, "beta1 must lie in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) raise(ErrorCode::DegenerateConfig, "beta2 must lie in (0,1)");
    if (!(epsilon > 0.0)) raise(ErrorCode::DegenerateConfig, "epsilon must be positive");
}

ParamStore::Group& ParamStore::group(const std::string& name) {
    for (auto& g : groups_)
        if (g.name == name) return g;
    groups_.push_back(Group{name, {}, 0, false});
    order_.push_back(name);
    return groups_.back();
}

const ParamStore::Group& ParamStore::group(const std::string& name) const {
    for (const auto& g : groups_)
        if (g.name == name) return g;
    raise(ErrorCode::InvariantViolation, "unknown parameter group '" + name + "'");
}

bool ParamStore::has_group(const std::string& name) const {
    for (const auto& g : groups_)
        if (g.name == name) return true;
    return false;
}

ParamTensor& ParamStore::add(const std::string& group_name, const std::string& param_name,
                             std::vector<std::size_t> shape) {
    Group& g = group(group_name);
    for (const auto& p : g.params)
        if (p.name == param_name)
            raise(ErrorCode::InvariantViolation, "duplicate parameter '" + param_name + "'");
    ParamTensor p;
    p.name = param_name;
    p.value = Tensor(shape);
    p.grad = Tensor(shape);
    p.adam_m = Tensor(shape);
    p.adam_v = Tensor(std::move(shape));
    g.params.push_back(std::move(p));
    return g.params.back();
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for_each_param([&](const std::string&, const ParamTensor& p) { n += p.value.size(); });
    return n;
}

void ParamStore::zero_gradients(const std::string& group_name) {
    Group& g = group(group_name);
    for (auto& p : g.params) p.grad.fill(0.0);
    g.grad_ready = false;
}

void ParamStore::mark_gradients_ready(const std::string& group_name) {
    group(group_name).grad_ready = true;
}

std::uint64_t ParamStore::value_hash(const std::string& group_name) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& p : group(group_name).params) {
        for (double v : p.value.data) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int byte = 0; byte < 8; ++byte) {
                h ^= (bits >> (8 * byte)) & 0xFF;
                h *= 1099511628211ULL;
            }
        }
    }
    return h;
}

std::vector<double> ParamStore::snapshot_values() const {
    std::vector<double> flat;
    for_each_param([&](const std::string&, const ParamTensor& p) {
        flat.insert(flat.end(), p.value.data.begin(), p.value.data.end());
    });
    return flat;
}

void ParamStore::restore_values(const std::vector<double>& flat) {
    std::size_t pos = 0;
    for_each_param([&](const std::string&, ParamTensor& p) {
        if (pos + p.value.size() > flat.size())
            raise(ErrorCode::ShapeMismatch, "snapshot size does not match parameter store");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + p.value.size()), p.value.data.begin());
        pos += p.value.size();
    });
    if (pos != flat.size())
        raise(ErrorCode::ShapeMismatch, "snapshot size does not match parameter store");
}

void adam_step(ParamStore& store, const std::string& group_name, const AdamConfig& cfg) {
    cfg.validate();
    ParamStore::Group& g = store.group(group_name);
    if (!g.grad_ready)
        raise(ErrorCode::MissingGradient, "gradients for group '" + group_name + "' were never populated");

    g.step += 1;
    const double t = static_cast<double>(g.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (auto& p : g.params) {
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double grad = p.grad[i];
            if (!std::isfinite(grad))
                raise(ErrorCode::NonFiniteValue, "non-finite gradient in '" + p.name + "'");
            p.adam_m[i] = cfg.beta1 * p.adam_m[i] + (1.0 - cfg.beta1) * grad;
            p.adam_v[i] = cfg.beta2 * p.adam_v[i] + (1.0 - cfg.beta2) * grad * grad;
            const double m_hat = p.adam_m[i] / bc1;
            const double v_hat = p.adam_v[i] / bc2;
            p.value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
        p.grad.fill(0.0);
    }
    g.grad_ready = false;
}

} // namespace naphtha
