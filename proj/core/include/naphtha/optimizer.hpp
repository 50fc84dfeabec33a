#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "naphtha/tensor.hpp"

namespace naphtha {

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;

    void validate() const;
};

// A parameter tensor with its gradient accumulator and Adam moment buffers.
struct ParamTensor {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
};

// Named parameters grouped by owner network ("f", "e", "w"). Groups keep
// their own Adam step counter and a grad-armed flag so an optimizer step on
// a group whose gradients were never populated is a hard error.
class ParamStore {
public:
    struct Group {
        std::string name;
        std::deque<ParamTensor> params; // deque: addresses stay stable
        std::int64_t step = 0;
        bool grad_ready = false;
    };

    // Creates the group on first use; group order is creation order.
    Group& group(const std::string& name);
    const Group& group(const std::string& name) const;
    bool has_group(const std::string& name) const;

    ParamTensor& add(const std::string& group_name, const std::string& param_name,
                     std::vector<std::size_t> shape);

    const std::vector<std::string>& group_names() const { return order_; }

    std::size_t parameter_count() const;

    void zero_gradients(const std::string& group_name);
    void mark_gradients_ready(const std::string& group_name);

    // FNV-1a over the raw value bytes; used by tests to detect mutation.
    std::uint64_t value_hash(const std::string& group_name) const;

    // Flat copies of all parameter values in registration order.
    std::vector<double> snapshot_values() const;
    void restore_values(const std::vector<double>& flat);

    template <typename Fn>
    void for_each_param(Fn&& fn) {
        for (auto& name : order_)
            for (auto& p : group(name).params) fn(name, p);
    }
    template <typename Fn>
    void for_each_param(Fn&& fn) const {
        for (auto& name : order_)
            for (auto& p : group(name).params) fn(name, p);
    }

private:
    std::vector<std::string> order_;
    std::deque<Group> groups_;
};

// Bias-corrected Adam update on one owner group, in place. Gradients must
// have been populated (MissingGradient otherwise); they are zeroed after the
// step and the group's step counter advances.
void adam_step(ParamStore& store, const std::string& group_name, const AdamConfig& cfg);

} // namespace naphtha
