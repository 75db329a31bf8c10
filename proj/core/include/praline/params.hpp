#pragma once

#include "praline/common.hpp"
#include "praline/tensor.hpp"

#include <memory>
#include <string>
#include <vector>

namespace praline {

// One named trainable array with its gradient accumulator and optimizer
// moments. Everything the optimizer and the checkpoint writer touch goes
// through the store below.
struct Param {
    std::string name;
    Mat value;
    Mat grad;
    Mat adam_m;
    Mat adam_v;
};

class ParamStore {
  public:
    Param* create(const std::string& name, int rows, int cols) {
        auto p = std::make_unique<Param>();
        p->name = name;
        p->value = Mat(rows, cols);
        p->grad = Mat(rows, cols);
        p->adam_m = Mat(rows, cols);
        p->adam_v = Mat(rows, cols);
        params_.push_back(std::move(p));
        return params_.back().get();
    }

    const std::vector<std::unique_ptr<Param>>& all() const { return params_; }

    Param* find(const std::string& name) const {
        for (const auto& p : params_)
            if (p->name == name) return p.get();
        return nullptr;
    }

    void zero_grads() {
        for (auto& p : params_) p->grad.zero();
    }

    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& p : params_) n += p->value.size();
        return n;
    }

    bool all_finite() const {
        for (const auto& p : params_)
            if (!p->value.all_finite()) return false;
        return true;
    }

  private:
    std::vector<std::unique_ptr<Param>> params_;
};

// Glorot-uniform init, drawn in creation order from one seeded engine so the
// whole parameter bank is a pure function of the seed.
void init_glorot(ParamStore& store, std::uint64_t seed);

} // namespace praline
