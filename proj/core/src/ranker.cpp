#include "praline/ranker.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <cmath>

namespace praline {

PooledEncoder pool_encoder(const EncoderOutput& enc) {
    const Mat& h = enc.hidden;
    if (h.rows < 1) throw model_error("cannot pool an empty encoder output");
    PooledEncoder out;
    out.values.assign(static_cast<std::size_t>(h.cols), 0.0);
    out.argmax_rows.assign(static_cast<std::size_t>(h.cols), 0);
    for (int j = 0; j < h.cols; ++j) {
        double best = h.at(0, j);
        int best_row = 0;
        for (int i = 1; i < h.rows; ++i) {
            if (h.at(i, j) > best) {
                best = h.at(i, j);
                best_row = i;
            }
        }
        out.values[static_cast<std::size_t>(j)] = best;
        out.argmax_rows[static_cast<std::size_t>(j)] = best_row;
    }
    return out;
}

TowerParams make_tower_params(ParamStore& store, int dim, int kg_dim) {
    return TowerParams{store.create("rank.conv_w1", dim, dim + kg_dim),
                       store.create("rank.conv_w2", dim, dim),
                       store.create("rank.path_w1", dim, kg_dim),
                       store.create("rank.path_w2", dim, dim)};
}

namespace {

Vec tower_forward(const Vec& input, const Param* w1, const Param* w2, TowerTrace* tr) {
    const int hidden_dim = w1->value.rows;
    const int out_dim = w2->value.rows;
    if (static_cast<int>(input.size()) != w1->value.cols)
        throw model_error("tower input dimension mismatch");

    Vec pre(static_cast<std::size_t>(hidden_dim), 0.0);
    for (int i = 0; i < hidden_dim; ++i) {
        const double* w = w1->value.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < input.size(); ++j) s += w[j] * input[j];
        pre[static_cast<std::size_t>(i)] = s;
    }
    Vec hidden = pre;
    for (double& v : hidden) v = std::max(0.0, v);

    Vec out(static_cast<std::size_t>(out_dim), 0.0);
    for (int i = 0; i < out_dim; ++i) {
        const double* w = w2->value.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < hidden.size(); ++j) s += w[j] * hidden[j];
        out[static_cast<std::size_t>(i)] = std::tanh(s);
    }
    if (tr) {
        tr->input = input;
        tr->pre_act = std::move(pre);
        tr->hidden = std::move(hidden);
        tr->out = out;
    }
    return out;
}

void tower_backward(const Vec& d_out, Param* w1, Param* w2, const TowerTrace& tr,
                    Vec& d_input) {
    const int hidden_dim = w1->value.rows;
    const int out_dim = w2->value.rows;

    Vec d_pre_tanh(static_cast<std::size_t>(out_dim));
    for (int i = 0; i < out_dim; ++i) {
        const double o = tr.out[static_cast<std::size_t>(i)];
        d_pre_tanh[static_cast<std::size_t>(i)] = d_out[static_cast<std::size_t>(i)] * (1.0 - o * o);
    }

    Vec d_hidden(static_cast<std::size_t>(hidden_dim), 0.0);
    for (int i = 0; i < out_dim; ++i) {
        double* gw = w2->grad.row(i);
        const double* w = w2->value.row(i);
        const double dz = d_pre_tanh[static_cast<std::size_t>(i)];
        for (int j = 0; j < hidden_dim; ++j) {
            gw[j] += dz * tr.hidden[static_cast<std::size_t>(j)];
            d_hidden[static_cast<std::size_t>(j)] += dz * w[j];
        }
    }
    for (int i = 0; i < hidden_dim; ++i) {
        if (tr.pre_act[static_cast<std::size_t>(i)] <= 0.0) continue;
        const double da = d_hidden[static_cast<std::size_t>(i)];
        double* gw = w1->grad.row(i);
        const double* w = w1->value.row(i);
        for (std::size_t j = 0; j < tr.input.size(); ++j) {
            gw[j] += da * tr.input[j];
            d_input[j] += da * w[j];
        }
    }
}

} // namespace

Vec conversation_embedding(const Vec& pooled, const Vec& domain_embedding, const TowerParams& p,
                           TowerTrace* tr) {
    const std::size_t kg_dim = static_cast<std::size_t>(p.conv_w1->value.cols) - pooled.size();
    if (!domain_embedding.empty() && domain_embedding.size() != kg_dim)
        throw model_error("domain embedding dimension mismatch");
    Vec input = pooled;
    if (domain_embedding.empty()) {
        input.resize(pooled.size() + kg_dim, 0.0);
    } else {
        input.insert(input.end(), domain_embedding.begin(), domain_embedding.end());
    }
    return tower_forward(input, p.conv_w1, p.conv_w2, tr);
}

Vec path_embedding(const Vec& path_vector, const TowerParams& p, TowerTrace* tr) {
    return tower_forward(path_vector, p.path_w1, p.path_w2, tr);
}

void conversation_tower_backward(const Vec& d_out, const TowerParams& p, const TowerTrace& tr,
                                 Vec& d_input) {
    tower_backward(d_out, p.conv_w1, p.conv_w2, tr, d_input);
}

void path_tower_backward(const Vec& d_out, const TowerParams& p, const TowerTrace& tr,
                         Vec& d_input) {
    tower_backward(d_out, p.path_w1, p.path_w2, tr, d_input);
}

double score(const Vec& phi_c, const Vec& phi_p) {
    const double nc = l2_norm(phi_c);
    const double np = l2_norm(phi_p);
    if (nc == 0.0 || np == 0.0) throw model_error("degenerate embedding");
    return dot(phi_c, phi_p) / (nc * np);
}

double ranking_loss(const Vec& phi_c, const Vec& phi_p, int y, double margin) {
    if (y != 1 && y != -1) throw model_error("ranking label must be +1 or -1");
    const double c = score(phi_c, phi_p);
    return y == 1 ? 1.0 - c : std::max(0.0, c - margin);
}

double ranking_loss_dcos(const Vec& phi_c, const Vec& phi_p, int y, double margin) {
    if (y != 1 && y != -1) throw model_error("ranking label must be +1 or -1");
    const double c = score(phi_c, phi_p);
    if (y == 1) return -1.0;
    return c > margin ? 1.0 : 0.0;
}

void cosine_backward(const Vec& u, const Vec& v, double dcos, Vec& du, Vec& dv) {
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    const double d = dot(u, v);
    const double denom = nu * nv;
    const double c = d / denom;
    for (std::size_t i = 0; i < u.size(); ++i) {
        du[i] += dcos * (v[i] / denom - c * u[i] / (nu * nu));
        dv[i] += dcos * (u[i] / denom - c * v[i] / (nv * nv));
    }
}

std::vector<RankedCandidate> rank_candidates(const Vec& phi_c, const std::vector<Vec>& path_phis,
                                             const std::vector<ContextPath>& paths) {
    std::vector<RankedCandidate> out;
    out.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        out.push_back({paths[i], score(phi_c, path_phis[i]), i});
    std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.path_score != b.path_score) return a.path_score > b.path_score;
        return a.canonical_index < b.canonical_index;
    });
    return out;
}

} // namespace praline
