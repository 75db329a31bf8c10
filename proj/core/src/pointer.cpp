#include "praline/pointer.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <cmath>

namespace praline {

DomainVocabulary::DomainVocabulary(std::vector<std::string> labels,
                                   const EmbeddingProvider& provider)
    : labels_(std::move(labels)) {
    embeddings_ = provider.embed_domains(labels_);
}

DomainVocabulary::DomainVocabulary(std::vector<std::string> labels, Mat embeddings)
    : labels_(std::move(labels)), embeddings_(std::move(embeddings)) {
    if (static_cast<int>(labels_.size()) != embeddings_.rows)
        throw config_error("domain labels and embedding rows differ");
}

void DomainVocabulary::add_domain(const std::string& label, const EmbeddingProvider& provider) {
    labels_.push_back(label);
    const Vec v = provider.embed_text(label);
    Mat grown(embeddings_.rows + 1, provider.dim());
    std::copy(embeddings_.data.begin(), embeddings_.data.end(), grown.data.begin());
    std::copy(v.begin(), v.end(), grown.row(grown.rows - 1));
    embeddings_ = std::move(grown);
}

Vec DomainVocabulary::embedding(int id) const {
    if (id < 0 || id >= size()) throw model_error("domain id out of range");
    const double* r = embeddings_.row(id);
    return Vec(r, r + embeddings_.cols);
}

int DomainVocabulary::find(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (labels_[static_cast<std::size_t>(i)] == label) return i;
    return -1;
}

PointerParams make_pointer_params(ParamStore& store, int dim, int kg_dim) {
    return PointerParams{store.create("dm.w1", 1, kg_dim), store.create("dm.w2", dim, kg_dim)};
}

Vec score_domains(const Vec& pooled, const DomainVocabulary& vocab, const PointerParams& p,
                  PointerTrace* tr) {
    const int n_dm = vocab.size();
    if (n_dm < 1) throw model_error("empty domain vocabulary");
    const int dim = p.w2->value.rows;
    const int kg_dim = p.w2->value.cols;
    if (static_cast<int>(pooled.size()) != dim) throw model_error("pooled state dimension mismatch");

    // projected = W2^T pooled, shared across domains
    Vec projected(static_cast<std::size_t>(kg_dim), 0.0);
    for (int a = 0; a < dim; ++a) {
        const double* w = p.w2->value.row(a);
        const double x = pooled[static_cast<std::size_t>(a)];
        for (int k = 0; k < kg_dim; ++k) projected[static_cast<std::size_t>(k)] += x * w[k];
    }

    Mat u(n_dm, kg_dim);
    Vec scores(static_cast<std::size_t>(n_dm), 0.0);
    const double* w1 = p.w1->value.row(0);
    for (int j = 0; j < n_dm; ++j) {
        const double* tau = vocab.embeddings().row(j);
        double* uj = u.row(j);
        double s = 0.0;
        for (int k = 0; k < kg_dim; ++k) {
            uj[k] = std::tanh(projected[static_cast<std::size_t>(k)] + tau[k]);
            s += w1[k] * uj[k];
        }
        scores[static_cast<std::size_t>(j)] = s;
    }

    Vec omega = scores;
    softmax_inplace(omega);
    if (tr) {
        tr->pooled = pooled;
        tr->u = std::move(u);
        tr->omega = omega;
    }
    return omega;
}

Vec score_domains(const EncoderOutput& enc, const DomainVocabulary& vocab,
                  const PointerParams& p) {
    return score_domains(pool_encoder(enc).values, vocab, p);
}

double pointer_loss(const Vec& omega, int gold_domain_id) {
    if (gold_domain_id < 0 || gold_domain_id >= static_cast<int>(omega.size()))
        throw model_error("gold domain id out of range");
    return -std::log(std::max(omega[static_cast<std::size_t>(gold_domain_id)], 1e-300));
}

int predict_domain(const Vec& omega) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(omega.size()); ++i)
        if (omega[static_cast<std::size_t>(i)] > omega[static_cast<std::size_t>(best)]) best = i;
    return best;
}

void pointer_backward(const PointerTrace& tr, int gold_domain_id, double loss_scale,
                      const PointerParams& p, Vec& d_pooled) {
    const int n_dm = tr.u.rows;
    const int kg_dim = tr.u.cols;
    const int dim = p.w2->value.rows;

    Vec d_scores(tr.omega);
    d_scores[static_cast<std::size_t>(gold_domain_id)] -= 1.0;
    for (double& v : d_scores) v *= loss_scale;

    const double* w1 = p.w1->value.row(0);
    double* dw1 = p.w1->grad.row(0);
    Vec sum_dz(static_cast<std::size_t>(kg_dim), 0.0);
    for (int j = 0; j < n_dm; ++j) {
        const double ds = d_scores[static_cast<std::size_t>(j)];
        const double* uj = tr.u.row(j);
        for (int k = 0; k < kg_dim; ++k) {
            dw1[k] += ds * uj[k];
            const double du = ds * w1[k];
            sum_dz[static_cast<std::size_t>(k)] += du * (1.0 - uj[k] * uj[k]);
        }
    }
    for (int a = 0; a < dim; ++a) {
        double* dw2 = p.w2->grad.row(a);
        const double* w2 = p.w2->value.row(a);
        const double pa = tr.pooled[static_cast<std::size_t>(a)];
        double acc = 0.0;
        for (int k = 0; k < kg_dim; ++k) {
            dw2[k] += pa * sum_dz[static_cast<std::size_t>(k)];
            acc += w2[k] * sum_dz[static_cast<std::size_t>(k)];
        }
        d_pooled[static_cast<std::size_t>(a)] += acc;
    }
}

} // namespace praline
