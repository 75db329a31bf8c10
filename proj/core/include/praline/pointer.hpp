#pragma once

#include "praline/embedder.hpp"
#include "praline/params.hpp"
#include "praline/ranker.hpp"
#include "praline/tensor.hpp"
#include "praline/transformer.hpp"

#include <string>
#include <vector>

namespace praline {

// Ordered domain labels with their frozen embeddings. Growth is append-only,
// so it stays legal after training: a new domain gets a score without
// touching the scores of existing ones.
class DomainVocabulary {
  public:
    DomainVocabulary() = default;
    DomainVocabulary(std::vector<std::string> labels, const EmbeddingProvider& provider);
    DomainVocabulary(std::vector<std::string> labels, Mat embeddings);

    void add_domain(const std::string& label, const EmbeddingProvider& provider);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& labels() const { return labels_; }
    const Mat& embeddings() const { return embeddings_; }
    Vec embedding(int id) const;
    int find(const std::string& label) const; // -1 when absent

  private:
    std::vector<std::string> labels_;
    Mat embeddings_; // n_dm x d_kg
};

struct PointerParams {
    Param* w1; // 1 x d_kg
    Param* w2; // d x d_kg
};

PointerParams make_pointer_params(ParamStore& store, int dim, int kg_dim);

struct PointerTrace {
    Vec pooled;
    Mat u; // n_dm x d_kg, tanh-activated joint representations
    Vec omega;
};

// Per domain j: u_j = tanh(W2^T pooled + tau_j), score_j = W1 u_j; the
// probabilities are the softmax over scores.
Vec score_domains(const Vec& pooled, const DomainVocabulary& vocab, const PointerParams& p,
                  PointerTrace* tr = nullptr);
Vec score_domains(const EncoderOutput& enc, const DomainVocabulary& vocab,
                  const PointerParams& p);

double pointer_loss(const Vec& omega, int gold_domain_id);

// Argmax; ties break toward the lowest id.
int predict_domain(const Vec& omega);

// Accumulates W1/W2 gradients and adds the pooled-state gradient, seeded from
// the negative log-likelihood scaled by loss_scale.
void pointer_backward(const PointerTrace& tr, int gold_domain_id, double loss_scale,
                      const PointerParams& p, Vec& d_pooled);

} // namespace praline
