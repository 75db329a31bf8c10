#pragma once

#include "praline/kg.hpp"
#include "praline/params.hpp"
#include "praline/tensor.hpp"
#include "praline/transformer.hpp"

#include <vector>

namespace praline {

// Elementwise max over token rows, with the winning row per dimension kept
// for gradient routing.
struct PooledEncoder {
    Vec values;
    std::vector<int> argmax_rows;
};

PooledEncoder pool_encoder(const EncoderOutput& enc);

// Dual joint-embedding towers: two linear layers with a rectifier in between
// and a final tanh. The conversation tower reads the pooled encoder state
// concatenated with the domain embedding; the path tower reads the frozen
// path vector.
struct TowerParams {
    Param* conv_w1; // d x 2d
    Param* conv_w2; // d x d
    Param* path_w1; // d x d
    Param* path_w2; // d x d
};

TowerParams make_tower_params(ParamStore& store, int dim, int kg_dim);

struct TowerTrace {
    Vec input;
    Vec pre_act;
    Vec hidden;
    Vec out;
};

// phi_c. Passing an empty domain embedding fills the domain slot with zeros
// (the "without domain" configuration).
Vec conversation_embedding(const Vec& pooled, const Vec& domain_embedding, const TowerParams& p,
                           TowerTrace* tr = nullptr);
// phi_p from a frozen path vector.
Vec path_embedding(const Vec& path_vector, const TowerParams& p, TowerTrace* tr = nullptr);

// Accumulate tower gradients; d_input receives the gradient w.r.t. the tower
// input (first d entries of the conversation tower input are the pooled
// encoder slot).
void conversation_tower_backward(const Vec& d_out, const TowerParams& p, const TowerTrace& tr,
                                 Vec& d_input);
void path_tower_backward(const Vec& d_out, const TowerParams& p, const TowerTrace& tr,
                         Vec& d_input);

// Normalized cosine similarity; throws on a zero vector.
double score(const Vec& phi_c, const Vec& phi_p);

// Cosine embedding loss: y=1 pulls pairs together, y=-1 pushes them below the
// margin. The hinge uses subgradient 0 at the kink.
double ranking_loss(const Vec& phi_c, const Vec& phi_p, int y, double margin);
// d(loss)/d(cosine), same piecewise structure.
double ranking_loss_dcos(const Vec& phi_c, const Vec& phi_p, int y, double margin);
// Gradient of cosine w.r.t. both arguments, scaled by upstream dcos.
void cosine_backward(const Vec& u, const Vec& v, double dcos, Vec& du, Vec& dv);

struct RankedCandidate {
    ContextPath path;
    double path_score = 0.0;
    std::size_t canonical_index = 0;
};

// Descending score; ties keep the canonical extraction order.
std::vector<RankedCandidate> rank_candidates(const Vec& phi_c, const std::vector<Vec>& path_phis,
                                             const std::vector<ContextPath>& paths);

} // namespace praline
