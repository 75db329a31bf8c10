#include "praline/transformer.hpp"

#include "praline/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace praline {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kMaskValue = -1e30;

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865476)); }
inline double gelu_grad(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * 0.7071067811865476));
    const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014327;
    return cdf + x * pdf;
}

void add_row_vector(Mat& x, const Mat& b) {
    for (int i = 0; i < x.rows; ++i) {
        double* r = x.row(i);
        const double* br = b.row(0);
        for (int j = 0; j < x.cols; ++j) r[j] += br[j];
    }
}

void add_col_sums(Mat& acc, const Mat& x) {
    double* a = acc.row(0);
    for (int i = 0; i < x.rows; ++i) {
        const double* r = x.row(i);
        for (int j = 0; j < x.cols; ++j) a[j] += r[j];
    }
}

Mat slice_cols(const Mat& x, int offset, int width) {
    Mat out(x.rows, width);
    for (int i = 0; i < x.rows; ++i)
        std::memcpy(out.row(i), x.row(i) + offset, sizeof(double) * static_cast<std::size_t>(width));
    return out;
}

void add_cols(Mat& x, const Mat& part, int offset) {
    for (int i = 0; i < x.rows; ++i) {
        double* r = x.row(i) + offset;
        const double* p = part.row(i);
        for (int j = 0; j < part.cols; ++j) r[j] += p[j];
    }
}

Mat dropout_mask(int rows, int cols, double p, rng_t& rng) {
    Mat m(rows, cols);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& v : m.data) v = u(rng) < p ? 0.0 : keep_scale;
    return m;
}

Mat apply_mask(const Mat& x, const Mat& mask) {
    Mat out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
    return out;
}

LayerNormParams make_ln(ParamStore& store, const std::string& name, int dim) {
    LayerNormParams p{store.create(name + ".gain", 1, dim), store.create(name + ".bias", 1, dim)};
    for (double& v : p.gain->value.data) v = 1.0;
    return p;
}

AttentionParams make_attn(ParamStore& store, const std::string& name, int dim) {
    return AttentionParams{
        store.create(name + ".wq", dim, dim), store.create(name + ".bq", 1, dim),
        store.create(name + ".wk", dim, dim), store.create(name + ".bk", 1, dim),
        store.create(name + ".wv", dim, dim), store.create(name + ".bv", 1, dim),
        store.create(name + ".wo", dim, dim), store.create(name + ".bo", 1, dim)};
}

FfnParams make_ffn(ParamStore& store, const std::string& name, int dim, int ffn_dim) {
    return FfnParams{store.create(name + ".w1", dim, ffn_dim), store.create(name + ".b1", 1, ffn_dim),
                     store.create(name + ".w2", ffn_dim, dim), store.create(name + ".b2", 1, dim)};
}

} // namespace

// ---- blocks --------------------------------------------------------------

Mat layer_norm_forward(const Mat& x, const LayerNormParams& p, LayerNormTrace& tr) {
    tr.xhat = Mat(x.rows, x.cols);
    tr.inv_std.assign(static_cast<std::size_t>(x.rows), 0.0);
    Mat y(x.rows, x.cols);
    const double* g = p.gain->value.row(0);
    const double* b = p.bias->value.row(0);
    for (int i = 0; i < x.rows; ++i) {
        const double* r = x.row(i);
        double mean = 0.0;
        for (int j = 0; j < x.cols; ++j) mean += r[j];
        mean /= x.cols;
        double var = 0.0;
        for (int j = 0; j < x.cols; ++j) var += (r[j] - mean) * (r[j] - mean);
        var /= x.cols;
        const double inv_std = 1.0 / std::sqrt(var + kLnEps);
        tr.inv_std[static_cast<std::size_t>(i)] = inv_std;
        double* xh = tr.xhat.row(i);
        double* yr = y.row(i);
        for (int j = 0; j < x.cols; ++j) {
            xh[j] = (r[j] - mean) * inv_std;
            yr[j] = g[j] * xh[j] + b[j];
        }
    }
    return y;
}

Mat layer_norm_backward(const Mat& dy, const LayerNormParams& p, const LayerNormTrace& tr) {
    Mat dx(dy.rows, dy.cols);
    const double* g = p.gain->value.row(0);
    double* dgain = p.gain->grad.row(0);
    double* dbias = p.bias->grad.row(0);
    for (int i = 0; i < dy.rows; ++i) {
        const double* dyr = dy.row(i);
        const double* xh = tr.xhat.row(i);
        const double inv_std = tr.inv_std[static_cast<std::size_t>(i)];
        double m1 = 0.0, m2 = 0.0;
        for (int j = 0; j < dy.cols; ++j) {
            const double dxh = dyr[j] * g[j];
            m1 += dxh;
            m2 += dxh * xh[j];
            dgain[j] += dyr[j] * xh[j];
            dbias[j] += dyr[j];
        }
        m1 /= dy.cols;
        m2 /= dy.cols;
        double* dxr = dx.row(i);
        for (int j = 0; j < dy.cols; ++j) {
            const double dxh = dyr[j] * g[j];
            dxr[j] = inv_std * (dxh - m1 - xh[j] * m2);
        }
    }
    return dx;
}

Mat attention_forward(const Mat& x_q, const Mat& x_kv, const AttentionParams& p, int heads,
                      bool causal, AttentionTrace& tr) {
    const int dim = x_q.cols;
    const int head_dim = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    tr.q = matmul(x_q, p.wq->value);
    add_row_vector(tr.q, p.bq->value);
    tr.k = matmul(x_kv, p.wk->value);
    add_row_vector(tr.k, p.bk->value);
    tr.v = matmul(x_kv, p.wv->value);
    add_row_vector(tr.v, p.bv->value);

    tr.concat = Mat(x_q.rows, dim);
    tr.probs.clear();
    tr.probs.reserve(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
        const int off = h * head_dim;
        Mat qh = slice_cols(tr.q, off, head_dim);
        Mat kh = slice_cols(tr.k, off, head_dim);
        Mat vh = slice_cols(tr.v, off, head_dim);
        Mat scores = matmul_nt(qh, kh);
        scale_inplace(scores, scale);
        if (causal) {
            for (int i = 0; i < scores.rows; ++i)
                for (int j = i + 1; j < scores.cols; ++j) scores.at(i, j) = kMaskValue;
        }
        softmax_rows_inplace(scores);
        add_cols(tr.concat, matmul(scores, vh), off);
        tr.probs.push_back(std::move(scores));
    }
    Mat out = matmul(tr.concat, p.wo->value);
    add_row_vector(out, p.bo->value);
    return out;
}

void attention_backward(const Mat& d_out, const Mat& x_q, const Mat& x_kv,
                        const AttentionParams& p, int heads, const AttentionTrace& tr, Mat& d_xq,
                        Mat& d_xkv) {
    const int dim = x_q.cols;
    const int head_dim = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    add_inplace(p.wo->grad, matmul_tn(tr.concat, d_out));
    add_col_sums(p.bo->grad, d_out);
    Mat d_concat = matmul_nt(d_out, p.wo->value);

    Mat dq(tr.q.rows, dim), dk(tr.k.rows, dim), dv(tr.v.rows, dim);
    for (int h = 0; h < heads; ++h) {
        const int off = h * head_dim;
        Mat dch = slice_cols(d_concat, off, head_dim);
        Mat vh = slice_cols(tr.v, off, head_dim);
        Mat qh = slice_cols(tr.q, off, head_dim);
        Mat kh = slice_cols(tr.k, off, head_dim);
        const Mat& probs = tr.probs[static_cast<std::size_t>(h)];

        Mat dprobs = matmul_nt(dch, vh);
        add_cols(dv, matmul_tn(probs, dch), off);
        Mat dscores = softmax_rows_backward(probs, dprobs);
        scale_inplace(dscores, scale);
        add_cols(dq, matmul(dscores, kh), off);
        add_cols(dk, matmul_tn(dscores, qh), off);
    }

    add_inplace(p.wq->grad, matmul_tn(x_q, dq));
    add_col_sums(p.bq->grad, dq);
    add_inplace(d_xq, matmul_nt(dq, p.wq->value));

    add_inplace(p.wk->grad, matmul_tn(x_kv, dk));
    add_col_sums(p.bk->grad, dk);
    add_inplace(d_xkv, matmul_nt(dk, p.wk->value));

    add_inplace(p.wv->grad, matmul_tn(x_kv, dv));
    add_col_sums(p.bv->grad, dv);
    add_inplace(d_xkv, matmul_nt(dv, p.wv->value));
}

Mat ffn_forward(const Mat& x, const FfnParams& p, FfnTrace& tr) {
    tr.pre_act = matmul(x, p.w1->value);
    add_row_vector(tr.pre_act, p.b1->value);
    tr.act = tr.pre_act;
    for (double& v : tr.act.data) v = gelu(v);
    Mat out = matmul(tr.act, p.w2->value);
    add_row_vector(out, p.b2->value);
    return out;
}

Mat ffn_backward(const Mat& d_out, const Mat& x, const FfnParams& p, const FfnTrace& tr) {
    add_inplace(p.w2->grad, matmul_tn(tr.act, d_out));
    add_col_sums(p.b2->grad, d_out);
    Mat d_act = matmul_nt(d_out, p.w2->value);
    for (std::size_t i = 0; i < d_act.data.size(); ++i)
        d_act.data[i] *= gelu_grad(tr.pre_act.data[i]);
    add_inplace(p.w1->grad, matmul_tn(x, d_act));
    add_col_sums(p.b1->grad, d_act);
    return matmul_nt(d_act, p.w1->value);
}

// ---- encoder ---------------------------------------------------------------

Encoder::Encoder(ParamStore& store, const TransformerConfig& cfg, Param* token_embedding)
    : cfg_(cfg), token_embedding_(token_embedding) {
    positional_ = store.create("enc.pos", cfg.max_input_len, cfg.dim);
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string base = "enc.l" + std::to_string(l);
        layers_.push_back({make_ln(store, base + ".ln1", cfg.dim),
                           make_attn(store, base + ".attn", cfg.dim),
                           make_ln(store, base + ".ln2", cfg.dim),
                           make_ffn(store, base + ".ffn", cfg.dim, cfg.ffn_dim)});
    }
    ln_final_ = make_ln(store, "enc.ln_final", cfg.dim);
}

EncoderOutput Encoder::forward(const std::vector<int>& ids, bool train, rng_t* dropout_rng,
                               EncoderTrace& tr) const {
    const int n = static_cast<int>(ids.size());
    if (n < 1 || n > cfg_.max_input_len)
        throw model_error("encoder input length " + std::to_string(n) + " outside [1, " +
                          std::to_string(cfg_.max_input_len) + "]");
    for (int id : ids)
        if (id < 0 || id >= cfg_.vocab_size)
            throw model_error("token id out of range: " + std::to_string(id));

    tr.ids = ids;
    tr.embedded = Mat(n, cfg_.dim);
    for (int i = 0; i < n; ++i) {
        const double* e = token_embedding_->value.row(ids[static_cast<std::size_t>(i)]);
        const double* pos = positional_->value.row(i);
        double* r = tr.embedded.row(i);
        for (int j = 0; j < cfg_.dim; ++j) r[j] = e[j] + pos[j];
    }

    const bool use_dropout = train && cfg_.dropout > 0.0 && dropout_rng;
    Mat x = tr.embedded;
    tr.layers.assign(static_cast<std::size_t>(cfg_.layers), {});
    for (int l = 0; l < cfg_.layers; ++l) {
        EncoderLayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
        const EncoderLayerParams& lp = layers_[static_cast<std::size_t>(l)];
        lt.x_in = x;
        lt.attn_in = layer_norm_forward(x, lp.ln1, lt.ln1);
        Mat att = attention_forward(lt.attn_in, lt.attn_in, lp.attn, cfg_.heads, false, lt.attn);
        if (use_dropout) {
            lt.attn_mask = dropout_mask(att.rows, att.cols, cfg_.dropout, *dropout_rng);
            att = apply_mask(att, lt.attn_mask);
        }
        lt.x_mid = x;
        add_inplace(lt.x_mid, att);
        lt.ffn_in = layer_norm_forward(lt.x_mid, lp.ln2, lt.ln2);
        Mat f = ffn_forward(lt.ffn_in, lp.ffn, lt.ffn);
        if (use_dropout) {
            lt.ffn_mask = dropout_mask(f.rows, f.cols, cfg_.dropout, *dropout_rng);
            f = apply_mask(f, lt.ffn_mask);
        }
        x = lt.x_mid;
        add_inplace(x, f);
    }
    tr.pre_final = x;
    EncoderOutput out;
    out.hidden = layer_norm_forward(x, ln_final_, tr.ln_final);
    return out;
}

EncoderOutput Encoder::forward(const std::vector<int>& ids) const {
    EncoderTrace tr;
    return forward(ids, false, nullptr, tr);
}

void Encoder::backward(const EncoderTrace& tr, const Mat& d_hidden) const {
    Mat d = layer_norm_backward(d_hidden, ln_final_, tr.ln_final);
    for (int l = cfg_.layers - 1; l >= 0; --l) {
        const EncoderLayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
        const EncoderLayerParams& lp = layers_[static_cast<std::size_t>(l)];

        Mat d_f = lt.ffn_mask.empty() ? d : apply_mask(d, lt.ffn_mask);
        Mat d_ffn_in = ffn_backward(d_f, lt.ffn_in, lp.ffn, lt.ffn);
        Mat d_mid = d;
        add_inplace(d_mid, layer_norm_backward(d_ffn_in, lp.ln2, lt.ln2));

        Mat d_att = lt.attn_mask.empty() ? d_mid : apply_mask(d_mid, lt.attn_mask);
        Mat d_attn_in(d_mid.rows, d_mid.cols);
        attention_backward(d_att, lt.attn_in, lt.attn_in, lp.attn, cfg_.heads, lt.attn, d_attn_in,
                           d_attn_in);
        d = d_mid;
        add_inplace(d, layer_norm_backward(d_attn_in, lp.ln1, lt.ln1));
    }
    for (int i = 0; i < d.rows; ++i) {
        double* de = token_embedding_->grad.row(tr.ids[static_cast<std::size_t>(i)]);
        double* dp = positional_->grad.row(i);
        const double* dr = d.row(i);
        for (int j = 0; j < d.cols; ++j) {
            de[j] += dr[j];
            dp[j] += dr[j];
        }
    }
}

// ---- decoder ---------------------------------------------------------------

Decoder::Decoder(ParamStore& store, const TransformerConfig& cfg, Param* token_embedding)
    : cfg_(cfg), token_embedding_(token_embedding) {
    positional_ = store.create("dec.pos", cfg.max_target_len + 1, cfg.dim);
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string base = "dec.l" + std::to_string(l);
        layers_.push_back({make_ln(store, base + ".ln1", cfg.dim),
                           make_attn(store, base + ".self", cfg.dim),
                           make_ln(store, base + ".ln2", cfg.dim),
                           make_attn(store, base + ".cross", cfg.dim),
                           make_ln(store, base + ".ln3", cfg.dim),
                           make_ffn(store, base + ".ffn", cfg.dim, cfg.ffn_dim)});
    }
    ln_final_ = make_ln(store, "dec.ln_final", cfg.dim);
    output_proj_ = store.create("dec.out_proj", cfg.vocab_size, cfg.dim);
}

Mat Decoder::forward_hidden(const Mat& enc_hidden, const std::vector<int>& input_ids, bool train,
                            rng_t* dropout_rng, DecoderTrace& tr) const {
    const int m = static_cast<int>(input_ids.size());
    if (m < 1 || m > cfg_.max_target_len + 1)
        throw model_error("decoder input length out of range: " + std::to_string(m));
    for (int id : input_ids)
        if (id < 0 || id >= cfg_.vocab_size)
            throw model_error("token id out of range: " + std::to_string(id));

    tr.input_ids = input_ids;
    tr.embedded = Mat(m, cfg_.dim);
    for (int i = 0; i < m; ++i) {
        const double* e = token_embedding_->value.row(input_ids[static_cast<std::size_t>(i)]);
        const double* pos = positional_->value.row(i);
        double* r = tr.embedded.row(i);
        for (int j = 0; j < cfg_.dim; ++j) r[j] = e[j] + pos[j];
    }

    const bool use_dropout = train && cfg_.dropout > 0.0 && dropout_rng;
    Mat x = tr.embedded;
    tr.layers.assign(static_cast<std::size_t>(cfg_.layers), {});
    for (int l = 0; l < cfg_.layers; ++l) {
        DecoderLayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
        const DecoderLayerParams& lp = layers_[static_cast<std::size_t>(l)];
        lt.x_in = x;
        lt.self_in = layer_norm_forward(x, lp.ln1, lt.ln1);
        Mat self_att =
            attention_forward(lt.self_in, lt.self_in, lp.self_attn, cfg_.heads, true, lt.self_attn);
        if (use_dropout) {
            lt.self_mask = dropout_mask(self_att.rows, self_att.cols, cfg_.dropout, *dropout_rng);
            self_att = apply_mask(self_att, lt.self_mask);
        }
        lt.x_mid1 = x;
        add_inplace(lt.x_mid1, self_att);

        lt.cross_in = layer_norm_forward(lt.x_mid1, lp.ln2, lt.ln2);
        Mat cross_att = attention_forward(lt.cross_in, enc_hidden, lp.cross_attn, cfg_.heads, false,
                                          lt.cross_attn);
        if (use_dropout) {
            lt.cross_mask = dropout_mask(cross_att.rows, cross_att.cols, cfg_.dropout, *dropout_rng);
            cross_att = apply_mask(cross_att, lt.cross_mask);
        }
        lt.x_mid2 = lt.x_mid1;
        add_inplace(lt.x_mid2, cross_att);

        lt.ffn_in = layer_norm_forward(lt.x_mid2, lp.ln3, lt.ln3);
        Mat f = ffn_forward(lt.ffn_in, lp.ffn, lt.ffn);
        if (use_dropout) {
            lt.ffn_mask = dropout_mask(f.rows, f.cols, cfg_.dropout, *dropout_rng);
            f = apply_mask(f, lt.ffn_mask);
        }
        x = lt.x_mid2;
        add_inplace(x, f);
    }
    tr.pre_final = x;
    tr.hidden = layer_norm_forward(x, ln_final_, tr.ln_final);
    return tr.hidden;
}

TeacherForcedResult Decoder::teacher_forced(const Mat& enc_hidden,
                                            const std::vector<int>& target_ids, bool train,
                                            rng_t* dropout_rng, DecoderTrace& tr) const {
    if (target_ids.empty()) throw model_error("empty decoder target");
    if (static_cast<int>(target_ids.size()) > cfg_.max_target_len)
        throw model_error("decoder target longer than " + std::to_string(cfg_.max_target_len));

    std::vector<int> input_ids;
    input_ids.reserve(target_ids.size());
    input_ids.push_back(Tokenizer::bos_id);
    input_ids.insert(input_ids.end(), target_ids.begin(), target_ids.end() - 1);
    tr.gold_ids = target_ids;

    Mat hidden = forward_hidden(enc_hidden, input_ids, train, dropout_rng, tr);
    Mat logits = matmul_nt(hidden, output_proj_->value);
    softmax_rows_inplace(logits);
    tr.probs = logits;

    TeacherForcedResult res;
    res.probs = tr.probs;
    for (int i = 0; i < res.probs.rows; ++i) {
        const double p = res.probs.at(i, tr.gold_ids[static_cast<std::size_t>(i)]);
        res.loss -= std::log(std::max(p, 1e-300));
    }
    return res;
}

TeacherForcedResult Decoder::teacher_forced(const Mat& enc_hidden,
                                            const std::vector<int>& target_ids) const {
    DecoderTrace tr;
    return teacher_forced(enc_hidden, target_ids, false, nullptr, tr);
}

void Decoder::backward(const DecoderTrace& tr, const Mat& enc_hidden, double loss_scale,
                       Mat& d_enc_hidden) const {
    Mat d_logits = tr.probs;
    for (int i = 0; i < d_logits.rows; ++i)
        d_logits.at(i, tr.gold_ids[static_cast<std::size_t>(i)]) -= 1.0;
    scale_inplace(d_logits, loss_scale);

    add_inplace(output_proj_->grad, matmul_tn(d_logits, tr.hidden));
    Mat d_hidden = matmul(d_logits, output_proj_->value);

    Mat d = layer_norm_backward(d_hidden, ln_final_, tr.ln_final);
    for (int l = cfg_.layers - 1; l >= 0; --l) {
        const DecoderLayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
        const DecoderLayerParams& lp = layers_[static_cast<std::size_t>(l)];

        Mat d_f = lt.ffn_mask.empty() ? d : apply_mask(d, lt.ffn_mask);
        Mat d_ffn_in = ffn_backward(d_f, lt.ffn_in, lp.ffn, lt.ffn);
        Mat d_mid2 = d;
        add_inplace(d_mid2, layer_norm_backward(d_ffn_in, lp.ln3, lt.ln3));

        Mat d_cross = lt.cross_mask.empty() ? d_mid2 : apply_mask(d_mid2, lt.cross_mask);
        Mat d_cross_in(d_mid2.rows, d_mid2.cols);
        attention_backward(d_cross, lt.cross_in, enc_hidden, lp.cross_attn, cfg_.heads,
                           lt.cross_attn, d_cross_in, d_enc_hidden);
        Mat d_mid1 = d_mid2;
        add_inplace(d_mid1, layer_norm_backward(d_cross_in, lp.ln2, lt.ln2));

        Mat d_self = lt.self_mask.empty() ? d_mid1 : apply_mask(d_mid1, lt.self_mask);
        Mat d_self_in(d_mid1.rows, d_mid1.cols);
        attention_backward(d_self, lt.self_in, lt.self_in, lp.self_attn, cfg_.heads, lt.self_attn,
                           d_self_in, d_self_in);
        d = d_mid1;
        add_inplace(d, layer_norm_backward(d_self_in, lp.ln1, lt.ln1));
    }
    for (int i = 0; i < d.rows; ++i) {
        double* de = token_embedding_->grad.row(tr.input_ids[static_cast<std::size_t>(i)]);
        double* dp = positional_->grad.row(i);
        const double* dr = d.row(i);
        for (int j = 0; j < d.cols; ++j) {
            de[j] += dr[j];
            dp[j] += dr[j];
        }
    }
}

std::vector<int> Decoder::generate(const Mat& enc_hidden, int max_len) const {
    std::vector<int> out;
    std::vector<int> input_ids{Tokenizer::bos_id};
    const int cap = std::min(max_len, cfg_.max_target_len);
    while (static_cast<int>(out.size()) < cap) {
        DecoderTrace tr;
        Mat hidden = forward_hidden(enc_hidden, input_ids, false, nullptr, tr);
        const double* last = hidden.row(hidden.rows - 1);
        const double* proj = output_proj_->value.data.data();
        int best = 0;
        double best_score = -1e300;
        for (int v = 0; v < cfg_.vocab_size; ++v) {
            double s = 0.0;
            const double* w = proj + static_cast<std::size_t>(v) * cfg_.dim;
            for (int j = 0; j < cfg_.dim; ++j) s += last[j] * w[j];
            if (s > best_score) {
                best_score = s;
                best = v;
            }
        }
        if (best == Tokenizer::eos_id) break;
        out.push_back(best);
        input_ids.push_back(best);
        if (static_cast<int>(input_ids.size()) > cfg_.max_target_len) break;
    }
    return out;
}

std::string substitute_answer(const std::vector<std::string>& generated_tokens,
                              const std::string& answer_label) {
    std::string text;
    bool found = false;
    for (const auto& t : generated_tokens) {
        if (!text.empty()) text += ' ';
        if (t == "[ANS]") {
            text += answer_label;
            found = true;
        } else {
            text += t;
        }
    }
    if (!found) {
        if (!text.empty()) text += " — ";
        text += answer_label;
    }
    return text;
}

} // namespace praline
