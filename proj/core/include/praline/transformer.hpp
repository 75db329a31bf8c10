#pragma once

#include "praline/params.hpp"
#include "praline/tensor.hpp"

#include <vector>

namespace praline {

struct TransformerConfig {
    int dim = 64;
    int layers = 2;
    int heads = 4;
    int ffn_dim = 128;
    double dropout = 0.1;
    int max_input_len = 150;
    int max_target_len = 50;
    int vocab_size = 0;
};

struct EncoderOutput {
    Mat hidden; // one row per input token
};

// ---- building blocks --------------------------------------------------

struct LayerNormParams {
    Param* gain;
    Param* bias;
};
struct LayerNormTrace {
    Mat xhat;
    Vec inv_std;
};

struct AttentionParams {
    Param *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
};
struct AttentionTrace {
    Mat q, k, v, concat;
    std::vector<Mat> probs; // one attention matrix per head
};

struct FfnParams {
    Param *w1, *b1, *w2, *b2;
};
struct FfnTrace {
    Mat pre_act, act;
};

Mat layer_norm_forward(const Mat& x, const LayerNormParams& p, LayerNormTrace& tr);
// Accumulates parameter grads, returns dx.
Mat layer_norm_backward(const Mat& dy, const LayerNormParams& p, const LayerNormTrace& tr);

Mat attention_forward(const Mat& x_q, const Mat& x_kv, const AttentionParams& p, int heads,
                      bool causal, AttentionTrace& tr);
// Accumulates parameter grads and adds input gradients onto d_xq / d_xkv.
void attention_backward(const Mat& d_out, const Mat& x_q, const Mat& x_kv,
                        const AttentionParams& p, int heads, const AttentionTrace& tr, Mat& d_xq,
                        Mat& d_xkv);

Mat ffn_forward(const Mat& x, const FfnParams& p, FfnTrace& tr);
Mat ffn_backward(const Mat& d_out, const Mat& x, const FfnParams& p, const FfnTrace& tr);

// ---- encoder -----------------------------------------------------------

struct EncoderLayerParams {
    LayerNormParams ln1;
    AttentionParams attn;
    LayerNormParams ln2;
    FfnParams ffn;
};

struct EncoderLayerTrace {
    Mat x_in;
    LayerNormTrace ln1;
    Mat attn_in;
    AttentionTrace attn;
    Mat attn_mask; // dropout mask, empty in eval mode
    Mat x_mid;
    LayerNormTrace ln2;
    Mat ffn_in;
    FfnTrace ffn;
    Mat ffn_mask;
};

struct EncoderTrace {
    std::vector<int> ids;
    Mat embedded;
    std::vector<EncoderLayerTrace> layers;
    LayerNormTrace ln_final;
    Mat pre_final;
};

// Bidirectional self-attention encoder over token + positional embeddings.
// Shares the token embedding table with the decoder.
class Encoder {
  public:
    Encoder(ParamStore& store, const TransformerConfig& cfg, Param* token_embedding);

    EncoderOutput forward(const std::vector<int>& ids, bool train, rng_t* dropout_rng,
                          EncoderTrace& tr) const;
    EncoderOutput forward(const std::vector<int>& ids) const;

    // Accumulates gradients for all encoder parameters and the shared token
    // embedding rows.
    void backward(const EncoderTrace& tr, const Mat& d_hidden) const;

    const TransformerConfig& config() const { return cfg_; }

  private:
    TransformerConfig cfg_;
    Param* token_embedding_;
    Param* positional_;
    std::vector<EncoderLayerParams> layers_;
    LayerNormParams ln_final_;
};

// ---- decoder -----------------------------------------------------------

struct DecoderLayerParams {
    LayerNormParams ln1;
    AttentionParams self_attn;
    LayerNormParams ln2;
    AttentionParams cross_attn;
    LayerNormParams ln3;
    FfnParams ffn;
};

struct DecoderLayerTrace {
    Mat x_in;
    LayerNormTrace ln1;
    Mat self_in;
    AttentionTrace self_attn;
    Mat self_mask;
    Mat x_mid1;
    LayerNormTrace ln2;
    Mat cross_in;
    AttentionTrace cross_attn;
    Mat cross_mask;
    Mat x_mid2;
    LayerNormTrace ln3;
    Mat ffn_in;
    FfnTrace ffn;
    Mat ffn_mask;
};

struct DecoderTrace {
    std::vector<int> input_ids; // [BOS] + target[0..m-2]
    std::vector<int> gold_ids;  // target + [EOS]
    Mat embedded;
    std::vector<DecoderLayerTrace> layers;
    LayerNormTrace ln_final;
    Mat pre_final;
    Mat hidden;
    Mat probs; // per-step distribution over the decoder vocabulary
};

struct TeacherForcedResult {
    Mat probs;
    double loss = 0.0; // summed negative log-likelihood over the target
};

// Autoregressive decoder with causal self-attention and cross-attention over
// the encoder output. Teacher forcing consumes the gold target; generation is
// greedy argmax from [BOS].
class Decoder {
  public:
    Decoder(ParamStore& store, const TransformerConfig& cfg, Param* token_embedding);

    TeacherForcedResult teacher_forced(const Mat& enc_hidden, const std::vector<int>& target_ids,
                                       bool train, rng_t* dropout_rng, DecoderTrace& tr) const;
    TeacherForcedResult teacher_forced(const Mat& enc_hidden,
                                       const std::vector<int>& target_ids) const;

    // Seeds the backward pass from the summed NLL scaled by loss_scale,
    // accumulates all decoder gradients and adds the cross-attention
    // contribution onto d_enc_hidden.
    void backward(const DecoderTrace& tr, const Mat& enc_hidden, double loss_scale,
                  Mat& d_enc_hidden) const;

    std::vector<int> generate(const Mat& enc_hidden, int max_len) const;

  private:
    Mat forward_hidden(const Mat& enc_hidden, const std::vector<int>& input_ids, bool train,
                       rng_t* dropout_rng, DecoderTrace& tr) const;

    TransformerConfig cfg_;
    Param* token_embedding_;
    Param* positional_;
    std::vector<DecoderLayerParams> layers_;
    LayerNormParams ln_final_;
    Param* output_proj_; // |V| x d
};

// Replaces every [ANS] token with the answer label; when no [ANS] is present
// the label is appended after the text.
std::string substitute_answer(const std::vector<std::string>& generated_tokens,
                              const std::string& answer_label);

} // namespace praline
