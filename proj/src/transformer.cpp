#include "mlmstego/transformer.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "mlmstego/errors.hpp"
#include "mlmstego/rng.hpp"

namespace mlmstego {

namespace {

constexpr double kLnEpsilon = 1e-5;
constexpr char kWeightsMagic[8] = {'M', 'L', 'M', 'S', 'T', 'W', '0', '1'};

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * phi;
}

// Row-wise layer norm. Caches normalized rows and inverse std for backward.
struct LnCache {
    Eigen::MatrixXd normalized;
    Eigen::VectorXd inv_std;
};

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& gain,
                           const Eigen::RowVectorXd& bias, LnCache* cache) {
    const auto rows = x.rows();
    const auto cols = x.cols();
    Eigen::MatrixXd out(rows, cols);
    Eigen::MatrixXd normalized(rows, cols);
    Eigen::VectorXd inv_std(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().mean();
        const double is = 1.0 / std::sqrt(var + kLnEpsilon);
        normalized.row(r) = ((x.row(r).array() - mean) * is).matrix();
        out.row(r) = normalized.row(r).cwiseProduct(gain) + bias;
        inv_std(r) = is;
    }
    if (cache) {
        cache->normalized = std::move(normalized);
        cache->inv_std = std::move(inv_std);
    }
    return out;
}

Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& d_out, const LnCache& cache,
                                    const Eigen::RowVectorXd& gain, Eigen::MatrixXd& d_gain,
                                    Eigen::MatrixXd& d_bias) {
    const auto rows = d_out.rows();
    const auto cols = d_out.cols();
    Eigen::MatrixXd dx(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::RowVectorXd dy_g = d_out.row(r).cwiseProduct(gain);
        const double mean_dy = dy_g.mean();
        const double mean_dy_xhat = dy_g.cwiseProduct(cache.normalized.row(r)).mean();
        dx.row(r) = ((dy_g.array() - mean_dy - cache.normalized.row(r).array() * mean_dy_xhat) *
                     cache.inv_std(r))
                        .matrix();
        d_gain.row(0) += d_out.row(r).cwiseProduct(cache.normalized.row(r));
        d_bias.row(0) += d_out.row(r);
    }
    return dx;
}

Eigen::RowVectorXd softmax_row(const Eigen::RowVectorXd& logits) {
    const double max = logits.maxCoeff();
    Eigen::RowVectorXd exps = (logits.array() - max).exp().matrix();
    return exps / exps.sum();
}

}  // namespace

void TransformerConfig::validate() const {
    if (vocab_size < 8 || hidden < 4 || layers < 1 || heads < 1 || ffn < 4 || max_seq < 4) {
        fail(Errc::invalid_config, "transformer dimensions too small");
    }
    if (hidden % heads != 0) {
        fail(Errc::invalid_config, "hidden size must be divisible by head count");
    }
}

int TransformerModel::add_param(const std::string& name, int rows, int cols, bool decay) {
    ParamTensor tensor;
    tensor.name = name;
    tensor.value = Eigen::MatrixXd::Zero(rows, cols);
    tensor.grad = Eigen::MatrixXd::Zero(rows, cols);
    tensor.decay = decay;
    params_.push_back(std::move(tensor));
    return static_cast<int>(params_.size() - 1);
}

void TransformerModel::build_refs() {
    const int h = config_.hidden;
    const int f = config_.ffn;
    refs_.tok_emb = add_param("tok_emb", config_.vocab_size, h, true);
    refs_.pos_emb = add_param("pos_emb", config_.max_seq, h, true);
    refs_.emb_ln_g = add_param("emb_ln_g", 1, h, false);
    refs_.emb_ln_b = add_param("emb_ln_b", 1, h, false);
    for (int l = 0; l < config_.layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        LayerRefs refs{};
        refs.wq = add_param(p + "wq", h, h, true);
        refs.bq = add_param(p + "bq", 1, h, false);
        refs.wk = add_param(p + "wk", h, h, true);
        refs.bk = add_param(p + "bk", 1, h, false);
        refs.wv = add_param(p + "wv", h, h, true);
        refs.bv = add_param(p + "bv", 1, h, false);
        refs.wo = add_param(p + "wo", h, h, true);
        refs.bo = add_param(p + "bo", 1, h, false);
        refs.ln1_g = add_param(p + "ln1_g", 1, h, false);
        refs.ln1_b = add_param(p + "ln1_b", 1, h, false);
        refs.w1 = add_param(p + "w1", h, f, true);
        refs.b1 = add_param(p + "b1", 1, f, false);
        refs.w2 = add_param(p + "w2", f, h, true);
        refs.b2 = add_param(p + "b2", 1, h, false);
        refs.ln2_g = add_param(p + "ln2_g", 1, h, false);
        refs.ln2_b = add_param(p + "ln2_b", 1, h, false);
        refs_.layers.push_back(refs);
    }
    refs_.head_w = add_param("head_w", h, h, true);
    refs_.head_b = add_param("head_b", 1, h, false);
    refs_.head_ln_g = add_param("head_ln_g", 1, h, false);
    refs_.head_ln_b = add_param("head_ln_b", 1, h, false);
    refs_.out_bias = add_param("out_bias", 1, config_.vocab_size, false);
}

TransformerModel TransformerModel::deterministic_init(const TransformerConfig& config) {
    config.validate();
    TransformerModel model;
    model.config_ = config;
    model.build_refs();

    SplitMix64 rng(config.init_seed);
    for (auto& tensor : model.params_) {
        const bool is_embedding = tensor.name == "tok_emb" || tensor.name == "pos_emb";
        const bool is_gain = tensor.name.find("ln") != std::string::npos &&
                             tensor.name.back() == 'g';
        const bool is_bias = !tensor.decay && !is_gain;
        if (is_gain) {
            tensor.value.setOnes();
            continue;
        }
        if (is_bias) {
            continue;  // zeros
        }
        double limit;
        if (is_embedding) {
            limit = 0.035;  // std ~0.02
        } else {
            limit = std::sqrt(6.0 / static_cast<double>(tensor.value.rows() + tensor.value.cols()));
        }
        for (Eigen::Index r = 0; r < tensor.value.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.value.cols(); ++c) {
                tensor.value(r, c) = rng.next_symmetric(limit);
            }
        }
    }
    return model;
}

void TransformerModel::zero_gradients() {
    for (auto& tensor : params_) tensor.grad.setZero();
}

void TransformerModel::scale_gradients(double factor) {
    for (auto& tensor : params_) tensor.grad *= factor;
}

// Everything backward needs from the forward pass of one sample.
struct TransformerModel::ForwardTrace {
    struct Layer {
        Eigen::MatrixXd input;  // S x H
        Eigen::MatrixXd q, k, v;
        std::vector<Eigen::MatrixXd> attn;  // per head, S x S
        Eigen::MatrixXd ctx;
        Eigen::MatrixXd resid1;
        LnCache ln1;
        Eigen::MatrixXd norm1;
        Eigen::MatrixXd ffn_pre;  // S x F
        Eigen::MatrixXd ffn_act;
        LnCache ln2;
    };
    Eigen::MatrixXd emb_sum;  // S x H, before embedding layer norm
    LnCache emb_ln;
    std::vector<Layer> layers;
    Eigen::MatrixXd output;  // S x H
};

void TransformerModel::run_forward(const std::vector<int>& ids, ForwardTrace& trace) const {
    const int seq = static_cast<int>(ids.size());
    if (seq == 0) fail(Errc::backend_failure, "empty input sequence");
    if (seq > config_.max_seq) {
        fail(Errc::sequence_too_long,
             "sequence length " + std::to_string(seq) + " exceeds " +
                 std::to_string(config_.max_seq));
    }
    const int h = config_.hidden;
    const int nh = config_.heads;
    const int dh = h / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    const auto& tok = params_[refs_.tok_emb].value;
    const auto& pos = params_[refs_.pos_emb].value;

    Eigen::MatrixXd x(seq, h);
    for (int s = 0; s < seq; ++s) {
        const int id = ids[static_cast<size_t>(s)];
        if (id < 0 || id >= config_.vocab_size) {
            fail(Errc::unknown_vocab_id, "token id " + std::to_string(id) + " out of range");
        }
        x.row(s) = tok.row(id) + pos.row(s);
    }
    trace.emb_sum = x;
    x = layer_norm(x, params_[refs_.emb_ln_g].value.row(0), params_[refs_.emb_ln_b].value.row(0),
                   &trace.emb_ln);

    trace.layers.resize(static_cast<size_t>(config_.layers));
    for (int l = 0; l < config_.layers; ++l) {
        auto& lt = trace.layers[static_cast<size_t>(l)];
        const auto& refs = refs_.layers[static_cast<size_t>(l)];
        lt.input = x;

        lt.q = (x * params_[refs.wq].value).rowwise() + params_[refs.bq].value.row(0);
        lt.k = (x * params_[refs.wk].value).rowwise() + params_[refs.bk].value.row(0);
        lt.v = (x * params_[refs.wv].value).rowwise() + params_[refs.bv].value.row(0);

        lt.ctx.resize(seq, h);
        lt.attn.resize(static_cast<size_t>(nh));
        for (int head = 0; head < nh; ++head) {
            const auto qh = lt.q.middleCols(head * dh, dh);
            const auto kh = lt.k.middleCols(head * dh, dh);
            const auto vh = lt.v.middleCols(head * dh, dh);
            Eigen::MatrixXd scores = qh * kh.transpose() * scale;
            if (config_.causal) {
                for (int r = 0; r < seq; ++r) {
                    for (int c = r + 1; c < seq; ++c) {
                        scores(r, c) = -std::numeric_limits<double>::infinity();
                    }
                }
            }
            Eigen::MatrixXd attn(seq, seq);
            for (int r = 0; r < seq; ++r) {
                attn.row(r) = softmax_row(scores.row(r));
            }
            lt.ctx.middleCols(head * dh, dh) = attn * vh;
            lt.attn[static_cast<size_t>(head)] = std::move(attn);
        }

        Eigen::MatrixXd attn_out =
            (lt.ctx * params_[refs.wo].value).rowwise() + params_[refs.bo].value.row(0);
        lt.resid1 = x + attn_out;
        lt.norm1 = layer_norm(lt.resid1, params_[refs.ln1_g].value.row(0),
                              params_[refs.ln1_b].value.row(0), &lt.ln1);

        lt.ffn_pre = (lt.norm1 * params_[refs.w1].value).rowwise() + params_[refs.b1].value.row(0);
        lt.ffn_act = lt.ffn_pre.unaryExpr([](double v) { return gelu(v); });
        Eigen::MatrixXd ffn_out =
            (lt.ffn_act * params_[refs.w2].value).rowwise() + params_[refs.b2].value.row(0);

        Eigen::MatrixXd resid2 = lt.norm1 + ffn_out;
        x = layer_norm(resid2, params_[refs.ln2_g].value.row(0), params_[refs.ln2_b].value.row(0),
                       &lt.ln2);
    }
    trace.output = x;
}

std::vector<Eigen::VectorXd> TransformerModel::predict_positions(
    const std::vector<int>& ids, const std::vector<int>& offsets) const {
    ForwardTrace trace;
    run_forward(ids, trace);

    const auto& tok = params_[refs_.tok_emb].value;
    std::vector<Eigen::VectorXd> result;
    result.reserve(offsets.size());
    for (int offset : offsets) {
        if (offset < 0 || offset >= trace.output.rows()) {
            fail(Errc::backend_failure, "prediction offset out of range");
        }
        Eigen::RowVectorXd pre =
            trace.output.row(offset) * params_[refs_.head_w].value +
            params_[refs_.head_b].value.row(0);
        Eigen::RowVectorXd act = pre.unaryExpr([](double v) { return gelu(v); });
        LnCache cache;
        Eigen::MatrixXd norm = layer_norm(act, params_[refs_.head_ln_g].value.row(0),
                                          params_[refs_.head_ln_b].value.row(0), &cache);
        Eigen::RowVectorXd logits =
            norm.row(0) * tok.transpose() + params_[refs_.out_bias].value.row(0);
        result.emplace_back(softmax_row(logits).transpose());
    }
    return result;
}

double TransformerModel::accumulate_gradients(const std::vector<int>& ids,
                                              const std::vector<int>& offsets,
                                              const std::vector<int>& labels) {
    if (offsets.size() != labels.size() || offsets.empty()) {
        fail(Errc::backend_failure, "offsets/labels mismatch");
    }
    ForwardTrace trace;
    run_forward(ids, trace);

    const int seq = static_cast<int>(ids.size());
    const int h = config_.hidden;
    const int nh = config_.heads;
    const int dh = h / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    auto& tok_tensor = params_[refs_.tok_emb];
    const auto& tok = tok_tensor.value;

    double loss = 0.0;
    Eigen::MatrixXd d_output = Eigen::MatrixXd::Zero(seq, h);

    // Prediction head per labeled offset, tied output embedding.
    for (size_t i = 0; i < offsets.size(); ++i) {
        const int offset = offsets[i];
        const int label = labels[i];
        if (offset < 0 || offset >= seq) fail(Errc::backend_failure, "offset out of range");
        if (label < 0 || label >= config_.vocab_size) {
            fail(Errc::unknown_vocab_id, "label id out of range");
        }

        Eigen::RowVectorXd pre = trace.output.row(offset) * params_[refs_.head_w].value +
                                 params_[refs_.head_b].value.row(0);
        Eigen::RowVectorXd act = pre.unaryExpr([](double v) { return gelu(v); });
        LnCache head_cache;
        Eigen::MatrixXd norm = layer_norm(act, params_[refs_.head_ln_g].value.row(0),
                                          params_[refs_.head_ln_b].value.row(0), &head_cache);
        Eigen::RowVectorXd logits = norm.row(0) * tok.transpose() +
                                    params_[refs_.out_bias].value.row(0);
        Eigen::RowVectorXd probs = softmax_row(logits);
        loss += -std::log(std::max(probs(label), 1e-300));

        Eigen::RowVectorXd d_logits = probs;
        d_logits(label) -= 1.0;

        params_[refs_.out_bias].grad.row(0) += d_logits;
        tok_tensor.grad.noalias() += d_logits.transpose() * norm.row(0);
        Eigen::MatrixXd d_norm = d_logits * tok;  // 1 x H

        Eigen::MatrixXd d_act = layer_norm_backward(d_norm, head_cache,
                                                    params_[refs_.head_ln_g].value.row(0),
                                                    params_[refs_.head_ln_g].grad,
                                                    params_[refs_.head_ln_b].grad);
        Eigen::RowVectorXd d_pre =
            d_act.row(0).cwiseProduct(pre.unaryExpr([](double v) { return gelu_grad(v); }));

        params_[refs_.head_w].grad.noalias() += trace.output.row(offset).transpose() * d_pre;
        params_[refs_.head_b].grad.row(0) += d_pre;
        d_output.row(offset) += d_pre * params_[refs_.head_w].value.transpose();
    }

    // Transformer body, layers in reverse.
    Eigen::MatrixXd dx = std::move(d_output);
    for (int l = config_.layers - 1; l >= 0; --l) {
        auto& lt = trace.layers[static_cast<size_t>(l)];
        const auto& refs = refs_.layers[static_cast<size_t>(l)];

        Eigen::MatrixXd d_resid2 = layer_norm_backward(dx, lt.ln2,
                                                       params_[refs.ln2_g].value.row(0),
                                                       params_[refs.ln2_g].grad,
                                                       params_[refs.ln2_b].grad);

        // FFN branch.
        Eigen::MatrixXd d_ffn_out = d_resid2;
        params_[refs.w2].grad.noalias() += lt.ffn_act.transpose() * d_ffn_out;
        params_[refs.b2].grad.row(0) += d_ffn_out.colwise().sum();
        Eigen::MatrixXd d_act = d_ffn_out * params_[refs.w2].value.transpose();
        Eigen::MatrixXd d_pre =
            d_act.cwiseProduct(lt.ffn_pre.unaryExpr([](double v) { return gelu_grad(v); }));
        params_[refs.w1].grad.noalias() += lt.norm1.transpose() * d_pre;
        params_[refs.b1].grad.row(0) += d_pre.colwise().sum();

        Eigen::MatrixXd d_norm1 = d_resid2;  // residual path
        d_norm1.noalias() += d_pre * params_[refs.w1].value.transpose();

        Eigen::MatrixXd d_resid1 = layer_norm_backward(d_norm1, lt.ln1,
                                                       params_[refs.ln1_g].value.row(0),
                                                       params_[refs.ln1_g].grad,
                                                       params_[refs.ln1_b].grad);

        // Attention branch.
        Eigen::MatrixXd d_attn_out = d_resid1;
        params_[refs.wo].grad.noalias() += lt.ctx.transpose() * d_attn_out;
        params_[refs.bo].grad.row(0) += d_attn_out.colwise().sum();
        Eigen::MatrixXd d_ctx = d_attn_out * params_[refs.wo].value.transpose();

        Eigen::MatrixXd d_q = Eigen::MatrixXd::Zero(seq, h);
        Eigen::MatrixXd d_k = Eigen::MatrixXd::Zero(seq, h);
        Eigen::MatrixXd d_v = Eigen::MatrixXd::Zero(seq, h);
        for (int head = 0; head < nh; ++head) {
            const auto qh = lt.q.middleCols(head * dh, dh);
            const auto kh = lt.k.middleCols(head * dh, dh);
            const auto vh = lt.v.middleCols(head * dh, dh);
            const auto& attn = lt.attn[static_cast<size_t>(head)];
            const auto d_ctx_h = d_ctx.middleCols(head * dh, dh);

            Eigen::MatrixXd d_attn = d_ctx_h * vh.transpose();
            d_v.middleCols(head * dh, dh).noalias() += attn.transpose() * d_ctx_h;

            Eigen::MatrixXd d_scores(seq, seq);
            for (int r = 0; r < seq; ++r) {
                const double dot = d_attn.row(r).cwiseProduct(attn.row(r)).sum();
                d_scores.row(r) =
                    (attn.row(r).array() * (d_attn.row(r).array() - dot)).matrix();
            }
            d_q.middleCols(head * dh, dh).noalias() += d_scores * kh * scale;
            d_k.middleCols(head * dh, dh).noalias() += d_scores.transpose() * qh * scale;
        }

        params_[refs.wq].grad.noalias() += lt.input.transpose() * d_q;
        params_[refs.bq].grad.row(0) += d_q.colwise().sum();
        params_[refs.wk].grad.noalias() += lt.input.transpose() * d_k;
        params_[refs.bk].grad.row(0) += d_k.colwise().sum();
        params_[refs.wv].grad.noalias() += lt.input.transpose() * d_v;
        params_[refs.bv].grad.row(0) += d_v.colwise().sum();

        dx = d_resid1;  // residual path into the layer input
        dx.noalias() += d_q * params_[refs.wq].value.transpose();
        dx.noalias() += d_k * params_[refs.wk].value.transpose();
        dx.noalias() += d_v * params_[refs.wv].value.transpose();
    }

    Eigen::MatrixXd d_emb = layer_norm_backward(dx, trace.emb_ln,
                                                params_[refs_.emb_ln_g].value.row(0),
                                                params_[refs_.emb_ln_g].grad,
                                                params_[refs_.emb_ln_b].grad);
    auto& pos_tensor = params_[refs_.pos_emb];
    for (int s = 0; s < seq; ++s) {
        tok_tensor.grad.row(ids[static_cast<size_t>(s)]) += d_emb.row(s);
        pos_tensor.grad.row(s) += d_emb.row(s);
    }
    return loss;
}

void TransformerModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write weights to " + path.string());
    out.write(kWeightsMagic, sizeof(kWeightsMagic));
    const uint32_t count = static_cast<uint32_t>(params_.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& tensor : params_) {
        const uint32_t name_len = static_cast<uint32_t>(tensor.name.size());
        const uint64_t rows = static_cast<uint64_t>(tensor.value.rows());
        const uint64_t cols = static_cast<uint64_t>(tensor.value.cols());
        out.write(reinterpret_cast<const char*>(&name_len), sizeof(name_len));
        out.write(tensor.name.data(), name_len);
        out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        for (Eigen::Index r = 0; r < tensor.value.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.value.cols(); ++c) {
                const double v = tensor.value(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
        }
    }
    if (!out) fail(Errc::io_error, "short write to " + path.string());
}

TransformerModel TransformerModel::load(const TransformerConfig& config,
                                        const std::filesystem::path& path) {
    TransformerModel model;
    model.config_ = config;
    model.config_.validate();
    model.build_refs();

    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::artifact_corrupt, "cannot read weights from " + path.string());
    char magic[sizeof(kWeightsMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kWeightsMagic, sizeof(magic)) != 0) {
        fail(Errc::artifact_corrupt, "bad weights file magic in " + path.string());
    }
    uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || count != model.params_.size()) {
        fail(Errc::artifact_corrupt, "weights tensor count mismatch");
    }
    for (auto& tensor : model.params_) {
        uint32_t name_len = 0;
        in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        uint64_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        if (!in || name != tensor.name || rows != static_cast<uint64_t>(tensor.value.rows()) ||
            cols != static_cast<uint64_t>(tensor.value.cols())) {
            fail(Errc::artifact_corrupt, "weights tensor '" + name + "' does not match model");
        }
        for (Eigen::Index r = 0; r < tensor.value.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.value.cols(); ++c) {
                double v = 0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                tensor.value(r, c) = v;
            }
        }
        if (!in) fail(Errc::artifact_corrupt, "truncated weights file");
    }
    return model;
}

AdamW::AdamW(const TransformerModel& model, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
    for (const auto& tensor : model.params()) {
        m_.emplace_back(Eigen::MatrixXd::Zero(tensor.value.rows(), tensor.value.cols()));
        v_.emplace_back(Eigen::MatrixXd::Zero(tensor.value.rows(), tensor.value.cols()));
    }
}

void AdamW::step(TransformerModel& model, double learning_rate, double weight_decay) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto& params = model.params();
    for (size_t i = 0; i < params.size(); ++i) {
        auto& tensor = params[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * tensor.grad;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * tensor.grad.cwiseProduct(tensor.grad);
        const Eigen::MatrixXd m_hat = m_[i] / bc1;
        const Eigen::MatrixXd v_hat = v_[i] / bc2;
        tensor.value.array() -=
            learning_rate * (m_hat.array() / (v_hat.array().sqrt() + epsilon_));
        if (tensor.decay && weight_decay > 0.0) {
            tensor.value.array() -= learning_rate * weight_decay * tensor.value.array();
        }
    }
}

}  // namespace mlmstego
