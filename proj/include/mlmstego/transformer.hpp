#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mlmstego {

struct TransformerConfig {
    int vocab_size = 0;
    int hidden = 128;
    int layers = 3;
    int heads = 4;
    int ffn = 384;
    int max_seq = 128;
    bool causal = false;
    uint64_t init_seed = 1;
    std::string arch = "mini-transformer-v1";

    void validate() const;
};

struct ParamTensor {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    bool decay = false;  // weight decay applies only to weight matrices
};

/// Compact encoder transformer with a masked-token prediction head (tied
/// input/output embeddings). Double precision throughout; all computation is
/// sequential, so identical inputs give bit-identical outputs across runs and
/// processes. A causal flag turns the same stack into a left-to-right scorer.
class TransformerModel {
public:
    static TransformerModel deterministic_init(const TransformerConfig& config);

    const TransformerConfig& config() const { return config_; }

    /// Softmax distributions (length vocab_size) at the requested sequence
    /// offsets. ids.size() must be <= max_seq.
    std::vector<Eigen::VectorXd> predict_positions(const std::vector<int>& ids,
                                                   const std::vector<int>& offsets) const;

    /// Forward + backward for one sample. Adds parameter gradients for the
    /// summed cross-entropy over the labeled offsets; returns that loss sum.
    double accumulate_gradients(const std::vector<int>& ids, const std::vector<int>& offsets,
                                const std::vector<int>& labels);

    void zero_gradients();
    void scale_gradients(double factor);

    std::vector<ParamTensor>& params() { return params_; }
    const std::vector<ParamTensor>& params() const { return params_; }

    void save(const std::filesystem::path& path) const;
    static TransformerModel load(const TransformerConfig& config,
                                 const std::filesystem::path& path);

private:
    TransformerModel() = default;

    struct LayerRefs {
        int wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
    };
    struct Refs {
        int tok_emb, pos_emb, emb_ln_g, emb_ln_b;
        std::vector<LayerRefs> layers;
        int head_w, head_b, head_ln_g, head_ln_b, out_bias;
    };

    struct ForwardTrace;  // defined in the implementation

    void build_refs();
    int add_param(const std::string& name, int rows, int cols, bool decay);
    void run_forward(const std::vector<int>& ids, ForwardTrace& trace) const;

    TransformerConfig config_;
    std::vector<ParamTensor> params_;
    Refs refs_;
};

/// AdamW with decoupled weight decay; decay is skipped for tensors whose
/// decay flag is false (biases, layer norms).
class AdamW {
public:
    explicit AdamW(const TransformerModel& model, double beta1 = 0.9, double beta2 = 0.999,
                   double epsilon = 1e-8);

    void step(TransformerModel& model, double learning_rate, double weight_decay);

private:
    double beta1_, beta2_, epsilon_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> m_;
    std::vector<Eigen::MatrixXd> v_;
};

}  // namespace mlmstego
