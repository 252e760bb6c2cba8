#ifndef RECSIM_MODEL_ZOO_HPP
#define RECSIM_MODEL_ZOO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace recsim {

struct CpuPlatformSpec;  // platform.hpp

struct UnknownModel : std::runtime_error {
  explicit UnknownModel(const std::string& name)
      : std::runtime_error("unknown model: " + name) {}
};

enum class Pooling { Sum, Concat, AttentionFC, AttentionRNN };

enum class OpCategory : int {
  DenseFC = 0,
  PredictFC,
  EmbeddingLookup,
  Pooling,
  Attention,
  Recurrent,
  Interaction,
};
inline constexpr int kNumOpCategories = 7;

const char* to_string(OpCategory c);
const char* to_string(Pooling p);
Pooling pooling_from_string(const std::string& s);

// Ordered layer output widths. The input width of the first layer comes
// from whatever feeds the stack (dense features or pooled embeddings).
struct LayerStack {
  std::vector<std::int64_t> dims;

  std::int64_t output_dim() const { return dims.back(); }
  bool operator==(const LayerStack&) const = default;
};

struct EmbeddingConfig {
  std::int64_t num_tables = 0;
  std::int64_t lookups_per_table = 1;
  std::int64_t embedding_dim = 32;
  Pooling pooling = Pooling::Sum;
  bool operator==(const EmbeddingConfig&) const = default;
};

struct ModelSpec {
  std::string name;
  std::optional<LayerStack> dense_fc;
  LayerStack predict_fc;
  std::int64_t num_parallel_predict_stacks = 1;
  EmbeddingConfig embeddings;
  std::int64_t dense_input_dim = 0;
  std::optional<std::int64_t> recurrent_hidden_dim;

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

struct OpWork {
  double flops = 0;
  double bytes = 0;
};

struct WorkBreakdown {
  std::array<OpWork, kNumOpCategories> per_category{};
  double gather_stream = 0;  // embedding lookups per table in this chunk

  OpWork& operator[](OpCategory c) {
    return per_category[static_cast<int>(c)];
  }
  const OpWork& operator[](OpCategory c) const {
    return per_category[static_cast<int>(c)];
  }
  double total_flops() const;
  double total_bytes() const;
};

// The eight built-in archetypes.
ModelSpec builtin_model(const std::string& name);
std::vector<std::string> zoo_names();

// Operator-level flop/byte accounting for one request of `batch` items.
// Linear in batch by construction.
WorkBreakdown work(const ModelSpec& model, std::int64_t batch);

// Category with the largest modeled time share on `platform` with all
// cores active (the serving regime the operator breakdowns describe).
OpCategory dominant_category(const ModelSpec& model,
                             const CpuPlatformSpec& platform,
                             std::int64_t batch);

}  // namespace recsim

#endif  // RECSIM_MODEL_ZOO_HPP
