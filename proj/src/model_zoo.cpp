#include "recsim/model_zoo.hpp"

#include <algorithm>
#include <cassert>

#include "recsim/platform.hpp"

namespace recsim {

const char* to_string(OpCategory c) {
  switch (c) {
    case OpCategory::DenseFC: return "DenseFC";
    case OpCategory::PredictFC: return "PredictFC";
    case OpCategory::EmbeddingLookup: return "EmbeddingLookup";
    case OpCategory::Pooling: return "Pooling";
    case OpCategory::Attention: return "Attention";
    case OpCategory::Recurrent: return "Recurrent";
    case OpCategory::Interaction: return "Interaction";
  }
  return "?";
}

const char* to_string(Pooling p) {
  switch (p) {
    case Pooling::Sum: return "Sum";
    case Pooling::Concat: return "Concat";
    case Pooling::AttentionFC: return "AttentionFC";
    case Pooling::AttentionRNN: return "AttentionRNN";
  }
  return "?";
}

Pooling pooling_from_string(const std::string& s) {
  if (s == "Sum") return Pooling::Sum;
  if (s == "Concat") return Pooling::Concat;
  if (s == "AttentionFC") return Pooling::AttentionFC;
  if (s == "AttentionRNN") return Pooling::AttentionRNN;
  throw std::invalid_argument("unknown pooling: " + s);
}

void ModelSpec::validate() const {
  auto check_stack = [](const LayerStack& s, const char* what) {
    if (s.dims.empty()) throw std::invalid_argument(std::string(what) + ": empty layer stack");
    for (auto d : s.dims)
      if (d < 1) throw std::invalid_argument(std::string(what) + ": layer width < 1");
  };
  check_stack(predict_fc, "predict_fc");
  if (dense_fc) check_stack(*dense_fc, "dense_fc");
  if (num_parallel_predict_stacks < 1)
    throw std::invalid_argument("num_parallel_predict_stacks < 1");
  const auto& e = embeddings;
  if (e.num_tables < 0) throw std::invalid_argument("num_tables < 0");
  if (e.num_tables > 0 && e.lookups_per_table < 1)
    throw std::invalid_argument("lookups_per_table < 1");
  if (e.num_tables > 0 && (e.embedding_dim < 8 || e.embedding_dim > 256))
    throw std::invalid_argument("embedding_dim outside [8, 256]");
  if (e.pooling == Pooling::AttentionRNN && !recurrent_hidden_dim)
    throw std::invalid_argument("AttentionRNN requires recurrent_hidden_dim");
}

double WorkBreakdown::total_flops() const {
  double s = 0;
  for (const auto& w : per_category) s += w.flops;
  return s;
}

double WorkBreakdown::total_bytes() const {
  double s = 0;
  for (const auto& w : per_category) s += w.bytes;
  return s;
}

namespace {

constexpr double kBytesPerElement = 4.0;  // fp32 activations and embeddings

ModelSpec make(std::string name, std::optional<LayerStack> dense,
               LayerStack predict, std::int64_t stacks, std::int64_t tables,
               std::int64_t lookups, Pooling pooling,
               std::int64_t dense_input_dim,
               std::optional<std::int64_t> hidden = std::nullopt) {
  ModelSpec m;
  m.name = std::move(name);
  m.dense_fc = std::move(dense);
  m.predict_fc = std::move(predict);
  m.num_parallel_predict_stacks = stacks;
  m.embeddings = {tables, lookups, 32, pooling};
  m.dense_input_dim = dense_input_dim;
  m.recurrent_hidden_dim = hidden;
  m.validate();
  return m;
}

// FC chain flops for one item: sum of 2*d_in*d_out along the stack.
double fc_flops(std::int64_t input_dim, const LayerStack& s) {
  double f = 0;
  std::int64_t in = input_dim;
  for (auto out : s.dims) {
    f += 2.0 * static_cast<double>(in) * static_cast<double>(out);
    in = out;
  }
  return f;
}

// Activation traffic for one item: input plus every layer output.
double fc_act_bytes(std::int64_t input_dim, const LayerStack& s) {
  double n = static_cast<double>(input_dim);
  for (auto out : s.dims) n += static_cast<double>(out);
  return n * kBytesPerElement;
}

// Width of the feature vector entering the predict stack.
std::int64_t predict_input_dim(const ModelSpec& m) {
  const auto& e = m.embeddings;
  std::int64_t dense_out =
      m.dense_fc ? m.dense_fc->output_dim() : m.dense_input_dim;
  std::int64_t sparse_out = 0;
  switch (e.pooling) {
    case Pooling::Sum: sparse_out = e.embedding_dim; break;
    case Pooling::Concat:
      sparse_out = e.num_tables * e.lookups_per_table * e.embedding_dim;
      break;
    case Pooling::AttentionFC:
      sparse_out = e.num_tables * e.embedding_dim;
      break;
    case Pooling::AttentionRNN:
      sparse_out = e.num_tables * *m.recurrent_hidden_dim;
      break;
  }
  std::int64_t interaction_out = 0;
  if (e.pooling == Pooling::Sum && m.dense_fc) {
    std::int64_t v = e.num_tables + 1;  // per-table sums plus the dense vector
    interaction_out = v * (v - 1) / 2;
  }
  std::int64_t in = dense_out + sparse_out + interaction_out;
  return std::max<std::int64_t>(in, 1);
}

}  // namespace

ModelSpec builtin_model(const std::string& name) {
  // Range-valued architecture parameters are fixed as: "Tens" of tables
  // = 20, DLRM lookups = 80 (RMC3: 20), DIN lookups = 200 ("Hundreds"),
  // MT-WND N = 4, embedding_dim = 32, DIEN GRU width 64.
  if (name == "NCF")
    return make("NCF", std::nullopt, {{256, 256, 128}}, 1, 4, 1,
                Pooling::Concat, 0);
  if (name == "WND")
    return make("WND", std::nullopt, {{1024, 512, 256}}, 1, 20, 1,
                Pooling::Concat, 1000);
  if (name == "MT-WND")
    return make("MT-WND", std::nullopt, {{1024, 512, 256}}, 4, 20, 1,
                Pooling::Concat, 1000);
  if (name == "DLRM-RMC1")
    return make("DLRM-RMC1", LayerStack{{256, 128, 32}}, {{256, 64, 1}}, 1, 10,
                80, Pooling::Sum, 256);
  if (name == "DLRM-RMC2")
    return make("DLRM-RMC2", LayerStack{{256, 128, 32}}, {{512, 128, 1}}, 1, 40,
                80, Pooling::Sum, 256);
  if (name == "DLRM-RMC3")
    return make("DLRM-RMC3", LayerStack{{2560, 512, 32}}, {{512, 128, 1}}, 1,
                10, 20, Pooling::Sum, 256);
  if (name == "DIN")
    return make("DIN", std::nullopt, {{200, 80, 2}}, 1, 20, 200,
                Pooling::AttentionFC, 0);
  if (name == "DIEN")
    return make("DIEN", std::nullopt, {{200, 80, 2}}, 1, 20, 20,
                Pooling::AttentionRNN, 0, 64);
  throw UnknownModel(name);
}

std::vector<std::string> zoo_names() {
  return {"NCF",       "WND",       "MT-WND",    "DLRM-RMC1",
          "DLRM-RMC2", "DLRM-RMC3", "DIN",       "DIEN"};
}

WorkBreakdown work(const ModelSpec& m, std::int64_t batch) {
  if (batch < 1) throw std::invalid_argument("batch < 1");
  const double b = static_cast<double>(batch);
  const auto& e = m.embeddings;
  const double dim = static_cast<double>(e.embedding_dim);
  const double tables = static_cast<double>(e.num_tables);
  const double lookups = static_cast<double>(e.lookups_per_table);

  WorkBreakdown wb;

  if (m.dense_fc) {
    wb[OpCategory::DenseFC] = {b * fc_flops(m.dense_input_dim, *m.dense_fc),
                               b * fc_act_bytes(m.dense_input_dim, *m.dense_fc)};
  }

  if (e.num_tables > 0) {
    wb.gather_stream = b * lookups;
    wb[OpCategory::EmbeddingLookup] = {0.0,
                                       b * tables * lookups * dim *
                                           kBytesPerElement};
    switch (e.pooling) {
      case Pooling::Sum:
        wb[OpCategory::Pooling] = {b * tables * lookups * dim,
                                   b * tables * dim * kBytesPerElement};
        break;
      case Pooling::Concat:
        // Pure data movement into the concatenated feature vector.
        wb[OpCategory::Pooling] = {0.0,
                                   b * tables * lookups * dim * kBytesPerElement};
        break;
      case Pooling::AttentionFC: {
        // Local activation unit: one dim x dim FC pass per lookup to score
        // the behavior against the candidate, then an attention-weighted
        // sum per table.
        wb[OpCategory::Attention] = {b * tables * lookups * 2.0 * dim * dim,
                                     b * tables * lookups * kBytesPerElement};
        wb[OpCategory::Pooling] = {2.0 * b * tables * lookups * dim,
                                   b * tables * dim * kBytesPerElement};
        break;
      }
      case Pooling::AttentionRNN: {
        // Interest-evolution GRU per behavior sequence (one per table):
        // 3 gate-FC passes of width hidden x hidden per timestep,
        // timesteps = lookups_per_table.
        const double h = static_cast<double>(*m.recurrent_hidden_dim);
        wb[OpCategory::Recurrent] = {b * tables * lookups * 3.0 * 2.0 * h * h,
                                     b * tables * lookups * h * kBytesPerElement};
        wb[OpCategory::Pooling] = {2.0 * b * tables * lookups * dim,
                                   b * tables * h * kBytesPerElement};
        break;
      }
    }
  }

  if (e.pooling == Pooling::Sum && m.dense_fc && e.num_tables > 0) {
    // DLRM-style pairwise dot products between per-table sums and the
    // dense feature vector.
    const double v = tables + 1.0;
    const double pairs = v * (v - 1.0) / 2.0;
    wb[OpCategory::Interaction] = {2.0 * b * pairs * dim,
                                   b * pairs * kBytesPerElement};
  }

  const std::int64_t p_in = predict_input_dim(m);
  const double stacks = static_cast<double>(m.num_parallel_predict_stacks);
  wb[OpCategory::PredictFC] = {b * stacks * fc_flops(p_in, m.predict_fc),
                               b * stacks * fc_act_bytes(p_in, m.predict_fc)};
  return wb;
}

OpCategory dominant_category(const ModelSpec& model,
                             const CpuPlatformSpec& platform,
                             std::int64_t batch) {
  // Operator breakdown of a single request on an otherwise idle machine,
  // matching how per-operator profiles are collected.
  ServiceTime st = cpu_service_time(model, batch, 1, platform);
  int best = 0;
  for (int c = 1; c < kNumOpCategories; ++c)
    if (st.per_category[c] > st.per_category[best]) best = c;
  return static_cast<OpCategory>(best);
}

}  // namespace recsim
