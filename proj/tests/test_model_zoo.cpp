#include <doctest.h>

#include "recsim/model_zoo.hpp"
#include "recsim/platform.hpp"

using namespace recsim;

TEST_CASE("zoo contains exactly the eight archetypes") {
  auto names = zoo_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) CHECK_NOTHROW(builtin_model(n));
  CHECK_THROWS_AS(builtin_model("ResNet50"), UnknownModel);
  CHECK_THROWS_AS(builtin_model(""), UnknownModel);
}

TEST_CASE("table parameters for DLRM-RMC1 and NCF") {
  ModelSpec m = builtin_model("DLRM-RMC1");
  REQUIRE(m.dense_fc.has_value());
  CHECK(m.dense_fc->dims == std::vector<std::int64_t>{256, 128, 32});
  CHECK(m.predict_fc.dims == std::vector<std::int64_t>{256, 64, 1});
  CHECK(m.embeddings.num_tables == 10);
  CHECK(m.embeddings.lookups_per_table == 80);
  CHECK(m.embeddings.pooling == Pooling::Sum);

  ModelSpec ncf = builtin_model("NCF");
  CHECK_FALSE(ncf.dense_fc.has_value());
  CHECK(ncf.predict_fc.dims == std::vector<std::int64_t>{256, 256, 128});
  CHECK(ncf.embeddings.num_tables == 4);
  CHECK(ncf.embeddings.lookups_per_table == 1);
  CHECK(ncf.embeddings.pooling == Pooling::Concat);
}

TEST_CASE("single FC layer flop accounting") {
  // One dense layer, 4 in, 2 out, batch 1: 2 * 1 * 4 * 2 = 16 flops.
  ModelSpec m;
  m.name = "synthetic-fc";
  m.dense_fc = LayerStack{{2}};
  m.dense_input_dim = 4;
  m.predict_fc = LayerStack{{1}};
  m.embeddings.num_tables = 0;
  m.validate();
  WorkBreakdown wb = work(m, 1);
  CHECK(wb[OpCategory::DenseFC].flops == doctest::Approx(16.0));
}

TEST_CASE("embedding lookup bytes for DLRM-RMC1") {
  WorkBreakdown wb = work(builtin_model("DLRM-RMC1"), 1);
  // 10 tables * 80 lookups * 32 elements * 4 bytes
  CHECK(wb[OpCategory::EmbeddingLookup].bytes == doctest::Approx(102400.0));
}

TEST_CASE("work is linear in batch") {
  for (const auto& name : zoo_names()) {
    ModelSpec m = builtin_model(name);
    WorkBreakdown base = work(m, 3);
    for (std::int64_t k : {2, 4, 8}) {
      WorkBreakdown scaled = work(m, 3 * k);
      for (int c = 0; c < kNumOpCategories; ++c) {
        CHECK(scaled.per_category[c].flops ==
              doctest::Approx(k * base.per_category[c].flops));
        CHECK(scaled.per_category[c].bytes ==
              doctest::Approx(k * base.per_category[c].bytes));
      }
    }
  }
}

TEST_CASE("work rejects batch < 1") {
  CHECK_THROWS_AS(work(builtin_model("NCF"), 0), std::invalid_argument);
}

TEST_CASE("dominant operator categories at batch 64") {
  CpuPlatformSpec bdw = builtin_cpu("broadwell");
  auto dom = [&](const char* name) {
    return dominant_category(builtin_model(name), bdw, 64);
  };
  CHECK(dom("DLRM-RMC1") == OpCategory::EmbeddingLookup);
  CHECK(dom("DLRM-RMC2") == OpCategory::EmbeddingLookup);
  CHECK(dom("DLRM-RMC3") == OpCategory::DenseFC);
  CHECK(dom("NCF") == OpCategory::PredictFC);
  CHECK(dom("WND") == OpCategory::PredictFC);
  CHECK(dom("MT-WND") == OpCategory::PredictFC);
  CHECK(dom("DIEN") == OpCategory::Recurrent);

  // DIN splits its time; no category may exceed 60%.
  ModelSpec din = builtin_model("DIN");
  ServiceTime st = cpu_service_time(din, 64, 1, bdw);
  for (int c = 0; c < kNumOpCategories; ++c)
    CHECK(st.per_category[c] / st.total < 0.60);
}

TEST_CASE("model validation rejects malformed specs") {
  ModelSpec m = builtin_model("DIEN");
  m.recurrent_hidden_dim.reset();
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  ModelSpec bad = builtin_model("NCF");
  bad.predict_fc.dims.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ModelSpec dims = builtin_model("NCF");
  dims.embeddings.embedding_dim = 4;
  CHECK_THROWS_AS(dims.validate(), std::invalid_argument);
}
