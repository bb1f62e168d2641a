#include <doctest.h>

#include <algorithm>
#include <random>

#include "closure/baseline.hpp"
#include "closure/errors.hpp"
#include "test_support.hpp"

using namespace closure;

namespace {

std::vector<TemplateModel::Template> standard_templates() {
  const GenerationConfig cfg;
  std::vector<TemplateModel::Template> out;
  for (const auto& r : enumerate_split(Split::train(), cfg)) {
    out.push_back({r.image_id, r.class_label, render_record(r, cfg).pixels});
  }
  return out;
}

const std::vector<TemplateModel::Template>& cached_templates() {
  static const auto templates = standard_templates();
  return templates;
}

// Brute-force reference: full SSD against every template, tie-break by
// (label, id), no early exit.
int oracle_predict(const std::vector<TemplateModel::Template>& templates, const std::vector<std::uint8_t>& pixels) {
  long long best = -1;
  const TemplateModel::Template* winner = nullptr;
  for (const auto& t : templates) {
    long long d = 0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const long long diff = static_cast<long long>(pixels[i]) - t.pixels[i];
      d += diff * diff;
    }
    if (winner == nullptr || d < best ||
        (d == best && std::tie(t.class_label, t.image_id) < std::tie(winner->class_label, winner->image_id))) {
      best = d;
      winner = &t;
    }
  }
  return winner->class_label;
}

StimulusImage image_of(std::vector<std::uint8_t> pixels, int w, int h) {
  StimulusImage img;
  img.width = w;
  img.height = h;
  img.pixels = std::move(pixels);
  return img;
}

}  // namespace

TEST_CASE("fit on the standard training set keeps 320 templates, 32 per class") {
  const auto model = TemplateModel::fit(cached_templates(), 224, 224);
  CHECK(model.templates().size() == 320);
  std::map<int, int> per_class;
  for (const auto& t : model.templates()) ++per_class[t.class_label];
  for (int label = 0; label < 10; ++label) CHECK(per_class[label] == 32);
  CHECK(TemplateModel::fit(cached_templates(), 224, 224) == model);
}

TEST_CASE("no raster is shared between two classes in the standard design") {
  // fit() enforces this; the check here is independent of its hashing.
  const auto& ts = cached_templates();
  std::map<std::vector<std::uint8_t>, int> owner;
  for (const auto& t : ts) {
    const auto [it, inserted] = owner.emplace(t.pixels, t.class_label);
    if (!inserted) CHECK(it->second == t.class_label);
  }
}

TEST_CASE("every training image predicts its own label") {
  const auto model = TemplateModel::fit(cached_templates(), 224, 224);
  for (const auto& t : cached_templates()) CHECK(model.predict(image_of(t.pixels, 224, 224)) == t.class_label);
}

TEST_CASE("all-background images match the brute-force oracle") {
  const auto model = TemplateModel::fit(cached_templates(), 224, 224);
  const std::vector<std::uint8_t> white(224 * 224, 255);
  const std::vector<std::uint8_t> black(224 * 224, 0);
  CHECK(model.predict(image_of(white, 224, 224)) == oracle_predict(cached_templates(), white));
  CHECK(model.predict(image_of(black, 224, 224)) == oracle_predict(cached_templates(), black));
  // Frozen from the oracle: the triangle has the shortest outline, so the
  // fewest pixels disagree with a blank canvas of either polarity.
  CHECK(oracle_predict(cached_templates(), white) == 0);
  CHECK(oracle_predict(cached_templates(), black) == 0);
}

TEST_CASE("property: predict agrees with the oracle on perturbed test images") {
  const GenerationConfig cfg;
  const auto model = TemplateModel::fit(cached_templates(), 224, 224);
  std::mt19937 rng(17);
  const auto records = enumerate_split(Split::test(70), cfg);
  for (int trial = 0; trial < 12; ++trial) {
    auto pixels = render_record(records[rng() % records.size()], cfg).pixels;
    for (int k = 0; k < 300; ++k) pixels[rng() % pixels.size()] = static_cast<std::uint8_t>(rng());
    CHECK(model.predict(image_of(pixels, 224, 224)) == oracle_predict(cached_templates(), pixels));
  }
}

TEST_CASE("ties go to the smallest label, then the smallest id") {
  // Three distinct templates, each at squared distance 100 from the query.
  const std::vector<std::uint8_t> query{10, 10, 10, 10};
  std::vector<TemplateModel::Template> ts{{"z", 7, {0, 10, 10, 10}}, {"a", 5, {20, 10, 10, 10}},
                                          {"m", 2, {10, 10, 10, 0}}};
  CHECK(TemplateModel::fit(ts, 2, 2).predict(image_of(query, 2, 2)) == 2);
  ts.pop_back();
  CHECK(TemplateModel::fit(ts, 2, 2).predict(image_of(query, 2, 2)) == 5);
  CHECK(oracle_predict(ts, query) == 5);

  std::vector<TemplateModel::Template> same_label{{"b", 4, {9, 0}}, {"a", 4, {0, 9}}};
  CHECK(TemplateModel::fit(same_label, 2, 1).templates().front().image_id == "a");
}

TEST_CASE("property: insertion order does not change the model or its predictions") {
  std::mt19937 rng(29);
  auto shuffled = cached_templates();
  const auto reference = TemplateModel::fit(shuffled, 224, 224);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto model = TemplateModel::fit(shuffled, 224, 224);
    CHECK(model == reference);
    const std::vector<std::uint8_t> probe(224 * 224, static_cast<std::uint8_t>(trial * 100));
    CHECK(model.predict(image_of(probe, 224, 224)) == reference.predict(image_of(probe, 224, 224)));
  }
}

TEST_CASE("fit and predict errors") {
  CHECK_THROWS_AS(TemplateModel::fit({}, 224, 224), ValidationError);
  CHECK_THROWS_AS(TemplateModel::fit({{"a", 0, {1, 2, 3}}}, 2, 2), ValidationError);
  CHECK_THROWS_AS(TemplateModel::fit({{"a", 11, {1, 2, 3, 4}}}, 2, 2), ValidationError);
  CHECK_THROWS_WITH_AS(TemplateModel::fit({{"a", 0, {1, 2, 3, 4}}, {"b", 1, {1, 2, 3, 4}}}, 2, 2),
                       doctest::Contains("identical but labelled differently"), ValidationError);
  CHECK_NOTHROW(TemplateModel::fit({{"a", 3, {1, 2, 3, 4}}, {"b", 3, {1, 2, 3, 4}}}, 2, 2));

  const auto model = TemplateModel::fit({{"a", 0, {1, 2, 3, 4}}}, 2, 2);
  CHECK_THROWS_AS(model.predict(image_of({1, 2, 3}, 3, 1)), ValidationError);

  DatasetManifest empty;
  CHECK_THROWS_AS(TemplateModel::fit(empty, "/tmp"), ValidationError);
}

TEST_CASE("squared distance") {
  CHECK(squared_distance({0, 10, 255}, {0, 7, 0}) == 9 + 255 * 255);
  CHECK_THROWS_AS(squared_distance({1}, {1, 2}), ValidationError);
}

TEST_CASE("fit and predict from disk") {
  testing::TempDir dir;
  const GenerationConfig cfg;
  const auto train = generate_training_set(dir.path(), cfg, 2);
  const auto test = generate_split(dir.path(), Split::test(0), cfg, 2);

  const auto model = TemplateModel::fit(train, dir.path(), 2);
  CHECK(model == TemplateModel::fit(cached_templates(), 224, 224));

  const auto preds = predict_split(model, test, dir.path(), 2);
  CHECK(score(test, preds) == 1.0);
  CHECK(predict_split(model, test, dir.path(), 1).entries == preds.entries);

  std::filesystem::remove(dir.path() / train.records[40].relative_path);
  CHECK_THROWS_WITH_AS(TemplateModel::fit(train, dir.path(), 2), doctest::Contains(train.records[40].image_id.c_str()),
                       IoError);
}
