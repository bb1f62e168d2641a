#include "closure/dataset.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "closure/errors.hpp"
#include "closure/io.hpp"
#include "closure/parallel.hpp"
#include "closure/png_codec.hpp"

namespace closure {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<Background, 2> kBackgrounds = {Background::Light, Background::Dark};
constexpr std::array<Position, 2> kPositions = {Position::Center, Position::Offset};

using FactorKey = std::tuple<int, int, Background, Position>;

FactorKey factors_of(const StimulusRecord& r) {
  return {r.n_sides, r.theta_index, r.background, r.position};
}

std::string two_digit(int value) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", value);
  return buf;
}

ordered_json header_json(const DatasetManifest& m) {
  ordered_json h;
  h["dataset_version"] = m.dataset_version;
  h["split"] = m.split.name();
  h["removal_pct"] = m.split.removal_pct;
  h["record_count"] = m.records.size();
  h["rotation_scheme"] = to_string(m.config.rotation_scheme);
  h["canvas"] = {{"width", m.config.canvas.width},
                 {"height", m.config.canvas.height},
                 {"stroke_width_px", m.config.canvas.stroke_width_px},
                 {"antialias", m.config.canvas.antialias}};
  h["circumradius_px"] = m.config.circumradius_px;
  h["offset_px"] = m.config.offset_px;
  return h;
}

ordered_json record_json(const StimulusRecord& r) {
  ordered_json j;
  j["image_id"] = r.image_id;
  j["relative_path"] = r.relative_path;
  j["class_label"] = r.class_label;
  j["n_sides"] = r.n_sides;
  j["theta_index"] = r.theta_index;
  j["theta_deg"] = r.theta_deg;
  j["background"] = to_string(r.background);
  j["position"] = to_string(r.position);
  j["removal_pct"] = r.removal_pct;
  j["split"] = r.split.name();
  return j;
}

StimulusRecord record_from_json(const ordered_json& j) {
  StimulusRecord r;
  r.image_id = j.at("image_id").get<std::string>();
  r.relative_path = j.at("relative_path").get<std::string>();
  r.class_label = j.at("class_label").get<int>();
  r.n_sides = j.at("n_sides").get<int>();
  r.theta_index = j.at("theta_index").get<int>();
  r.theta_deg = j.at("theta_deg").get<double>();
  r.background = parse_background(j.at("background").get<std::string>());
  r.position = parse_position(j.at("position").get<std::string>());
  r.removal_pct = j.at("removal_pct").get<int>();
  r.split = Split::parse(j.at("split").get<std::string>());
  return r;
}

std::string join_limited(const std::vector<std::string>& items, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
    out += "\n  " + items[i];
  }
  if (items.size() > limit) out += "\n  ... and " + std::to_string(items.size() - limit) + " more";
  return out;
}

}  // namespace

std::string_view to_string(Position pos) { return pos == Position::Center ? "center" : "offset"; }

Position parse_position(std::string_view text) {
  if (text == "center") return Position::Center;
  if (text == "offset") return Position::Offset;
  throw std::invalid_argument("unknown position '" + std::string(text) + "'");
}

std::string Split::name() const {
  return kind == Kind::Train ? std::string("train") : "test_" + two_digit(removal_pct);
}

Split Split::parse(std::string_view name) {
  if (name == "train") return train();
  if (name.size() == 7 && name.substr(0, 5) == "test_") {
    const std::string digits(name.substr(5));
    if (digits.find_first_not_of("0123456789") == std::string::npos) {
      const int pct = std::stoi(digits);
      if (is_valid_removal(pct)) return test(pct);
    }
  }
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

void GenerationConfig::validate() const {
  canvas.validate();
  if (!(circumradius_px > 0.0)) throw std::invalid_argument("circumradius must be positive");
  if (offset_px < 0) throw std::invalid_argument("offset must be non-negative");
  for (Position pos : kPositions) {
    PolygonSpec probe;
    probe.center = position_center(pos, *this);
    probe.circumradius_px = circumradius_px;
    probe.stroke_width_px = canvas.stroke_width_px;
    if (!probe.fits_canvas(canvas.width, canvas.height)) {
      throw std::invalid_argument("radius " + std::to_string(circumradius_px) + " with stroke width " +
                                  std::to_string(canvas.stroke_width_px) + " clips the " +
                                  std::to_string(canvas.width) + "x" + std::to_string(canvas.height) +
                                  " canvas at the " + std::string(to_string(pos)) + " position");
    }
  }
}

std::string image_id_for(int n_sides, int theta_index, Background bg, Position pos, int removal_pct) {
  return "poly" + std::to_string(n_sides) + "_rot" + std::to_string(theta_index) + "_bg" +
         (bg == Background::Light ? "w" : "b") + "_pos" + (pos == Position::Center ? "c" : "o") + "_rem" +
         two_digit(removal_pct);
}

Point position_center(Position pos, const GenerationConfig& cfg) {
  const Point c{cfg.canvas.width / 2.0, cfg.canvas.height / 2.0};
  if (pos == Position::Center) return c;
  return {c.x - cfg.offset_px, c.y + cfg.offset_px};
}

std::vector<StimulusRecord> enumerate_split(Split split, const GenerationConfig& cfg) {
  if (!is_valid_removal(split.removal_pct) || (split.kind == Split::Kind::Train && split.removal_pct != 0)) {
    throw std::invalid_argument("invalid split");
  }
  std::vector<StimulusRecord> out;
  out.reserve(kSplitSize);
  for (int n = kMinSides; n <= kMaxSides; ++n) {
    const auto schedule = rotation_schedule(n, cfg.rotation_scheme);
    for (int i = 0; i < kRotationsPerShape; ++i) {
      for (Background bg : kBackgrounds) {
        for (Position pos : kPositions) {
          StimulusRecord r;
          r.image_id = image_id_for(n, i, bg, pos, split.removal_pct);
          r.relative_path = split.name() + "/" + r.image_id + ".png";
          r.class_label = n - kMinSides;
          r.n_sides = n;
          r.theta_index = i;
          r.theta_deg = schedule[i];
          r.background = bg;
          r.position = pos;
          r.removal_pct = split.removal_pct;
          r.split = split;
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

PolygonSpec spec_for(const StimulusRecord& rec, const GenerationConfig& cfg) {
  PolygonSpec spec;
  spec.n_sides = rec.n_sides;
  spec.theta_global_deg = rec.theta_deg;
  spec.background = rec.background;
  spec.center = position_center(rec.position, cfg);
  spec.circumradius_px = cfg.circumradius_px;
  spec.removal_pct = rec.removal_pct;
  spec.stroke_width_px = cfg.canvas.stroke_width_px;
  return spec;
}

StimulusImage render_record(const StimulusRecord& rec, const GenerationConfig& cfg) {
  return render(spec_for(rec, cfg), cfg.canvas);
}

std::filesystem::path manifest_path(const std::filesystem::path& root, Split split) {
  return root / (split.name() + ".jsonl");
}

std::filesystem::path manifest_csv_path(const std::filesystem::path& root, Split split) {
  return root / (split.name() + ".csv");
}

std::string manifest_to_jsonl(const DatasetManifest& manifest) {
  std::string out = header_json(manifest).dump() + "\n";
  for (const auto& r : manifest.records) out += record_json(r).dump() + "\n";
  return out;
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::string out =
      "image_id,relative_path,class_label,n_sides,theta_index,theta_deg,background,position,removal_pct,split\n";
  for (const auto& r : manifest.records) {
    out += r.image_id + "," + r.relative_path + "," + std::to_string(r.class_label) + "," +
           std::to_string(r.n_sides) + "," + std::to_string(r.theta_index) + "," +
           ordered_json(r.theta_deg).dump() + "," + std::string(to_string(r.background)) + "," +
           std::string(to_string(r.position)) + "," + std::to_string(r.removal_pct) + "," + r.split.name() +
           "\n";
  }
  return out;
}

DatasetManifest parse_manifest_jsonl(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const ordered_json j = ordered_json::parse(line);
      if (!have_header) {
        if (!j.contains("dataset_version")) throw ValidationError("first line is not a manifest header");
        m.dataset_version = j.at("dataset_version").get<std::string>();
        m.split = Split::parse(j.at("split").get<std::string>());
        const auto& canvas = j.at("canvas");
        m.config.canvas.width = canvas.at("width").get<int>();
        m.config.canvas.height = canvas.at("height").get<int>();
        m.config.canvas.stroke_width_px = canvas.at("stroke_width_px").get<double>();
        m.config.canvas.antialias = canvas.at("antialias").get<bool>();
        m.config.circumradius_px = j.at("circumradius_px").get<double>();
        m.config.offset_px = j.at("offset_px").get<int>();
        m.config.rotation_scheme = parse_rotation_scheme(j.at("rotation_scheme").get<std::string>());
        have_header = true;
      } else {
        m.records.push_back(record_from_json(j));
      }
    } catch (const ValidationError& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": parse error: " + e.what());
    }
  }
  if (!have_header) throw ValidationError("manifest is empty");
  return m;
}

void validate_manifest(const DatasetManifest& m) {
  const std::string split = m.split.name();
  std::vector<std::string> problems;

  try {
    m.config.validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("invalid generation config: ") + e.what());
  }

  if (m.records.size() != static_cast<std::size_t>(kSplitSize)) {
    problems.push_back("count violation: " + std::to_string(m.records.size()) + " records, expected " +
                       std::to_string(kSplitSize));
  }

  std::map<std::string, int> id_counts;
  std::map<FactorKey, std::vector<std::string>> factor_owners;
  for (const auto& r : m.records) {
    const std::string& id = r.image_id;
    if (++id_counts[id] == 2) problems.push_back("duplicate image_id " + id);

    if (!is_valid_side_count(r.n_sides)) {
      problems.push_back(id + ": n_sides " + std::to_string(r.n_sides) + " out of range");
      continue;
    }
    if (r.class_label != r.n_sides - kMinSides) {
      problems.push_back(id + ": label mismatch: class_label " + std::to_string(r.class_label) + " but n_sides " +
                         std::to_string(r.n_sides) + " requires " + std::to_string(r.n_sides - kMinSides));
    }
    if (r.theta_index < 0 || r.theta_index >= kRotationsPerShape) {
      problems.push_back(id + ": theta_index " + std::to_string(r.theta_index) + " out of range");
      continue;
    }
    if (!(r.split == m.split)) problems.push_back(id + ": split " + r.split.name() + " in manifest for " + split);
    if (r.removal_pct != m.split.removal_pct) {
      problems.push_back(id + ": removal_pct " + std::to_string(r.removal_pct) + " in split " + split);
    }
    const double expected_theta = rotation_schedule(r.n_sides, m.config.rotation_scheme)[r.theta_index];
    if (std::abs(r.theta_deg - expected_theta) > 1e-9) {
      problems.push_back(id + ": theta_deg does not match the " + std::string(to_string(m.config.rotation_scheme)) +
                         " schedule");
    }
    const std::string expected_id = image_id_for(r.n_sides, r.theta_index, r.background, r.position, r.removal_pct);
    if (id != expected_id) problems.push_back(id + ": image_id does not match its factors (" + expected_id + ")");
    if (r.relative_path != split + "/" + expected_id + ".png") {
      problems.push_back(id + ": unexpected relative_path " + r.relative_path);
    }
    factor_owners[factors_of(r)].push_back(id);
  }

  for (const auto& [key, owners] : factor_owners) {
    if (owners.size() > 1) {
      std::string ids;
      for (const auto& o : owners) ids += (ids.empty() ? "" : ", ") + o;
      problems.push_back("factor combination repeated by " + ids);
    }
  }
  if (factor_owners.size() != static_cast<std::size_t>(kSplitSize) && m.records.size() == kSplitSize) {
    problems.push_back("factorial design incomplete: " + std::to_string(factor_owners.size()) +
                       " distinct factor combinations");
  }

  if (!problems.empty()) {
    throw ValidationError("manifest " + split + " failed validation:" + join_limited(problems));
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  DatasetManifest m;
  try {
    m = parse_manifest_jsonl(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  validate_manifest(m);
  return m;
}

void check_alignment(const DatasetManifest& train, const std::vector<DatasetManifest>& tests) {
  std::set<FactorKey> train_keys;
  for (const auto& r : train.records) train_keys.insert(factors_of(r));

  std::vector<std::string> problems;
  std::set<int> levels;
  for (const auto& t : tests) {
    if (!(t.config == train.config)) problems.push_back(t.split.name() + ": generation config differs from train");
    if (!levels.insert(t.split.removal_pct).second) problems.push_back("split " + t.split.name() + " appears twice");
    std::map<FactorKey, int> seen;
    for (const auto& r : t.records) ++seen[factors_of(r)];
    for (const auto& key : train_keys) {
      if (seen[key] != 1) {
        const auto& [n, i, bg, pos] = key;
        problems.push_back(t.split.name() + ": " + std::to_string(seen[key]) + " counterparts for training image " +
                           image_id_for(n, i, bg, pos, 0));
      }
    }
  }
  if (levels.size() != kRemovalLevels.size()) {
    problems.push_back("expected " + std::to_string(kRemovalLevels.size()) + " test splits, found " +
                       std::to_string(levels.size()));
  }
  if (!problems.empty()) throw ValidationError("split alignment failed:" + join_limited(problems));
}

void verify_files(const std::filesystem::path& root, const DatasetManifest& manifest) {
  for (const auto& r : manifest.records) {
    const auto path = root / r.relative_path;
    if (!std::filesystem::exists(path)) throw IoError("missing image file " + path.string());
    const StimulusImage img = read_png(path);
    if (img.width != manifest.config.canvas.width || img.height != manifest.config.canvas.height) {
      throw ValidationError(path.string() + ": " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                            " does not match the manifest canvas");
    }
  }
}

DatasetManifest plan_split(Split split, const GenerationConfig& cfg) {
  cfg.validate();
  DatasetManifest m;
  m.split = split;
  m.config = cfg;
  m.records = enumerate_split(split, cfg);
  return m;
}

void write_split_images(const std::filesystem::path& root, const DatasetManifest& manifest, unsigned workers) {
  const auto dir = root / manifest.split.name();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  parallel_for(manifest.records.size(), workers, [&](std::size_t i) {
    const StimulusRecord& r = manifest.records[i];
    write_file_atomic(root / r.relative_path, encode_png(render_record(r, manifest.config)));
  });
}

void write_manifest(const std::filesystem::path& root, const DatasetManifest& manifest) {
  write_text_atomic(manifest_csv_path(root, manifest.split), manifest_to_csv(manifest));
  write_text_atomic(manifest_path(root, manifest.split), manifest_to_jsonl(manifest));
}

DatasetManifest generate_split(const std::filesystem::path& root, Split split, const GenerationConfig& cfg,
                               unsigned workers) {
  DatasetManifest m = plan_split(split, cfg);
  write_split_images(root, m, workers);
  // Manifests go last so an interrupted run never leaves one pointing at
  // missing images.
  write_manifest(root, m);
  return m;
}

DatasetManifest generate_training_set(const std::filesystem::path& root, const GenerationConfig& cfg,
                                      unsigned workers) {
  return generate_split(root, Split::train(), cfg, workers);
}

std::vector<DatasetManifest> generate_test_sets(const std::filesystem::path& root, const GenerationConfig& cfg,
                                                unsigned workers) {
  std::vector<DatasetManifest> out;
  out.reserve(kRemovalLevels.size());
  for (int pct : kRemovalLevels) out.push_back(generate_split(root, Split::test(pct), cfg, workers));
  return out;
}

LoadedDataset load_dataset(const std::filesystem::path& root) {
  LoadedDataset ds;
  const auto train_path = manifest_path(root, Split::train());
  if (!std::filesystem::exists(train_path)) throw IoError("missing split manifest " + train_path.string());
  ds.train = load_manifest(train_path);
  for (int pct : kRemovalLevels) {
    const auto path = manifest_path(root, Split::test(pct));
    if (!std::filesystem::exists(path)) throw IoError("missing split manifest " + path.string());
    ds.tests.push_back(load_manifest(path));
  }
  check_alignment(ds.train, ds.tests);
  return ds;
}

}  // namespace closure
