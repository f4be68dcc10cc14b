#include "specsense_cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <type_traits>

#include "specsense/parallel.hpp"
#include "specsense/results.hpp"

namespace specsense::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view text, const std::string& expected) {
  throw InvalidArgument("expected " + expected + ", got \"" + std::string(text) + "\"");
}

std::uint64_t parse_uint(std::string_view t) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad_value(t, "a non-negative integer");
  return v;
}

double parse_double(std::string_view t) {
  double v = 0.0;
  const std::size_t skip = !t.empty() && t.front() == '+' ? 1 : 0;
  const auto r = std::from_chars(t.data() + skip, t.data() + t.size(), v);
  if (t.size() == skip || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
    bad_value(t, "a finite real number");
  }
  return v;
}

bool parse_bool(std::string_view t) {
  if (t == "true") return true;
  if (t == "false") return false;
  bad_value(t, "true or false");
}

std::string parse_string(std::string_view t) {
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) ++i;
      out += t[i];
    }
    return out;
  }
  if (t.empty() || t.find_first_of("\",[]# \t") != std::string_view::npos) bad_value(t, "a string");
  return std::string(t);
}

/// Splits "[a, b, c]" into trimmed elements, honoring quoted strings.
std::vector<std::string_view> list_items(std::string_view t) {
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') bad_value(t, "a list [a, b, ...]");
  const std::string_view body = trim(t.substr(1, t.size() - 2));
  std::vector<std::string_view> items;
  if (body.empty()) return items;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size() && body[i] == '"' && (i == 0 || body[i - 1] != '\\')) quoted = !quoted;
    if (i == body.size() || (body[i] == ',' && !quoted)) {
      const auto item = trim(body.substr(start, i - start));
      if (item.empty()) bad_value(t, "a list without empty elements");
      items.push_back(item);
      start = i + 1;
    }
  }
  return items;
}

template <typename T>
T parse_as(std::string_view t) {
  if constexpr (std::is_same_v<T, bool>) {
    return parse_bool(t);
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    return parse_uint(t);
  } else if constexpr (std::is_same_v<T, double>) {
    return parse_double(t);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return parse_string(t);
  } else if constexpr (std::is_same_v<T, std::array<double, 3>>) {
    const auto items = list_items(t);
    if (items.size() != 3) bad_value(t, "a list of three reals");
    return {parse_double(items[0]), parse_double(items[1]), parse_double(items[2])};
  } else {
    T out;
    for (auto item : list_items(t)) out.push_back(parse_as<typename T::value_type>(item));
    return out;
  }
}

std::string render_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

template <typename T>
std::string render(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    return std::to_string(v);
  } else if constexpr (std::is_same_v<T, double>) {
    return render_real(v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return quote(v);
  } else {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += render(v[i]);
    }
    return out + "]";
  }
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Field field(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>;
  return {std::move(key), [access](RunConfig& c, std::string_view v) { access(c) = parse_as<T>(v); },
          [access](const RunConfig& c) { return render<T>(access(const_cast<RunConfig&>(c))); }};
}

std::string iq_format_name(IqFormat f) { return f == IqFormat::F32 ? "f32" : "i16"; }

IqFormat iq_format_from(const std::string& s) {
  if (s == "f32") return IqFormat::F32;
  if (s == "i16") return IqFormat::I16;
  throw InvalidArgument("expected \"f32\" or \"i16\", got \"" + s + "\"");
}

#define SPECSENSE_FIELD(key, member) field(key, [](RunConfig& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      SPECSENSE_FIELD("run.seed", seed),
      SPECSENSE_FIELD("run.output_dir", output_dir),
      SPECSENSE_FIELD("run.threads", threads),

      SPECSENSE_FIELD("dataset.frame_len", dataset.frame_len),
      SPECSENSE_FIELD("dataset.seq_len", dataset.seq_len),
      SPECSENSE_FIELD("dataset.snr_grid_db", dataset.snr_grid_db),
      SPECSENSE_FIELD("dataset.instances_per_class", dataset.instances_per_class),
      SPECSENSE_FIELD("dataset.split_ratios", dataset.split_ratios),

      SPECSENSE_FIELD("channel.gain_h", channel.gain_h),
      SPECSENSE_FIELD("channel.noise_variance", channel.noise_variance),

      {"primary.kind",
       [](RunConfig& c, std::string_view v) { c.primary.kind = primary_kind_from_string(parse_string(v)); },
       [](const RunConfig& c) { return quote(to_string(c.primary.kind)); }},
      SPECSENSE_FIELD("primary.message_freq_hz", primary.fm.message_freq_hz),
      SPECSENSE_FIELD("primary.deviation_hz", primary.fm.deviation_hz),
      SPECSENSE_FIELD("primary.sample_rate_hz", primary.fm.sample_rate_hz),
      SPECSENSE_FIELD("primary.bpsk_samples_per_symbol", primary.bpsk_samples_per_symbol),

      SPECSENSE_FIELD("features.smoothing_L", features.smoothing_L),
      SPECSENSE_FIELD("features.llr_calibration_frames", features.llr_calibration_frames),
      SPECSENSE_FIELD("features.llr_reference_snr_db", features.llr_reference_snr_db),
      SPECSENSE_FIELD("features.llr_shrinkage", features.llr_shrinkage),
      SPECSENSE_FIELD("features.llr_truncation", features.llr_truncation),
      {"features.noise_mode",
       [](RunConfig& c, std::string_view v) { c.features.noise_mode = noise_mode_from_string(parse_string(v)); },
       [](const RunConfig& c) { return quote(to_string(c.features.noise_mode)); }},
      SPECSENSE_FIELD("features.noise_calibration_samples", features.noise_calibration_samples),

      SPECSENSE_FIELD("model.hidden", hidden),
      SPECSENSE_FIELD("model.input", input),

      SPECSENSE_FIELD("train.epochs", train.epochs),
      SPECSENSE_FIELD("train.batch_size", train.batch_size),
      SPECSENSE_FIELD("train.learning_rate", train.learning_rate),
      SPECSENSE_FIELD("train.dropout", train.dropout_rate),
      SPECSENSE_FIELD("train.beta1", train.beta1),
      SPECSENSE_FIELD("train.beta2", train.beta2),
      SPECSENSE_FIELD("train.adam_epsilon", train.adam_epsilon),
      SPECSENSE_FIELD("train.baselines", train_baselines),
      SPECSENSE_FIELD("train.gnb_var_smoothing", gnb_var_smoothing),
      SPECSENSE_FIELD("train.mlp_hidden", mlp_hidden),
      SPECSENSE_FIELD("train.mlp_epochs", mlp_epochs),

      SPECSENSE_FIELD("eval.snr_grid_db", eval.snr_grid_db),
      SPECSENSE_FIELD("eval.frame_lengths", eval.frame_lengths),
      SPECSENSE_FIELD("eval.trials", eval.trials),
      SPECSENSE_FIELD("eval.calibration_trials", eval.calibration_trials),
      SPECSENSE_FIELD("eval.target_pf", eval.target_pf),
      SPECSENSE_FIELD("eval.detectors", eval.detectors),
      SPECSENSE_FIELD("eval.roc_detector", eval.roc_detector),
      SPECSENSE_FIELD("eval.roc_snr_db", eval.roc_snr_db),
      SPECSENSE_FIELD("eval.roc_points", eval.roc_points),
      SPECSENSE_FIELD("eval.roc_trials", eval.roc_trials),
      SPECSENSE_FIELD("eval.lstm_threshold", eval.lstm_threshold),
      SPECSENSE_FIELD("eval.acf_max_lag", eval.acf_max_lag),

      SPECSENSE_FIELD("iq.samples", iq.samples),
      SPECSENSE_FIELD("iq.snr_db", iq.snr_db),
      {"iq.format", [](RunConfig& c, std::string_view v) { c.iq.format = iq_format_from(parse_string(v)); },
       [](const RunConfig& c) { return quote(iq_format_name(c.iq.format)); }},
      SPECSENSE_FIELD("iq.center_freq_hz", iq.center_freq_hz),
      SPECSENSE_FIELD("iq.raw_sample_rate_hz", iq.raw_sample_rate_hz),
  };
  return all;
}

#undef SPECSENSE_FIELD

const Field& find_field(const std::string& key, const std::string& where) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(where + ": unknown key \"" + key + "\"");
}

void assign(RunConfig& cfg, const std::string& key, std::string_view value, const std::string& where) {
  const Field& f = find_field(key, where);
  try {
    f.set(cfg, value);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + key + ": " + e.what());
  }
}

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

/// Length of the value starting at s[0]: a quoted string, a bracketed list, or a bare token.
std::size_t value_extent(std::string_view s) {
  bool quoted = false;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (quoted) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == '#' && depth == 0) return i;
  }
  return s.size();
}

}  // namespace

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view raw(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);

    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw ConfigError(where + ": unterminated section header");
      const auto name = trim(line.substr(1, close - 1));
      const auto rest = trim(line.substr(close + 1));
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char) ||
          (!rest.empty() && rest.front() != '#')) {
        throw ConfigError(where + ": malformed section header");
      }
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char)) {
      throw ConfigError(where + ": malformed key \"" + std::string(key) + "\"");
    }
    if (section.empty()) throw ConfigError(where + ": key \"" + std::string(key) + "\" outside a [section]");
    const auto after = trim(line.substr(eq + 1));
    const auto value = trim(after.substr(0, value_extent(after)));
    if (value.empty()) throw ConfigError(where + ": missing value for \"" + std::string(key) + "\"");
    assign(cfg, section + "." + std::string(key), value, where);
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  apply_config_text(cfg, read_text(path), path.string());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set " + assignment + ": expected section.key=value");
  const std::string key(trim(std::string_view(assignment).substr(0, eq)));
  assign(cfg, key, trim(std::string_view(assignment).substr(eq + 1)), "--set");
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += f.key.substr(dot + 1) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

DatasetConfig RunConfig::dataset_config() const {
  DatasetConfig d = dataset;
  d.master_seed = seed;
  return d;
}

TrainHyperparams RunConfig::train_hyperparams() const {
  TrainHyperparams hp = train;
  hp.seed = seed;
  return hp;
}

MlpTrainConfig RunConfig::mlp_config() const {
  MlpTrainConfig m;
  m.hidden = mlp_hidden;
  m.epochs = mlp_epochs;
  m.batch_size = train.batch_size;
  m.learning_rate = train.learning_rate;
  m.seed = seed;
  return m;
}

std::size_t RunConfig::worker_threads() const { return threads == 0 ? default_threads() : threads; }

void RunConfig::validate() const {
  require(!output_dir.empty(), "run.output_dir must not be empty");
  dataset.validate();
  channel.validate();
  primary.validate();
  features.validate();
  SmoothingConfig::for_frame(dataset.frame_len, features.smoothing_L).validate();
  require(hidden >= 1, "model.hidden must be >= 1");
  require(input == kNumFeatures, "model.input must be 4 (one input per feature statistic)");
  train.validate();
  require(gnb_var_smoothing >= 0.0, "train.gnb_var_smoothing must be >= 0");
  require(mlp_hidden >= 1, "train.mlp_hidden must be >= 1");
  require(mlp_epochs >= 1, "train.mlp_epochs must be >= 1");

  require(!eval.snr_grid_db.empty(), "eval.snr_grid_db must not be empty");
  require(!eval.frame_lengths.empty(), "eval.frame_lengths must not be empty");
  for (std::size_t N : eval.frame_lengths) {
    require(N > features.smoothing_L, "eval.frame_lengths entries must exceed features.smoothing_L");
  }
  require(eval.trials >= 100, "eval.trials must be >= 100");
  require(eval.calibration_trials == 0 || eval.calibration_trials >= 100,
          "eval.calibration_trials must be 0 or >= 100");
  require(eval.target_pf > 0.0 && eval.target_pf < 1.0, "eval.target_pf must be in (0, 1)");
  require(!eval.detectors.empty(), "eval.detectors must not be empty");
  static const std::vector<std::string> known = {"energy", "llr", "gof", "mme", "lstm", "gnb", "mlp"};
  for (const auto& d : eval.detectors) {
    require(std::find(known.begin(), known.end(), d) != known.end(),
            "eval.detectors: unknown detector \"" + d + "\"");
  }
  require(std::find(known.begin(), known.end(), eval.roc_detector) != known.end(),
          "eval.roc_detector: unknown detector \"" + eval.roc_detector + "\"");
  require(eval.roc_points >= 2, "eval.roc_points must be >= 2");
  require(eval.roc_trials >= 1, "eval.roc_trials must be >= 1");
  require(eval.lstm_threshold > 0.0 && eval.lstm_threshold < 1.0, "eval.lstm_threshold must be in (0, 1)");
  require(eval.acf_max_lag >= 1, "eval.acf_max_lag must be >= 1");

  require(iq.samples >= 1, "iq.samples must be >= 1");
  require(iq.raw_sample_rate_hz > 0.0, "iq.raw_sample_rate_hz must be > 0");
}

}  // namespace specsense::cli
