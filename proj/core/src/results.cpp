#include "specsense/results.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "binary_io.hpp"
#include "specsense/error.hpp"

namespace specsense {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  require(!std::isnan(v), "format_real: NaN has no serialized form");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError(FormatError::Kind::Schema, 0, "not a real number: \"" + std::string(text) + "\"");
  }
  return v;
}

namespace {

std::string format_count(std::size_t v) { return std::to_string(v); }

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError(FormatError::Kind::Schema, 0, "not a count: \"" + std::string(text) + "\"");
  }
  return v;
}

const std::string& checked_name(const std::string& s) {
  require(!s.empty() && s.find_first_of(",\"\n\r") == std::string::npos,
          "result name must be non-empty without commas, quotes or newlines: \"" + s + "\"");
  return s;
}

std::string join(std::initializer_list<std::string> fields) {
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty()) line += ',';
    line += f;
  }
  line += '\n';
  return line;
}

/// Splits CSV text into rows of fields after checking the header.
std::vector<std::vector<std::string_view>> rows_of(std::string_view text, std::string_view header,
                                                   std::size_t columns) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    offset = pos;
    pos = end + 1;
    if (line_no++ == 0) {
      if (line != header) {
        throw FormatError(FormatError::Kind::Schema, 0,
                          "expected CSV header \"" + std::string(header) + "\", got \"" + std::string(line) + "\"");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (true) {
      const std::size_t comma = line.find(',', f);
      fields.push_back(line.substr(f, comma == std::string_view::npos ? std::string_view::npos : comma - f));
      if (comma == std::string_view::npos) break;
      f = comma + 1;
    }
    if (fields.size() != columns) {
      throw FormatError(FormatError::Kind::Schema, offset,
                        "CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                            " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (line_no == 0) throw FormatError(FormatError::Kind::Schema, 0, "empty CSV (missing header)");
  return rows;
}

constexpr std::string_view kRocHeader = "threshold,pf,pd";
constexpr std::string_view kSweepHeader = "snr_db,N,detector,pd,pf,trials";
constexpr std::string_view kAccHeader = "model,snr_db,accuracy,count";
constexpr std::string_view kAcfHeader = "lag,rho";
constexpr std::string_view kTrainLogHeader = "epoch,train_loss,val_accuracy";

std::string header_line(std::string_view h) { return std::string(h) + '\n'; }

std::string pair_line(double x, double y) { return format_real(x) + ' ' + format_real(y) + '\n'; }

}  // namespace

std::string to_csv(const RocCurve& t) {
  std::string out = header_line(kRocHeader);
  for (const auto& p : t) out += join({format_real(p.threshold), format_real(p.pf), format_real(p.pd)});
  return out;
}

std::string to_csv(const SweepTable& t) {
  std::string out = header_line(kSweepHeader);
  for (const auto& r : t) {
    out += join({format_real(r.snr_db), format_count(r.N), checked_name(r.detector), format_real(r.pd),
                 format_real(r.pf), format_count(r.trials)});
  }
  return out;
}

std::string to_csv(const AccuracyTable& t) {
  std::string out = header_line(kAccHeader);
  for (const auto& r : t) {
    out += join({checked_name(r.model), format_real(r.snr_db), format_real(r.accuracy), format_count(r.count)});
  }
  return out;
}

std::string to_csv(const AcfTable& t) {
  std::string out = header_line(kAcfHeader);
  for (std::size_t k = 0; k < t.rho.size(); ++k) out += join({format_count(k), format_real(t.rho[k])});
  return out;
}

std::string to_csv(const TrainLog& t) {
  std::string out = header_line(kTrainLogHeader);
  for (const auto& e : t) {
    out += join({format_count(e.epoch), format_real(e.train_loss), format_real(e.validation_accuracy)});
  }
  return out;
}

std::string to_gnuplot(const RocCurve& t) {
  std::string out = "# pf pd\n";
  for (const auto& p : t) out += pair_line(p.pf, p.pd);
  return out;
}

std::string to_gnuplot(const SweepTable& t) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const SweepRow*>> curves;
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const auto& r : t) {
    auto key = std::make_pair(r.detector, r.N);
    if (!curves.count(key)) order.push_back(key);
    curves[key].push_back(&r);
  }
  std::string out;
  for (const auto& key : order) {
    if (!out.empty()) out += "\n\n";
    out += "# detector=" + key.first + " N=" + std::to_string(key.second) + "\n# snr_db pd\n";
    for (const SweepRow* r : curves[key]) out += pair_line(r->snr_db, r->pd);
  }
  return out;
}

std::string to_gnuplot(const AccuracyTable& t) {
  std::string out;
  std::string current;
  for (const auto& r : t) {
    if (out.empty() || r.model != current) {
      if (!out.empty()) out += "\n\n";
      current = r.model;
      out += "# model=" + r.model + "\n# snr_db accuracy\n";
    }
    out += pair_line(r.snr_db, r.accuracy);
  }
  return out;
}

std::string to_gnuplot(const AcfTable& t) {
  std::string out = "# lag rho\n";
  for (std::size_t k = 0; k < t.rho.size(); ++k) out += std::to_string(k) + ' ' + format_real(t.rho[k]) + '\n';
  return out;
}

std::string to_gnuplot(const TrainLog& t) {
  std::string out = "# epoch val_accuracy\n";
  for (const auto& e : t) out += std::to_string(e.epoch) + ' ' + format_real(e.validation_accuracy) + '\n';
  return out;
}

RocCurve parse_roc_csv(std::string_view text) {
  RocCurve out;
  for (const auto& f : rows_of(text, kRocHeader, 3)) {
    out.push_back({parse_real(f[1]), parse_real(f[2]), parse_real(f[0])});
  }
  return out;
}

SweepTable parse_sweep_csv(std::string_view text) {
  SweepTable out;
  for (const auto& f : rows_of(text, kSweepHeader, 6)) {
    out.push_back({parse_real(f[0]), parse_count(f[1]), std::string(f[2]), parse_real(f[3]), parse_real(f[4]),
                   parse_count(f[5])});
  }
  return out;
}

AccuracyTable parse_accuracy_csv(std::string_view text) {
  AccuracyTable out;
  for (const auto& f : rows_of(text, kAccHeader, 4)) {
    out.push_back({std::string(f[0]), parse_real(f[1]), parse_real(f[2]), parse_count(f[3])});
  }
  return out;
}

AcfTable parse_acf_csv(std::string_view text) {
  AcfTable out;
  for (const auto& f : rows_of(text, kAcfHeader, 2)) {
    if (parse_count(f[0]) != out.rho.size()) {
      throw FormatError(FormatError::Kind::Schema, 0, "acf.csv: lags must be 0, 1, 2, ...");
    }
    out.rho.push_back(parse_real(f[1]));
  }
  return out;
}

TrainLog parse_train_log_csv(std::string_view text) {
  TrainLog out;
  for (const auto& f : rows_of(text, kTrainLogHeader, 3)) {
    out.push_back({parse_count(f[0]), parse_real(f[1]), parse_real(f[2])});
  }
  return out;
}

template <typename Table>
void write_results(const Table& table, const std::filesystem::path& path, ResultFormat format) {
  detail::write_text_file(path, format == ResultFormat::Csv ? to_csv(table) : to_gnuplot(table));
}

template void write_results(const RocCurve&, const std::filesystem::path&, ResultFormat);
template void write_results(const SweepTable&, const std::filesystem::path&, ResultFormat);
template void write_results(const AccuracyTable&, const std::filesystem::path&, ResultFormat);
template void write_results(const AcfTable&, const std::filesystem::path&, ResultFormat);
template void write_results(const TrainLog&, const std::filesystem::path&, ResultFormat);

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace specsense
