#include "rescore/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rescore/errors.hpp"

namespace rescore {

void EpochSeries::validate() const {
  if (!std::isfinite(epoch_len) || epoch_len <= 0.0) {
    throw DomainError("night " + participant_id + ": epoch_len must be positive");
  }
  if (!labels.empty() && labels.size() != activity.size()) {
    throw DomainError("night " + participant_id + ": activity and labels differ in length");
  }
  for (double x : activity) {
    if (!std::isfinite(x) || x < 0.0) {
      throw DomainError("night " + participant_id + ": activity must be finite and >= 0");
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw DomainError("night " + participant_id + ": labels must be 0 or 1");
    }
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::vector<EpochSeries> read_nights(std::istream& in, double epoch_len,
                                     const std::string& source) {
  if (!std::isfinite(epoch_len) || epoch_len <= 0.0) {
    throw DomainError("epoch_len must be positive");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const bool has_label = header.size() == 4 && header[3] == "label";
  if (header.size() < 3 || header[0] != "participant_id" || header[1] != "epoch_index" ||
      header[2] != "activity" || (header.size() == 4 && !has_label) || header.size() > 4) {
    throw DataError(source + ": expected header participant_id,epoch_index,activity[,label]");
  }

  std::vector<EpochSeries> nights;
  std::map<std::string, std::size_t, std::less<>> index_of;
  std::vector<std::string> problems;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      problems.push_back(where + ": expected " + std::to_string(header.size()) + " fields");
      continue;
    }
    long epoch = 0;
    double activity = 0.0;
    int label = 0;
    if (fields[0].empty()) {
      problems.push_back(where + ": empty participant_id");
      continue;
    }
    if (!parse_number(fields[1], epoch)) {
      problems.push_back(where + ": bad epoch_index '" + std::string(fields[1]) + "'");
      continue;
    }
    if (!parse_number(fields[2], activity) || !std::isfinite(activity) || activity < 0.0) {
      problems.push_back(where + ": bad activity '" + std::string(fields[2]) + "'");
      continue;
    }
    if (has_label && (!parse_number(fields[3], label) || (label != 0 && label != 1))) {
      problems.push_back(where + ": label must be 0 or 1, got '" + std::string(fields[3]) + "'");
      continue;
    }

    auto it = index_of.find(fields[0]);
    if (it == index_of.end()) {
      it = index_of.emplace(std::string(fields[0]), nights.size()).first;
      nights.push_back({});
      nights.back().participant_id = std::string(fields[0]);
      nights.back().epoch_len = epoch_len;
    }
    auto& night = nights[it->second];
    const long expected = static_cast<long>(night.activity.size()) + 1;
    if (epoch != expected) {
      problems.push_back(where + ": participant " + night.participant_id + " epoch gap, expected " +
                         std::to_string(expected) + " got " + std::to_string(epoch));
      continue;
    }
    night.activity.push_back(activity);
    if (has_label) night.labels.push_back(label);
  }

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << problems.size() << " invalid row(s) in " << source;
    for (std::size_t i = 0; i < problems.size() && i < 20; ++i) {
      msg << "\n  " << problems[i];
    }
    if (problems.size() > 20) msg << "\n  ...";
    throw DataError(msg.str());
  }
  return nights;
}

std::vector<EpochSeries> read_nights(const std::filesystem::path& path, double epoch_len) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return read_nights(in, epoch_len, path.string());
}

void write_nights(std::ostream& out, std::span<const EpochSeries> nights) {
  bool labeled = false;
  for (const auto& night : nights) labeled = labeled || night.has_labels();
  out << "participant_id,epoch_index,activity" << (labeled ? ",label" : "") << '\n';
  for (const auto& night : nights) {
    if (labeled && !night.has_labels()) {
      throw DomainError("write_nights: cannot mix labeled and unlabeled nights");
    }
    for (std::size_t t = 0; t < night.size(); ++t) {
      out << night.participant_id << ',' << t + 1 << ',' << format_value(night.activity[t]);
      if (labeled) out << ',' << night.labels[t];
      out << '\n';
    }
  }
}

void write_nights(const std::filesystem::path& path, std::span<const EpochSeries> nights) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  write_nights(out, nights);
}

FilterReport filter_contiguous(std::span<const EpochSeries> nights, double min_hours) {
  if (!(min_hours > 0.0)) {
    throw DomainError("min_hours must be positive");
  }
  FilterReport report;
  for (const auto& night : nights) {
    if (!night.activity.empty() && night.hours() >= min_hours) {
      report.kept.push_back(night);
    } else {
      ++report.dropped;
    }
  }
  return report;
}

}  // namespace rescore
