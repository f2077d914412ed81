#include "arc_cli/metrics_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "arc/error.hpp"

namespace arc::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    raise(ErrorCode::InvalidArgument,
          "metrics line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line);
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    raise(ErrorCode::InvalidArgument,
          "metrics line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::string metrics_csv(const MetricsLog& log) {
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const auto& r : log.records) {
    out << r.step << ',' << log.attack << ',' << log.aggregator << ',' << log.seed << ','
        << optional_field(r.train_acc) << ',' << optional_field(r.test_acc) << ','
        << format_double(r.loss) << ',' << optional_field(r.clip_threshold) << ','
        << format_double(r.honest_mean_norm) << ',' << format_double(r.max_honest_grad_norm)
        << ',' << format_double(r.full_grad_norm) << '\n';
  }
  return out.str();
}

void write_metrics(const MetricsLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write metrics to " + path.string());
  out << metrics_csv(log);
  if (!out) raise(ErrorCode::Io, "write failed for " + path.string());
}

MetricsLog parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    raise(ErrorCode::InvalidArgument, "metrics CSV header does not match the schema");
  }
  MetricsLog log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 11) {
      raise(ErrorCode::InvalidArgument, "metrics line " + std::to_string(line_no) +
                                            ": expected 11 fields, got " +
                                            std::to_string(cells.size()));
    }
    StepRecord r;
    r.step = parse_u64(cells[0], line_no);
    log.attack = cells[1];
    log.aggregator = cells[2];
    log.seed = parse_u64(cells[3], line_no);
    r.train_acc = parse_optional(cells[4], line_no);
    r.test_acc = parse_optional(cells[5], line_no);
    r.loss = parse_double(cells[6], line_no);
    r.clip_threshold = parse_optional(cells[7], line_no);
    r.honest_mean_norm = parse_double(cells[8], line_no);
    r.max_honest_grad_norm = parse_double(cells[9], line_no);
    r.full_grad_norm = parse_double(cells[10], line_no);
    log.records.push_back(r);
  }
  return log;
}

MetricsLog read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read metrics from " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_metrics_csv(ss.str());
}

}  // namespace arc::cli
