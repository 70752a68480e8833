#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "errors.hpp"

namespace afrelay {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double read_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(ErrorKind::kIo, "csv: column '" + what + "' holds '" + text + "', not a number");
  return v;
}

std::string join(const RealVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_double(v(i));
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& out, const std::vector<MetricSeries>& series) {
  out << kSeriesHeader << '\n';
  for (const auto& s : series)
    for (const auto& p : s.points)
      out << s.axis << ',' << format_double(p.value) << ',' << format_double(p.mse_mean) << ','
          << format_double(p.mse_stderr) << ',' << format_double(p.ber_mean) << ',' << format_double(p.ber_stderr)
          << ',' << p.trials << ',' << s.label << '\n';
}

std::vector<MetricSeries> read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, "csv: empty input");
  const std::vector<std::string> header = split(strip_cr(line), ',');
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const auto& required : split(kSeriesHeader, ','))
    if (!column.count(required)) fail(ErrorKind::kIo, "csv: missing column '" + required + "'");

  std::vector<MetricSeries> out;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) fail(ErrorKind::kIo, "csv: row has " + std::to_string(cells.size()) + " cells");
    const std::string& axis = cells[column["axis"]];
    const std::string& label = cells[column["variant"]];
    if (out.empty() || out.back().label != label || out.back().axis != axis) {
      out.emplace_back();
      out.back().axis = axis;
      out.back().label = label;
    }
    SweepPoint p;
    p.value = read_number(cells[column["value"]], "value");
    p.mse_mean = read_number(cells[column["mse_mean"]], "mse_mean");
    p.mse_stderr = read_number(cells[column["mse_stderr"]], "mse_stderr");
    p.ber_mean = read_number(cells[column["ber_mean"]], "ber_mean");
    p.ber_stderr = read_number(cells[column["ber_stderr"]], "ber_stderr");
    p.trials = static_cast<int>(read_number(cells[column["trials"]], "trials"));
    out.back().points.push_back(p);
  }
  return out;
}

void write_solution_csv(std::ostream& out, const TransceiverSolution& solution) {
  out << kSolutionHeader << '\n';
  for (int k = 0; k < solution.size(); ++k) {
    const auto& s = solution.subcarriers[k];
    out << k << ',' << format_double(s.power) << ',' << format_double(s.gamma) << ',' << format_double(s.eta) << ','
        << s.active_modes << ',' << join(s.lambda_f) << ',' << join(s.lambda_g) << '\n';
  }
}

void write_channel_csv(std::ostream& out, const MultipathChannel& channel) {
  const int rows = channel.rx();
  const int cols = channel.tx();
  out << "tap,power,rows,cols";
  for (int i = 0; i < rows * cols; ++i) out << ",re_" << i << ",im_" << i;
  out << '\n';
  for (int l = 0; l < channel.length(); ++l) {
    const double power = l < static_cast<int>(channel.tap_powers.size()) ? channel.tap_powers[l] : 0.0;
    out << l << ',' << format_double(power) << ',' << rows << ',' << cols;
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) {
        const Complex z = channel.taps[l](r, c);
        out << ',' << format_double(z.real()) << ',' << format_double(z.imag());
      }
    out << '\n';
  }
}

MultipathChannel read_channel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, "channel csv: empty input");
  const auto header = split(strip_cr(line), ',');
  if (header.size() < 4 || header[0] != "tap" || header[1] != "power" || header[2] != "rows" || header[3] != "cols")
    fail(ErrorKind::kIo, "channel csv: header must start with tap,power,rows,cols");
  MultipathChannel ch;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 4) fail(ErrorKind::kIo, "channel csv: short row");
    const int rows = static_cast<int>(read_number(cells[2], "rows"));
    const int cols = static_cast<int>(read_number(cells[3], "cols"));
    if (rows < 1 || cols < 1 || cells.size() != 4 + 2 * static_cast<std::size_t>(rows) * cols)
      fail(ErrorKind::kIo, "channel csv: row does not hold rows*cols complex entries");
    ComplexMatrix tap(rows, cols);
    std::size_t idx = 4;
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r, idx += 2)
        tap(r, c) = Complex(read_number(cells[idx], "re"), read_number(cells[idx + 1], "im"));
    if (!ch.taps.empty() && (tap.rows() != ch.taps.front().rows() || tap.cols() != ch.taps.front().cols()))
      fail(ErrorKind::kIo, "channel csv: taps disagree on dimensions");
    ch.taps.push_back(tap);
    ch.tap_powers.push_back(read_number(cells[1], "power"));
  }
  if (ch.taps.empty()) fail(ErrorKind::kIo, "channel csv: no taps");
  return ch;
}

void write_moments_csv(std::ostream& out, const ErrorMoments& moments) {
  out << kMomentsHeader << '\n';
  auto dump = [&](const char* name, int k, const ComplexMatrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        out << name << ',' << k << ',' << r << ',' << c << ',' << format_double(m(r, c).real()) << ','
            << format_double(m(r, c).imag()) << '\n';
  };
  dump("phi", -1, moments.phi);
  for (int k = 0; k < moments.subcarriers(); ++k) dump("psi", k, moments.psi[k]);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << contents;
  if (!out) fail(ErrorKind::kIo, "write to '" + path + "' failed");
}

}  // namespace afrelay
