#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/experiments.hpp"

namespace specreg::experiments {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

void write_rates_csv(const std::vector<RateRecord>& records, std::ostream& os) {
  os << "n,h,lambda,mean_err,std_err,bound,wall_time\n";
  for (const auto& r : records) {
    os << r.n << ',' << num(r.h) << ',' << num(r.lambda) << ',' << num(r.mean_err) << ',' << num(r.std_err) << ','
       << num(r.bound) << ',' << num(r.wall_time) << '\n';
  }
}

std::string render_loglog_svg(const std::vector<Series>& series, const std::string& title,
                              const std::string& annotation) {
  constexpr double kW = 800.0, kH = 600.0;
  constexpr double kLeft = 90.0, kRight = 30.0, kTop = 50.0, kBottom = 70.0;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!(xmax >= xmin)) xmin = 0.0, xmax = 1.0;
  if (!(ymax >= ymin)) ymin = 0.0, ymax = 1.0;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1.0);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << fixed(px(d), 2) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(px(d), 2) << "\" y2=\""
       << kTop + ph + 6 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << fixed(px(d), 2) << "\" y=\"" << kTop + ph + 22
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" << static_cast<int>(d)
       << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << fixed(py(d), 2) << "\" x2=\"" << kLeft << "\" y2=\""
       << fixed(py(d), 2) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << kLeft - 10 << "\" y=\"" << fixed(py(d) + 4, 2)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << static_cast<int>(d)
       << "</text>\n";
  }
  os << "<text x=\"400\" y=\"" << kH - 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">n</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      os << (first ? "" : " ") << fixed(px(std::log10(s.x[i])), 2) << ',' << fixed(py(std::log10(s.y[i])), 2);
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 20.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kW - kRight - 170 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight - 145 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << kW - kRight - 140 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
  }
  if (!annotation.empty()) {
    os << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + ph - 12 << "\" font-family=\"sans-serif\" font-size=\"13\">"
       << xml_escape(annotation) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_outputs(const std::vector<RateRecord>& records, const std::optional<SlopeFit>& fit,
                  const std::filesystem::path& dir, const std::string& stem) {
  if (records.empty()) throw Error(ErrorCode::IoError, "no records to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream csv;
  write_rates_csv(records, csv);
  Series err{"mean |weak error|", {}, {}};
  Series bound{"bound", {}, {}};
  for (const auto& r : records) {
    err.x.push_back(static_cast<double>(r.n));
    err.y.push_back(r.mean_err);
    bound.x.push_back(static_cast<double>(r.n));
    bound.y.push_back(r.bound);
  }
  const std::string note = fit ? "fitted slope " + fixed(fit->slope, 3) + " +/- " + fixed(fit->stderr_, 3) : "";
  const auto svg = render_loglog_svg({err, bound}, stem, note);
  write_file(dir / (stem + ".csv"), csv.str());
  write_file(dir / (stem + ".svg"), svg);
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());
  }
  write_file(path, j.dump(2) + "\n");
}

}  // namespace specreg::experiments
