#include "kbandit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kbandit {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return std::string(buf);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\u%04x", c);
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

struct MeanBand {
  std::vector<double> mean;
  std::vector<double> half;  // 2·SE, zero when only one trajectory
};

MeanBand mean_band(const TrajectoryGroup& g) {
  std::size_t len = g.trajectories.empty() ? 0 : static_cast<std::size_t>(g.trajectories[0].size());
  for (const auto& t : g.trajectories) len = std::min(len, static_cast<std::size_t>(t.size()));
  MeanBand mb;
  mb.mean.resize(len, 0.0);
  mb.half.resize(len, 0.0);
  const double n = static_cast<double>(g.trajectories.size());
  if (n == 0 || len == 0) return mb;
  for (std::size_t i = 0; i < len; ++i) {
    double m = 0.0;
    for (const auto& t : g.trajectories) m += t[static_cast<Eigen::Index>(i)];
    m /= n;
    mb.mean[i] = m;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& t : g.trajectories) {
        const double d = t[static_cast<Eigen::Index>(i)] - m;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (n - 1.0));
      mb.half[i] = 2.0 * sd / std::sqrt(n);
    }
  }
  return mb;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  return fmt("%.6g", v);
}

std::string results_csv(const std::vector<SummaryRecord>& records) {
  std::ostringstream out;
  out << "setting,kernel,learner,T,mean_regret,two_se,mean_round_ms,n_trials\n";
  for (const auto& r : records) {
    out << r.setting << ',' << r.kernel << ',' << r.learner << ',' << r.horizon << ','
        << format_number(r.mean_regret) << ',' << format_number(r.two_se) << ','
        << format_number(r.mean_round_ms) << ',' << r.n_trials << '\n';
  }
  return out.str();
}

std::string results_json(const std::vector<SummaryRecord>& records) {
  std::ostringstream out;
  out << "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << "  {\"setting\": \"" << json_escape(r.setting) << "\", \"kernel\": \""
        << json_escape(r.kernel) << "\", \"learner\": \"" << json_escape(r.learner)
        << "\", \"T\": " << r.horizon << ", \"mean_regret\": " << format_number(r.mean_regret)
        << ", \"two_se\": " << format_number(r.two_se)
        << ", \"mean_round_ms\": " << format_number(r.mean_round_ms)
        << ", \"n_trials\": " << r.n_trials << "}";
    if (i + 1 < records.size()) out << ',';
    out << '\n';
  }
  out << "]\n";
  return out.str();
}

std::string trajectories_csv(const std::vector<TrajectoryGroup>& groups) {
  std::ostringstream out;
  out << "learner,seed,round,cumulative_regret\n";
  for (const auto& g : groups) {
    for (std::size_t s = 0; s < g.trajectories.size(); ++s) {
      const auto& traj = g.trajectories[s];
      for (Eigen::Index t = 0; t < traj.size(); ++t) {
        out << g.label << ',' << s << ',' << (t + 1) << ',' << format_number(traj[t]) << '\n';
      }
    }
  }
  return out.str();
}

std::vector<TrajectoryGroup> parse_trajectories_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectories CSV: empty input");
  {
    auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"learner", "seed", "round", "cumulative_regret"})
      throw std::runtime_error("trajectories CSV: unexpected header '" + line + "'");
  }
  std::vector<TrajectoryGroup> groups;
  std::vector<std::vector<std::vector<double>>> values;  // [group][seed] -> rounds
  std::vector<std::vector<std::string>> seed_keys;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error("trajectories CSV line " + std::to_string(line_no) +
                               ": expected 4 fields");
    std::size_t gi = 0;
    for (; gi < groups.size(); ++gi)
      if (groups[gi].label == f[0]) break;
    if (gi == groups.size()) {
      groups.push_back({f[0], {}});
      values.emplace_back();
      seed_keys.emplace_back();
    }
    std::size_t si = 0;
    for (; si < seed_keys[gi].size(); ++si)
      if (seed_keys[gi][si] == f[1]) break;
    if (si == seed_keys[gi].size()) {
      seed_keys[gi].push_back(f[1]);
      values[gi].emplace_back();
    }
    try {
      values[gi][si].push_back(std::stod(f[3]));
    } catch (const std::exception&) {
      throw std::runtime_error("trajectories CSV line " + std::to_string(line_no) +
                               ": bad number '" + f[3] + "'");
    }
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (const auto& v : values[gi]) {
      Eigen::VectorXd traj(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) traj[static_cast<Eigen::Index>(i)] = v[i];
      groups[gi].trajectories.push_back(std::move(traj));
    }
  }
  return groups;
}

std::string regret_plot_svg(const std::vector<TrajectoryGroup>& groups) {
  if (groups.empty()) throw std::invalid_argument("regret_plot_svg: need at least one group");
  std::vector<MeanBand> bands;
  bands.reserve(groups.size());
  std::size_t max_len = 0;
  double ymin = 0.0, ymax = 0.0;
  for (const auto& g : groups) {
    bands.push_back(mean_band(g));
    const auto& mb = bands.back();
    max_len = std::max(max_len, mb.mean.size());
    for (std::size_t i = 0; i < mb.mean.size(); ++i) {
      ymin = std::min(ymin, mb.mean[i] - mb.half[i]);
      ymax = std::max(ymax, mb.mean[i] + mb.half[i]);
    }
  }
  if (max_len == 0) throw std::invalid_argument("regret_plot_svg: groups hold no rounds");
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

  const double x0 = 70.0, x1 = 640.0, y0 = 460.0, y1 = 30.0;  // plot rectangle (y grows down)
  const double width = 880.0, height = 520.0;
  const auto sx = [&](double t) {
    if (max_len == 1) return 0.5 * (x0 + x1);
    return x0 + (t - 1.0) / (static_cast<double>(max_len) - 1.0) * (x1 - x0);
  };
  const auto sy = [&](double v) { return y0 + (v - ymin) / (ymax - ymin) * (y1 - y0); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Axes with 5 ticks per side.
  out << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int i = 0; i < 5; ++i) {
    const double frac = static_cast<double>(i) / 4.0;
    const double tv = 1.0 + frac * (static_cast<double>(max_len) - 1.0);
    const double xv = sx(tv);
    out << "<line x1=\"" << fmt("%.2f", xv) << "\" y1=\"" << y0 << "\" x2=\"" << fmt("%.2f", xv)
        << "\" y2=\"" << y0 + 5 << "\" stroke=\"#333333\"/>\n"
        << "<text x=\"" << fmt("%.2f", xv) << "\" y=\"" << y0 + 20
        << "\" text-anchor=\"middle\">" << static_cast<long>(std::lround(tv)) << "</text>\n";
    const double yv = ymin + frac * (ymax - ymin);
    const double ypx = sy(yv);
    out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << fmt("%.2f", ypx) << "\" x2=\"" << x0
        << "\" y2=\"" << fmt("%.2f", ypx) << "\" stroke=\"#333333\"/>\n"
        << "<text x=\"" << x0 - 9 << "\" y=\"" << fmt("%.2f", ypx + 4)
        << "\" text-anchor=\"end\">" << fmt("%.4g", yv) << "</text>\n";
  }
  out << "<text x=\"" << 0.5 * (x0 + x1) << "\" y=\"" << y0 + 40
      << "\" text-anchor=\"middle\">round</text>\n"
      << "<text x=\"18\" y=\"" << 0.5 * (y0 + y1) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << 0.5 * (y0 + y1) << ")\">cumulative regret</text>\n</g>\n";

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& mb = bands[gi];
    if (mb.mean.empty()) continue;
    const char* color = kPalette[gi % kPaletteSize];
    const bool has_band =
        groups[gi].trajectories.size() > 1 &&
        std::any_of(mb.half.begin(), mb.half.end(), [](double h) { return h > 0.0; });
    if (has_band) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < mb.mean.size(); ++i)
        out << fmt("%.2f", sx(static_cast<double>(i + 1))) << ','
            << fmt("%.2f", sy(mb.mean[i] + mb.half[i])) << ' ';
      for (std::size_t i = mb.mean.size(); i-- > 0;)
        out << fmt("%.2f", sx(static_cast<double>(i + 1))) << ','
            << fmt("%.2f", sy(mb.mean[i] - mb.half[i])) << (i == 0 ? "" : " ");
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < mb.mean.size(); ++i) {
      out << fmt("%.2f", sx(static_cast<double>(i + 1))) << ',' << fmt("%.2f", sy(mb.mean[i]));
      if (i + 1 < mb.mean.size()) out << ' ';
    }
    out << "\"/>\n";
  }

  // Legend.
  out << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double ly = 46.0 + 22.0 * static_cast<double>(gi);
    const char* color = kPalette[gi % kPaletteSize];
    out << "<line x1=\"660\" y1=\"" << ly << "\" x2=\"688\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2.5\"/>\n"
        << "<text x=\"694\" y=\"" << ly + 4 << "\" fill=\"#222222\">" << xml_escape(groups[gi].label)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory '" + p.parent_path().string() +
                                     "': " + ec.message());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TrajectoryGroup trajectory_group(const std::string& label,
                                 const std::vector<TrialResult>& trials) {
  TrajectoryGroup g;
  g.label = label;
  g.trajectories.reserve(trials.size());
  for (const auto& t : trials) g.trajectories.push_back(t.regret);
  return g;
}

}  // namespace kbandit
