/*
 * Copyright 2026 The fuseval authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fuseval/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "fuseval/csv.hpp"
#include "fuseval/decision.hpp"

namespace fuseval {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 44.0;
constexpr double kMarginBottom = 58.0;

constexpr const char* kColorModel = "#1f77b4";
constexpr const char* kColorTreatAll = "#d62728";
constexpr const char* kColorTreatNone = "#2ca02c";
constexpr const char* kColorDiagonal = "#888888";

// Pixel coordinates rounded to 1/100 px keep the markup short while staying
// fully deterministic.
std::string px(double v) { return format_double(std::round(v * 100.0) / 100.0); }

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Axes {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double x(double v) const {
    return kMarginLeft +
           (v - xmin) / (xmax - xmin) * (kWidth - kMarginLeft - kMarginRight);
  }
  double y(double v) const {
    return kHeight - kMarginBottom -
           (v - ymin) / (ymax - ymin) * (kHeight - kMarginTop - kMarginBottom);
  }
};

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
};

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << px(kWidth / 2.0)
      << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\">"
      << xml_escape(title) << "</text>\n";
  out << "<clipPath id=\"plot\"><rect x=\"" << px(kMarginLeft) << "\" y=\""
      << px(kMarginTop) << "\" width=\""
      << px(kWidth - kMarginLeft - kMarginRight) << "\" height=\""
      << px(kHeight - kMarginTop - kMarginBottom) << "\"/></clipPath>\n";
}

void draw_frame(std::ostream& out, const Axes& axes,
                const std::vector<double>& x_ticks,
                const std::vector<double>& y_ticks, const std::string& x_label,
                const std::string& y_label) {
  out << "<rect x=\"" << px(kMarginLeft) << "\" y=\"" << px(kMarginTop)
      << "\" width=\"" << px(kWidth - kMarginLeft - kMarginRight)
      << "\" height=\"" << px(kHeight - kMarginTop - kMarginBottom)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (double t : x_ticks) {
    double x = axes.x(t);
    out << "<line x1=\"" << px(x) << "\" y1=\"" << px(kHeight - kMarginBottom)
        << "\" x2=\"" << px(x) << "\" y2=\""
        << px(kHeight - kMarginBottom + 5.0) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\""
        << px(kHeight - kMarginBottom + 20.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">"
        << format_double(t) << "</text>\n";
  }
  for (double t : y_ticks) {
    double y = axes.y(t);
    out << "<line x1=\"" << px(kMarginLeft - 5.0) << "\" y1=\"" << px(y)
        << "\" x2=\"" << px(kMarginLeft) << "\" y2=\"" << px(y)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << px(kMarginLeft - 9.0) << "\" y=\"" << px(y + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"end\">"
        << format_double(t) << "</text>\n";
  }
  out << "<text x=\"" << px((kMarginLeft + kWidth - kMarginRight) / 2.0)
      << "\" y=\"" << px(kHeight - 14.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">"
      << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << px((kMarginTop + kHeight - kMarginBottom) / 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << px((kMarginTop + kHeight - kMarginBottom) / 2.0) << ")\">"
      << xml_escape(y_label) << "</text>\n";
}

void draw_polyline(std::ostream& out, const Axes& axes,
                   const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::string& color, bool dashed) {
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.8\"";
  if (dashed) out << " stroke-dasharray=\"6 4\"";
  out << " clip-path=\"url(#plot)\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out << ' ';
    out << px(axes.x(xs[i])) << ',' << px(axes.y(ys[i]));
  }
  out << "\"/>\n";
}

void draw_legend(std::ostream& out, const std::vector<Series>& entries,
                 double x0, double y0) {
  double y = y0;
  for (const Series& entry : entries) {
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y - 4.0) << "\" x2=\""
        << px(x0 + 24.0) << "\" y2=\"" << px(y - 4.0) << "\" stroke=\""
        << entry.color << "\" stroke-width=\"1.8\"";
    if (entry.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << px(x0 + 30.0) << "\" y=\"" << px(y)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(entry.label) << "</text>\n";
    y += 18.0;
  }
}

std::vector<double> unit_ticks() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}; }

std::vector<double> ticks_in(double lo, double hi, double step) {
  std::vector<double> ticks;
  double first = std::ceil(lo / step - 1e-9) * step;
  for (double t = first; t <= hi + 1e-9; t += step) {
    // Snap to the grid to avoid accumulated drift in the labels.
    ticks.push_back(std::round(t / step) * step);
  }
  return ticks;
}

}  // namespace

void write_roc_svg(std::ostream& out, const RocResult& roc,
                   const std::optional<RocBand>& band,
                   const std::optional<BootstrapCI>& ci,
                   const std::string& title) {
  Axes axes;
  open_svg(out, title);
  draw_frame(out, axes, unit_ticks(), unit_ticks(), "False positive rate",
             "True positive rate");

  if (band && !band->fpr.empty()) {
    out << "<polygon fill=\"" << kColorModel
        << "\" fill-opacity=\"0.18\" stroke=\"none\" clip-path=\"url(#plot)\" "
           "points=\"";
    for (std::size_t i = 0; i < band->fpr.size(); ++i) {
      if (i > 0) out << ' ';
      out << px(axes.x(band->fpr[i])) << ',' << px(axes.y(band->tpr_upper[i]));
    }
    for (std::size_t i = band->fpr.size(); i-- > 0;) {
      out << ' ' << px(axes.x(band->fpr[i])) << ','
          << px(axes.y(band->tpr_lower[i]));
    }
    out << "\"/>\n";
  }

  draw_polyline(out, axes, {0.0, 1.0}, {0.0, 1.0}, kColorDiagonal, true);

  std::vector<double> fprs;
  std::vector<double> tprs;
  fprs.reserve(roc.points.size());
  tprs.reserve(roc.points.size());
  for (const RocPoint& p : roc.points) {
    fprs.push_back(p.fpr);
    tprs.push_back(p.tpr);
  }
  draw_polyline(out, axes, fprs, tprs, kColorModel, false);

  std::ostringstream note;
  note << "AUROC = " << format_double(std::round(roc.auroc * 1000.0) / 1000.0);
  if (ci) {
    note << " (" << format_double(std::round(ci->lower * 1000.0) / 1000.0)
         << "-" << format_double(std::round(ci->upper * 1000.0) / 1000.0)
         << ")";
  }
  out << "<text x=\"" << px(axes.x(0.97)) << "\" y=\"" << px(axes.y(0.06))
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">"
      << xml_escape(note.str()) << "</text>\n";

  draw_legend(out,
              {{"model", kColorModel, false}, {"chance", kColorDiagonal, true}},
              axes.x(0.62), axes.y(0.20));
  out << "</svg>\n";
}

void write_reliability_svg(std::ostream& out, const CalibrationReport& report,
                           const std::string& title) {
  Axes axes;
  open_svg(out, title);
  draw_frame(out, axes, unit_ticks(), unit_ticks(), "Mean predicted probability",
             "Observed frequency");
  draw_polyline(out, axes, {0.0, 1.0}, {0.0, 1.0}, kColorDiagonal, true);

  std::vector<double> xs;
  std::vector<double> ys;
  for (const ReliabilityBin& bin : report.bins) {
    if (bin.count == 0) continue;
    xs.push_back(bin.mean_predicted);
    ys.push_back(bin.observed_frequency);
  }
  draw_polyline(out, axes, xs, ys, kColorModel, false);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << px(axes.x(xs[i])) << "\" cy=\""
        << px(axes.y(ys[i])) << "\" r=\"3.2\" fill=\"" << kColorModel
        << "\"/>\n";
  }

  std::ostringstream note;
  note << "ECE = " << format_double(std::round(report.ece * 10000.0) / 10000.0)
       << " (" << binning_strategy_name(report.strategy) << ", n = "
       << report.n_samples << ")";
  out << "<text x=\"" << px(axes.x(0.03)) << "\" y=\"" << px(axes.y(0.95))
      << "\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(note.str()) << "</text>\n";

  draw_legend(out,
              {{"model", kColorModel, false},
               {"perfect calibration", kColorDiagonal, true}},
              axes.x(0.55), axes.y(0.12));
  out << "</svg>\n";
}

void write_dca_svg(std::ostream& out, const NetBenefitCurve& curve,
                   const std::string& title) {
  double lo = 0.0;
  double hi = curve.prevalence;
  for (double v : curve.nb_model) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Treat-all plunges steeply at high thresholds; clamp the view so the
  // interesting low-threshold region stays readable, as in the usual DCA
  // presentation.
  lo = std::max(lo, -0.10);

  Axes axes;
  axes.xmin = curve.thresholds.front();
  axes.xmax = curve.thresholds.back();
  axes.ymin = std::floor(lo / 0.05 - 1e-9) * 0.05;
  axes.ymax = std::ceil(hi / 0.05 + 1e-9) * 0.05;

  open_svg(out, title);
  draw_frame(out, axes, ticks_in(axes.xmin, axes.xmax, 0.1),
             ticks_in(axes.ymin, axes.ymax, 0.05), "Threshold probability",
             "Net benefit");

  draw_polyline(out, axes, curve.thresholds, curve.nb_treat_none,
                kColorTreatNone, true);
  draw_polyline(out, axes, curve.thresholds, curve.nb_treat_all, kColorTreatAll,
                true);
  draw_polyline(out, axes, curve.thresholds, curve.nb_model, kColorModel,
                false);

  out << "<text x=\"" << px(kMarginLeft + 6.0) << "\" y=\""
      << px(kHeight - kMarginBottom - 8.0)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">"
      << xml_escape(kNetBenefitFormula) << "</text>\n";
  draw_legend(out,
              {{"model", kColorModel, false},
               {"treat all", kColorTreatAll, true},
               {"treat none", kColorTreatNone, true}},
              kWidth - kMarginRight - 150.0, kMarginTop + 20.0);
  out << "</svg>\n";
}

}  // namespace fuseval
