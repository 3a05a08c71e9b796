#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtc/distributions.hpp"
#include "mtc/gof.hpp"
#include "mtc/ingest.hpp"
#include "mtc/spatial.hpp"

namespace mtc {

using Json = nlohmann::ordered_json;

inline Json to_json(const DistSpec& spec) {
  Json params;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          params["scale"] = d.scale;
        } else if constexpr (std::is_same_v<T, Beta>) {
          params["alpha"] = d.alpha;
          params["beta"] = d.beta;
          params["window"] = d.window;
        } else if constexpr (std::is_same_v<T, GeneralizedPareto>) {
          params["shape"] = d.shape;
          params["scale"] = d.scale;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          params["shape"] = d.shape;
          params["scale"] = d.scale;
        } else {
          params["shape"] = d.shape;
          params["location"] = d.location;
          params["scale"] = d.scale;
        }
      },
      spec);
  return Json{{"family", family_id(family_of(spec))}, {"params", std::move(params)}};
}

inline DistSpec dist_spec_from_json(const Json& j) {
  if (!j.contains("family") || !j.contains("params")) {
    throw InputError("distribution json needs 'family' and 'params'");
  }
  const Family fam = family_from_id(j.at("family").get<std::string>());
  const Json& p = j.at("params");
  auto num = [&](const char* name) -> double {
    if (!p.contains(name)) {
      throw InputError(std::string("distribution json missing parameter '") + name + "'");
    }
    return p.at(name).get<double>();
  };
  DistSpec spec;
  switch (fam) {
    case Family::Exponential: spec = Exponential{num("scale")}; break;
    case Family::Beta: spec = Beta{num("alpha"), num("beta"), num("window")}; break;
    case Family::GeneralizedPareto: spec = GeneralizedPareto{num("shape"), num("scale")}; break;
    case Family::Weibull: spec = Weibull{num("shape"), num("scale")}; break;
    case Family::Gev: spec = Gev{num("shape"), num("location"), num("scale")}; break;
  }
  validate(spec);
  return spec;
}

inline Json to_json(const FitResult& fit) {
  return Json{{"distribution", to_json(fit.spec)},
              {"log_likelihood", fit.log_likelihood},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"support_violations", fit.support_violations}};
}

inline Json to_json(const GofEntry& e) {
  return Json{{"model_name", e.model_name},
              {"ks_stat", e.ks_stat},
              {"ad_stat", e.ad_stat},
              {"chi2_stat", e.chi2_stat},
              {"chi2_dof", e.chi2_dof},
              {"chi2_pass", e.chi2_pass},
              {"rmse", e.rmse},
              {"tail_low_err", e.tail_low_err},
              {"tail_high_err", e.tail_high_err}};
}

inline Json tail_errors_json(const GofReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back(Json{{"model_name", e.model_name},
                           {"tail_low_err", e.tail_low_err},
                           {"tail_high_err", e.tail_high_err}});
  }
  return Json{{"tail_fraction", report.tail_fraction}, {"entries", std::move(entries)}};
}

inline Json to_json(const GofReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) entries.push_back(to_json(e));
  return Json{{"sample_size", report.sample_size},
              {"alpha", report.alpha},
              {"entries", std::move(entries)},
              {"tail_errors", tail_errors_json(report)}};
}

namespace detail {

inline std::string fmt_stat(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline void pad_to(std::string& s, std::size_t width) {
  while (s.size() < width) s += ' ';
}

}  // namespace detail

// Fixed-column ranking table: K-S ordering on the left, A-D ordering on the
// right, chi-squared verdict for the K-S-ranked model in the last column.
// Models that passed the chi-squared test are starred.
inline std::string to_table(const GofReport& report) {
  std::vector<std::size_t> by_ad(report.entries.size());
  for (std::size_t i = 0; i < by_ad.size(); ++i) by_ad[i] = i;
  std::stable_sort(by_ad.begin(), by_ad.end(), [&](std::size_t a, std::size_t b) {
    return report.entries[a].ad_stat < report.entries[b].ad_stat;
  });

  const std::vector<std::string> header = {"Rank", "Model", "K-S Statistic",
                                           "Model", "A-D Statistic", "C-S Pass"};
  std::vector<std::vector<std::string>> rows;
  rows.push_back(header);
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& ks_entry = report.entries[i];
    const auto& ad_entry = report.entries[by_ad[i]];
    rows.push_back({std::to_string(i + 1),
                    ks_entry.model_name + (ks_entry.chi2_pass ? " *" : ""),
                    detail::fmt_stat(ks_entry.ks_stat),
                    ad_entry.model_name + (ad_entry.chi2_pass ? " *" : ""),
                    detail::fmt_stat(ad_entry.ad_stat),
                    ks_entry.chi2_pass ? "yes" : "no"});
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      std::string cell = rows[r][c];
      detail::pad_to(cell, widths[c]);
      if (c > 0) line += "  ";
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) rule += "  ";
        rule.append(widths[c], '-');
      }
      out += rule;
      out += '\n';
    }
  }
  return out;
}

inline void write_histogram_tsv(std::ostream& out, const Histogram& h) {
  out << "bin_left\tbin_right\tcount\tdensity\n";
  char buf[96];
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%llu\t%.17g\n", h.bin_edges[i],
                  h.bin_edges[i + 1], static_cast<unsigned long long>(h.counts[i]),
                  h.density[i]);
    out << buf;
  }
}

inline void write_points_tsv(std::ostream& out, const std::vector<Point2D>& points) {
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", p.x, p.y);
    out << buf;
  }
}

}  // namespace mtc
