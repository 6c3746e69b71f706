#include "seqscan/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace seqscan {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nan("");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void to_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& write) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw CsvError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open '" + path.string() + "' for writing");
  write(out);
  out.flush();
  if (!out) throw CsvError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_summary_csv(std::ostream& out, std::span<const BatchSummary> rows) {
  out << "sweep_value,policy,episodes,mean_cost,stderr_cost,fa_rate,md_rate,mean_samples,lower_bound,"
         "cost_over_bound,rho,error\n";
  for (const auto& r : rows) {
    out << format_number(r.sweep_value) << ',' << quote(r.policy) << ',' << r.episodes << ','
        << format_number(r.mean_cost) << ',' << format_number(r.stderr_cost) << ',' << format_number(r.fa_rate)
        << ',' << format_number(r.md_rate) << ',' << format_number(mean_of(r.mean_samples)) << ','
        << format_number(r.lower_bound) << ',' << format_number(r.cost_over_bound) << ','
        << format_number(r.rho) << ',' << quote(r.error) << '\n';
  }
}

void write_risk_csv(std::ostream& out, std::span<const BatchSummary> rows) {
  out << "log10_c_e,log10_R,R,stderr_R,c_e,error_probability,policy,error\n";
  for (const auto& r : rows) {
    const double c_e = r.sweep_value;
    double risk = std::nan(""), se = std::nan("");
    if (r.risk) {
      risk = r.risk->mean;
      se = r.risk->stderr_;
    }
    const double pe = 0.5 * (r.fa_rate + r.md_rate);
    out << format_number(std::log10(c_e)) << ',' << format_number(risk > 0.0 ? std::log10(risk) : std::nan(""))
        << ',' << format_number(risk) << ',' << format_number(se) << ',' << format_number(c_e) << ','
        << format_number(pe) << ',' << quote(r.policy) << ',' << quote(r.error) << '\n';
  }
}

void write_episode_csv(std::ostream& out, std::span<const EpisodeRecord> records) {
  out << "sweep_value,policy,episode,cost,final_time,process,abnormal,declaration,stop_time,samples,false_alarm,"
         "miss_detect\n";
  for (const auto& rec : records) {
    const auto& ep = rec.result;
    for (std::size_t k = 0; k < ep.processes.size(); ++k) {
      const auto& p = ep.processes[k];
      out << format_number(rec.sweep_value) << ',' << quote(rec.policy) << ',' << rec.episode << ','
          << format_number(ep.cost) << ',' << ep.final_time << ',' << k + 1 << ',' << int{p.abnormal} << ','
          << p.declaration << ',' << p.stop_time << ',' << p.samples << ',' << int{p.false_alarm} << ','
          << int{p.miss_detect} << '\n';
    }
  }
}

void emit_csv(std::span<const BatchSummary> rows, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_summary_csv(o, rows); });
}

void emit_risk_csv(std::span<const BatchSummary> rows, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_risk_csv(o, rows); });
}

void emit_episode_csv(std::span<const EpisodeRecord> records, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_episode_csv(o, records); });
}

}  // namespace seqscan
