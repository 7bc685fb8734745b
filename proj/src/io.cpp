#include "awr/io.hpp"

#include "awr/errors.hpp"
#include "awr/stats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace awr {

namespace {

using nlohmann::json;

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view>
split_commas(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return cells;
}

std::string
format_double(double v)
{
  if (!std::isfinite(v))
    return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void
dump_value(const json& v, std::ostringstream& os, int indent, int depth)
{
  auto newline = [&](int d) {
    if (indent > 0) {
      os << '\n';
      for (int k = 0; k < d * indent; ++k)
        os << ' ';
    }
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first)
          os << ',';
        first = false;
        newline(depth + 1);
        os << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_value(it.value(), os, indent, depth + 1);
      }
      newline(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first)
          os << ',';
        first = false;
        newline(depth + 1);
        dump_value(item, os, indent, depth + 1);
      }
      newline(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float:
      os << format_double(v.get<double>());
      return;
    default:
      os << v.dump();
      return;
  }
}

json
vector_json(const Eigen::VectorXd& v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(v[i]);
  return out;
}

json
optional_number(const std::optional<double>& v)
{
  return v ? json(*v) : json(nullptr);
}

} // namespace

Dataset
read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw input_error("bad-file", "cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line))
    throw input_error("bad-csv", "'" + path.string() + "' is empty");
  std::vector<std::string> header;
  for (auto name : split_commas(line))
    header.emplace_back(name);
  int y_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      if (y_col >= 0)
        throw input_error("bad-csv", "duplicate 'y' column");
      y_col = static_cast<int>(c);
    }
  }
  if (y_col < 0)
    throw input_error("bad-csv", "missing required column 'y' in '" + path.string() + "'");
  const auto ncols = header.size();
  if (ncols < 2)
    throw input_error("bad-csv", "need at least one covariate column besides 'y'");

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cells = split_commas(line);
    if (cells.size() != ncols) {
      throw input_error("bad-csv",
                        "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(ncols));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = 0.0;
      auto cell = cells[c];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+')
        ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw input_error("bad-csv",
                          "non-numeric value '" + std::string(cell) + "' at data row " +
                            std::to_string(rows + 1) + " (line " + std::to_string(line_no) +
                            "), column '" + header[c] + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }

  Dataset data;
  const auto q = static_cast<Eigen::Index>(ncols - 1);
  data.y.resize(static_cast<Eigen::Index>(rows));
  data.X.resize(static_cast<Eigen::Index>(rows), q);
  for (std::size_t r = 0; r < rows; ++r) {
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = values[r * ncols + c];
      if (static_cast<int>(c) == y_col)
        data.y[static_cast<Eigen::Index>(r)] = v;
      else
        data.X(static_cast<Eigen::Index>(r), k++) = v;
    }
  }
  if (data.n() < q + 2) {
    throw input_error("bad-csv",
                      "need at least " + std::to_string(q + 2) + " data rows for " +
                        std::to_string(q) + " covariates, got " + std::to_string(rows));
  }
  data.validate();
  return data;
}

void
write_csv(const std::filesystem::path& path, const Dataset& data)
{
  std::ofstream out(path);
  if (!out)
    throw input_error("bad-file", "cannot write '" + path.string() + "'");
  out << "y";
  for (Eigen::Index k = 0; k < data.q(); ++k)
    out << ",x" << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (Eigen::Index k = 0; k < data.q(); ++k)
      out << ',' << format_double(data.X(i, k));
    out << '\n';
  }
}

std::string
dump_json(const json& value, int indent)
{
  std::ostringstream os;
  dump_value(value, os, indent, 0);
  return os.str();
}

json
fit_report_json(const AdaptiveFit& result, const std::string& weights_kind, const LossFunction& loss)
{
  const auto& fit = result.fit;
  const auto& w = result.weighting;
  json report = json::object();
  report["beta"] = vector_json(fit.beta);
  if (fit.covariance)
    report["standard_errors"] =
      vector_json(fit.covariance->diagonal().cwiseMax(0.0).cwiseSqrt().eval());
  else
    report["standard_errors"] = nullptr;

  const Eigen::VectorXd& values = w.weights.values;
  report["weights_summary"] = {
    { "kind", weights_kind },
    { "min", values.minCoeff() },
    { "median", median(std::span<const double>(values.data(), static_cast<std::size_t>(values.size()))) },
    { "max", values.maxCoeff() },
    { "clamp_count", w.weights.clamp_count },
  };

  json bw = { { "value", optional_number(w.bandwidth) },
              { "method", w.bandwidth_method.empty() ? json(nullptr) : json(w.bandwidth_method) },
              { "cv", nullptr } };
  if (w.cv) {
    bw["cv"] = { { "grid", w.cv->grid },
                 { "scores", w.cv->scores },
                 { "valid_fraction", w.cv->valid_fraction } };
  }
  report["bandwidth"] = bw;
  report["epsilon"] = optional_number(w.epsilon);
  report["solver"] = { { "iterations", fit.iterations },
                       { "converged", fit.converged },
                       { "gradient_norm", fit.gradient_norm } };
  report["loss"] = loss.to_string();
  report["first_step_beta"] = vector_json(result.first.beta0_hat);
  return report;
}

json
sim_config_json(const SimConfig& config)
{
  json methods = json::array();
  for (Method m : config.methods)
    methods.push_back(to_string(m));
  json bw = config.bandwidth.fixed ? json(*config.bandwidth.fixed) : json("cv");
  return { { "n", config.n },
           { "q", config.q },
           { "sigma", to_string(config.sigma) },
           { "methods", methods },
           { "replications", config.replications },
           { "seed", config.seed },
           { "bandwidth", bw },
           { "loss", config.loss.to_string() } };
}

json
sim_summary_json(const SimSummary& summary)
{
  json methods = json::array();
  for (const auto& ms : summary.methods) {
    json entry = { { "method", to_string(ms.method) }, { "failures", ms.failures } };
    if (ms.stats) {
      const auto& s = *ms.stats;
      entry["count"] = s.count;
      entry["min"] = s.min;
      entry["q1"] = s.q1;
      entry["median"] = s.median;
      entry["q3"] = s.q3;
      entry["max"] = s.max;
      entry["mean"] = s.mean;
      entry["variance"] = s.variance;
    } else {
      entry["count"] = 0;
      for (const char* key : { "min", "q1", "median", "q3", "max", "mean", "variance" })
        entry[key] = nullptr;
    }
    methods.push_back(entry);
  }
  return { { "config", sim_config_json(summary.config) }, { "methods", methods } };
}

void
write_errors_csv(std::ostream& out, const SimSummary& summary)
{
  out << "replication,method,sq_error,status\n";
  for (const auto& rep : summary.raw) {
    for (const auto& o : rep.outcomes) {
      out << rep.index << ',' << to_string(o.method) << ','
          << (o.ok() ? format_double(o.sq_error) : std::string()) << ',' << o.status << '\n';
    }
  }
}

} // namespace awr
