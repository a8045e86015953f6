#include "scsr1/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsr1/errors.hpp"

namespace scsr1 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "scsr1-snapshot";
constexpr int kVersion = 1;

void write_line(std::ostream& out, const VectorXd& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << format_double(v(i));
  }
  out << '\n';
}

void write_columns(const fs::path& file, const MatrixXd& a) {
  std::ofstream out(file);
  if (!out) throw InvalidInput("cannot write " + file.string());
  for (Index j = 0; j < a.cols(); ++j) write_line(out, a.col(j));
}

std::vector<VectorXd> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot read " + file.string());
  std::vector<VectorXd> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell(line.data() + start,
                                  (comma == std::string::npos ? line.size() : comma) -
                                      start);
      values.push_back(parse_double(cell));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    lines.push_back(Eigen::Map<VectorXd>(values.data(),
                                         static_cast<Index>(values.size())));
  }
  return lines;
}

MatrixXd read_columns(const fs::path& file, Index n, Index m) {
  const auto lines = read_lines(file);
  if (static_cast<Index>(lines.size()) != m) {
    throw InvalidInput(file.filename().string() + ": expected " +
                       std::to_string(m) + " columns");
  }
  MatrixXd out(n, m);
  for (Index j = 0; j < m; ++j) {
    if (lines[static_cast<std::size_t>(j)].size() != n) {
      throw InvalidInput(file.filename().string() + ": column length mismatch");
    }
    out.col(j) = lines[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

CompactRep Snapshot::rep() const {
  PairHistory pairs = PairHistory::from_columns(s, y, gamma);
  if (middle) return CompactRep(std::move(pairs), *middle);
  return CompactRep(std::move(pairs));
}

Snapshot make_snapshot(const Problem& problem, const ExperimentSpec& spec) {
  Snapshot snap;
  const CompactRep& rep = problem.rep();
  snap.s = rep.pairs().s_dense();
  snap.y = rep.pairs().y_dense();
  snap.gamma = rep.gamma();
  snap.middle = rep.middle();
  snap.g = problem.g;
  snap.delta = problem.delta;
  snap.norm = spec.norm;
  snap.experiment = std::string(to_string(spec.tag));
  snap.seed = spec.seed;
  return snap;
}

void save_snapshot(const fs::path& dir, const Snapshot& snap) {
  fs::create_directories(dir);
  json header = {{"format", kFormat},
                 {"version", kVersion},
                 {"n", snap.s.rows()},
                 {"m", snap.s.cols()},
                 {"gamma", snap.gamma},
                 {"seed", snap.seed},
                 {"delta", snap.delta},
                 {"norm", std::string(to_string(snap.norm))},
                 {"experiment", snap.experiment}};
  if (snap.middle) {
    std::vector<double> flat;
    for (Index i = 0; i < snap.middle->rows(); ++i) {
      for (Index j = 0; j < snap.middle->cols(); ++j) flat.push_back((*snap.middle)(i, j));
    }
    header["middle"] = flat;
  }
  {
    std::ofstream out(dir / "header.json");
    if (!out) throw InvalidInput("cannot write header in " + dir.string());
    out << header.dump(2) << '\n';
  }
  write_columns(dir / "S.csv", snap.s);
  write_columns(dir / "Y.csv", snap.y);
  std::ofstream out(dir / "g.csv");
  write_line(out, snap.g);
}

Snapshot load_snapshot(const fs::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw InvalidInput("no header.json in " + dir.string());
  json header;
  try {
    header = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad snapshot header: ") + e.what());
  }

  Snapshot snap;
  Index n = 0;
  Index m = 0;
  try {
    if (header.at("format").get<std::string>() != kFormat ||
        header.at("version").get<int>() != kVersion) {
      throw InvalidInput("unsupported snapshot format");
    }
    n = header.at("n").get<Index>();
    m = header.at("m").get<Index>();
    snap.gamma = header.at("gamma").get<double>();
    snap.seed = header.value("seed", std::uint64_t{0});
    snap.delta = header.at("delta").get<double>();
    snap.norm = parse_norm(header.value("norm", std::string("p2")));
    snap.experiment = header.value("experiment", std::string());
    if (header.contains("middle")) {
      const auto flat = header.at("middle").get<std::vector<double>>();
      if (static_cast<Index>(flat.size()) != m * m) {
        throw InvalidInput("snapshot middle has wrong size");
      }
      MatrixXd mid(m, m);
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) mid(i, j) = flat[static_cast<std::size_t>(i * m + j)];
      }
      snap.middle = std::move(mid);
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad snapshot header: ") + e.what());
  }
  if (n <= 0 || m < 0) throw InvalidInput("bad snapshot dimensions");

  snap.s = read_columns(dir / "S.csv", n, m);
  snap.y = read_columns(dir / "Y.csv", n, m);
  const auto g_lines = read_lines(dir / "g.csv");
  if (g_lines.size() != 1 || g_lines.front().size() != n) {
    throw InvalidInput("g.csv: expected one line of n values");
  }
  snap.g = g_lines.front();
  return snap;
}

}  // namespace scsr1
