#include "scsr1/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "scsr1/errors.hpp"
#include "scsr1/optimality.hpp"
#include "scsr1/random.hpp"

namespace scsr1 {

std::string_view to_string(Experiment tag) {
  switch (tag) {
    case Experiment::e1: return "e1";
    case Experiment::e2: return "e2";
    case Experiment::e3: return "e3";
    case Experiment::e4: return "e4";
    case Experiment::e5: return "e5";
    case Experiment::e6: return "e6";
  }
  return "?";
}

Experiment parse_experiment(std::string_view text) {
  static constexpr Experiment all[] = {Experiment::e1, Experiment::e2,
                                       Experiment::e3, Experiment::e4,
                                       Experiment::e5, Experiment::e6};
  for (Experiment e : all) {
    if (text == to_string(e)) return e;
    std::string upper(to_string(e));
    upper[0] = 'E';
    if (text == upper) return e;
  }
  throw InvalidInput("unknown experiment '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
  if (m < 1) throw InvalidInput("experiment needs at least one pair");
  if (n < m + 2) throw InvalidInput("experiment needs n >= m + 2");
  if (r < 1 || r > m) throw InvalidInput("experiment needs 1 <= r <= m");
  if ((tag == Experiment::e3 || tag == Experiment::e4) && r == m) {
    throw InvalidInput("E3 and E4 need r < m");
  }
  if (trials < 1) throw InvalidInput("trials must be positive");
  if (!(gscale > 0.0) || !std::isfinite(gscale)) {
    throw InvalidInput("gscale must be positive and finite");
  }
}

namespace {

bool singular_class(Experiment tag) {
  return tag == Experiment::e2 || tag == Experiment::e3;
}
bool indefinite_class(Experiment tag) {
  return tag == Experiment::e4 || tag == Experiment::e5 || tag == Experiment::e6;
}
bool zero_block_class(Experiment tag) {
  return tag == Experiment::e3 || tag == Experiment::e4 || tag == Experiment::e6;
}

// ‖(Λ − shift·I)†g∥‖ over the eigenvalues outside the leading block of size
// `skip`.
double shifted_pinv_norm(const VectorXd& lambda, const VectorXd& g_par,
                         double shift, int skip) {
  double sum = 0.0;
  for (Index i = skip; i < lambda.size(); ++i) {
    const double t = g_par(i) / (lambda(i) - shift);
    sum += t * t;
  }
  return std::sqrt(sum);
}

VectorXd target_spectrum(Experiment tag, int m, int r, NormalStream& rng) {
  VectorXd lam(m);
  auto gap = [&] { return 0.5 + std::abs(5.0 * rng.normal()); };
  int start = 0;
  double base = 0.0;
  if (tag == Experiment::e1) {
    base = gap();
    lam(0) = base;
    start = 1;
  } else {
    base = singular_class(tag) ? 0.0 : -gap();
    for (int i = 0; i < r; ++i) lam(i) = base;
    start = r;
  }
  for (int i = start; i < m; ++i) {
    base += gap();
    lam(i) = base;
  }
  return lam;
}

std::optional<Problem> attempt(const ExperimentSpec& spec, int trial, int k) {
  const std::uint64_t id =
      (static_cast<std::uint64_t>(trial) << 20) | static_cast<std::uint64_t>(k);
  NormalStream rng(spec.seed, id);

  const double gamma = std::abs(10.0 * rng.normal());
  if (gamma < 1e-8) return std::nullopt;

  PairBufferOptions opts;
  opts.max_pairs = spec.m;
  PairBuffer buffer(spec.n, gamma, opts);
  for (int j = 0; j < spec.m; ++j) {
    bool accepted = false;
    for (int tries = 0; tries < 10 && !accepted; ++tries) {
      const VectorXd s = rng.normal_vector(spec.n);
      const VectorXd y = rng.normal_vector(spec.n);
      accepted = buffer.push_pair(s, y) == PushStatus::accepted;
    }
    if (!accepted) return std::nullopt;
  }

  const SpectralFactors first = factorize(buffer.build());
  if (first.rank() != spec.m) return std::nullopt;

  // Overwrite the spectrum: M = R⁻¹U diag(λ − γ) UᵀR⁻ᵀ keeps Ψ, R and U.
  const VectorXd lam = target_spectrum(spec.tag, spec.m, spec.r, rng);
  const MatrixXd a =
      first.r_factor().triangularView<Eigen::Upper>().solve(first.u());
  MatrixXd middle =
      a * (lam.array() - gamma).matrix().asDiagonal() * a.transpose();
  middle = 0.5 * (middle + middle.transpose());

  std::optional<SpectralFactors> altered;
  try {
    altered.emplace(factorize(CompactRep(buffer.history(), std::move(middle))));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const SpectralFactors& f = *altered;
  if (f.rank() != spec.m) return std::nullopt;
  if (spec.tag != Experiment::e1 && f.r_mult() != spec.r) return std::nullopt;

  VectorXd g = rng.normal_vector(spec.n) * spec.gscale;
  const int block = spec.tag == Experiment::e1 ? 0 : f.r_mult();
  if (zero_block_class(spec.tag)) {
    for (int pass = 0; pass < 2; ++pass) {
      VectorXd gp = f.pll_tmv(g);
      gp.tail(gp.size() - block).setZero();
      g -= f.pll_mv(gp);
    }
  }
  const ProjectedGradient pg = f.project_gradient(g);
  const VectorXd& gp = pg.g_par;
  if (!zero_block_class(spec.tag) && spec.tag != Experiment::e1 &&
      gp.head(block).cwiseAbs().maxCoeff() < 1e-3 * gp.norm()) {
    return std::nullopt;
  }

  const VectorXd& l = f.lambda();
  double delta = 0.0;
  switch (spec.tag) {
    case Experiment::e1:
      delta = 0.5 * shifted_pinv_norm(l, gp, 0.0, 0);
      break;
    case Experiment::e2:
    case Experiment::e3:
    case Experiment::e4:
    case Experiment::e5:
      delta = 0.5 * shifted_pinv_norm(l, gp, l(0), block);
      break;
    case Experiment::e6:
      delta = 2.0 * shifted_pinv_norm(l, gp, l(0), block);
      break;
  }
  if (delta == 0.0 && spec.tag != Experiment::e3 && spec.tag != Experiment::e4) {
    delta = spec.gscale;
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) return std::nullopt;
  if (!class_holds(spec.tag, f, pg, delta, spec.r)) return std::nullopt;

  return Problem{f, std::move(g), delta, k + 1};
}

}  // namespace

bool class_holds(Experiment tag, const SpectralFactors& f,
                 const ProjectedGradient& pg, double delta, int r) {
  if (f.rank() == 0) return false;
  const VectorXd& l = f.lambda();
  const VectorXd& gp = pg.g_par;
  const double lam1 = l(0);
  const double zero = 1e-10;
  const double gtol = kZeroGradTol * gp.norm();

  if (tag == Experiment::e1) {
    return lam1 > zero && f.gamma() > 0.0 &&
           shifted_pinv_norm(l, gp, 0.0, 0) >= delta;
  }
  if (f.r_mult() != r) return false;
  const bool block_zero = gp.head(r).cwiseAbs().maxCoeff() <= gtol;
  if (singular_class(tag)) {
    if (std::abs(lam1) > zero || !(f.gamma() > 0.0)) return false;
  } else if (indefinite_class(tag)) {
    if (lam1 >= -zero) return false;
  }
  switch (tag) {
    case Experiment::e2:
    case Experiment::e5:
      return !block_zero;
    case Experiment::e3:
    case Experiment::e4:
      return block_zero && shifted_pinv_norm(l, gp, lam1, r) > delta;
    case Experiment::e6:
      return block_zero && shifted_pinv_norm(l, gp, lam1, r) <= delta;
    case Experiment::e1:
      break;
  }
  return false;
}

Problem generate(const ExperimentSpec& spec, int trial) {
  spec.validate();
  for (int k = 0; k < kMaxGenerationAttempts; ++k) {
    if (auto p = attempt(spec, trial, k)) return std::move(*p);
  }
  throw GenerationFailure("no instance of " + std::string(to_string(spec.tag)) +
                          " after " + std::to_string(kMaxGenerationAttempts) +
                          " attempts");
}

TableRow evaluate(const CompactRep& rep, const VectorXd& g, double delta,
                  Norm norm) {
  TableRow row;
  row.n = rep.dim();
  row.norm = std::string(to_string(norm));

  const auto start = std::chrono::steady_clock::now();
  const SpectralFactors f = factorize(rep);
  const ProjectedGradient pg = f.project_gradient(g);
  const SubproblemSolution sol = solve(f, pg, g, delta, norm);
  const auto stop = std::chrono::steady_clock::now();
  row.time_seconds = std::chrono::duration<double>(stop - start).count();

  row.sigma_par = sol.sigma_par;
  row.sigma_perp = sol.sigma_perp;
  row.itns = sol.newton_iters;
  row.case_tag = std::string(to_string(sol.case_tag));
  const OptimalityReport rep_check = check(rep, f, g, delta, sol);
  row.lam1_plus_sigpar = rep_check.lam1_plus_sigpar;
  row.gamma_plus_sigperp = rep_check.gamma_plus_sigperp;
  if (norm == Norm::p2) {
    row.opt1 = rep_check.opt1;
    row.opt2 = rep_check.opt2;
    row.pass = rep_check.meets_bounds(pg.g_norm, delta);
  } else {
    row.pass = check_pinf(f, pg.g_par, delta, sol.v_par) &&
               sc_norm(f, sol.p, Norm::pinf) <= delta * (1.0 + kFeasibilityTol) &&
               sol.sigma_perp >= 0.0 &&
               rep_check.gamma_plus_sigperp >= -kCurvatureTol;
  }
  return row;
}

std::vector<TableRow> run(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TableRow> rows;
  rows.reserve(static_cast<std::size_t>(spec.trials));
  for (int t = 0; t < spec.trials; ++t) {
    TableRow row;
    try {
      const Problem prob = generate(spec, t);
      row = evaluate(prob.rep(), prob.g, prob.delta, spec.norm);
    } catch (const std::exception& e) {
      row = TableRow{};
      row.n = spec.n;
      row.norm = std::string(to_string(spec.norm));
      row.pass = false;
      row.error = e.what();
    }
    row.experiment = std::string(to_string(spec.tag));
    row.seed = spec.seed;
    row.trial = t;
    row.gscale = spec.gscale;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TableRow> scaled_gradient_sweep(const ExperimentSpec& spec,
                                            const std::vector<double>& scales) {
  std::vector<TableRow> rows;
  for (double s : scales) {
    ExperimentSpec scaled = spec;
    scaled.gscale = spec.gscale * s;
    std::vector<TableRow> part = run(scaled);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

Format parse_format(std::string_view text) {
  if (text == "pretty") return Format::pretty;
  if (text == "csv") return Format::csv;
  throw InvalidInput("unknown format '" + std::string(text) + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  }
  return x;
}

namespace {

constexpr const char* kCsvHeader[] = {
    "experiment", "norm",        "n",          "seed",
    "trial",      "gscale",      "opt1",       "opt2",
    "lam1_plus_sigpar", "gamma_plus_sigperp", "sigma_par", "sigma_perp",
    "itns",       "time_seconds", "case",      "pass",
    "error"};
constexpr std::size_t kCsvColumns = std::size(kCsvHeader);

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt_text(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InvalidInput("unterminated quoted CSV field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

std::string emit(const std::vector<TableRow>& rows, Format format) {
  std::ostringstream out;
  if (format == Format::csv) {
    for (std::size_t i = 0; i < kCsvColumns; ++i) {
      out << (i ? "," : "") << kCsvHeader[i];
    }
    out << "\r\n";
    for (const TableRow& r : rows) {
      out << csv_field(r.experiment) << ',' << csv_field(r.norm) << ',' << r.n
          << ',' << r.seed << ',' << r.trial << ',' << format_double(r.gscale)
          << ',' << opt_text(r.opt1) << ',' << opt_text(r.opt2) << ','
          << format_double(r.lam1_plus_sigpar) << ','
          << format_double(r.gamma_plus_sigperp) << ','
          << format_double(r.sigma_par) << ',' << format_double(r.sigma_perp)
          << ',' << r.itns << ',' << format_double(r.time_seconds) << ','
          << csv_field(r.case_tag) << ',' << (r.pass ? "true" : "false") << ','
          << csv_field(r.error) << "\r\n";
    }
    return out.str();
  }

  char line[512];
  std::snprintf(line, sizeof line,
                "%-4s %-5s %9s %10s %10s %12s %12s %10s %10s %5s %10s  %-18s %s\n",
                "exp", "norm", "n", "opt 1", "opt 2", "lam1+sig_par", "gam+sig_perp",
                "sig_par", "sig_perp", "itns", "time", "case", "result");
  out << line;
  for (const TableRow& r : rows) {
    if (!r.error.empty()) {
      std::snprintf(line, sizeof line, "%-4s %-5s %9lld  error: %s\n",
                    r.experiment.c_str(), r.norm.c_str(),
                    static_cast<long long>(r.n), r.error.c_str());
      out << line;
      continue;
    }
    const std::string o1 = r.opt1 ? sci(*r.opt1) : "n/a";
    const std::string o2 = r.opt2 ? sci(*r.opt2) : "n/a";
    std::snprintf(
        line, sizeof line,
        "%-4s %-5s %9lld %10s %10s %12s %12s %10s %10s %5d %10s  %-18s %s\n",
        r.experiment.c_str(), r.norm.c_str(), static_cast<long long>(r.n),
        o1.c_str(), o2.c_str(), sci(r.lam1_plus_sigpar).c_str(),
        sci(r.gamma_plus_sigperp).c_str(), sci(r.sigma_par).c_str(),
        sci(r.sigma_perp).c_str(), r.itns, sci(r.time_seconds).c_str(),
        r.case_tag.c_str(), r.pass ? "pass" : "FAIL");
    out << line;
  }
  return out.str();
}

std::vector<TableRow> parse_csv(std::string_view text) {
  const auto records = split_csv(text);
  if (records.empty()) throw InvalidInput("empty CSV");
  if (records.front().size() != kCsvColumns) throw InvalidInput("bad CSV header");
  for (std::size_t i = 0; i < kCsvColumns; ++i) {
    if (records.front()[i] != kCsvHeader[i]) throw InvalidInput("bad CSV header");
  }
  std::vector<TableRow> rows;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k];
    if (f.size() != kCsvColumns) throw InvalidInput("bad CSV record");
    TableRow r;
    r.experiment = f[0];
    r.norm = f[1];
    r.n = static_cast<Index>(std::stoll(f[2]));
    r.seed = std::stoull(f[3]);
    r.trial = std::stoi(f[4]);
    r.gscale = parse_double(f[5]);
    if (!f[6].empty()) r.opt1 = parse_double(f[6]);
    if (!f[7].empty()) r.opt2 = parse_double(f[7]);
    r.lam1_plus_sigpar = parse_double(f[8]);
    r.gamma_plus_sigperp = parse_double(f[9]);
    r.sigma_par = parse_double(f[10]);
    r.sigma_perp = parse_double(f[11]);
    r.itns = std::stoi(f[12]);
    r.time_seconds = parse_double(f[13]);
    r.case_tag = f[14];
    r.pass = f[15] == "true";
    r.error = f[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace scsr1
