#include "nichelab/results_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nichelab {

namespace {

constexpr std::string_view kMagic = "#nichelab-results";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ResultsError(ResultsError::Kind::Io, path, "cannot open for writing");
  }
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw ResultsError(ResultsError::Kind::Io, path, "write failed");
  }
}

void write_header(std::ostream& out, std::string_view kind, std::uint64_t master_seed, const Metadata& extra,
                  const char* columns) {
  out << kMagic << '\n'
      << "#artifact_version=" << kArtifactVersion << '\n'
      << "#schema_version=" << kSchemaVersion << '\n'
      << "#kind=" << kind << '\n'
      << "#master_seed=" << master_seed << '\n';
  for (const auto& [key, value] : extra) {
    out << '#' << key << '=' << value << '\n';
  }
  out << columns << '\n';
}

// Writes the grid-point columns shared by both kinds, through master_seed.
void write_point(std::ostream& out, const RunConfig& cfg) {
  out << cfg.n << ',' << cfg.mu << ',' << to_string(cfg.mechanism.kind()) << ',';
  if (cfg.mechanism.window()) {
    out << *cfg.mechanism.window();
  }
  out << ',';
  if (cfg.mechanism.distance()) {
    out << to_string(*cfg.mechanism.distance());
  }
  out << ',' << to_string(cfg.fitness) << ',' << to_string(cfg.trace) << ',' << cfg.budget() << ','
      << cfg.master_seed;
}

struct ParsedFile {
  Metadata metadata;
  std::vector<std::vector<std::string>> rows;
};

class RowReader {
public:
  RowReader(const std::filesystem::path& path, std::size_t line, const std::vector<std::string>& fields)
      : path_{path}, line_{line}, fields_{fields} {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ResultsError(ResultsError::Kind::Schema, path_, "line " + std::to_string(line_) + ": " + what);
  }

  const std::string& text(std::size_t i) const { return fields_.at(i); }

  template <typename T>
  T integer(std::size_t i) const {
    const std::string& f = fields_.at(i);
    T value{};
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
      fail("field " + std::to_string(i + 1) + " is not an integer: '" + f + "'");
    }
    return value;
  }

  double real(std::size_t i) const {
    const std::string& f = fields_.at(i);
    double value{};
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
      fail("field " + std::to_string(i + 1) + " is not a number: '" + f + "'");
    }
    return value;
  }

  bool boolean(std::size_t i) const {
    const std::string& f = fields_.at(i);
    if (f == "1") return true;
    if (f == "0") return false;
    fail("field " + std::to_string(i + 1) + " is not 0/1: '" + f + "'");
  }

  template <typename F>
  auto parse(std::size_t i, F&& parser) const {
    try {
      return parser(fields_.at(i));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

private:
  const std::filesystem::path& path_;
  std::size_t line_;
  const std::vector<std::string>& fields_;
};

ParsedFile parse_file(const std::filesystem::path& path, std::string_view expected_kind, std::string_view columns,
                      std::vector<std::size_t>* line_numbers) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ResultsError(ResultsError::Kind::Io, path, "cannot open for reading");
  }
  auto schema_error = [&](std::size_t line, const std::string& what) {
    return ResultsError(ResultsError::Kind::Schema, path, "line " + std::to_string(line) + ": " + what);
  };

  ParsedFile parsed;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kMagic) {
    throw schema_error(1, "missing '#nichelab-results' header");
  }
  ++line_no;
  bool seen_columns = false;
  const std::size_t column_count = split(columns, ',').size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!seen_columns) {
      if (!line.empty() && line.front() == '#') {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
          throw schema_error(line_no, "malformed metadata line");
        }
        parsed.metadata.emplace_back(line.substr(1, eq - 1), line.substr(eq + 1));
        continue;
      }
      if (line != columns) {
        throw schema_error(line_no, "unexpected column header");
      }
      seen_columns = true;
      continue;
    }
    if (line.empty()) {
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != column_count) {
      throw schema_error(line_no, "expected " + std::to_string(column_count) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    parsed.rows.emplace_back(fields.begin(), fields.end());
    if (line_numbers) {
      line_numbers->push_back(line_no);
    }
  }
  if (in.bad()) {
    throw ResultsError(ResultsError::Kind::Io, path, "read failed");
  }

  std::map<std::string, std::string> meta(parsed.metadata.begin(), parsed.metadata.end());
  for (const char* key : {"artifact_version", "schema_version", "kind", "master_seed"}) {
    if (!meta.contains(key)) {
      throw ResultsError(ResultsError::Kind::Schema, path, std::string("missing metadata '") + key + "'");
    }
  }
  if (meta["schema_version"] != std::to_string(kSchemaVersion)) {
    throw ResultsError(ResultsError::Kind::Schema, path,
                       "schema version " + meta["schema_version"] + " is not supported (expected " +
                           std::to_string(kSchemaVersion) + ")");
  }
  if (meta["kind"] != expected_kind) {
    throw ResultsError(ResultsError::Kind::Schema, path,
                       "file holds '" + meta["kind"] + "' records, expected '" + std::string(expected_kind) + "'");
  }
  if (!seen_columns) {
    throw ResultsError(ResultsError::Kind::Schema, path, "missing column header");
  }
  return parsed;
}

RunConfig read_point(const RowReader& row) {
  RunConfig cfg;
  cfg.n = row.integer<std::size_t>(0);
  cfg.mu = row.integer<std::size_t>(1);
  const auto kind = row.parse(2, [](const std::string& s) { return parse_mechanism_kind(s); });
  std::optional<std::size_t> window;
  std::optional<DistanceKind> distance;
  if (!row.text(3).empty()) {
    window = row.integer<std::size_t>(3);
  }
  if (!row.text(4).empty()) {
    distance = row.parse(4, [](const std::string& s) { return parse_distance_kind(s); });
  }
  if (kind == MechanismKind::RestrictedTournament && (!window || !distance)) {
    row.fail("restricted tournament record without window size or distance");
  }
  cfg.mechanism = row.parse(2, [&](const std::string&) { return MechanismSpec::make(kind, window, distance); });
  cfg.fitness = row.parse(5, [](const std::string& s) { return parse_fitness_kind(s); });
  cfg.trace = row.parse(6, [](const std::string& s) { return parse_trace_policy(s); });
  const auto budget = row.integer<std::uint64_t>(7);
  if (cfg.n == 0 || cfg.mu == 0 || budget == 0) {
    row.fail("n, mu and budget must be positive");
  }
  if (budget != default_budget(cfg.n, cfg.mu)) {
    cfg.budget_generations = budget;
  }
  cfg.master_seed = row.integer<std::uint64_t>(8);
  return cfg;
}

} // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void persist_runs(const std::filesystem::path& path, std::span<const RunRecord> runs, std::uint64_t master_seed,
                  const Metadata& extra) {
  auto out = open_for_write(path);
  write_header(out, "runs", master_seed, extra, kRunColumns);
  for (const auto& rec : runs) {
    const auto& r = rec.result;
    write_point(out, rec.config);
    out << ',' << rec.config.run_index << ',' << to_string(r.outcome) << ',' << r.generations_used << ','
        << r.evaluations_used << ',' << r.init_evaluations << ',' << r.best_fitness_final << ','
        << format_real(r.best_normalized_fitness) << ',' << (r.found_zero_opt ? 1 : 0) << ','
        << (r.found_one_opt ? 1 : 0) << ',' << r.peak_fitness << ',' << r.config_digest << '\n';
  }
  finish_write(out, path);
}

std::vector<RunRecord> load_runs(const std::filesystem::path& path) {
  std::vector<std::size_t> lines;
  const ParsedFile parsed = parse_file(path, "runs", kRunColumns, &lines);
  std::vector<RunRecord> out;
  out.reserve(parsed.rows.size());
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    const RowReader row{path, lines[i], parsed.rows[i]};
    RunRecord rec;
    rec.config = read_point(row);
    rec.config.run_index = row.integer<std::uint64_t>(9);
    auto& r = rec.result;
    const std::string& outcome = row.text(10);
    if (outcome == "success") {
      r.outcome = Outcome::Success;
    } else if (outcome == "failure") {
      r.outcome = Outcome::Failure;
    } else {
      row.fail("unknown outcome '" + outcome + "'");
    }
    r.generations_used = row.integer<std::uint64_t>(11);
    r.evaluations_used = row.integer<std::uint64_t>(12);
    r.init_evaluations = row.integer<std::uint64_t>(13);
    r.best_fitness_final = row.integer<FitnessValue>(14);
    r.best_normalized_fitness = row.real(15);
    r.found_zero_opt = row.boolean(16);
    r.found_one_opt = row.boolean(17);
    r.peak_fitness = row.integer<FitnessValue>(18);
    r.config_digest = row.text(19);
    if (r.config_digest != rec.config.digest()) {
      row.fail("config digest does not match the configuration columns");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void persist_sweep(const std::filesystem::path& path, std::span<const SweepSummary> sweep, std::uint64_t master_seed,
                   const Metadata& extra) {
  auto out = open_for_write(path);
  write_header(out, "sweep", master_seed, extra, kSweepColumns);
  for (const auto& s : sweep) {
    write_point(out, s.point);
    out << ',' << s.runs << ',' << s.successes << ',';
    if (s.mean_generations_on_success) {
      out << format_real(*s.mean_generations_on_success);
    }
    out << ',' << s.point.digest() << '\n';
  }
  finish_write(out, path);
}

std::vector<SweepSummary> load_sweep(const std::filesystem::path& path) {
  std::vector<std::size_t> lines;
  const ParsedFile parsed = parse_file(path, "sweep", kSweepColumns, &lines);
  std::vector<SweepSummary> out;
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    const RowReader row{path, lines[i], parsed.rows[i]};
    SweepSummary s;
    s.point = read_point(row);
    s.runs = row.integer<std::size_t>(9);
    s.successes = row.integer<std::size_t>(10);
    if (s.successes > s.runs) {
      row.fail("successes exceed runs");
    }
    if (!row.text(11).empty()) {
      s.mean_generations_on_success = row.real(11);
    }
    if (row.text(12) != s.point.digest()) {
      row.fail("config digest does not match the grid point");
    }
    out.push_back(std::move(s));
  }
  return out;
}

Metadata read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ResultsError(ResultsError::Kind::Io, path, "cannot open for reading");
  }
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ResultsError(ResultsError::Kind::Schema, path, "line 1: missing '#nichelab-results' header");
  }
  Metadata meta;
  while (std::getline(in, line) && !line.empty() && line.front() == '#') {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      meta.emplace_back(line.substr(1, eq - 1), line.substr(eq + 1));
    }
  }
  return meta;
}

void write_fitness_table(const std::filesystem::path& path, std::span<const FitnessDistribution> study,
                         const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  for (const auto& c : comments) {
    out << "# " << c << '\n';
  }
  out << "n,runs,whisker_low,q1,median,q3,whisker_high,mean,outliers\n";
  for (const auto& d : study) {
    const auto& s = d.stats;
    out << d.n << ',' << s.count << ',' << format_real(s.whisker_low) << ',' << format_real(s.q1) << ','
        << format_real(s.median) << ',' << format_real(s.q3) << ',' << format_real(s.whisker_high) << ','
        << format_real(s.mean) << ',';
    for (std::size_t i = 0; i < s.outliers.size(); ++i) {
      out << (i ? ";" : "") << format_real(s.outliers[i]);
    }
    out << '\n';
  }
  finish_write(out, path);
}

void write_success_table(const std::filesystem::path& path, std::span<const SweepSummary> sweep,
                         DistanceKind distance, const std::vector<std::string>& comments) {
  std::set<std::size_t> mus;
  std::set<std::size_t> windows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> successes;
  for (const auto& s : sweep) {
    const auto& m = s.point.mechanism;
    if (m.kind() != MechanismKind::RestrictedTournament || *m.distance() != distance) {
      continue;
    }
    mus.insert(s.point.mu);
    windows.insert(*m.window());
    successes[{s.point.mu, *m.window()}] = s.successes;
  }
  auto out = open_for_write(path);
  for (const auto& c : comments) {
    out << "# " << c << '\n';
  }
  out << "mu";
  for (auto w : windows) {
    out << ",w" << w;
  }
  out << '\n';
  for (auto mu : mus) {
    out << mu;
    for (auto w : windows) {
      out << ',';
      if (auto it = successes.find({mu, w}); it != successes.end()) {
        out << it->second;
      }
    }
    out << '\n';
  }
  finish_write(out, path);
}

void write_trace(const std::filesystem::path& path, std::span<const TraceSample> trace) {
  auto out = open_for_write(path);
  out << "generation,best_zero_branch,best_one_branch,best_overall\n";
  for (const auto& s : trace) {
    out << s.generation << ',';
    if (s.best_zero_branch) {
      out << *s.best_zero_branch;
    }
    out << ',';
    if (s.best_one_branch) {
      out << *s.best_one_branch;
    }
    out << ',' << s.best_overall << '\n';
  }
  finish_write(out, path);
}

} // namespace nichelab
