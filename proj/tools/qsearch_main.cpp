#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsearch/discrim.hpp"
#include "qsearch/qdb.hpp"

namespace {

using namespace qsearch;

std::vector<std::string> split(const std::string& text, char delimiter) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream ss(text);
  while (std::getline(ss, part, delimiter)) parts.push_back(part);
  return parts;
}

std::vector<std::pair<std::string, std::size_t>> parse_fields(
    const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, std::size_t>> fields;
  for (const auto& chunk : specs) {
    for (const auto& item : split(chunk, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
        throw std::runtime_error("--fields entry '" + item + "' is not name:dim");
      }
      const std::string name = item.substr(0, colon);
      std::size_t dim = 0;
      try {
        dim = std::stoull(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("--fields entry '" + item + "' has a bad dimension");
      }
      fields.emplace_back(name, dim);
    }
  }
  if (fields.empty()) throw std::runtime_error("--fields is empty");
  return fields;
}

int cmd_build(const std::string& fields_arg, const std::string& input,
              const std::string& out) {
  const auto fields = parse_fields({fields_arg});
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + input + "'");
  const auto db = qdb::read_delimited(in, fields);
  qdb::save_file(db, out);
  std::printf("wrote %s: %zu records\n", out.c_str(), db.records().size());
  return 0;
}

qdb::QueryTask resolve_task(const qdb::Database& db,
                            const std::vector<std::string>& known_args,
                            const std::vector<std::string>& unknown_args) {
  std::map<std::size_t, std::size_t> known;
  for (const auto& chunk : known_args) {
    for (const auto& item : split(chunk, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("--known entry '" + item + "' is not field=value");
      }
      const std::string field = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      const auto pos = db.field_position(field);
      if (!pos) throw std::runtime_error("unknown field '" + field + "'");
      const auto idx = db.value_index(*pos, value);
      if (!idx) {
        throw std::runtime_error("value '" + value + "' does not resolve in field '" +
                                 field + "'");
      }
      known[*pos] = *idx;
    }
  }

  std::vector<std::size_t> unknown;
  for (const auto& chunk : unknown_args) {
    for (const auto& item : split(chunk, ',')) {
      const auto pos = db.field_position(item);
      if (!pos) throw std::runtime_error("unknown field '" + item + "'");
      unknown.push_back(*pos);
    }
  }

  return unknown.empty() ? qdb::QueryTask::make(db, std::move(known))
                         : qdb::QueryTask::make(db, std::move(known), unknown);
}

int cmd_search(const std::string& db_path, const std::vector<std::string>& known_args,
               const std::vector<std::string>& unknown_args, const std::string& steps_arg,
               std::size_t trials, std::uint64_t seed) {
  const auto db = qdb::load_file(db_path);
  const auto task = resolve_task(db, known_args, unknown_args);

  std::optional<std::size_t> steps;
  if (steps_arg != "auto") {
    try {
      steps = std::stoull(steps_arg);
    } catch (const std::exception&) {
      throw std::runtime_error("--steps must be 'auto' or a nonnegative integer");
    }
  }

  std::string field_summary;
  for (const auto& f : db.fields()) {
    if (!field_summary.empty()) field_summary += ',';
    field_summary += f.name + ":" + std::to_string(f.dim);
  }
  std::printf("db: %s fields: %s records: %zu\n", db_path.c_str(),
              field_summary.c_str(), db.records().size());

  std::string task_line = "task: known";
  if (task.known.empty()) task_line += " (none)";
  for (const auto& [pos, value] : task.known) {
    task_line += " " + db.fields()[pos].name + "=" + db.value_name(pos, value);
  }
  task_line += "; unknown";
  for (const std::size_t pos : task.unknown) {
    task_line += " " + db.fields()[pos].name;
  }
  std::printf("%s\n", task_line.c_str());

  const auto plan = qdb::plan_search(db, task, steps);
  if (plan.marked_count >= 1 && plan.marked_count < plan.unknown_dim) {
    std::printf("plan: N=%zu K=%zu omega=%.15g m0=%.15g steps=%zu %s\n",
                plan.unknown_dim, plan.marked_count, plan.omega, plan.m0, plan.steps,
                steps ? "fixed" : "auto");
  } else {
    std::printf("plan: N=%zu K=%zu steps=%zu %s\n", plan.unknown_dim, plan.marked_count,
                plan.steps, steps ? "fixed" : "auto");
  }

  const auto outcomes = qdb::search_trials(db, task, steps, seed, trials);
  std::size_t verified = 0;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    std::string candidate;
    for (const std::size_t pos : task.unknown) {
      candidate += " " + db.fields()[pos].name + "=" +
                   db.value_name(pos, o.candidate.values[pos]);
    }
    std::printf("trial %zu:%s verified=%d oracle_calls=%zu\n", t, candidate.c_str(),
                o.verified ? 1 : 0, o.oracle_calls);
    if (o.verified) ++verified;
  }
  std::printf("verified: %zu/%zu frequency %.15g\n", verified, trials,
              trials == 0 ? 0.0
                          : static_cast<double>(verified) / static_cast<double>(trials));
  return 0;
}

int cmd_sweep(std::size_t n, double m_max, std::size_t samples_per_step,
              double tol, const std::string& out_path) {
  if (samples_per_step == 0) throw std::runtime_error("--samples-per-step must be >= 1");
  if (m_max < 0.0) throw std::runtime_error("--m-max must be >= 0");
  if (tol <= 0.0) throw std::runtime_error("--tol must be > 0");

  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>(m_max * static_cast<double>(samples_per_step) + 1e-9);
  grid.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(static_cast<double>(i) / static_cast<double>(samples_per_step));
  }
  const auto rows = discrim::sweep(n, grid, tol, 100.0 * tol);

  std::string text = "m,p_grover,gamma0_bound,p_minerr,cos_term,sin_term\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", r.m,
                  r.p_grover, r.gamma0_bound, r.p_minerr, r.cos_term, r.sin_term);
    text += line;
  }

  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + out_path + "'");
    std::printf("wrote %s: %zu rows\n", out_path.c_str(), rows.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grover search over a programmable record database, plus "
               "discrimination sweeps for imprecise size guesses"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "build a database file from delimited text");
  std::string fields_arg, input_path, build_out;
  build->add_option("--fields", fields_arg, "field declarations, name:dim[,name:dim...]")
      ->required();
  build->add_option("--input", input_path, "delimited text file with a header line")
      ->required();
  build->add_option("--out", build_out, "database file to write")->required();

  auto* search = app.add_subcommand("search", "run programmable Grover searches");
  std::string db_path, steps_arg = "auto";
  std::vector<std::string> known_args, unknown_args;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  search->add_option("--db", db_path, "database file")->required();
  search->add_option("--known", known_args, "fixed fields, field=value[,field=value...]");
  search->add_option("--unknown", unknown_args,
                     "searched fields (default: every field not in --known)");
  search->add_option("--steps", steps_arg, "iteration count or 'auto' (round(m0))");
  search->add_option("--trials", trials, "number of seeded trials");
  search->add_option("--seed", seed, "base seed; trial t uses seed^t");

  auto* sweep = app.add_subcommand("sweep", "emit discrimination sweep data as CSV");
  std::size_t sweep_n = 0;
  double m_max = 0.0;
  std::size_t samples_per_step = 1;
  double sweep_tol = 1e-10;
  std::string sweep_out;
  sweep->add_option("--n", sweep_n, "database size N")->required();
  sweep->add_option("--m-max", m_max, "largest step count on the grid")->required();
  sweep->add_option("--samples-per-step", samples_per_step, "grid points per unit step");
  sweep->add_option("--tol", sweep_tol,
                    "numeric cross-check tolerance at integer steps "
                    "(the dense minimum-error route uses 100x)");
  sweep->add_option("--out", sweep_out, "CSV file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(fields_arg, input_path, build_out);
    if (search->parsed()) {
      return cmd_search(db_path, known_args, unknown_args, steps_arg, trials, seed);
    }
    return cmd_sweep(sweep_n, m_max, samples_per_step, sweep_tol, sweep_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
