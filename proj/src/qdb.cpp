#include "qsearch/qdb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace qsearch::qdb {

namespace {

std::size_t checked_product(const std::vector<FieldSpec>& fields) {
  std::size_t prod = 1;
  for (const auto& f : fields) {
    if (f.dim == 0) throw std::invalid_argument("Database: field dim must be positive");
    if (prod > std::numeric_limits<std::size_t>::max() / f.dim) {
      throw std::invalid_argument("Database: joint dimension overflows");
    }
    prod *= f.dim;
  }
  return prod;
}

void validate_fields(const std::vector<FieldSpec>& fields) {
  if (fields.empty()) throw std::invalid_argument("Database: needs at least one field");
  for (const auto& f : fields) {
    if (f.name.empty()) throw std::invalid_argument("Database: field name must be nonempty");
    if (f.values.size() > f.dim) {
      throw std::invalid_argument("Database: field '" + f.name +
                                  "' declares more values than its dimension");
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      for (std::size_t j = i + 1; j < f.values.size(); ++j) {
        if (f.values[i] == f.values[j]) {
          throw std::invalid_argument("Database: field '" + f.name +
                                      "' has duplicate value '" + f.values[i] + "'");
        }
      }
    }
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      if (fields[i].name == fields[j].name) {
        throw std::invalid_argument("Database: duplicate field name '" + fields[i].name +
                                    "'");
      }
    }
  }
}

void validate_record(const std::vector<FieldSpec>& fields, const Record& r) {
  if (r.values.size() != fields.size()) {
    throw std::invalid_argument("Database: record arity mismatch");
  }
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (r.values[j] >= fields[j].dim) {
      throw std::out_of_range("Database: record value out of range for field '" +
                              fields[j].name + "'");
    }
  }
}

// Mixed-radix index over a subset of fields, row-major in field order.
std::size_t subspace_index(const std::vector<FieldSpec>& fields,
                           const std::vector<std::size_t>& positions,
                           const std::vector<std::size_t>& digits) {
  std::size_t idx = 0;
  for (std::size_t t = 0; t < positions.size(); ++t) {
    idx = idx * fields[positions[t]].dim + digits[t];
  }
  return idx;
}

std::size_t subspace_dim(const std::vector<FieldSpec>& fields,
                         const std::vector<std::size_t>& positions) {
  std::size_t d = 1;
  for (std::size_t p : positions) {
    if (d > std::numeric_limits<std::size_t>::max() / fields[p].dim) {
      throw std::invalid_argument("Database: subspace dimension overflows");
    }
    d *= fields[p].dim;
  }
  return d;
}

void require_task(const Database& db, const QueryTask& task) {
  const std::size_t k = db.field_count();
  std::vector<bool> covered(k, false);
  for (const auto& [pos, value] : task.known) {
    if (pos >= k) throw std::out_of_range("QueryTask: known field position out of range");
    if (value >= db.fields()[pos].dim) {
      throw std::out_of_range("QueryTask: known value out of range");
    }
    covered[pos] = true;
  }
  if (task.unknown.empty()) {
    throw std::invalid_argument("QueryTask: needs at least one unknown field");
  }
  for (std::size_t pos : task.unknown) {
    if (pos >= k) throw std::out_of_range("QueryTask: unknown field position out of range");
    if (covered[pos]) {
      throw std::invalid_argument("QueryTask: field both known and unknown");
    }
    covered[pos] = true;
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("QueryTask: known and unknown must cover all fields");
  }
  if (!std::is_sorted(task.unknown.begin(), task.unknown.end()) ||
      std::adjacent_find(task.unknown.begin(), task.unknown.end()) !=
          task.unknown.end()) {
    throw std::invalid_argument("QueryTask: unknown positions must be sorted and unique");
  }
}

StateVector as_state(std::vector<cxd> amps, const char* what) {
  StateVector s = StateVector::raw(std::move(amps));
  if (!s.is_normalized()) {
    throw std::invalid_argument(std::string(what) + ": result is not a unit state");
  }
  return s;
}

// Completion of a task's unknown digits into a full record.
Record complete(const Database& db, const QueryTask& task,
                std::size_t unknown_joint_index) {
  Record r;
  r.values.assign(db.field_count(), 0);
  for (const auto& [pos, value] : task.known) r.values[pos] = value;
  // decode mixed-radix digits, least significant = last unknown field
  std::size_t rem = unknown_joint_index;
  for (std::size_t t = task.unknown.size(); t-- > 0;) {
    const std::size_t d = db.fields()[task.unknown[t]].dim;
    r.values[task.unknown[t]] = rem % d;
    rem /= d;
  }
  return r;
}

}  // namespace

Database Database::build(std::vector<FieldSpec> fields,
                         const std::vector<std::vector<std::string>>& raw_records) {
  DatabaseBuilder builder(std::move(fields));
  for (const auto& raw : raw_records) builder.add(raw);
  return builder.finish();
}

Database Database::from_indices(std::vector<FieldSpec> fields, std::vector<Record> records) {
  DatabaseBuilder builder(std::move(fields));
  for (auto& r : records) builder.add(std::move(r));
  return builder.finish();
}

std::size_t Database::joint_index(const Record& r) const {
  validate_record(fields_, r);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < fields_.size(); ++j) {
    idx += r.values[j] * strides_[j];
  }
  return idx;
}

Record Database::record_at(std::size_t joint_index) const {
  if (joint_index >= joint_dim_) {
    throw std::out_of_range("Database: joint index out of range");
  }
  Record r;
  r.values.resize(fields_.size());
  for (std::size_t j = 0; j < fields_.size(); ++j) {
    r.values[j] = joint_index / strides_[j];
    joint_index %= strides_[j];
  }
  return r;
}

bool Database::contains(const Record& r) const {
  return std::binary_search(records_.begin(), records_.end(), r,
                            [this](const Record& a, const Record& b) {
                              return joint_index(a) < joint_index(b);
                            });
}

std::optional<std::size_t> Database::field_position(std::string_view name) const {
  for (std::size_t j = 0; j < fields_.size(); ++j) {
    if (fields_[j].name == name) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> Database::value_index(std::size_t field,
                                                 std::string_view value) const {
  const auto& vals = fields_.at(field).values;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == value) return i;
  }
  return std::nullopt;
}

std::string Database::value_name(std::size_t field, std::size_t index) const {
  const auto& f = fields_.at(field);
  if (index < f.values.size()) return f.values[index];
  return "#" + std::to_string(index);
}

DatabaseBuilder::DatabaseBuilder(std::vector<FieldSpec> fields) {
  validate_fields(fields);
  db_.fields_ = std::move(fields);
  db_.joint_dim_ = checked_product(db_.fields_);
  db_.strides_.assign(db_.fields_.size(), 1);
  for (std::size_t j = db_.fields_.size() - 1; j-- > 0;) {
    db_.strides_[j] = db_.strides_[j + 1] * db_.fields_[j + 1].dim;
  }
}

void DatabaseBuilder::add(const std::vector<std::string>& raw_record) {
  if (raw_record.size() != db_.fields_.size()) {
    throw std::invalid_argument("record has " + std::to_string(raw_record.size()) +
                                " values, expected " +
                                std::to_string(db_.fields_.size()));
  }
  Record r;
  r.values.reserve(raw_record.size());
  for (std::size_t j = 0; j < raw_record.size(); ++j) {
    auto& f = db_.fields_[j];
    const auto it = std::find(f.values.begin(), f.values.end(), raw_record[j]);
    if (it != f.values.end()) {
      r.values.push_back(static_cast<std::size_t>(it - f.values.begin()));
    } else {
      if (f.values.size() >= f.dim) {
        throw std::invalid_argument("field '" + f.name + "' cannot hold value '" +
                                    raw_record[j] + "': already has " +
                                    std::to_string(f.dim) + " distinct values");
      }
      f.values.push_back(raw_record[j]);
      r.values.push_back(f.values.size() - 1);
    }
  }
  add(std::move(r));
}

void DatabaseBuilder::add(Record record) {
  validate_record(db_.fields_, record);
  const std::size_t idx = db_.joint_index(record);
  auto it = std::lower_bound(db_.records_.begin(), db_.records_.end(), record,
                             [this](const Record& a, const Record& b) {
                               return db_.joint_index(a) < db_.joint_index(b);
                             });
  if (it != db_.records_.end() && db_.joint_index(*it) == idx) {
    throw std::invalid_argument("duplicate record");
  }
  db_.records_.insert(it, std::move(record));
}

Database DatabaseBuilder::finish() {
  if (finished_) throw std::logic_error("DatabaseBuilder: already finished");
  if (db_.records_.empty()) {
    throw std::invalid_argument("Database: needs at least one record");
  }
  finished_ = true;
  return std::move(db_);
}

QueryTask QueryTask::make(const Database& db, std::map<std::size_t, std::size_t> known,
                          std::vector<std::size_t> unknown) {
  QueryTask t{std::move(known), std::move(unknown)};
  std::sort(t.unknown.begin(), t.unknown.end());
  require_task(db, t);
  return t;
}

QueryTask QueryTask::make(const Database& db, std::map<std::size_t, std::size_t> known) {
  std::vector<std::size_t> unknown;
  for (std::size_t j = 0; j < db.field_count(); ++j) {
    if (!known.contains(j)) unknown.push_back(j);
  }
  return make(db, std::move(known), std::move(unknown));
}

grover::MarkedSet marked_set(const Database& db, const QueryTask& task) {
  require_task(db, task);
  std::vector<std::size_t> hits;
  std::vector<std::size_t> digits(task.unknown.size());
  for (const auto& r : db.records()) {
    bool match = true;
    for (const auto& [pos, value] : task.known) {
      if (r.values[pos] != value) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    for (std::size_t t = 0; t < task.unknown.size(); ++t) {
      digits[t] = r.values[task.unknown[t]];
    }
    hits.push_back(subspace_index(db.fields(), task.unknown, digits));
  }
  return {subspace_dim(db.fields(), task.unknown), std::move(hits)};
}

StateVector joint_oracle_apply(const Database& db, const StateVector& s) {
  if (s.dim() != db.joint_dim()) {
    throw std::invalid_argument("joint_oracle_apply: dimension mismatch");
  }
  std::vector<cxd> amps = s.amps();
  for (const auto& r : db.records()) {
    const std::size_t i = db.joint_index(r);
    amps[i] = -amps[i];
  }
  return as_state(std::move(amps), "joint_oracle_apply");
}

double symmetry_deviation(const Database& db) {
  if (db.field_count() != 2) {
    throw std::invalid_argument("symmetry_deviation: identity is stated for two fields");
  }
  const std::size_t n = db.joint_dim();
  if (n > 4096) {
    throw std::invalid_argument("symmetry_deviation: dense check limited to 4096");
  }
  const std::size_t d0 = db.fields()[0].dim;
  const std::size_t d1 = db.fields()[1].dim;
  const auto ni = static_cast<Eigen::Index>(n);

  // All three operators are real reflections about subsets of the product basis.
  Eigen::MatrixXd left = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd right = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Identity(ni, ni);

  // sum_n |n><n| (x) R_{K_n} over the full first register
  for (std::size_t v0 = 0; v0 < d0; ++v0) {
    Eigen::MatrixXd block =
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d1),
                                  static_cast<Eigen::Index>(d1));
    for (const auto& r : db.records()) {
      if (r.values[0] == v0) {
        const auto a = static_cast<Eigen::Index>(r.values[1]);
        block(a, a) -= 2.0;
      }
    }
    const auto base = static_cast<Eigen::Index>(v0 * d1);
    left.block(base, base, static_cast<Eigen::Index>(d1),
               static_cast<Eigen::Index>(d1)) = block;
  }

  // sum_A R_{K_A} (x) |A><A| over the full second register
  for (std::size_t v1 = 0; v1 < d1; ++v1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d0));
    for (const auto& r : db.records()) {
      if (r.values[1] == v1) diag(static_cast<Eigen::Index>(r.values[0])) -= 2.0;
    }
    for (std::size_t v0 = 0; v0 < d0; ++v0) {
      const auto i = static_cast<Eigen::Index>(v0 * d1 + v1);
      right(i, i) = diag(static_cast<Eigen::Index>(v0));
    }
  }

  for (const auto& r : db.records()) {
    const auto i = static_cast<Eigen::Index>(db.joint_index(r));
    joint(i, i) -= 2.0;
  }

  const double d_lr = (left - right).cwiseAbs().maxCoeff();
  const double d_lj = (left - joint).cwiseAbs().maxCoeff();
  const double d_rj = (right - joint).cwiseAbs().maxCoeff();
  return std::max({d_lr, d_lj, d_rj});
}

StateVector prepare_query(const Database& db, const QueryTask& task) {
  require_task(db, task);
  const std::size_t u = subspace_dim(db.fields(), task.unknown);
  const double amp = 1.0 / std::sqrt(static_cast<double>(u));
  std::vector<cxd> amps(db.joint_dim(), cxd{0.0, 0.0});
  for (std::size_t iu = 0; iu < u; ++iu) {
    amps[db.joint_index(complete(db, task, iu))] = cxd{amp, 0.0};
  }
  return as_state(std::move(amps), "prepare_query");
}

StateVector pqq_apply(const Database& db, const QueryTask& task, const StateVector& s) {
  require_task(db, task);
  if (s.dim() != db.joint_dim()) {
    throw std::invalid_argument("pqq_apply: dimension mismatch");
  }
  std::vector<cxd> amps = s.amps();
  for (const auto& r : db.records()) {
    const std::size_t i = db.joint_index(r);
    amps[i] = -amps[i];
  }

  // Inversion about average over the unknown subspace of every known fiber.
  std::vector<std::size_t> known_positions;
  known_positions.reserve(task.known.size());
  for (const auto& [pos, value] : task.known) known_positions.push_back(pos);
  std::sort(known_positions.begin(), known_positions.end());

  const std::size_t fibers = subspace_dim(db.fields(), known_positions);
  const std::size_t u = db.joint_dim() / fibers;

  std::vector<cxd> fiber_sum(fibers, cxd{0.0, 0.0});
  std::vector<std::size_t> digits(known_positions.size());
  const auto fiber_of = [&](std::size_t joint) {
    for (std::size_t t = 0; t < known_positions.size(); ++t) {
      const std::size_t pos = known_positions[t];
      // digit of `joint` at field `pos`
      std::size_t digit = joint;
      for (std::size_t l = pos + 1; l < db.field_count(); ++l) {
        digit /= db.fields()[l].dim;
      }
      digits[t] = digit % db.fields()[pos].dim;
    }
    return subspace_index(db.fields(), known_positions, digits);
  };

  for (std::size_t i = 0; i < amps.size(); ++i) fiber_sum[fiber_of(i)] += amps[i];
  const double inv_u = 1.0 / static_cast<double>(u);
  for (auto& fs : fiber_sum) fs *= 2.0 * inv_u;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = fiber_sum[fiber_of(i)] - amps[i];
  }
  return as_state(std::move(amps), "pqq_apply");
}

SearchPlan plan_search(const Database& db, const QueryTask& task,
                       std::optional<std::size_t> steps) {
  require_task(db, task);
  SearchPlan plan;
  plan.unknown_dim = subspace_dim(db.fields(), task.unknown);
  plan.marked_count = marked_set(db, task).count();
  if (plan.marked_count >= 1 && plan.marked_count < plan.unknown_dim) {
    const auto p = grover::params(plan.unknown_dim, plan.marked_count);
    plan.omega = p.omega;
    plan.m0 = p.m0;
    plan.steps = steps.value_or(grover::optimal_steps(p));
  } else {
    // empty oracle (or everything marked): the uniform state is a fixed point
    plan.omega = 0.0;
    plan.m0 = 0.0;
    plan.steps = steps.value_or(0);
  }
  return plan;
}

namespace {

SearchOutcome finish_outcome(const Database& db, const QueryTask& task,
                             const SearchPlan& plan, const StateVector& final_state,
                             std::mt19937_64& rng) {
  const std::size_t joint = sample(final_state, rng);
  SearchOutcome out;
  out.candidate = db.record_at(joint);
  out.verified = db.contains(out.candidate);  // one classical oracle call
  for (const auto& [pos, value] : task.known) {
    if (out.candidate.values[pos] != value) out.verified = false;
  }
  out.steps_used = plan.steps;
  out.oracle_calls = plan.steps + 1;
  return out;
}

}  // namespace

SearchOutcome search(const Database& db, const QueryTask& task,
                     std::optional<std::size_t> steps, std::mt19937_64& rng) {
  const SearchPlan plan = plan_search(db, task, steps);
  StateVector state = prepare_query(db, task);
  for (std::size_t i = 0; i < plan.steps; ++i) {
    state = pqq_apply(db, task, state);
  }
  return finish_outcome(db, task, plan, state, rng);
}

std::vector<SearchOutcome> search_trials(const Database& db, const QueryTask& task,
                                         std::optional<std::size_t> steps,
                                         std::uint64_t seed, std::size_t trials) {
  const SearchPlan plan = plan_search(db, task, steps);
  StateVector state = prepare_query(db, task);
  for (std::size_t i = 0; i < plan.steps; ++i) {
    state = pqq_apply(db, task, state);
  }
  std::vector<SearchOutcome> outcomes;
  outcomes.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(t));
    outcomes.push_back(finish_outcome(db, task, plan, state, rng));
  }
  return outcomes;
}

ClassicalOutcome classical_search(const Database& db, const QueryTask& task,
                                  std::mt19937_64& rng) {
  require_task(db, task);
  const std::size_t n = subspace_dim(db.fields(), task.unknown);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  ClassicalOutcome out;
  for (std::size_t i = 0; i < n; ++i) {
    // lazily extend a Fisher-Yates shuffle just far enough
    std::swap(order[i], order[i + random_index(rng, n - i)]);
    ++out.calls;
    Record candidate = complete(db, task, order[i]);
    if (db.contains(candidate)) {
      out.match = std::move(candidate);
      return out;
    }
  }
  return out;  // no match: all N candidates queried
}

void save(const Database& db, std::ostream& out) {
  nlohmann::json j;
  j["fields"] = nlohmann::json::array();
  for (const auto& f : db.fields()) {
    j["fields"].push_back({{"name", f.name}, {"dim", f.dim}, {"values", f.values}});
  }
  j["records"] = nlohmann::json::array();
  for (const auto& r : db.records()) {
    j["records"].push_back(r.values);
  }
  out << j.dump(2) << '\n';
}

Database load(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<FieldSpec> fields;
  for (const auto& jf : j.at("fields")) {
    FieldSpec f;
    f.name = jf.at("name").get<std::string>();
    f.dim = jf.at("dim").get<std::size_t>();
    if (jf.contains("values")) f.values = jf.at("values").get<std::vector<std::string>>();
    fields.push_back(std::move(f));
  }
  std::vector<Record> records;
  for (const auto& jr : j.at("records")) {
    records.push_back({jr.get<std::vector<std::size_t>>()});
  }
  return Database::from_indices(std::move(fields), std::move(records));
}

void save_file(const Database& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save(db, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Database load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load(in);
}

Database read_delimited(std::istream& in,
                        const std::vector<std::pair<std::string, std::size_t>>& field_dims,
                        char delimiter) {
  const auto split = [delimiter](const std::string& line) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream ss(line);
    while (std::getline(ss, part, delimiter)) parts.push_back(part);
    if (!line.empty() && line.back() == delimiter) parts.emplace_back();
    return parts;
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("line 1: missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  if (header.size() != field_dims.size()) {
    throw std::runtime_error("line 1: header names " + std::to_string(header.size()) +
                             " fields, expected " + std::to_string(field_dims.size()));
  }

  // header order may differ from the declared field order
  std::vector<FieldSpec> fields;
  std::vector<std::size_t> column_of;  // field j -> input column
  for (const auto& [name, dim] : field_dims) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error("line 1: header is missing field '" + name + "'");
    }
    column_of.push_back(static_cast<std::size_t>(it - header.begin()));
    fields.push_back({name, dim, {}});
  }

  DatabaseBuilder builder(std::move(fields));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> parts = split(line);
    if (parts.size() != field_dims.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": has " +
                               std::to_string(parts.size()) + " values, expected " +
                               std::to_string(field_dims.size()));
    }
    std::vector<std::string> ordered(field_dims.size());
    for (std::size_t j = 0; j < field_dims.size(); ++j) {
      ordered[j] = parts[column_of[j]];
    }
    try {
      builder.add(ordered);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return builder.finish();
}

}  // namespace qsearch::qdb
