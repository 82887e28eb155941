#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qsearch/grover.hpp"
#include "qsearch/statevec.hpp"

namespace qsearch::qdb {

/// One record register: its basis dimension and the external string values
/// mapped to basis indices by position (at most `dim` of them).
struct FieldSpec {
  std::string name;
  std::size_t dim = 0;
  std::vector<std::string> values;
};

/// One basis index per field.
struct Record {
  std::vector<std::size_t> values;

  friend bool operator==(const Record&, const Record&) = default;
  friend auto operator<=>(const Record&, const Record&) = default;
};

/// Immutable k-field record set. Records are unique as full tuples and kept
/// sorted by joint index. Joint indexing is row-major over field order
/// (field 0 most significant): index = sum_j x_j * prod_{l>j} dim_l.
class Database {
 public:
  static Database build(std::vector<FieldSpec> fields,
                        const std::vector<std::vector<std::string>>& raw_records);
  static Database from_indices(std::vector<FieldSpec> fields,
                               std::vector<Record> records);

  const std::vector<FieldSpec>& fields() const { return fields_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t field_count() const { return fields_.size(); }
  std::size_t joint_dim() const { return joint_dim_; }

  std::size_t joint_index(const Record& r) const;
  Record record_at(std::size_t joint_index) const;
  bool contains(const Record& r) const;

  std::optional<std::size_t> field_position(std::string_view name) const;
  std::optional<std::size_t> value_index(std::size_t field, std::string_view value) const;
  // External spelling of a basis index: the value-table entry when present,
  // otherwise the index rendered as "#<i>".
  std::string value_name(std::size_t field, std::size_t index) const;

 private:
  Database() = default;
  std::vector<FieldSpec> fields_;
  std::vector<Record> records_;
  std::vector<std::size_t> strides_;
  std::size_t joint_dim_ = 0;
  friend class DatabaseBuilder;
};

/// Incremental construction with per-record validation; backs both `build`
/// and the delimited-text reader (which needs line numbers in errors).
class DatabaseBuilder {
 public:
  explicit DatabaseBuilder(std::vector<FieldSpec> fields);

  // Resolves each string through its field's value table, inserting new
  // values while capacity remains. Throws on duplicate tuples and overflow.
  void add(const std::vector<std::string>& raw_record);
  void add(Record record);

  Database finish();

 private:
  Database db_;
  bool finished_ = false;
};

/// Which field positions are pinned to basis indices and which are searched.
/// known and unknown are disjoint and together cover all positions.
struct QueryTask {
  std::map<std::size_t, std::size_t> known;
  std::vector<std::size_t> unknown;  // sorted field positions

  static QueryTask make(const Database& db, std::map<std::size_t, std::size_t> known,
                        std::vector<std::size_t> unknown);
  // unknown = complement of known.
  static QueryTask make(const Database& db, std::map<std::size_t, std::size_t> known);
};

struct SearchOutcome {
  Record candidate;
  bool verified = false;
  std::size_t oracle_calls = 0;  // == steps_used + 1 (final verification)
  std::size_t steps_used = 0;
};

struct ClassicalOutcome {
  std::optional<Record> match;
  std::size_t calls = 0;
};

/// Resolved search parameters: the unknown-subspace dimension, the marked
/// count the simulator can see, and the Grover geometry when K >= 1.
struct SearchPlan {
  std::size_t unknown_dim = 0;  // N = prod of unknown field dims
  std::size_t marked_count = 0;
  double omega = 0.0;  // meaningful only when marked_count >= 1
  double m0 = 0.0;
  std::size_t steps = 0;
};

// Joint indices (mixed-radix over the unknown fields, row-major in field
// order) whose completion with the known values is a record. May be empty.
grover::MarkedSet marked_set(const Database& db, const QueryTask& task);

// Joint database oracle R: negates the amplitude of every record's joint
// basis state. O(|records|).
StateVector joint_oracle_apply(const Database& db, const StateVector& s);

// Builds the three dense operators of the two-register symmetry identity
// (number-controlled name oracles, name-controlled number oracles, joint R)
// and returns the largest absolute entrywise deviation among the pairwise
// differences. Requires k == 2 and joint_dim <= 4096.
double symmetry_deviation(const Database& db);

// Basis states on known registers tensored with uniform superpositions on
// unknown registers.
StateVector prepare_query(const Database& db, const QueryTask& task);

// One programmable Grover step: the joint oracle R, then inversion about
// average over the joint unknown subspace of every known-register fiber.
StateVector pqq_apply(const Database& db, const QueryTask& task, const StateVector& s);

SearchPlan plan_search(const Database& db, const QueryTask& task,
                       std::optional<std::size_t> steps);

// Full programmable search: prepare, iterate pqq_apply (steps, or round(m0)
// when unset), sample the unknown registers, verify the completed tuple
// classically (one extra oracle call). An empty marked set yields a
// verified=false outcome, not an error.
SearchOutcome search(const Database& db, const QueryTask& task,
                     std::optional<std::size_t> steps, std::mt19937_64& rng);

// Runs `trials` searches with per-trial rng seeded seed ^ trial. The unitary
// evolution is deterministic, so the state is evolved once and sampled per
// trial; outcomes match calling `search` with mt19937_64(seed ^ t).
std::vector<SearchOutcome> search_trials(const Database& db, const QueryTask& task,
                                         std::optional<std::size_t> steps,
                                         std::uint64_t seed, std::size_t trials);

// Queries candidate completions in uniformly random order until one matches;
// exhausts all N candidates (and reports no match) when none does.
ClassicalOutcome classical_search(const Database& db, const QueryTask& task,
                                  std::mt19937_64& rng);

// Structured single-document database file (JSON):
// {"fields":[{"name","dim","values":[...]}],"records":[[int,...],...]}.
void save(const Database& db, std::ostream& out);
Database load(std::istream& in);
void save_file(const Database& db, const std::string& path);
Database load_file(const std::string& path);

// Delimited text: first line is a header naming the declared fields (order may
// differ), one record per line, values as strings. Errors cite line numbers.
Database read_delimited(std::istream& in,
                        const std::vector<std::pair<std::string, std::size_t>>& field_dims,
                        char delimiter = ',');

}  // namespace qsearch::qdb
