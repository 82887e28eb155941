// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
// The search-statistics criterion drives the CLI binary; point QSEARCH_CLI
// (or --cli) at it when not running under ctest.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "qsearch/discrim.hpp"
#include "qsearch/grover.hpp"
#include "qsearch/qdb.hpp"
#include "qsearch/statevec.hpp"

using namespace qsearch;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure(detail);
}

std::string g_cli_path;

struct Criterion {
  int id;
  std::string label;
  double budget_seconds;
  std::function<void()> body;
};

// ---- 1: exact single-step search at N = 4 ---------------------------------

void criterion_single_step() {
  const auto p = grover::params(4, 1);
  for (std::size_t x = 0; x < 4; ++x) {
    const auto s = grover::run(p, grover::MarkedSet(4, {x}), 1);
    require(std::abs(s[x] - cxd{1.0, 0.0}) <= 1e-12,
            "marked amplitude deviates at x=" + std::to_string(x));
    for (std::size_t i = 0; i < 4; ++i) {
      if (i != x) {
        require(std::abs(s[i]) <= 1e-12, "unmarked amplitude nonzero");
      }
    }
  }
}

// ---- 2: closed form == gate iteration across the grid ---------------------

void criterion_closed_form_vs_iteration() {
  for (std::size_t n = 2; n <= 256; ++n) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(8, n - 1); ++k) {
      const auto p = grover::params(n, k);
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i * (n / k);
      const grover::MarkedSet marked(n, idx);

      if (std::abs(grover::success_prob(p, p.m0) - 1.0) > 1e-12) {
        throw Failure("success_prob(m0) != 1 at N=" + std::to_string(n) +
                      " K=" + std::to_string(k));
      }

      const auto m_max = static_cast<std::size_t>(std::ceil(3.0 * p.m0));
      // evolve incrementally; run(m) would recompute the prefix every time
      auto state = grover::run(p, marked, 0);
      for (std::size_t m = 0; m <= m_max; ++m) {
        if (m > 0) {
          state = grover::diffusion_apply(grover::oracle_apply(marked, state));
        }
        const auto closed = grover::grover_state(p, marked, static_cast<double>(m));
        for (std::size_t i = 0; i < n; ++i) {
          if (std::abs(state[i] - closed[i]) > 1e-10) {
            throw Failure("mismatch at N=" + std::to_string(n) +
                          " K=" + std::to_string(k) + " m=" + std::to_string(m));
          }
        }
        double projection = 0.0;
        for (const std::size_t i : marked.indices()) projection += std::norm(state[i]);
        if (std::abs(projection - grover::success_prob(p, static_cast<double>(m))) >
            1e-10) {
          throw Failure("projection mismatch at N=" + std::to_string(n) +
                        " K=" + std::to_string(k) + " m=" + std::to_string(m));
        }
      }
    }
  }
}

// ---- 3: the Eq.-style operator identity on random databases ---------------

qdb::Database random_two_field_db(std::mt19937_64& rng) {
  const std::size_t d0 = 2 + random_index(rng, 15);
  const std::size_t d1 = 2 + random_index(rng, 15);
  const std::size_t max_records = d0 * d1;
  const std::size_t count = 1 + random_index(rng, std::min<std::size_t>(max_records, 24));
  std::vector<qdb::Record> records;
  std::vector<bool> used(max_records, false);
  while (records.size() < count) {
    const std::size_t joint = random_index(rng, max_records);
    if (used[joint]) continue;
    used[joint] = true;
    records.push_back({{joint / d1, joint % d1}});
  }
  return qdb::Database::from_indices({{"f0", d0, {}}, {"f1", d1, {}}},
                                     std::move(records));
}

void criterion_symmetry_identity() {
  std::mt19937_64 rng(271828);
  for (int t = 0; t < 100; ++t) {
    const auto db = random_two_field_db(rng);
    const double dev = qdb::symmetry_deviation(db);
    require(dev < 1e-12, "deviation " + std::to_string(dev) + " on database " +
                             std::to_string(t));
  }
}

// ---- 4: pqq restricted to a fiber is the reduced Grover step --------------

void check_fiber_reduction(const qdb::Database& db, std::size_t known_pos,
                           std::size_t known_val) {
  const std::size_t unknown_pos = 1 - known_pos;
  const std::size_t du = db.fields()[unknown_pos].dim;
  const auto task = qdb::QueryTask::make(db, {{known_pos, known_val}});
  const auto marked = qdb::marked_set(db, task);

  const auto embed = [&](std::size_t j) {
    qdb::Record r;
    r.values.resize(2);
    r.values[known_pos] = known_val;
    r.values[unknown_pos] = j;
    return db.joint_index(r);
  };

  for (std::size_t j = 0; j < du; ++j) {
    const auto column =
        qdb::pqq_apply(db, task, StateVector::basis(db.joint_dim(), embed(j)));
    auto expected = grover::diffusion_apply(
        grover::oracle_apply(marked, StateVector::basis(du, j)));
    for (std::size_t i = 0; i < du; ++i) {
      require(std::abs(column[embed(i)] - expected[i]) <= 1e-10,
              "fiber column mismatch at unknown register " +
                  std::to_string(unknown_pos));
    }
    // nothing may leak off the fiber
    double off_fiber = 0.0;
    for (std::size_t i = 0; i < db.joint_dim(); ++i) off_fiber += std::norm(column[i]);
    for (std::size_t i = 0; i < du; ++i) off_fiber -= std::norm(column[embed(i)]);
    require(std::abs(off_fiber) <= 1e-12, "pqq leaks off the known fiber");
  }
}

void criterion_pqq_reduction() {
  std::mt19937_64 rng(314159);
  // both switch directions at several shapes, unknown register up to dim 64
  const std::vector<std::pair<std::size_t, std::size_t>> shapes = {
      {4, 64}, {64, 4}, {16, 16}, {8, 64}, {64, 8}};
  for (const auto& [d0, d1] : shapes) {
    const std::size_t max_records = d0 * d1;
    std::vector<qdb::Record> records;
    std::vector<bool> used(max_records, false);
    const std::size_t count = 1 + random_index(rng, 40);
    while (records.size() < count) {
      const std::size_t joint = random_index(rng, max_records);
      if (used[joint]) continue;
      used[joint] = true;
      records.push_back({{joint / d1, joint % d1}});
    }
    const auto db = qdb::Database::from_indices({{"number", d0, {}}, {"name", d1, {}}},
                                                std::move(records));
    check_fiber_reduction(db, 0, db.records()[0].values[0]);
    check_fiber_reduction(db, 1, db.records()[0].values[1]);
  }
}

// ---- 5: unambiguous-discrimination bound ----------------------------------

void criterion_unambiguous_bound() {
  for (std::size_t n = 2; n <= 512; ++n) {
    const auto p = grover::params(n, 1);
    const auto m_max = 2 * static_cast<std::size_t>(std::ceil(p.m0)) + 2;
    for (std::size_t m = 0; m <= m_max; ++m) {
      const double numeric = discrim::unamb_bound_numeric(n, m);
      const double closed = discrim::unamb_bound(n, static_cast<double>(m));
      if (std::abs(numeric - closed) > 1e-10) {
        throw Failure("numeric/closed mismatch at N=" + std::to_string(n) +
                      " m=" + std::to_string(m));
      }
    }
    const auto [m0, m1] = discrim::crossing_points(n);
    require(std::abs(discrim::unamb_bound(n, m0) - 1.0) <= 1e-10,
            "bound at m0 not 1 for N=" + std::to_string(n));
    require(std::abs(discrim::unamb_bound(n, m1) - 1.0) <= 1e-10,
            "bound at m0+1 not 1 for N=" + std::to_string(n));
    require(discrim::unamb_bound(n, m0 + 0.5) == 0.0,
            "bound at m0+1/2 not exactly zero for N=" + std::to_string(n));
  }
}

// ---- 6: minimum-error discrimination ---------------------------------------

void criterion_minimum_error() {
  // piecewise closed-form identity at every N; the branch formulas cover one
  // half-turn of the rotation (m*omega <= pi, i.e. m <= 2*m0 + 1)
  for (std::size_t n = 2; n <= 512; ++n) {
    const auto p = grover::params(n, 1);
    for (double m = 0.0; m <= 2.0 * p.m0 + 1.0; m += 0.25) {
      const double pm = discrim::minerr_prob(n, m);
      const double expected =
          m <= p.m0 + 0.5
              ? grover::success_prob(p, m)
              : std::pow(std::sin((2.0 * m - 1.0) * p.omega / 2.0), 2);
      if (std::abs(pm - expected) > 1e-12) {
        throw Failure("piecewise identity broken at N=" + std::to_string(n) +
                      " m=" + std::to_string(m));
      }
    }
  }

  // numeric square-root-measurement route on a grid spanning 2..512
  const std::vector<std::size_t> grid = {2,  3,  4,  5,   6,   7,   8,  12, 16,
                                         24, 32, 48, 64, 100, 128, 256, 512};
  for (const std::size_t n : grid) {
    const auto p = grover::params(n, 1);
    const auto m_max = 2 * static_cast<std::size_t>(std::ceil(p.m0)) + 2;
    const bool with_povm = n <= 128;
    for (std::size_t m = 0; m <= m_max; ++m) {
      const auto numeric = discrim::minerr_numeric(n, m, with_povm);
      const double closed = discrim::minerr_prob(n, static_cast<double>(m));
      if (std::abs(numeric.p_success - closed) > 1e-8) {
        throw Failure("numeric/closed mismatch at N=" + std::to_string(n) +
                      " m=" + std::to_string(m));
      }
      // the statevec contract for M*Omega*M against the support projector;
      // near m*omega = pi the family is almost linearly dependent and the
      // product floors at eps * cond(Omega)
      require(numeric.sqrt_identity_deviation <= 1e-8,
              "M*Omega*M deviates from the support projector at N=" +
                  std::to_string(n) + " m=" + std::to_string(m));
      if (with_povm) {
        require(numeric.povm.has_value(), "povm missing");
        const double dev = numeric.povm->completeness_deviation();
        require(dev <= 1e-10, "povm completeness deviation " + std::to_string(dev) +
                                  " at N=" + std::to_string(n) +
                                  " m=" + std::to_string(m));
      }
    }
  }
}

// ---- 7: the N = 100 sweep landscape ----------------------------------------

void criterion_sweep_landscape() {
  std::vector<double> grid;
  for (int m = 0; m <= 20; ++m) grid.push_back(m);
  const auto rows = discrim::sweep(100, grid);
  require(rows.size() == 21, "wrong row count");

  require(rows[7].p_grover >= 0.9953 && rows[7].p_grover <= 0.9954,
          "p_grover(7) = " + std::to_string(rows[7].p_grover));
  require(rows[8].gamma0_bound >= 0.101 && rows[8].gamma0_bound <= 0.102,
          "gamma0_bound(8) = " + std::to_string(rows[8].gamma0_bound));
  require(rows[8].p_minerr >= 0.9953 && rows[8].p_minerr <= 0.9954,
          "p_minerr(8) = " + std::to_string(rows[8].p_minerr));

  // the unique integer strictly between m0 and m0+1
  const auto [m0, m1] = discrim::crossing_points(100);
  const auto dip = static_cast<std::size_t>(std::ceil(m0));
  require(static_cast<double>(dip) > m0 && static_cast<double>(dip) < m1,
          "no integer strictly inside the crossing interval");
  require(rows[dip].gamma0_bound < 0.2, "no dip in the unambiguous bound");
  require(rows[dip].p_minerr > 0.99, "minimum error dips too");
}

// ---- 8: statistical search success through the CLI -------------------------

void criterion_cli_search_statistics() {
  namespace fs = std::filesystem;
  require(!g_cli_path.empty(), "CLI path unknown: set QSEARCH_CLI or pass --cli");

  const fs::path dir =
      fs::temp_directory_path() /
      ("qsearch_accept_" + std::to_string(static_cast<unsigned>(::getpid())));
  fs::create_directories(dir);
  const fs::path csv = dir / "book.csv";
  const fs::path dbfile = dir / "book.json";
  const fs::path out = dir / "search.out";

  {
    std::ofstream book(csv);
    book << "number,name\n";
    for (int i = 0; i < 100; ++i) {
      book << "n" << i << ",a" << i << "\n";
    }
  }

  const std::string build_cmd = "\"" + g_cli_path + "\" build --fields " +
                                "number:100,name:100 --input " + csv.string() +
                                " --out " + dbfile.string() + " > /dev/null 2>&1";
  require(std::system(build_cmd.c_str()) == 0, "cmd_build failed");

  const std::string search_cmd = "\"" + g_cli_path + "\" search --db " +
                                 dbfile.string() +
                                 " --known number=n42 --unknown name --steps auto"
                                 " --trials 10000 --seed 0 > " +
                                 out.string() + " 2>&1";
  require(std::system(search_cmd.c_str()) == 0, "cmd_search failed");

  std::ifstream result(out);
  std::string line, last;
  bool plan_seen = false;
  while (std::getline(result, line)) {
    if (line.rfind("plan:", 0) == 0) {
      plan_seen = true;
      require(line.find("N=100") != std::string::npos, "plan line lacks N");
      require(line.find("K=1") != std::string::npos, "plan line lacks K");
      require(line.find("steps=7") != std::string::npos, "auto steps should be 7");
    }
    if (!line.empty()) last = line;
  }
  require(plan_seen, "no plan line in cmd_search output");

  std::size_t hits = 0, total = 0;
  double freq = 0.0;
  require(std::sscanf(last.c_str(), "verified: %zu/%zu frequency %lf", &hits, &total,
                      &freq) == 3,
          "cannot parse aggregate line: " + last);
  require(total == 10000, "trial count mismatch");

  const double expected = 0.99535;
  const double sigma = std::sqrt(expected * (1.0 - expected) / 10000.0);
  require(std::abs(freq - expected) <= 3.0 * sigma,
          "frequency " + std::to_string(freq) + " outside 3 sigma of 0.99535");

  fs::remove_all(dir);
}

// ---- 9: classical baseline --------------------------------------------------

void criterion_classical_baseline() {
  std::vector<qdb::Record> records;
  for (std::size_t i = 0; i < 100; ++i) records.push_back({{i, i}});
  const auto db = qdb::Database::from_indices(
      {{"number", 100, {}}, {"name", 100, {}}}, std::move(records));
  const auto task = qdb::QueryTask::make(db, {{0, 42}});

  const std::size_t trials = 10000;
  double total_calls = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(9000 ^ t);
    const auto o = qdb::classical_search(db, task, rng);
    require(o.match.has_value(), "match not found");
    total_calls += static_cast<double>(o.calls);
  }
  const double mean = total_calls / static_cast<double>(trials);

  const double expected = 50.5;  // (N+1)/2
  const double sigma = std::sqrt((100.0 * 100.0 - 1.0) / 12.0 / trials);
  require(std::abs(mean - expected) <= 3.0 * sigma,
          "mean calls " + std::to_string(mean) + " outside 3 sigma of 50.5");
}

// ---- 10: large-N smoke test -------------------------------------------------

void criterion_scale_smoke() {
  const std::size_t n = std::size_t{1} << 20;
  const auto p = grover::params(n, 1);
  require(grover::optimal_steps(p) == 804, "optimal step count changed");
  const std::size_t x = 123456;
  const auto s = grover::run(p, grover::MarkedSet(n, {x}), 804);
  const double success = std::norm(s[x]);
  require(success >= 0.999, "success probability " + std::to_string(success));
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
  }
  if (g_cli_path.empty()) {
    if (const char* env = std::getenv("QSEARCH_CLI")) g_cli_path = env;
  }

  const std::vector<Criterion> criteria = {
      {1, "N=4 single-step search is exact", 0.001, criterion_single_step},
      {2, "closed form matches gate iteration (N<=256, K<=8)", 30.0,
       criterion_closed_form_vs_iteration},
      {3, "operator symmetry identity on 100 random databases", 10.0,
       criterion_symmetry_identity},
      {4, "pqq reduces to the Grover step on known fibers", 10.0,
       criterion_pqq_reduction},
      {5, "unambiguous bound: numeric == closed form (N<=512)", 60.0,
       criterion_unambiguous_bound},
      {6, "minimum error: square-root measurement == closed form", 120.0,
       criterion_minimum_error},
      {7, "N=100 sweep landscape", 1.0, criterion_sweep_landscape},
      {8, "CLI search statistics over 10^4 seeded trials", 5.0,
       criterion_cli_search_statistics},
      {9, "classical baseline averages (N+1)/2 calls", 1.0,
       criterion_classical_baseline},
      {10, "N=2^20 run completes fast with high success", 30.0,
       criterion_scale_smoke},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && elapsed > c.budget_seconds) {
      ok = false;
      detail = "exceeded the " + std::to_string(c.budget_seconds) + " s budget";
    }
    std::printf("%s criterion %2d: %s (%.3f s)\n", ok ? "PASS" : "FAIL", c.id,
                c.label.c_str(), elapsed);
    if (!ok) {
      std::printf("     %s\n", detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
