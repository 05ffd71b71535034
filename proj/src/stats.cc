#include "nora/stats.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "nora/common.h"
#include "nora/text.h"

namespace nora::stats {

namespace mp = boost::multiprecision;

void PreferenceTally::validate() const {
  if (n < 1) throw DomainError("tally '" + question + "': n must be at least 1");
  if (wins_a < 0 || wins_a > n) {
    throw DomainError("tally '" + question + "': wins_a must lie in [0, n]");
  }
}

TailProbability binomial_tail_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("binomial_tail: need 0 <= k <= n, got n=" + std::to_string(n) +
                      " k=" + std::to_string(k));
  }
  // Walk C(n, i) down from i = n to i = k.
  mp::cpp_int term = 1;
  mp::cpp_int sum = 0;
  for (int i = n; i >= k; --i) {
    sum += term;
    term = term * i / (n - i + 1);
  }
  TailProbability t;
  t.numerator = sum.str();
  t.log2_denominator = n;
  mp::cpp_rational ratio(sum, mp::cpp_int(1) << n);
  t.value = ratio.convert_to<double>();
  return t;
}

double binomial_tail(int n, int k) { return binomial_tail_exact(n, k).value; }

double round1(double x) { return std::round(x * 10.0) / 10.0; }

std::vector<SignificanceRow> significance_table(const std::vector<PreferenceTally>& tallies,
                                                double alpha) {
  if (tallies.empty()) throw DomainError("significance_table: no tallies");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("significance_table: alpha must lie in (0, 1)");
  }
  std::vector<SignificanceRow> rows;
  for (const auto& t : tallies) {
    t.validate();
    SignificanceRow row;
    row.question = t.question;
    const int wins_b = t.n - t.wins_a;
    const int top = std::max(t.wins_a, wins_b);
    row.winner = t.wins_a > wins_b ? Winner::kA
                 : wins_b > t.wins_a ? Winner::kB
                                     : Winner::kTie;
    row.rate_a_pct = round1(100.0 * t.wins_a / t.n);
    row.rate_b_pct = round1(100.0 * wins_b / t.n);
    row.win_rate_pct = round1(100.0 * top / t.n);
    row.p_value = binomial_tail(t.n, top);
    row.significant = row.p_value < alpha;
    rows.push_back(row);
  }
  return rows;
}

std::vector<PreferenceTally> read_tallies_csv(std::istream& in) {
  std::vector<PreferenceTally> tallies;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ss(trimmed);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(text::trim(col));
    if (cols.size() != 3) {
      throw DomainError("tallies line " + std::to_string(lineno) +
                        ": expected question,n,wins_a");
    }
    if (lineno == 1 && cols[1] == "n") continue;
    PreferenceTally t;
    t.question = cols[0];
    try {
      std::size_t used = 0;
      t.n = std::stoi(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("n");
      t.wins_a = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("wins_a");
    } catch (const std::exception&) {
      throw DomainError("tallies line " + std::to_string(lineno) + ": bad count");
    }
    t.validate();
    tallies.push_back(t);
  }
  return tallies;
}

void print_report(std::ostream& out, const std::vector<SignificanceRow>& rows,
                  const std::string& label_a, const std::string& label_b,
                  double alpha) {
  auto cell = [](double pct, bool mark) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << pct << (mark ? "*" : " ");
    return s.str();
  };
  std::size_t qwidth = 13;
  for (const auto& r : rows) qwidth = std::max(qwidth, r.question.size());
  const std::size_t awidth = std::max<std::size_t>(label_a.size(), 6);
  const std::size_t bwidth = std::max<std::size_t>(label_b.size(), 6);

  out << std::left << std::setw(static_cast<int>(qwidth)) << "Question Item" << "  "
      << std::right << std::setw(static_cast<int>(awidth)) << label_a << "  "
      << std::setw(static_cast<int>(bwidth)) << label_b << "  "
      << std::setw(10) << "p" << "  significant\n";
  for (const auto& r : rows) {
    const bool a = r.significant && r.winner == Winner::kA;
    const bool b = r.significant && r.winner == Winner::kB;
    std::ostringstream p;
    p << std::setprecision(4) << r.p_value;
    out << std::left << std::setw(static_cast<int>(qwidth)) << r.question << "  "
        << std::right << std::setw(static_cast<int>(awidth)) << cell(r.rate_a_pct, a)
        << "  " << std::setw(static_cast<int>(bwidth)) << cell(r.rate_b_pct, b) << "  "
        << std::setw(10) << p.str() << "  " << (r.significant ? "yes" : "no") << '\n';
  }
  out << "winning rate (%), n per row as given; * = significant, exact one-sided "
         "sign test, alpha = "
      << alpha << '\n';
}

}  // namespace nora::stats
