#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nora::stats {

/// Binary preference counts for one questionnaire item.
struct PreferenceTally {
  std::string question;
  int n = 0;       // participants, >= 1
  int wins_a = 0;  // participants preferring agent A, in [0, n]

  void validate() const;
};

/// Exact upper tail P(X >= k) for X ~ Binomial(n, 1/2).
struct TailProbability {
  std::string numerator;  // sum of C(n, i) for i >= k, decimal
  int log2_denominator = 0;  // n
  double value = 0.0;
};

TailProbability binomial_tail_exact(int n, int k);

/// P(X >= k), X ~ Binomial(n, 1/2). Throws DomainError unless 0 <= k <= n.
double binomial_tail(int n, int k);

enum class Winner { kA, kB, kTie };

struct SignificanceRow {
  std::string question;
  Winner winner = Winner::kTie;
  double win_rate_pct = 0.0;    // winner's share, one decimal
  double rate_a_pct = 0.0;      // one decimal
  double rate_b_pct = 0.0;      // one decimal
  double p_value = 1.0;         // one-sided sign test for the winner
  bool significant = false;
};

/// One-sided exact sign test per tally: significant iff
/// binomial_tail(n, max(wins, n - wins)) < alpha. Throws DomainError for an
/// empty list, an invalid tally or alpha outside (0, 1).
std::vector<SignificanceRow> significance_table(const std::vector<PreferenceTally>& tallies,
                                                double alpha = 0.1);

double round1(double x);

/// Reads `question,n,wins_a` rows; a header row is allowed.
std::vector<PreferenceTally> read_tallies_csv(std::istream& in);

/// Table-shaped text report; significant rates are marked with '*'.
void print_report(std::ostream& out, const std::vector<SignificanceRow>& rows,
                  const std::string& label_a, const std::string& label_b,
                  double alpha);

}  // namespace nora::stats
