#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace percolog {

// Tallies for one contiguous index range of one seed's counter-based stream.
struct BatchRecord {
  uint64_t seed = 0;
  uint64_t first_index = 0;
  uint64_t n = 0;                 // samples in this batch, >= 1
  std::vector<uint64_t> tallies;  // one entry per key; may exceed n (multi-hit keys)
};

// Tagged, mergeable tally accumulator. Batches are kept sorted by
// (seed, first_index); ranges of the same seed must be disjoint so that a
// merge of two runs is tally-identical to one long run over the union.
struct EventCounts {
  std::vector<std::string> keys;
  std::vector<BatchRecord> batches;

  EventCounts() = default;
  explicit EventCounts(std::vector<std::string> ks) : keys(std::move(ks)) {}

  size_t key_index(const std::string& key) const;  // throws on unknown key
  void add_batch(BatchRecord rec);                 // validates arity and overlap
  void merge(const EventCounts& other);            // requires identical key lists

  uint64_t total(size_t k) const;
  uint64_t total(const std::string& key) const;
  uint64_t total_samples() const;
};

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
  uint64_t n = 0;
};

// Contiguous sharding of [offset, offset + total) into nbatches index ranges
// whose sizes differ by at most one (earlier batches absorb the remainder).
// Every sampler uses this rule, so batch boundaries never depend on the
// worker count.
struct BatchRange {
  uint64_t first = 0;
  uint64_t n = 0;
};
BatchRange batch_range(uint64_t total, int nbatches, int b, uint64_t offset = 0);
// requires >= 30 batches and at least one sample per batch
void check_batching(uint64_t total, int nbatches);

// Plug-in statistic of (summed tallies, total sample count).
using StatFn = std::function<double(const std::vector<double>& totals, double n)>;

// Delete-one-batch jackknife: value = f on the full totals, sigma from the
// spread of leave-one-out replicates. Handles ratios of correlated tallies
// without explicit covariance bookkeeping. Fewer than 2 batches -> sigma NaN.
Estimate jackknife(const EventCounts& ec, const StatFn& f);

// p-hat = total(key) / total_samples, jackknife sigma.
Estimate frequency(const EventCounts& ec, const std::string& key);

// total(num) / total(den), jackknife sigma; zero denominator -> NaN.
Estimate ratio(const EventCounts& ec, const std::string& num, const std::string& den);

}  // namespace percolog
