#include "percolog/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace percolog {

namespace {

bool before(const BatchRecord& a, uint64_t seed, uint64_t first) {
  return a.seed != seed ? a.seed < seed : a.first_index < first;
}

}  // namespace

BatchRange batch_range(uint64_t total, int nbatches, int b, uint64_t offset) {
  if (nbatches < 1 || b < 0 || b >= nbatches)
    throw std::invalid_argument("batch_range: batch index out of range");
  const uint64_t base = total / uint64_t(nbatches), rem = total % uint64_t(nbatches);
  const uint64_t ub = uint64_t(b);
  return {offset + ub * base + std::min(ub, rem), base + (ub < rem ? 1 : 0)};
}

void check_batching(uint64_t total, int nbatches) {
  if (nbatches < 30) throw std::invalid_argument("check_batching: needs at least 30 batches");
  if (total < uint64_t(nbatches))
    throw std::invalid_argument("check_batching: fewer samples than batches");
}

size_t EventCounts::key_index(const std::string& key) const {
  for (size_t k = 0; k < keys.size(); ++k)
    if (keys[k] == key) return k;
  throw std::invalid_argument("EventCounts: unknown key '" + key + "'");
}

void EventCounts::add_batch(BatchRecord rec) {
  if (rec.n == 0) throw std::invalid_argument("EventCounts: empty batch");
  if (rec.tallies.size() != keys.size())
    throw std::invalid_argument("EventCounts: tally arity mismatch");
  auto it = std::lower_bound(batches.begin(), batches.end(), rec,
                             [](const BatchRecord& a, const BatchRecord& b) {
                               return before(a, b.seed, b.first_index);
                             });
  // Same-seed index ranges must be disjoint.
  if (it != batches.begin()) {
    const BatchRecord& prev = *(it - 1);
    if (prev.seed == rec.seed && prev.first_index + prev.n > rec.first_index)
      throw std::invalid_argument("EventCounts: overlapping batch ranges");
  }
  if (it != batches.end()) {
    if (it->seed == rec.seed && rec.first_index + rec.n > it->first_index)
      throw std::invalid_argument("EventCounts: overlapping batch ranges");
  }
  batches.insert(it, std::move(rec));
}

void EventCounts::merge(const EventCounts& other) {
  if (keys != other.keys)
    throw std::invalid_argument("EventCounts: merge with mismatched keys");
  for (const BatchRecord& b : other.batches) add_batch(b);
}

uint64_t EventCounts::total(size_t k) const {
  if (k >= keys.size()) throw std::invalid_argument("EventCounts: key index out of range");
  uint64_t s = 0;
  for (const BatchRecord& b : batches) s += b.tallies[k];
  return s;
}

uint64_t EventCounts::total(const std::string& key) const { return total(key_index(key)); }

uint64_t EventCounts::total_samples() const {
  uint64_t s = 0;
  for (const BatchRecord& b : batches) s += b.n;
  return s;
}

Estimate jackknife(const EventCounts& ec, const StatFn& f) {
  const size_t nk = ec.keys.size();
  const size_t nb = ec.batches.size();
  std::vector<double> totals(nk, 0.0);
  double nsamp = 0.0;
  for (const BatchRecord& b : ec.batches) {
    for (size_t k = 0; k < nk; ++k) totals[k] += static_cast<double>(b.tallies[k]);
    nsamp += static_cast<double>(b.n);
  }
  Estimate est;
  est.n = static_cast<uint64_t>(nsamp);
  est.value = nb == 0 ? std::numeric_limits<double>::quiet_NaN() : f(totals, nsamp);
  if (nb < 2) {
    est.sigma = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  std::vector<double> reps(nb);
  std::vector<double> loo(nk);
  for (size_t b = 0; b < nb; ++b) {
    const BatchRecord& rec = ec.batches[b];
    for (size_t k = 0; k < nk; ++k)
      loo[k] = totals[k] - static_cast<double>(rec.tallies[k]);
    reps[b] = f(loo, nsamp - static_cast<double>(rec.n));
  }
  double mean = 0.0;
  for (double r : reps) mean += r;
  mean /= static_cast<double>(nb);
  double ss = 0.0;
  for (double r : reps) ss += (r - mean) * (r - mean);
  est.sigma = std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
  return est;
}

Estimate frequency(const EventCounts& ec, const std::string& key) {
  const size_t k = ec.key_index(key);
  return jackknife(ec, [k](const std::vector<double>& t, double n) {
    return n > 0.0 ? t[k] / n : std::numeric_limits<double>::quiet_NaN();
  });
}

Estimate ratio(const EventCounts& ec, const std::string& num, const std::string& den) {
  const size_t kn = ec.key_index(num);
  const size_t kd = ec.key_index(den);
  return jackknife(ec, [kn, kd](const std::vector<double>& t, double) {
    return t[kd] > 0.0 ? t[kn] / t[kd] : std::numeric_limits<double>::quiet_NaN();
  });
}

}  // namespace percolog
