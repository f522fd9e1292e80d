#include "rg/series.hpp"

#include "rg/structural.hpp"

namespace rg {

BarSeries build_bar_series(const Panel& panel, const Config& cfg) {
  BarSeries s;
  const std::size_t n = panel.candles.size();
  s.size = n;
  s.funding.assign(n, Decimal{});
  s.funding_observed.assign(n, false);
  s.oi.assign(n, std::nullopt);
  s.long_share.assign(n, std::nullopt);
  s.book.assign(n, std::nullopt);
  s.basis.assign(n, std::nullopt);
  if (n == 0) return s;

  // Funding: average the settlements that fall in each bar.
  std::vector<int128_t> sum(n, 0);
  std::vector<int> count(n, 0);
  std::vector<double> basis_sum(n, 0.0);
  std::vector<int> basis_count(n, 0);
  for (const auto& f : panel.funding) {
    std::size_t b = panel.bar_index_at(f.settle_time);
    sum[b] += f.rate_8h.raw();
    ++count[b];
    if (f.index_price.sign() > 0 && f.mark_price.sign() > 0) {
      basis_sum[b] += (f.mark_price - f.index_price).to_double() / f.index_price.to_double();
      ++basis_count[b];
    }
  }
  Decimal carry;
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] > 0) {
      carry = Decimal::from_raw(sum[i] / count[i]);
      s.funding_observed[i] = true;
    }
    s.funding[i] = carry;
    if (basis_count[i] > 0) s.basis[i] = basis_sum[i] / basis_count[i];
  }

  // Open interest: the last snapshot inside each bar, carried forward.
  std::vector<const OpenInterestRecord*> last_oi(n, nullptr);
  for (const auto& r : panel.oi) {
    std::size_t b = panel.bar_index_at(r.time);
    if (!last_oi[b] || last_oi[b]->time <= r.time) last_oi[b] = &r;
  }
  const OpenInterestRecord* cur = nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    if (last_oi[i]) {
      cur = last_oi[i];
      if (!s.first_oi_bar) s.first_oi_bar = i;
    }
    if (!cur) continue;
    s.oi[i] = cur->oi_usd;
    if (cur->long_oi_usd && cur->short_oi_usd) {
      double tot = *cur->long_oi_usd + *cur->short_oi_usd;
      if (tot > 0.0) s.long_share[i] = *cur->long_oi_usd / tot;
    }
  }

  for (std::size_t k = 0; k < panel.books.size(); ++k) {
    std::size_t b = panel.bar_index_at(panel.books[k].time);
    if (!s.book[b] || panel.books[*s.book[b]].time <= panel.books[k].time) s.book[b] = k;
  }

  s.volatility = rolling_volatility(panel.candles, static_cast<std::size_t>(as_count(cfg.volatility_window)));
  return s;
}

}  // namespace rg
