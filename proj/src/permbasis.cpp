#include "superrad/permbasis.hpp"

#include <algorithm>
#include <string>

#include "superrad/error.hpp"

namespace superrad {

int Pattern::operator[](SiteUnit u) const {
  switch (u) {
    case SiteUnit::uu: return uu;
    case SiteUnit::du: return du;
    case SiteUnit::ud: return ud;
    case SiteUnit::dd: return dd;
  }
  return 0;
}

int& Pattern::operator[](SiteUnit u) {
  switch (u) {
    case SiteUnit::uu: return uu;
    case SiteUnit::du: return du;
    case SiteUnit::ud: return ud;
    case SiteUnit::dd: break;
  }
  return dd;
}

namespace {

std::int64_t choose2(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::int64_t choose3(std::int64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

cplx ipow(cplx base, int e) {
  cplx r{1.0, 0.0};
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void require_emitters(int n) {
  if (n < 1) throw Error(ErrorCode::ZeroEmitters, "n_emitters must be >= 1");
}

}  // namespace

std::int64_t pattern_count(int n_emitters) { return choose3(n_emitters + 3); }

std::vector<Pattern> enumerate_patterns(int n_emitters) {
  require_emitters(n_emitters);
  std::vector<Pattern> out;
  out.reserve(static_cast<std::size_t>(pattern_count(n_emitters)));
  for (int a = 0; a <= n_emitters; ++a) {
    for (int b = 0; a + b <= n_emitters; ++b) {
      for (int c = 0; a + b + c <= n_emitters; ++c) {
        out.push_back({a, b, c, n_emitters - a - b - c});
      }
    }
  }
  return out;
}

std::int64_t pattern_rank(const Pattern& p, int n_emitters) {
  if (p.uu < 0 || p.du < 0 || p.ud < 0 || p.dd < 0 || p.total() != n_emitters) {
    throw Error(ErrorCode::InvalidPattern,
                "pattern components must be nonnegative and sum to " + std::to_string(n_emitters));
  }
  const std::int64_t n = n_emitters;
  const std::int64_t m = n - p.uu;
  // patterns with a smaller m_uu, then smaller m_du, then smaller m_ud
  return (choose3(n + 3) - choose3(n - p.uu + 3)) + (choose2(m + 2) - choose2(m - p.du + 2)) + p.ud;
}

Pattern pattern_unrank(std::int64_t rank, int n_emitters) {
  require_emitters(n_emitters);
  if (rank < 0 || rank >= pattern_count(n_emitters)) {
    throw Error(ErrorCode::InvalidPattern, "rank out of range");
  }
  const std::int64_t n = n_emitters;
  Pattern p;
  std::int64_t rest = rank;
  while (true) {
    const std::int64_t span = choose2(n - p.uu + 2);
    if (rest < span) break;
    rest -= span;
    ++p.uu;
  }
  const std::int64_t m = n - p.uu;
  while (true) {
    const std::int64_t span = m - p.du + 1;
    if (rest < span) break;
    rest -= span;
    ++p.du;
  }
  p.ud = static_cast<int>(rest);
  p.dd = n_emitters - p.uu - p.du - p.ud;
  return p;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

double multiplicity(const Pattern& p) {
  const int n = p.total();
  return binomial(n, p.uu) * binomial(n - p.uu, p.du) * binomial(n - p.uu - p.du, p.ud);
}

BlockIndex::BlockIndex(int n_emitters, int nu) : n_emitters_(n_emitters), nu_(nu) {
  require_emitters(n_emitters);
  if (nu < 0 || nu > n_emitters) {
    throw Error(ErrorCode::NuOutOfRange,
                "nu = " + std::to_string(nu) + " outside [0, " + std::to_string(n_emitters) + "]");
  }
  members_.reserve(static_cast<std::size_t>(block_size(n_emitters, nu)));
  for (int a = 0; a <= nu; ++a) {
    for (int b = 0; a + b <= nu && a + b <= n_emitters; ++b) {
      for (int c = 0; a + c <= nu && a + b + c <= n_emitters; ++c) {
        members_.push_back({a, b, c, n_emitters - a - b - c});
      }
    }
  }
  ranks_.reserve(members_.size());
  for (const auto& p : members_) ranks_.push_back(pattern_rank(p, n_emitters));
}

int BlockIndex::photons_left(std::size_t i) const {
  const auto& p = members_[i];
  return nu_ - p.uu - p.ud;
}

int BlockIndex::photons_right(std::size_t i) const {
  const auto& p = members_[i];
  return nu_ - p.uu - p.du;
}

std::ptrdiff_t BlockIndex::find(const Pattern& p) const {
  if (p.uu < 0 || p.du < 0 || p.ud < 0 || p.dd < 0 || p.total() != n_emitters_) return -1;
  const auto r = pattern_rank(p, n_emitters_);
  const auto it = std::lower_bound(ranks_.begin(), ranks_.end(), r);
  if (it == ranks_.end() || *it != r) return -1;
  return it - ranks_.begin();
}

BlockIndex block_members(int n_emitters, int nu) { return BlockIndex(n_emitters, nu); }

std::int64_t block_size(int n_emitters, int nu) {
  std::int64_t count = 0;
  for (int a = 0; a <= nu; ++a) {
    for (int b = 0; a + b <= nu && a + b <= n_emitters; ++b) {
      count += std::min(nu - a, n_emitters - a - b) + 1;
    }
  }
  return count;
}

std::vector<BlockState> initial_blocks(int n_emitters, double theta) {
  const SiteDensity rho = single_emitter_density(theta);
  std::vector<BlockState> blocks;
  blocks.reserve(static_cast<std::size_t>(n_emitters) + 1);
  for (int nu = 0; nu <= n_emitters; ++nu) {
    const BlockIndex index(n_emitters, nu);
    BlockState state{nu, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(index.size()))};
    for (std::size_t i = 0; i < index.size(); ++i) {
      const Pattern& p = index[i];
      // vacuum cavity: only n = n' = 0 elements are populated
      if (index.photons_left(i) != 0 || index.photons_right(i) != 0) continue;
      state.amps[static_cast<Eigen::Index>(i)] =
          ipow(rho[SiteUnit::uu], p.uu) * ipow(rho[SiteUnit::du], p.du) *
          ipow(rho[SiteUnit::ud], p.ud) * ipow(rho[SiteUnit::dd], p.dd);
    }
    blocks.push_back(std::move(state));
  }
  return blocks;
}

Eigen::VectorXcd to_weighted(const BlockIndex& block, const Eigen::VectorXcd& amps) {
  Eigen::VectorXcd out(amps.size());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    out[i] = amps[i] * multiplicity(block[static_cast<std::size_t>(i)]);
  }
  return out;
}

Eigen::VectorXcd from_weighted(const BlockIndex& block, const Eigen::VectorXcd& weighted) {
  Eigen::VectorXcd out(weighted.size());
  for (Eigen::Index i = 0; i < weighted.size(); ++i) {
    out[i] = weighted[i] / multiplicity(block[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace superrad
