#include "dmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dmatch/error.hpp"

namespace dmatch {

namespace {

// Primal-dual blossom algorithm for maximum-weight matching on a general
// graph, O(n^3). Endpoints are numbered 2k and 2k+1 for edge k; mate and
// labelend hold remote endpoints. Vertices are 0..n-1, blossoms n..2n-1.
class BlossomMatcher {
 public:
  BlossomMatcher(std::size_t n, const std::vector<std::size_t>& eu,
                 const std::vector<std::size_t>& ev, const std::vector<std::int64_t>& w)
      : nv_(static_cast<long>(n)), ne_(static_cast<long>(w.size())) {
    eu_.assign(eu.begin(), eu.end());
    ev_.assign(ev.begin(), ev.end());
    // Doubling keeps every dual update integral.
    wt_.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) wt_[k] = 2 * w[k];
  }

  std::vector<long> run() {
    const long n = nv_;
    std::vector<long> result(static_cast<std::size_t>(n), -1);
    if (ne_ == 0 || n == 0) return result;

    std::int64_t maxweight = 0;
    for (auto x : wt_) maxweight = std::max(maxweight, x);
    endpoint_.resize(2 * ne_);
    for (long p = 0; p < 2 * ne_; ++p) endpoint_[p] = (p % 2 == 0) ? eu_[p / 2] : ev_[p / 2];
    neighbend_.assign(n, {});
    for (long k = 0; k < ne_; ++k) {
      neighbend_[eu_[k]].push_back(2 * k + 1);
      neighbend_[ev_[k]].push_back(2 * k);
    }
    mate_.assign(n, -1);
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    std::iota(inblossom_.begin(), inblossom_.end(), 0);
    blossomparent_.assign(2 * n, -1);
    blossomchilds_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    for (long v = 0; v < n; ++v) blossombase_[v] = v;
    blossomendps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, false);
    unused_.clear();
    for (long b = n; b < 2 * n; ++b) unused_.push_back(b);
    dualvar_.assign(2 * n, 0);
    for (long v = 0; v < n; ++v) dualvar_[v] = maxweight;
    allowedge_.assign(ne_, false);

    for (long stage = 0; stage < n; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (long b = n; b < 2 * n; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();
      for (long v = 0; v < n; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      for (;;) {
        while (!queue_.empty() && !augmented) {
          const long v = queue_.back();
          queue_.pop_back();
          for (long p : neighbend_[v]) {
            const long k = p / 2;
            const long w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            std::int64_t kslack = 0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = true;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                const long base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              const long b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        int deltatype = 1;
        std::int64_t delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n);
        long deltaedge = -1, deltablossom = -1;
        for (long v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            const std::int64_t d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (long b = 0; b < 2 * n; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            const std::int64_t d = slack(bestedge_[b]) / 2;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (long b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
              dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        for (long v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 1) dualvar_[v] -= delta;
          else if (label_[inblossom_[v]] == 2) dualvar_[v] += delta;
        }
        for (long b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1) dualvar_[b] += delta;
            else if (label_[b] == 2) dualvar_[b] -= delta;
          }
        }
        if (deltatype == 1) {
          break;
        } else if (deltatype == 2) {
          allowedge_[deltaedge] = true;
          long i = eu_[deltaedge], j = ev_[deltaedge];
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = true;
          queue_.push_back(eu_[deltaedge]);
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;
      for (long b = n; b < 2 * n; ++b) {
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
            dualvar_[b] == 0) {
          expand_blossom(b, true);
        }
      }
    }
    for (long v = 0; v < n; ++v) result[v] = mate_[v] >= 0 ? endpoint_[mate_[v]] : -1;
    return result;
  }

 private:
  std::int64_t slack(long k) const { return dualvar_[eu_[k]] + dualvar_[ev_[k]] - 2 * wt_[k]; }

  void leaves(long b, std::vector<long>& out) const {
    if (b < nv_) {
      out.push_back(b);
      return;
    }
    for (long t : blossomchilds_[b]) leaves(t, out);
  }

  std::vector<long> leaves(long b) const {
    std::vector<long> out;
    leaves(b, out);
    return out;
  }

  static long wrap(long j, long len) { return ((j % len) + len) % len; }

  void assign_label(long w, int t, long p) {
    const long b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      leaves(b, queue_);
    } else if (t == 2) {
      const long base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  long scan_blossom(long v, long w) {
    std::vector<long> path;
    long base = -1;
    while (v != -1 || w != -1) {
      long b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (long b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(long base, long k) {
    long v = eu_[k], w = ev_[k];
    const long bb = inblossom_[base];
    long bv = inblossom_[v];
    long bw = inblossom_[w];
    const long b = unused_.back();
    unused_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;
    for (long leaf : leaves(b)) {
      if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }

    std::vector<long> bestedgeto(2 * nv_, -1);
    for (long sub : path) {
      std::vector<long> candidates;
      if (!has_bestedges_[sub]) {
        for (long leaf : leaves(sub))
          for (long p : neighbend_[leaf]) candidates.push_back(p / 2);
      } else {
        candidates = blossombestedges_[sub];
      }
      for (long kk : candidates) {
        long i = eu_[kk], j = ev_[kk];
        if (inblossom_[j] == b) std::swap(i, j);
        const long bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 &&
            (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
          bestedgeto[bj] = kk;
        }
      }
      blossombestedges_[sub].clear();
      has_bestedges_[sub] = false;
      bestedge_[sub] = -1;
    }
    auto& best = blossombestedges_[b];
    best.clear();
    for (long kk : bestedgeto)
      if (kk != -1) best.push_back(kk);
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (long kk : best)
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  void expand_blossom(long b, bool endstage) {
    const std::vector<long> childs = blossomchilds_[b];
    for (long s : childs) {
      blossomparent_[s] = -1;
      if (s < nv_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (long leaf : leaves(s)) inblossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      const auto& endps = blossomendps_[b];
      const long len = static_cast<long>(childs.size());
      const long entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      long j = std::find(childs.begin(), childs.end(), entrychild) - childs.begin();
      long jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      long p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[endps[wrap(j - endptrick, len)] ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[endps[wrap(j - endptrick, len)] / 2] = true;
        j += jstep;
        p = endps[wrap(j - endptrick, len)] ^ endptrick;
        allowedge_[p / 2] = true;
        j += jstep;
      }
      long bv = childs[wrap(j, len)];
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (childs[wrap(j, len)] != entrychild) {
        bv = childs[wrap(j, len)];
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        long found = -1;
        for (long leaf : leaves(bv)) {
          if (label_[leaf] != 0) {
            found = leaf;
            break;
          }
        }
        if (found >= 0) {
          label_[found] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(found, 2, labelend_[found]);
        }
        j += jstep;
      }
    }
    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
  }

  void augment_blossom(long b, long v) {
    long t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= nv_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const long len = static_cast<long>(childs.size());
    const long i = std::find(childs.begin(), childs.end(), t) - childs.begin();
    long j = i;
    long jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = childs[wrap(j, len)];
      const long p = endps[wrap(j - endptrick, len)] ^ endptrick;
      if (t >= nv_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = childs[wrap(j, len)];
      if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(long k) {
    const long v = eu_[k], w = ev_[k];
    const long starts[2][2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (const auto& sp : starts) {
      long s = sp[0], p = sp[1];
      for (;;) {
        const long bs = inblossom_[s];
        if (bs >= nv_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        const long t = endpoint_[labelend_[bs]];
        const long bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        const long j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= nv_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  long nv_, ne_;
  std::vector<long> eu_, ev_;
  std::vector<std::int64_t> wt_;
  std::vector<long> endpoint_;
  std::vector<std::vector<long>> neighbend_;
  std::vector<long> mate_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
  std::vector<int> label_;
  std::vector<std::vector<long>> blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<bool> has_bestedges_, allowedge_;
  std::vector<long> unused_, queue_;
  std::vector<std::int64_t> dualvar_;
};

}  // namespace

std::vector<long> max_weight_matching_int(std::size_t num_vertices,
                                          const std::vector<std::size_t>& eu,
                                          const std::vector<std::size_t>& ev,
                                          const std::vector<std::int64_t>& w) {
  BlossomMatcher matcher(num_vertices, eu, ev, w);
  return matcher.run();
}

MatchingResult max_weight_matching(std::size_t num_vertices,
                                   const std::vector<WeightedEdge>& edges) {
  MatchingResult result;
  std::vector<std::size_t> eu, ev;
  std::vector<double> wd;
  double wmax = 0.0;
  for (const auto& e : edges) {
    if (e.u >= num_vertices || e.v >= num_vertices) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
    }
    if (!(e.weight > 0.0) || e.u == e.v) continue;
    eu.push_back(e.u);
    ev.push_back(e.v);
    wd.push_back(e.weight);
    wmax = std::max(wmax, e.weight);
  }
  if (wd.empty()) return result;

  int exponent = 0;
  std::frexp(wmax, &exponent);
  const double scale = std::ldexp(1.0, 40 - exponent);
  std::vector<std::int64_t> wi(wd.size());
  for (std::size_t k = 0; k < wd.size(); ++k) wi[k] = std::llround(wd[k] * scale);

  // Keep the heaviest copy of parallel edges; map back to the double weight.
  std::vector<long> mate = max_weight_matching_int(num_vertices, eu, ev, wi);
  std::vector<std::vector<std::pair<std::size_t, double>>> best(num_vertices);
  for (std::size_t k = 0; k < wd.size(); ++k) {
    best[eu[k]].emplace_back(ev[k], wd[k]);
    best[ev[k]].emplace_back(eu[k], wd[k]);
  }
  for (std::size_t u = 0; u < num_vertices; ++u) {
    if (mate[u] < 0 || static_cast<std::size_t>(mate[u]) < u) continue;
    const auto v = static_cast<std::size_t>(mate[u]);
    double w = 0.0;
    for (const auto& [nb, wt] : best[u])
      if (nb == v) w = std::max(w, wt);
    result.pairs.emplace_back(u, v);
    result.total_weight += w;
  }
  return result;
}

MatchingResult max_weight_matching_brute(std::size_t num_vertices,
                                         const std::vector<WeightedEdge>& edges) {
  if (num_vertices > 20) {
    throw Error(ErrorCode::kTooLarge, "brute-force matching is limited to 20 vertices");
  }
  const std::size_t n = num_vertices;
  std::vector<double> w(n * n, 0.0);
  std::vector<bool> has(n * n, false);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    const std::size_t a = std::min(e.u, e.v), b = std::max(e.u, e.v);
    if (!has[a * n + b] || e.weight > w[a * n + b]) w[a * n + b] = e.weight;
    has[a * n + b] = true;
  }
  // best[mask] = optimum over vertices in mask; the lowest vertex of mask is
  // either left unmatched or matched to some other vertex of mask.
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> best(full, 0.0);
  std::vector<int> choice(full, -1);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    const std::size_t rest = mask & (mask - 1);
    best[mask] = best[rest];
    choice[mask] = -1;
    for (std::size_t r = rest; r != 0; r &= r - 1) {
      const std::size_t j = static_cast<std::size_t>(__builtin_ctzll(r));
      if (!has[low * n + j] || w[low * n + j] <= 0.0) continue;
      const double cand = w[low * n + j] + best[rest & ~(std::size_t{1} << j)];
      if (cand > best[mask]) {
        best[mask] = cand;
        choice[mask] = static_cast<int>(j);
      }
    }
  }
  MatchingResult result;
  result.total_weight = best[full - 1];
  std::size_t mask = full - 1;
  while (mask != 0) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    const int j = choice[mask];
    mask &= mask - 1;
    if (j >= 0) {
      result.pairs.emplace_back(low, static_cast<std::size_t>(j));
      mask &= ~(std::size_t{1} << j);
    }
  }
  return result;
}

}  // namespace dmatch
