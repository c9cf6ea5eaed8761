#ifndef RIDESHARE_BLOSSOM_HPP_
#define RIDESHARE_BLOSSOM_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rideshare/core.hpp"

namespace rideshare {

/// Exact maximum-weight matching on a general graph (Edmonds' blossom
/// algorithm with primal-dual updates, O(n^3)). Weights are integers so
/// every dual update is exact; edges are visited in the given order, which
/// makes the result deterministic.
namespace blossom {

using Weight = __int128;

struct WeightedEdge {
  Index u;
  Index v;
  Weight weight;
};

/// Returns mate[v] (kNoIndex when unmatched) for vertices 0..vertex_count-1.
inline std::vector<Index> max_weight_matching(std::size_t vertex_count, const std::vector<WeightedEdge>& edges) {
  using Int = long long;  // signed index arithmetic; -1 marks "none"
  const Int nv = static_cast<Int>(vertex_count);
  const Int ne = static_cast<Int>(edges.size());
  std::vector<Index> result(vertex_count, kNoIndex);
  if (ne == 0 || nv == 0) return result;

  Weight max_weight = 0;
  for (const auto& e : edges) {
    if (e.u == e.v || e.u >= vertex_count || e.v >= vertex_count) throw InputError("invalid matching edge");
    max_weight = std::max(max_weight, e.weight);
  }

  // endpoint[p]: vertex at endpoint p; edge k has endpoints 2k (u) and 2k+1 (v).
  std::vector<Int> endpoint(2 * ne);
  for (Int k = 0; k < ne; ++k) {
    endpoint[2 * k] = static_cast<Int>(edges[k].u);
    endpoint[2 * k + 1] = static_cast<Int>(edges[k].v);
  }
  std::vector<std::vector<Int>> neighbend(nv);
  for (Int k = 0; k < ne; ++k) {
    neighbend[edges[k].u].push_back(2 * k + 1);
    neighbend[edges[k].v].push_back(2 * k);
  }

  std::vector<Int> mate(nv, -1);
  std::vector<int> label(2 * nv, 0);
  std::vector<Int> labelend(2 * nv, -1);
  std::vector<Int> inblossom(nv);
  for (Int v = 0; v < nv; ++v) inblossom[v] = v;
  std::vector<Int> blossomparent(2 * nv, -1);
  std::vector<std::vector<Int>> blossomchilds(2 * nv);
  std::vector<Int> blossombase(2 * nv, -1);
  for (Int v = 0; v < nv; ++v) blossombase[v] = v;
  std::vector<std::vector<Int>> blossomendps(2 * nv);
  std::vector<Int> bestedge(2 * nv, -1);
  std::vector<std::vector<Int>> blossombestedges(2 * nv);
  std::vector<char> has_bestedges(2 * nv, 0);
  std::vector<Int> unusedblossoms;
  for (Int b = 2 * nv - 1; b >= nv; --b) unusedblossoms.push_back(b);
  std::vector<Weight> dualvar(2 * nv, 0);
  for (Int v = 0; v < nv; ++v) dualvar[v] = max_weight;
  std::vector<char> allowedge(ne, 0);
  std::vector<Int> queue;

  const auto slack = [&](Int k) -> Weight {
    return dualvar[edges[k].u] + dualvar[edges[k].v] - 2 * edges[k].weight;
  };

  const auto blossom_leaves = [&](Int b) {
    std::vector<Int> leaves;
    std::vector<Int> stack{b};
    while (!stack.empty()) {
      const Int t = stack.back();
      stack.pop_back();
      if (t < nv) {
        leaves.push_back(t);
      } else {
        for (auto it = blossomchilds[t].rbegin(); it != blossomchilds[t].rend(); ++it) stack.push_back(*it);
      }
    }
    return leaves;
  };

  // assign_label may recurse once per S/T alternation along a path.
  auto assign_label = [&](auto&& self, Int w, int t, Int p) -> void {
    const Int b = inblossom[w];
    label[w] = label[b] = t;
    labelend[w] = labelend[b] = p;
    bestedge[w] = bestedge[b] = -1;
    if (t == 1) {
      for (Int leaf : blossom_leaves(b)) queue.push_back(leaf);
    } else if (t == 2) {
      const Int base = blossombase[b];
      self(self, endpoint[mate[base]], 1, mate[base] ^ 1);
    }
  };

  const auto scan_blossom = [&](Int v, Int w) -> Int {
    std::vector<Int> path;
    Int base = -1;
    while (v != -1 || w != -1) {
      Int b = inblossom[v];
      if (label[b] & 4) {
        base = blossombase[b];
        break;
      }
      path.push_back(b);
      label[b] = 5;
      if (labelend[b] == -1) {
        v = -1;
      } else {
        v = endpoint[labelend[b]];
        b = inblossom[v];
        v = endpoint[labelend[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (Int b : path) label[b] = 1;
    return base;
  };

  const auto add_blossom = [&](Int base, Int k) {
    Int v = static_cast<Int>(edges[k].u);
    Int w = static_cast<Int>(edges[k].v);
    const Int bb = inblossom[base];
    Int bv = inblossom[v];
    Int bw = inblossom[w];
    const Int b = unusedblossoms.back();
    unusedblossoms.pop_back();
    blossombase[b] = base;
    blossomparent[b] = -1;
    blossomparent[bb] = b;
    auto& path = blossomchilds[b];
    auto& endps = blossomendps[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend[bv]);
      v = endpoint[labelend[bv]];
      bv = inblossom[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend[bw] ^ 1);
      w = endpoint[labelend[bw]];
      bw = inblossom[w];
    }
    label[b] = 1;
    labelend[b] = labelend[bb];
    dualvar[b] = 0;
    for (Int leaf : blossom_leaves(b)) {
      if (label[inblossom[leaf]] == 2) queue.push_back(leaf);
      inblossom[leaf] = b;
    }
    std::vector<Int> bestedgeto(2 * nv, -1);
    for (Int sub : path) {
      std::vector<std::vector<Int>> nblists;
      if (!has_bestedges[sub]) {
        for (Int leaf : blossom_leaves(sub)) {
          std::vector<Int> list;
          for (Int p : neighbend[leaf]) list.push_back(p / 2);
          nblists.push_back(std::move(list));
        }
      } else {
        nblists.push_back(blossombestedges[sub]);
      }
      for (const auto& nblist : nblists) {
        for (Int kk : nblist) {
          Int i = static_cast<Int>(edges[kk].u);
          Int j = static_cast<Int>(edges[kk].v);
          if (inblossom[j] == b) std::swap(i, j);
          const Int bj = inblossom[j];
          if (bj != b && label[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
            bestedgeto[bj] = kk;
          }
        }
      }
      blossombestedges[sub].clear();
      has_bestedges[sub] = 0;
      bestedge[sub] = -1;
    }
    auto& best = blossombestedges[b];
    best.clear();
    for (Int kk : bestedgeto) {
      if (kk != -1) best.push_back(kk);
    }
    has_bestedges[b] = 1;
    bestedge[b] = -1;
    for (Int kk : best) {
      if (bestedge[b] == -1 || slack(kk) < slack(bestedge[b])) bestedge[b] = kk;
    }
  };

  auto expand_blossom = [&](auto&& self, Int b, bool endstage) -> void {
    for (Int s : blossomchilds[b]) {
      blossomparent[s] = -1;
      if (s < nv) {
        inblossom[s] = s;
      } else if (endstage && dualvar[s] == 0) {
        self(self, s, endstage);
      } else {
        for (Int leaf : blossom_leaves(s)) inblossom[leaf] = s;
      }
    }
    if (!endstage && label[b] == 2) {
      const auto& childs = blossomchilds[b];
      const Int len = static_cast<Int>(childs.size());
      const Int entrychild = inblossom[endpoint[labelend[b] ^ 1]];
      Int j = static_cast<Int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
      Int jstep;
      Int endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      const auto at = [&](const std::vector<Int>& v, Int idx) { return v[((idx % len) + len) % len]; };
      Int p = labelend[b];
      while (j != 0) {
        label[endpoint[p ^ 1]] = 0;
        label[endpoint[at(blossomendps[b], j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(assign_label, endpoint[p ^ 1], 2, p);
        allowedge[at(blossomendps[b], j - endptrick) / 2] = 1;
        j += jstep;
        p = at(blossomendps[b], j - endptrick) ^ endptrick;
        allowedge[p / 2] = 1;
        j += jstep;
      }
      Int bv = at(childs, j);
      label[endpoint[p ^ 1]] = label[bv] = 2;
      labelend[endpoint[p ^ 1]] = labelend[bv] = p;
      bestedge[bv] = -1;
      j += jstep;
      while (at(childs, j) != entrychild) {
        bv = at(childs, j);
        if (label[bv] == 1) {
          j += jstep;
          continue;
        }
        Int found = -1;
        for (Int leaf : blossom_leaves(bv)) {
          if (label[leaf] != 0) {
            found = leaf;
            break;
          }
        }
        if (found != -1) {
          label[found] = 0;
          label[endpoint[mate[blossombase[bv]]]] = 0;
          assign_label(assign_label, found, 2, labelend[found]);
        }
        j += jstep;
      }
    }
    label[b] = -1;
    labelend[b] = -1;
    blossomchilds[b].clear();
    blossomendps[b].clear();
    blossombase[b] = -1;
    blossombestedges[b].clear();
    has_bestedges[b] = 0;
    bestedge[b] = -1;
    unusedblossoms.push_back(b);
  };

  auto augment_blossom = [&](auto&& self, Int b, Int v) -> void {
    Int t = v;
    while (blossomparent[t] != b) t = blossomparent[t];
    if (t >= nv) self(self, t, v);
    auto& childs = blossomchilds[b];
    auto& endps = blossomendps[b];
    const Int len = static_cast<Int>(childs.size());
    const Int i = static_cast<Int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    Int j = i;
    Int jstep;
    Int endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    const auto at = [&](const std::vector<Int>& vec, Int idx) { return vec[((idx % len) + len) % len]; };
    while (j != 0) {
      j += jstep;
      t = at(childs, j);
      const Int p = at(endps, j - endptrick) ^ endptrick;
      if (t >= nv) self(self, t, endpoint[p]);
      j += jstep;
      t = at(childs, j);
      if (t >= nv) self(self, t, endpoint[p ^ 1]);
      mate[endpoint[p]] = p ^ 1;
      mate[endpoint[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase[b] = blossombase[childs[0]];
  };

  const auto augment_matching = [&](Int k) {
    const Int v = static_cast<Int>(edges[k].u);
    const Int w = static_cast<Int>(edges[k].v);
    const Int starts[2][2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (const auto& sp : starts) {
      Int s = sp[0];
      Int p = sp[1];
      while (true) {
        const Int bs = inblossom[s];
        if (bs >= nv) augment_blossom(augment_blossom, bs, s);
        mate[s] = p;
        if (labelend[bs] == -1) break;
        const Int t = endpoint[labelend[bs]];
        const Int bt = inblossom[t];
        s = endpoint[labelend[bt]];
        const Int j = endpoint[labelend[bt] ^ 1];
        if (bt >= nv) augment_blossom(augment_blossom, bt, j);
        mate[j] = labelend[bt];
        p = labelend[bt] ^ 1;
      }
    }
  };

  for (Int stage = 0; stage < nv; ++stage) {
    std::fill(label.begin(), label.end(), 0);
    std::fill(bestedge.begin(), bestedge.end(), -1);
    for (Int b = nv; b < 2 * nv; ++b) {
      blossombestedges[b].clear();
      has_bestedges[b] = 0;
    }
    std::fill(allowedge.begin(), allowedge.end(), 0);
    queue.clear();
    for (Int v = 0; v < nv; ++v) {
      if (mate[v] == -1 && label[inblossom[v]] == 0) assign_label(assign_label, v, 1, -1);
    }
    bool augmented = false;
    while (true) {
      while (!queue.empty() && !augmented) {
        const Int v = queue.back();
        queue.pop_back();
        for (Int p : neighbend[v]) {
          const Int k = p / 2;
          const Int w = endpoint[p];
          if (inblossom[v] == inblossom[w]) continue;
          Weight kslack = 0;
          if (!allowedge[k]) {
            kslack = slack(k);
            if (kslack <= 0) allowedge[k] = 1;
          }
          if (allowedge[k]) {
            if (label[inblossom[w]] == 0) {
              assign_label(assign_label, w, 2, p ^ 1);
            } else if (label[inblossom[w]] == 1) {
              const Int base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label[w] == 0) {
              label[w] = 2;
              labelend[w] = p ^ 1;
            }
          } else if (label[inblossom[w]] == 1) {
            const Int b = inblossom[v];
            if (bestedge[b] == -1 || kslack < slack(bestedge[b])) bestedge[b] = k;
          } else if (label[w] == 0) {
            if (bestedge[w] == -1 || kslack < slack(bestedge[w])) bestedge[w] = k;
          }
        }
      }
      if (augmented) break;

      int deltatype = 1;
      Weight delta = dualvar[0];
      for (Int v = 1; v < nv; ++v) delta = std::min(delta, dualvar[v]);
      Int deltaedge = -1;
      Int deltablossom = -1;
      for (Int v = 0; v < nv; ++v) {
        if (label[inblossom[v]] == 0 && bestedge[v] != -1) {
          const Weight d = slack(bestedge[v]);
          if (d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge[v];
          }
        }
      }
      for (Int b = 0; b < 2 * nv; ++b) {
        if (blossomparent[b] == -1 && label[b] == 1 && bestedge[b] != -1) {
          const Weight d = slack(bestedge[b]) / 2;  // even: both ends are S-vertices
          if (d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge[b];
          }
        }
      }
      for (Int b = nv; b < 2 * nv; ++b) {
        if (blossombase[b] >= 0 && blossomparent[b] == -1 && label[b] == 2 && dualvar[b] < delta) {
          delta = dualvar[b];
          deltatype = 4;
          deltablossom = b;
        }
      }

      for (Int v = 0; v < nv; ++v) {
        if (label[inblossom[v]] == 1) {
          dualvar[v] -= delta;
        } else if (label[inblossom[v]] == 2) {
          dualvar[v] += delta;
        }
      }
      for (Int b = nv; b < 2 * nv; ++b) {
        if (blossombase[b] >= 0 && blossomparent[b] == -1) {
          if (label[b] == 1) {
            dualvar[b] += delta;
          } else if (label[b] == 2) {
            dualvar[b] -= delta;
          }
        }
      }

      if (deltatype == 1) {
        break;
      } else if (deltatype == 2) {
        allowedge[deltaedge] = 1;
        Int i = static_cast<Int>(edges[deltaedge].u);
        Int j = static_cast<Int>(edges[deltaedge].v);
        if (label[inblossom[i]] == 0) std::swap(i, j);
        queue.push_back(i);
      } else if (deltatype == 3) {
        allowedge[deltaedge] = 1;
        queue.push_back(static_cast<Int>(edges[deltaedge].u));
      } else {
        expand_blossom(expand_blossom, deltablossom, false);
      }
    }
    if (!augmented) break;
    for (Int b = nv; b < 2 * nv; ++b) {
      if (blossomparent[b] == -1 && blossombase[b] >= 0 && label[b] == 1 && dualvar[b] == 0) {
        expand_blossom(expand_blossom, b, true);
      }
    }
  }

  for (Int v = 0; v < nv; ++v) {
    if (mate[v] >= 0) result[v] = static_cast<Index>(endpoint[mate[v]]);
  }
  return result;
}

}  // namespace blossom
}  // namespace rideshare

#endif  // RIDESHARE_BLOSSOM_HPP_
