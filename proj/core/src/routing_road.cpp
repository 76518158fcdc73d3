#include "mtrs/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mtrs::routing {

namespace {

constexpr Seconds kInf = std::numeric_limits<Seconds>::max() / 4;

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Location> vertices,
                         std::vector<RoadEdge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  adj_ = edges_;
  std::sort(adj_.begin(), adj_.end(), [](const RoadEdge& a, const RoadEdge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    if (a.travel_s != b.travel_s) return a.travel_s < b.travel_s;
    return a.distance_m < b.distance_m;
  });
  adj_offset_.assign(vertices_.size() + 1, 0);
  for (const RoadEdge& e : adj_) ++adj_offset_[e.from + 1];
  for (std::size_t i = 1; i < adj_offset_.size(); ++i)
    adj_offset_[i] += adj_offset_[i - 1];
}

std::span<const RoadEdge> RoadNetwork::out_edges(VertexId v) const {
  if (!has_vertex(v)) return {};
  return std::span<const RoadEdge>(adj_.data() + adj_offset_[v],
                                   adj_.data() + adj_offset_[v + 1]);
}

const Location& RoadNetwork::location(VertexId v) const {
  if (!has_vertex(v))
    throw OutOfBoundsError("road network has no vertex " + std::to_string(v));
  return vertices_[v];
}

namespace {

// Compares the canonical paths ending at u1 and u2. Both have the same hop
// count, so the comparison is a plain front-to-back lexicographic one walked
// through the parent chain.
int compare_paths(VertexId u1, VertexId u2,
                  const std::vector<VertexId>& parent) {
  if (u1 == u2) return 0;
  int c = compare_paths(parent[u1], parent[u2], parent);
  if (c != 0) return c;
  return u1 < u2 ? -1 : 1;
}

}  // namespace

RoadCache::Table RoadCache::build_table(const RoadNetwork& net,
                                        VertexId source) {
  const std::size_t n = net.vertex_count();
  Table t;
  t.time.assign(n, kInf);
  t.hops.assign(n, std::numeric_limits<std::int32_t>::max());
  t.parent.assign(n, -1);
  t.meters.assign(n, 0);
  if (!net.has_vertex(source)) return t;

  // Pass 1: fastest travel time.
  using Item = std::pair<Seconds, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  t.time[source] = 0;
  pq.emplace(0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != t.time[u]) continue;
    for (const RoadEdge& e : net.out_edges(u)) {
      Seconds nd = d + e.travel_s;
      if (nd < t.time[e.to]) {
        t.time[e.to] = nd;
        pq.emplace(nd, e.to);
      }
    }
  }

  // Order vertices by final time; edges tight on time go strictly forward in
  // this order because travel times are positive.
  std::vector<VertexId> order;
  order.reserve(n);
  for (VertexId v = 0; v < static_cast<VertexId>(n); ++v)
    if (t.time[v] < kInf) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    if (t.time[a] != t.time[b]) return t.time[a] < t.time[b];
    return a < b;
  });

  // Pass 2: fewest edges among time-optimal paths.
  t.hops[source] = 0;
  for (VertexId u : order) {
    if (t.hops[u] == std::numeric_limits<std::int32_t>::max()) continue;
    for (const RoadEdge& e : net.out_edges(u)) {
      if (t.time[u] + e.travel_s != t.time[e.to]) continue;
      if (t.hops[u] + 1 < t.hops[e.to]) t.hops[e.to] = t.hops[u] + 1;
    }
  }

  // Pass 3: lexicographically smallest vertex sequence among paths tight on
  // both time and hops; remembers the meters of the edge actually taken.
  std::vector<Meters> parent_edge_m(n, 0);
  for (VertexId u : order) {
    for (const RoadEdge& e : net.out_edges(u)) {
      VertexId v = e.to;
      if (t.time[u] + e.travel_s != t.time[v]) continue;
      if (t.hops[u] + 1 != t.hops[v]) continue;
      if (t.parent[v] == -1) {
        t.parent[v] = u;
        parent_edge_m[v] = e.distance_m;
        continue;
      }
      int c = compare_paths(u, t.parent[v], t.parent);
      if (c < 0 || (c == 0 && e.distance_m < parent_edge_m[v])) {
        t.parent[v] = u;
        parent_edge_m[v] = e.distance_m;
      }
    }
  }
  for (VertexId v : order) {
    if (v == source) continue;
    t.meters[v] = t.meters[t.parent[v]] + parent_edge_m[v];
  }
  return t;
}

const RoadCache::Table& RoadCache::table(VertexId source) {
  auto it = tables_.find(source);
  if (it == tables_.end())
    it = tables_.emplace(source, build_table(*net_, source)).first;
  return it->second;
}

void RoadCache::warm(VertexId source) { table(source); }

Seconds RoadCache::travel_s(VertexId from, VertexId to) {
  const Table& t = table(from);
  if (!net_->has_vertex(to) || t.time[to] >= kInf)
    throw UnreachableError("no route from vertex " + std::to_string(from) +
                           " to vertex " + std::to_string(to));
  return t.time[to];
}

Meters RoadCache::distance_m(VertexId from, VertexId to) {
  const Table& t = table(from);
  if (!net_->has_vertex(to) || t.time[to] >= kInf)
    throw UnreachableError("no route from vertex " + std::to_string(from) +
                           " to vertex " + std::to_string(to));
  return t.meters[to];
}

bool RoadCache::reachable(VertexId from, VertexId to) {
  if (!net_->has_vertex(from) || !net_->has_vertex(to)) return false;
  return table(from).time[to] < kInf;
}

PathResult RoadCache::path(VertexId from, VertexId to) {
  const Table& t = table(from);
  if (!net_->has_vertex(to) || t.time[to] >= kInf)
    throw UnreachableError("no route from vertex " + std::to_string(from) +
                           " to vertex " + std::to_string(to));
  PathResult r;
  r.travel_s = t.time[to];
  r.distance_m = t.meters[to];
  for (VertexId v = to; v != -1; v = v == from ? -1 : t.parent[v])
    r.path.push_back(v);
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

PathResult shortest_path(const RoadNetwork& net, const Location& o,
                         const Location& d) {
  if (!net.has_vertex(o.vertex) || !net.has_vertex(d.vertex))
    throw UnreachableError("endpoint vertex missing from network");
  RoadCache cache(net);
  return cache.path(o.vertex, d.vertex);
}

}  // namespace mtrs::routing
