#include "hcb/bijection.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hcb/exploration.hpp"

namespace hcb {

namespace {

int prev_dart(const std::vector<Dart>& d, int x) { return d[d[x].next].next; }

int target(const std::vector<Dart>& d, int x) { return d[d[x].next].origin; }

// Replaces the diagonal shared by the two faces of dart e with the other one.
// Face ids stay with their halves: face(e) keeps e and the dart after e's old
// successor, face(twin e) keeps twin e and the dart after its old successor.
void flip(std::vector<Dart>& d, int e) {
    const int f = d[e].twin;
    const int a1 = d[e].next, a2 = d[a1].next;
    const int b1 = d[f].next, b2 = d[b1].next;
    const int z = d[a2].origin, w = d[b2].origin;
    const int fa = d[e].face, fb = d[f].face;
    d[e].origin = w;
    d[f].origin = z;
    d[e].next = a2, d[a2].next = b1, d[b1].next = e;
    d[f].next = b2, d[b2].next = a1, d[a1].next = f;
    d[e].face = d[a2].face = d[b1].face = fa;
    d[f].face = d[b2].face = d[a1].face = fb;
}

struct Geometry {
    const std::vector<Dart>& darts;
    const std::vector<VertexKind>& kinds;

    bool is_diagonal(int x) const { return kinds[darts[x].origin] == kinds[target(darts, x)]; }
    int diagonal_of(int first) const {
        for (int x = first, k = 0; k < 3; x = darts[x].next, ++k)
            if (is_diagonal(x)) return x;
        throw std::logic_error("triangle without a diagonal");
    }
    // The Q-dart of the same face other than `in`.
    int other_q(int in) const {
        const int a = darts[in].next, b = darts[a].next;
        return is_diagonal(a) ? b : a;
    }
    // Loop from face(in) entered through dart `in`; returns faces in order.
    std::vector<int> loop_from(int in) const {
        std::vector<int> out;
        int cur = in;
        do {
            out.push_back(darts[cur].face);
            cur = darts[other_q(cur)].twin;
        } while (cur != in && out.size() <= darts.size());
        if (cur != in) throw std::logic_error("loop does not close");
        return out;
    }
};

std::vector<std::vector<int>> trace_loops(const std::vector<Dart>& darts, const std::vector<VertexKind>& kinds,
                                          std::size_t faces, int root, std::vector<int>& loop_of) {
    const Geometry g{darts, kinds};
    std::vector<std::vector<int>> loops;
    loop_of.assign(faces, -1);
    std::vector<int> face_dart(faces, -1);
    for (int x = 0; x < static_cast<int>(darts.size()); ++x)
        if (face_dart[darts[x].face] < 0) face_dart[darts[x].face] = x;
    const auto add = [&](int in) {
        std::vector<int> l = g.loop_from(in);
        for (int t : l) {
            if (loop_of[t] >= 0) throw std::logic_error("triangle crossed by two loops");
            loop_of[t] = static_cast<int>(loops.size());
        }
        loops.push_back(std::move(l));
    };
    add(darts[root].twin);
    for (std::size_t t = 0; t < faces; ++t) {
        if (loop_of[t] >= 0) continue;
        const int diag = g.diagonal_of(face_dart[t]);
        add(darts[diag].next);
    }
    return loops;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

std::string positions_str(const std::vector<std::size_t>& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? "," : "") + std::to_string(ps[i]);
    return s;
}

}  // namespace

NotEmptyReduction::NotEmptyReduction(const std::string& word, std::vector<std::size_t> unmatched)
    : std::invalid_argument("word " + word + " does not reduce to the empty word; unmatched positions " +
                            positions_str(unmatched)),
      unmatched_(std::move(unmatched)) {}

int LoopTriangulation::diagonal(int t) const {
    return Geometry{darts, vertices}.diagonal_of(triangles[t].darts[0]);
}

std::size_t LoopTriangulation::vertex_orbits() const {
    std::vector<char> seen(darts.size(), 0);
    std::vector<int> orbit_of_vertex(vertices.size(), -1);
    std::size_t orbits = 0;
    for (int s = 0; s < static_cast<int>(darts.size()); ++s) {
        if (seen[s]) continue;
        const int v = darts[s].origin;
        if (orbit_of_vertex[v] >= 0) throw std::logic_error("vertex " + std::to_string(v) + " is pinched");
        orbit_of_vertex[v] = static_cast<int>(orbits);
        for (int x = s; !seen[x]; x = darts[prev_dart(darts, x)].twin) {
            if (darts[x].origin != v) throw std::logic_error("dart orbit mixes vertices");
            seen[x] = 1;
        }
        ++orbits;
    }
    return orbits;
}

int LoopTriangulation::euler_characteristic() const {
    return static_cast<int>(vertex_orbits()) - static_cast<int>(darts.size() / 2) + static_cast<int>(triangles.size());
}

void LoopTriangulation::validate() const {
    const auto fail = [](const std::string& m) { throw std::logic_error("invalid triangulation: " + m); };
    if (darts.size() != 3 * triangles.size()) fail("dart count");
    if (triangles.empty() || triangles.size() % 2) fail("odd or zero triangle count");
    for (std::size_t i = 0; i < darts.size(); ++i) {
        const Dart& x = darts[i];
        if (x.twin < 0 || darts[x.twin].twin != static_cast<int>(i) || x.twin == static_cast<int>(i)) fail("twins");
        if (darts[x.twin].origin != target(darts, static_cast<int>(i))) fail("twin endpoints");
    }
    const Geometry g{darts, vertices};
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const Triangle& tr = triangles[t];
        int diagonals = 0;
        for (int k = 0; k < 3; ++k) {
            const int x = tr.darts[k];
            if (darts[x].face != static_cast<int>(t)) fail("face ids");
            if (darts[x].next != tr.darts[(k + 1) % 3]) fail("face cycle");
            diagonals += g.is_diagonal(x);
        }
        if (diagonals != 1) fail("triangle " + std::to_string(t) + " has " + std::to_string(diagonals) + " diagonals");
        const int diag = diagonal(static_cast<int>(t));
        const bool primal = vertices[darts[diag].origin] == VertexKind::primal;
        if (primal != (tr.type == TriangleType::primal)) fail("triangle type");
        if (tr.companion != darts[darts[diag].twin].face) fail("companion");
        if (triangles[tr.companion].companion != static_cast<int>(t)) fail("companion pairing");
    }
    if (root < 0 || vertices[darts[root].origin] != VertexKind::dual ||
        vertices[target(darts, root)] != VertexKind::primal)
        fail("root dart must run from a dual to a primal vertex");
    if (darts[darts[root].twin].face != 0) fail("root face");
    if (euler_characteristic() != 2) fail("Euler characteristic");
    std::vector<int> loop_of;
    const auto l = trace_loops(darts, vertices, triangles.size(), root, loop_of);
    if (l != loops) fail("stored loops");
    for (std::size_t t = 0; t < triangles.size(); ++t)
        if (triangles[t].loop != loop_of[t]) fail("loop ids");
}

LoopTriangulation word_to_triangulation(const Word& w) {
    const MatchTable m = match_positions(w);
    if (m.unmatched_count() > 0 || w.empty()) {
        std::vector<std::size_t> un;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!m.matched(i)) un.push_back(i);
        throw NotEmptyReduction(w.str(), std::move(un));
    }
    const std::size_t n = w.size();
    LoopTriangulation t;
    t.triangles.resize(n);
    t.darts.resize(3 * n);
    // Primal and dual vertices follow the contours of the h/H and c/C trees.
    std::vector<int> p(n + 1), d(n + 1);
    std::vector<int> ps{0}, ds{1};
    t.vertices = {VertexKind::primal, VertexKind::dual};
    p[0] = 0, d[0] = 1;
    std::vector<bool> primal(n);
    for (std::size_t i = 0; i < n; ++i) {
        Letter x = w[i];
        if (x == Letter::F) x = m.kind[i] == MatchKind::h ? Letter::H : Letter::C;
        primal[i] = x == Letter::h || x == Letter::H;
        p[i + 1] = p[i], d[i + 1] = d[i];
        if (x == Letter::h || x == Letter::c) {
            const int v = static_cast<int>(t.vertices.size());
            t.vertices.push_back(x == Letter::h ? VertexKind::primal : VertexKind::dual);
            (x == Letter::h ? ps : ds).push_back(v);
            (x == Letter::h ? p : d)[i + 1] = v;
        } else {
            auto& s = x == Letter::H ? ps : ds;
            s.pop_back();
            (x == Letter::H ? p : d)[i + 1] = s.back();
        }
    }
    std::vector<int> entry(n), exit(n), diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int b = static_cast<int>(3 * i);
        auto& tr = t.triangles[i];
        tr.position = i;
        tr.type = primal[i] ? TriangleType::primal : TriangleType::dual;
        entry[i] = b;
        if (primal[i]) {
            exit[i] = b + 1, diag[i] = b + 2;
            t.darts[b] = {p[i], -1, b + 1, int(i)};
            t.darts[b + 1] = {d[i], -1, b + 2, int(i)};
            t.darts[b + 2] = {p[i + 1], -1, b, int(i)};
        } else {
            diag[i] = b + 1, exit[i] = b + 2;
            t.darts[b] = {p[i], -1, b + 1, int(i)};
            t.darts[b + 1] = {d[i], -1, b + 2, int(i)};
            t.darts[b + 2] = {d[i + 1], -1, b, int(i)};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int e = entry[i], x = exit[(i + n - 1) % n];
        t.darts[e].twin = x, t.darts[x].twin = e;
        if (const auto j = m.partner(i); *j > i) {
            t.darts[diag[i]].twin = diag[*j], t.darts[diag[*j]].twin = diag[i];
        }
    }
    t.root = exit[n - 1];
    for (std::size_t j = 0; j < n; ++j) {
        if (w[j] != Letter::F) continue;
        const std::size_t i = *m.partner(j);
        flip(t.darts, diag[i]);
        // flip() keeps face ids with halves; give position i the half holding its entry dart.
        const bool entry_moved = t.darts[entry[i]].face != static_cast<int>(i);
        if (entry_moved)
            for (auto& x : t.darts)
                if (x.face == int(i) || x.face == int(j)) x.face = x.face == int(i) ? int(j) : int(i);
        for (std::size_t q : {i, j}) {
            auto& tr = t.triangles[q];
            tr.type = tr.type == TriangleType::primal ? TriangleType::dual : TriangleType::primal;
            tr.fictional = true;
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        int first = entry[q];
        if (t.darts[first].face != int(q)) {
            for (int x = 0; x < int(t.darts.size()); ++x)
                if (t.darts[x].face == int(q)) {
                    first = x;
                    break;
                }
        }
        t.triangles[q].darts = {first, t.darts[first].next, t.darts[t.darts[first].next].next};
    }
    for (std::size_t q = 0; q < n; ++q) t.triangles[q].companion = t.darts[t.darts[t.diagonal(int(q))].twin].face;
    std::vector<int> loop_of;
    t.loops = trace_loops(t.darts, t.vertices, n, t.root, loop_of);
    for (std::size_t q = 0; q < n; ++q) t.triangles[q].loop = loop_of[q];
    return t;
}

Word triangulation_to_word(const LoopTriangulation& t) {
    t.validate();
    const std::size_t n = t.size();
    std::vector<Dart> darts = t.darts;
    const Geometry g{darts, t.vertices};
    const auto companion = [&](int f) {
        int x = -1;
        for (int y = 0; y < int(darts.size()); ++y)
            if (darts[y].face == f && g.is_diagonal(y)) {
                x = y;
                break;
            }
        return std::pair{x, darts[darts[x].twin].face};
    };
    std::vector<char> flipped(n, 0);  // by lower triangle id of the quadrangle
    std::size_t loops = t.loop_count();
    while (true) {
        const std::vector<int> l0 = g.loop_from(darts[t.root].twin);
        if (l0.size() == n) break;
        std::vector<char> on(n, 0);
        for (int f : l0) on[f] = 1;
        int pick = -1;
        for (auto it = l0.rbegin(); it != l0.rend(); ++it) {
            if (!on[companion(*it).second]) {
                pick = *it;
                break;
            }
        }
        if (pick < 0 || loops <= 1) throw std::logic_error("triangulation_to_word: loops cannot be merged");
        const auto [diag, other] = companion(pick);
        flip(darts, diag);
        flipped[std::min(pick, other)] ^= 1;
        --loops;
    }
    const std::vector<int> order = g.loop_from(darts[t.root].twin);
    std::vector<std::size_t> visit(n);
    Word w;
    w.letters.reserve(n);
    std::vector<char> seen(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const int f = order[k];
        visit[f] = k;
        const auto [diag, other] = companion(f);
        const bool primal = t.vertices[darts[diag].origin] == VertexKind::primal;
        const int q = std::min(f, other);
        if (!seen[q]) {
            seen[q] = 1;
            w.letters.push_back(primal ? Letter::h : Letter::c);
        } else {
            w.letters.push_back(flipped[q] ? Letter::F : (primal ? Letter::H : Letter::C));
        }
    }
    const MatchTable m = match_positions(w);
    for (std::size_t k = 0; k < n; ++k) {
        const auto j = m.partner(k);
        if (!j || visit[companion(order[k]).second] != *j)
            throw std::logic_error("triangulation_to_word: quadrangles are not the stack matching of " + w.str());
    }
    return w;
}

std::size_t DecoratedMap::open_edges() const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.open; }));
}

DecoratedMap extract_fk_map(const LoopTriangulation& t) {
    t.validate();
    const auto& darts = t.darts;
    const Geometry g{darts, t.vertices};
    const std::size_t n = t.size();
    DecoratedMap m;
    std::vector<int> edge_of(n, -1);
    for (std::size_t f = 0; f < n; ++f) {
        const int c = t.triangles[f].companion;
        if (int(f) > c) continue;
        DecoratedMap::Edge e;
        e.quadrangle = int(f);
        const int diag = t.diagonal(int(f));
        e.open = t.vertices[darts[diag].origin] == VertexKind::primal;
        if (e.open) {
            e.u = darts[diag].origin, e.v = target(darts, diag);
        } else {
            const auto corner = [&](int face) {
                for (int x : t.triangles[face].darts)
                    if (t.vertices[darts[x].origin] == VertexKind::primal) return darts[x].origin;
                return -1;
            };
            e.u = corner(int(f)), e.v = corner(c);
        }
        edge_of[f] = edge_of[c] = static_cast<int>(m.edges.size());
        m.edges.push_back(e);
    }
    // Half-edges of m are the sectors of quadrangles at primal corners;
    // consecutive darts around a vertex share a sector when the edge between them is a diagonal.
    std::vector<int> sector_edge, sector_next;
    std::vector<std::vector<int>> sectors_of_edge(m.edges.size());
    std::vector<char> seen(darts.size(), 0);
    std::size_t primal_vertices = 0, dual_vertices = 0;
    for (int s = 0; s < int(darts.size()); ++s) {
        if (seen[s]) continue;
        const bool primal = t.vertices[darts[s].origin] == VertexKind::primal;
        ++(primal ? primal_vertices : dual_vertices);
        std::vector<int> orbit;
        for (int x = s; !seen[x]; x = darts[prev_dart(darts, x)].twin) seen[x] = 1, orbit.push_back(x);
        if (!primal) continue;
        // Start the scan just after a Q-edge so that sectors are contiguous.
        std::size_t start = 0;
        for (std::size_t k = 0; k < orbit.size(); ++k)
            if (!g.is_diagonal(prev_dart(darts, orbit[k]))) {
                start = k;
                break;
            }
        const int first_sector = static_cast<int>(sector_edge.size());
        for (std::size_t k = 0; k < orbit.size(); ++k) {
            const int x = orbit[(start + k) % orbit.size()];
            if (k > 0 && g.is_diagonal(prev_dart(darts, x))) continue;
            const int e = edge_of[darts[x].face];
            sectors_of_edge[e].push_back(static_cast<int>(sector_edge.size()));
            sector_edge.push_back(e);
            sector_next.push_back(static_cast<int>(sector_edge.size()));
        }
        sector_next.back() = first_sector;
    }
    for (const auto& s : sectors_of_edge)
        if (s.size() != 2) throw std::logic_error("extract_fk_map: edge without two sectors");
    std::vector<char> used(sector_edge.size(), 0);
    for (std::size_t s = 0; s < sector_edge.size(); ++s) {
        if (used[s]) continue;
        ++m.face_count;
        for (int x = int(s); !used[x];) {
            used[x] = 1;
            const auto& pair = sectors_of_edge[sector_edge[x]];
            x = sector_next[pair[0] == x ? pair[1] : pair[0]];
        }
    }
    m.vertex_count = primal_vertices;
    if (m.face_count != dual_vertices) throw std::logic_error("extract_fk_map: faces do not match dual vertices");
    m.root_edge = edge_of[0];
    m.root_vertex = target(darts, t.root);
    UnionFind open(t.vertices.size()), dual(t.vertices.size());
    for (std::size_t f = 0; f < n; ++f) {
        const int diag = t.diagonal(int(f));
        (t.triangles[f].type == TriangleType::primal ? open : dual).join(darts[diag].origin, target(darts, diag));
    }
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        if (t.vertices[v] == VertexKind::primal) m.open_clusters += open.find(int(v)) == int(v);
        else m.dual_clusters += dual.find(int(v)) == int(v);
    }
    return m;
}

ClusterMap cluster_of_F(const LoopTriangulation& t, std::size_t f_pos) {
    const Word w = triangulation_to_word(t);
    if (f_pos >= w.size() || w[f_pos] != Letter::F) throw std::invalid_argument("cluster_of_F: no F at that position");
    const MatchTable m = match_positions(w);
    ClusterMap c;
    c.side = m.kind[f_pos];
    const std::size_t start = *m.partner(f_pos);
    c.excursion = Word(std::vector<Letter>(w.letters.begin() + static_cast<std::ptrdiff_t>(start),
                                           w.letters.begin() + static_cast<std::ptrdiff_t>(f_pos) + 1));
    c.skeleton = skeleton(c.excursion);
    int f_tri = -1;
    for (std::size_t q = 0; q < t.size(); ++q)
        if (t.triangles[q].position == f_pos) f_tri = int(q);
    c.ring = t.loops[t.triangles[f_tri].loop];
    c.loop_length = c.ring.size();
    const TriangleType inside = c.side == MatchKind::h ? TriangleType::primal : TriangleType::dual;
    std::vector<char> on_ring(t.size(), 0), in(t.size(), 0);
    for (int f : c.ring) on_ring[f] = 1;
    std::vector<int> stack;
    for (int f : c.ring) {
        if (t.triangles[f].type != inside) continue;
        ++c.perimeter;
        if (!in[f]) in[f] = 1, c.cluster_triangles.push_back(f);
        const int across = t.triangles[f].companion;
        if (!on_ring[across] && !in[across]) in[across] = 1, stack.push_back(across);
    }
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        c.cluster_triangles.push_back(f);
        for (int x : t.triangles[f].darts) {
            const int g = t.darts[t.darts[x].twin].face;
            if (!on_ring[g] && !in[g]) in[g] = 1, stack.push_back(g);
        }
    }
    std::sort(c.cluster_triangles.begin(), c.cluster_triangles.end());
    return c;
}

std::string text_dump(const LoopTriangulation& t) {
    std::ostringstream os;
    for (const Triangle& tr : t.triangles)
        os << tr.position << ' ' << (tr.type == TriangleType::primal ? "primal" : "dual") << ' ' << tr.loop << ' '
           << t.triangles[tr.companion].position << '\n';
    return os.str();
}

}  // namespace hcb
