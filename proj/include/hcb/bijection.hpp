#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcb/word.hpp"

namespace hcb {

enum class VertexKind : std::uint8_t { primal, dual };
enum class TriangleType : std::uint8_t { primal, dual };

// Half-edge of the triangulation. Faces lie to the left of their darts.
struct Dart {
    int origin = -1;
    int twin = -1;
    int next = -1;  // next dart around the same face
    int face = -1;
};

struct Triangle {
    TriangleType type = TriangleType::primal;  // primal: two primal corners and a primal edge
    int loop = -1;
    std::size_t position = 0;  // letter of the word that glued it
    int companion = -1;        // the triangle across its non-Q edge
    bool fictional = false;    // diagonal flipped relative to the map with every F read as H or C
    std::array<int, 3> darts{};
};

// A triangulation of the sphere whose vertices are the primal and dual
// vertices of a map, with fully packed loops crossing every Q-edge (an edge
// joining a primal to a dual vertex). Triangle i is the one glued by letter i.
// The root dart runs from the root dual vertex to the root primal vertex;
// the face on its right, i.e. face(twin(root)), is triangle 0.
struct LoopTriangulation {
    std::vector<Dart> darts;
    std::vector<Triangle> triangles;
    std::vector<VertexKind> vertices;
    int root = -1;
    std::vector<std::vector<int>> loops;  // triangle ids in traversal order; loop 0 passes the root

    std::size_t size() const noexcept { return triangles.size(); }
    std::size_t quadrangles() const noexcept { return triangles.size() / 2; }
    std::size_t loop_count() const noexcept { return loops.size(); }
    // Dart of triangle t on its non-Q edge.
    int diagonal(int t) const;
    // Vertex count from dart orbits; throws if a vertex id appears in two orbits.
    std::size_t vertex_orbits() const;
    int euler_characteristic() const;
    // Throws std::logic_error describing the first violated invariant.
    void validate() const;
};

class NotEmptyReduction : public std::invalid_argument {
public:
    NotEmptyReduction(const std::string& word, std::vector<std::size_t> unmatched);
    const std::vector<std::size_t>& unmatched() const noexcept { return unmatched_; }

private:
    std::vector<std::size_t> unmatched_;
};

LoopTriangulation word_to_triangulation(const Word& w);
Word triangulation_to_word(const LoopTriangulation& t);

// The map m on the primal vertices with its distinguished edge subset.
struct DecoratedMap {
    struct Edge {
        int u = -1, v = -1;  // primal vertex ids of the triangulation
        bool open = false;   // in the subset p
        int quadrangle = -1; // lower triangle id of the quadrangle carrying it
    };
    std::size_t vertex_count = 0;
    std::size_t face_count = 0;
    std::vector<Edge> edges;
    int root_edge = -1;  // oriented from root_vertex
    int root_vertex = -1;
    std::size_t open_clusters = 0;  // components of (V, p)
    std::size_t dual_clusters = 0;  // components of the dual of the closed edges
    std::size_t open_edges() const;
    int euler_characteristic() const {
        return static_cast<int>(vertex_count) - static_cast<int>(edges.size()) + static_cast<int>(face_count);
    }
};

DecoratedMap extract_fk_map(const LoopTriangulation& t);

// The cluster enclosed by the loop through the F at `f_pos`.
struct ClusterMap {
    MatchKind side = MatchKind::h;     // the burger type that F consumed
    std::size_t loop_length = 0;       // triangles on the loop
    std::size_t perimeter = 0;         // loop triangles whose non-Q edge bounds the cluster
    Word excursion;                    // the F-excursion ending at f_pos
    Word skeleton;
    std::vector<int> ring;             // loop triangles in traversal order
    std::vector<int> cluster_triangles;  // triangles with an edge in the cluster
};

ClusterMap cluster_of_F(const LoopTriangulation& t, std::size_t f_pos);

// One line per triangle: "pos type loop-id companion".
std::string text_dump(const LoopTriangulation& t);
// Presentation-only drawing: primal vertices left, dual vertices right, loops through triangle centres.
std::string render_svg(const LoopTriangulation& t);

}  // namespace hcb
