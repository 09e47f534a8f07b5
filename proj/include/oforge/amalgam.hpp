#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oforge/perm.hpp"

namespace oforge {

/// Input data for the amalgam G = A *_H P: a lobe group P acting on a finite
/// carrier with base point delta, an abstract vertex group A given as a
/// faithful permutation group, the edge group H = P_delta embedded into A by
/// generator-image pairs, and the arc seeding the lobe digraph.
struct AmalgamSpec {
    FiniteGroup lobe_group;                    // P
    Point delta = 0;
    std::vector<Permutation> edge_group_gens;  // generators of H, as elements of P
    FiniteGroup vertex_group;                  // A
    std::vector<std::pair<Permutation, Permutation>> embedding_gens;  // h in P -> image in A
    std::pair<Point, Point> lambda_arc{0, 1};
};

class ValidatedAmalgam;

/// Syllable of a normal form: a non-identity right-coset representative of H
/// in the tagged factor, referenced by transversal index.
struct Syllable {
    enum class Side : std::uint8_t { kVertexGroup, kLobeGroup };  // A / P
    Side side;
    int index;
    friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

/// Canonical alternating form h * t1 * ... * tk of an element of G, with
/// h in H (stored as an element of P) and the ti alternating non-identity
/// representatives from the two right transversals. Unique per element given
/// the amalgam's transversal rule (lexicographically least image list per
/// coset, identity first).
class NormalForm {
public:
    NormalForm(const ValidatedAmalgam& context, Permutation head,
               std::vector<Syllable> syllables);

    const Permutation& head() const { return head_; }
    const std::vector<Syllable>& syllables() const { return syllables_; }
    bool is_identity() const { return head_.is_identity() && syllables_.empty(); }
    std::string to_string(const ValidatedAmalgam& context) const;  // "h | A:i P:j ..."

    bool same_context(const NormalForm& other) const { return context_ == other.context_; }
    const void* context_token() const { return context_; }

private:
    const void* context_;  // amalgam base identity, for mixed-input detection
    Permutation head_;
    std::vector<Syllable> syllables_;

    friend bool operator==(const NormalForm& a, const NormalForm& b) {
        return a.context_ == b.context_ && a.head_ == b.head_ && a.syllables_ == b.syllables_;
    }
};

/// Free word over the two factors; the user-facing input form.
struct GroupWord {
    struct Letter {
        Syllable::Side side;
        Permutation element;
    };
    std::vector<Letter> letters;
};

/// The validated amalgam: carries the complete coset machinery of H in both
/// factors plus the selected lobe digraph. Immutable; copies share the
/// underlying tables.
class ValidatedAmalgam {
public:
    static ValidatedAmalgam validate(const AmalgamSpec& spec);

    /// Test-harness constructor: installs the coset machinery without the
    /// structural checks (primitivity, regularity, sizes). Only meaningful
    /// when H still equals the stabilizer of delta; used to study what the
    /// checks rule out.
    static ValidatedAmalgam validate_unchecked(const AmalgamSpec& spec);

    int multiplicity() const;  // m = [A : H]
    int lobe_size() const;     // |carrier of P|
    Point delta() const;
    std::pair<Point, Point> lambda_arc() const;
    const FiniteDigraph& lobe_digraph() const;  // Lambda
    const FiniteGroup& lobe_group() const;      // P
    const FiniteGroup& vertex_group() const;    // A

    /// Neighbor labels of delta in Lambda with arc directions
    /// (label, has_arc_out_of_delta, has_arc_into_delta). Sorted by label.
    const std::vector<std::tuple<Point, bool, bool>>& delta_adjacency() const;
    int degree_per_lobe() const { return static_cast<int>(delta_adjacency().size()); }
    int lambda_eccentricity() const;  // eccentricity of delta in Lambda (undirected)

    const std::vector<Permutation>& coset_reps_a() const;  // size m, identity first
    const std::vector<Permutation>& coset_reps_p() const;  // size |Delta|, identity first
    int coset_index_a(const Permutation& a) const;
    int coset_index_p(const Permutation& p) const;
    int coset_index_for_point(Point v) const;   // coset of {p : delta^p = v}
    Point point_for_coset(int index) const;

    const std::vector<Permutation>& edge_group_elements_p() const;  // H as elements of P
    Permutation embed_to_a(const Permutation& h_p) const;
    Permutation pull_to_p(const Permutation& h_a) const;
    bool in_edge_group_a(const Permutation& a) const;
    bool in_edge_group_p(const Permutation& p) const;

    /// A copy of this amalgam over the same base data with a different lobe
    /// arc. Normal forms and vertex addresses carry over unchanged.
    ValidatedAmalgam with_lambda_arc(std::pair<Point, Point> arc) const;

    /// Two amalgams share Omega (and normal-form machinery) iff their bases
    /// are the same object.
    bool same_base(const ValidatedAmalgam& other) const { return base_ == other.base_; }
    const void* base_token() const { return base_.get(); }

    // --- normal-form arithmetic ---
    NormalForm identity_form() const;
    NormalForm form_from_word(const GroupWord& word) const;
    NormalForm multiply(const NormalForm& x, const NormalForm& y) const;
    NormalForm invert(const NormalForm& x) const;
    bool equal(const NormalForm& x, const NormalForm& y) const;
    /// Fold a single letter into a normal form from the right.
    NormalForm multiply_letter(const NormalForm& x, Syllable::Side side,
                               const Permutation& element) const;
    NormalForm form_for_rep(const Syllable& s) const;  // the bare representative

    GroupWord word_of_form(const NormalForm& x) const;

    struct Base;  // defined in the implementation; opaque to callers

private:
    ValidatedAmalgam(std::shared_ptr<const Base> base, std::pair<Point, Point> arc);

    std::shared_ptr<const Base> base_;
    std::pair<Point, Point> lambda_arc_;
    FiniteDigraph lambda_;
    std::vector<std::tuple<Point, bool, bool>> delta_adjacency_;
    int lambda_ecc_ = 0;

    void check_context(const NormalForm& x) const;
};

}  // namespace oforge
