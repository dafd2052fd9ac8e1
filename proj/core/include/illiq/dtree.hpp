// Exhaustive verification of the measure-change identities on finite
// trees with exact rational arithmetic.
//
// The tree carries the Qcheck-side primitives: a non-negative process
// zcheck with zcheck = 1 at the root and Qcheck transition
// probabilities per edge.  The reference-measure weight of a
// root-to-leaf path is its Qcheck weight times the terminal zcheck
// (inverse construction scheme), and tau is the first level where
// zcheck hits 0.  In finite discrete time every local martingale is a
// true martingale, so the jump-to-zero dichotomy is embodied as
// "zcheck can jump to 0 with positive probability iff the terminal
// defect 1 - E_Q[Z_depth] is strictly positive".

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace illiq::dtree {

using Rational = boost::multiprecision::cpp_rational;

struct Node {
    int id = 0;
    Rational zcheck;
    std::vector<std::pair<int, Rational>> edges;  // (child id, Qcheck probability)
};

class DiscreteMarket {
  public:
    static constexpr int kMaxDepth = 12;

    static DiscreteMarket from_nodes(std::vector<Node> nodes, int root_id);

    // Line-oriented text format, one node per line:
    //   <id> <zcheck as p/q or integer> [<child_id>:<prob> ...]
    // '#' starts a comment; the first node line is the root.
    static DiscreteMarket parse(std::istream& in);
    static DiscreteMarket parse_file(const std::string& path);
    std::string to_text() const;

    // Bundled fixtures.
    static DiscreteMarket random_walk(int start, int depth);   // +-1 walk absorbed at 0
    static DiscreteMarket multiplicative(int depth);           // strictly positive x3/2, x1/2

    int depth() const { return depth_; }
    int root() const { return root_; }
    const Node& node(int id) const;
    const std::vector<Node>& nodes() const { return nodes_; }

    // Exact node-by-node martingale property of zcheck at every
    // non-absorbing node.
    bool is_zcheck_martingale(std::string* where = nullptr) const;

  private:
    void validate_structure();

    std::vector<Node> nodes_;
    std::vector<int> index_of_id_;
    int root_ = 0;
    int depth_ = 0;
};

// All root-to-leaf paths; absorbed paths are padded in place (absorbing
// nodes self-loop with probability one).
struct PathAtom {
    std::vector<int> node_ids;           // length depth + 1
    std::vector<Rational> zcheck_level;  // zcheck along the path, length depth + 1
    Rational qcheck_weight;
    Rational q_weight;   // qcheck_weight * terminal zcheck
    int tau_level = -1;  // first level with zcheck == 0; -1 = never
};

struct Enumeration {
    int depth = 0;
    std::vector<PathAtom> paths;

    Rational qcheck_prob_tau_gt(int level) const;
    Rational q_total() const;  // E_Q[1] = Qcheck[tau > depth] in weight terms
    Rational expected_z(int level) const;  // E_Q[Z_level]
};

// Throws std::invalid_argument when require_martingale is set and the
// tree violates the exact martingale invariant.
Enumeration enumerate_measures(const DiscreteMarket& market, bool require_martingale = true);

struct IdentityReport {
    bool ok = true;
    std::string violation;  // first counterexample, names the event and level(s)
    int checked_atoms = 0;
    int checked_bayes = 0;
};

// Exact checks of the density direction, the inverse direction and the
// generalized Bayes formula for indicator functionals, over every atom
// of the path sigma-algebra at every level (additivity extends the
// atom-wise equalities to all events).
IdentityReport verify_foellmer_identities(const DiscreteMarket& market);

enum class ZeroApproach { JumpsToZero, ReachesZeroContinuouslyOrNever };

const char* to_string(ZeroApproach z);

struct JumpReport {
    ZeroApproach classification = ZeroApproach::ReachesZeroContinuouslyOrNever;
    Rational defect;  // 1 - E_Q[Z_depth], exact
    std::string note;
};

JumpReport classify_jump_to_zero(const DiscreteMarket& market);

}  // namespace illiq::dtree
