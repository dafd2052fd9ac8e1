#include "illiq/dtree.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace illiq::dtree {

namespace {

Rational parse_rational(const std::string& tok, int line_no) {
    const auto slash = tok.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(boost::multiprecision::cpp_int(tok));
        }
        const boost::multiprecision::cpp_int num(tok.substr(0, slash));
        const boost::multiprecision::cpp_int den(tok.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("tree line " + std::to_string(line_no) +
                                    ": bad rational '" + tok + "'");
    }
}

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string path_str(const std::vector<int>& ids, int upto) {
    std::string s;
    for (int i = 0; i <= upto; ++i) {
        if (i) s += "->";
        s += std::to_string(ids[static_cast<std::size_t>(i)]);
    }
    return s;
}

}  // namespace

const Node& DiscreteMarket::node(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= index_of_id_.size() ||
        index_of_id_[static_cast<std::size_t>(id)] < 0) {
        throw std::invalid_argument("DiscreteMarket: unknown node id " + std::to_string(id));
    }
    return nodes_[static_cast<std::size_t>(index_of_id_[static_cast<std::size_t>(id)])];
}

DiscreteMarket DiscreteMarket::from_nodes(std::vector<Node> nodes, int root_id) {
    DiscreteMarket m;
    m.nodes_ = std::move(nodes);
    m.root_ = root_id;
    int max_id = -1;
    for (const auto& n : m.nodes_) max_id = std::max(max_id, n.id);
    m.index_of_id_.assign(static_cast<std::size_t>(max_id + 1), -1);
    for (std::size_t i = 0; i < m.nodes_.size(); ++i) {
        if (m.nodes_[i].id < 0) throw std::invalid_argument("DiscreteMarket: negative node id");
        auto& slot = m.index_of_id_[static_cast<std::size_t>(m.nodes_[i].id)];
        if (slot >= 0) {
            throw std::invalid_argument("DiscreteMarket: duplicate node id " +
                                        std::to_string(m.nodes_[i].id));
        }
        slot = static_cast<int>(i);
    }
    m.validate_structure();
    return m;
}

void DiscreteMarket::validate_structure() {
    if (nodes_.empty()) throw std::invalid_argument("DiscreteMarket: no nodes");
    if (node(root_).zcheck != 1) {
        throw std::invalid_argument("DiscreteMarket: root zcheck must equal 1");
    }
    for (const auto& n : nodes_) {
        if (n.zcheck < 0) throw std::invalid_argument("DiscreteMarket: negative zcheck");
        if (n.zcheck == 0 && !n.edges.empty()) {
            throw std::invalid_argument(
                "DiscreteMarket: absorbed node " + std::to_string(n.id) +
                " must have no children (it self-loops)");
        }
        if (!n.edges.empty()) {
            Rational total = 0;
            for (const auto& [child, prob] : n.edges) {
                node(child);  // existence
                if (prob < 0) throw std::invalid_argument("DiscreteMarket: negative probability");
                total += prob;
            }
            if (total != 1) {
                throw std::invalid_argument("DiscreteMarket: probabilities at node " +
                                            std::to_string(n.id) + " sum to " +
                                            rational_str(total) + ", not 1");
            }
        }
    }
    // Depth = distance to the non-absorbing leaves; all of them must agree.
    int depth = -1;
    std::vector<std::pair<int, int>> stack{{root_, 0}};  // (id, level)
    int max_level = 0;
    while (!stack.empty()) {
        auto [id, level] = stack.back();
        stack.pop_back();
        max_level = std::max(max_level, level);
        if (level > kMaxDepth) {
            throw std::invalid_argument("DiscreteMarket: depth cap " +
                                        std::to_string(kMaxDepth) + " exceeded");
        }
        const Node& n = node(id);
        if (n.edges.empty()) {
            if (n.zcheck != 0) {
                if (depth >= 0 && depth != level) {
                    throw std::invalid_argument(
                        "DiscreteMarket: non-absorbing leaves at different depths");
                }
                depth = level;
            }
        } else {
            for (const auto& [child, prob] : n.edges) {
                (void)prob;
                stack.emplace_back(child, level + 1);
            }
        }
    }
    depth_ = (depth >= 0) ? depth : max_level;
}

DiscreteMarket DiscreteMarket::parse(std::istream& in) {
    std::vector<Node> nodes;
    std::string line;
    int line_no = 0;
    int root = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank
        Node n;
        try {
            n.id = std::stoi(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("tree line " + std::to_string(line_no) +
                                        ": bad node id '" + tok + "'");
        }
        if (!(ls >> tok)) {
            throw std::invalid_argument("tree line " + std::to_string(line_no) +
                                        ": missing zcheck value");
        }
        n.zcheck = parse_rational(tok, line_no);
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw std::invalid_argument("tree line " + std::to_string(line_no) +
                                            ": expected <child>:<prob>, got '" + tok + "'");
            }
            int child;
            try {
                child = std::stoi(tok.substr(0, colon));
            } catch (const std::exception&) {
                throw std::invalid_argument("tree line " + std::to_string(line_no) +
                                            ": bad child id in '" + tok + "'");
            }
            n.edges.emplace_back(child, parse_rational(tok.substr(colon + 1), line_no));
        }
        if (root < 0) root = n.id;
        nodes.push_back(std::move(n));
    }
    if (root < 0) throw std::invalid_argument("tree file: no node lines");
    return from_nodes(std::move(nodes), root);
}

DiscreteMarket DiscreteMarket::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("tree file: cannot open '" + path + "'");
    return parse(in);
}

std::string DiscreteMarket::to_text() const {
    std::ostringstream os;
    // Root first, then the remaining nodes in id order.
    std::vector<const Node*> ordered;
    ordered.push_back(&node(root_));
    for (const auto& n : nodes_) {
        if (n.id != root_) ordered.push_back(&n);
    }
    for (const Node* n : ordered) {
        os << n->id << ' ' << n->zcheck;
        for (const auto& [child, prob] : n->edges) os << ' ' << child << ':' << prob;
        os << '\n';
    }
    return os.str();
}

namespace {

void build_walk(std::vector<Node>& nodes, int& next_id, int id, int value, int level, int depth) {
    Node n;
    n.id = id;
    n.zcheck = value;
    if (value > 0 && level < depth) {
        const int down = next_id++;
        const int up = next_id++;
        n.edges = {{down, Rational(1, 2)}, {up, Rational(1, 2)}};
        nodes.push_back(n);
        build_walk(nodes, next_id, down, value - 1, level + 1, depth);
        build_walk(nodes, next_id, up, value + 1, level + 1, depth);
    } else {
        nodes.push_back(n);
    }
}

void build_mult(std::vector<Node>& nodes, int& next_id, int id, Rational value, int level,
                int depth) {
    Node n;
    n.id = id;
    n.zcheck = value;
    if (level < depth) {
        const int down = next_id++;
        const int up = next_id++;
        n.edges = {{down, Rational(1, 2)}, {up, Rational(1, 2)}};
        nodes.push_back(n);
        build_mult(nodes, next_id, down, value / 2, level + 1, depth);
        build_mult(nodes, next_id, up, value * 3 / 2, level + 1, depth);
    } else {
        nodes.push_back(n);
    }
}

}  // namespace

DiscreteMarket DiscreteMarket::random_walk(int start, int depth) {
    if (start < 1) throw std::invalid_argument("random_walk: start must be >= 1");
    std::vector<Node> nodes;
    int next_id = 1;
    build_walk(nodes, next_id, 0, start, 0, depth);
    // Normalize the root to 1 by scaling every value: zcheck/start.
    for (auto& n : nodes) n.zcheck /= start;
    return from_nodes(std::move(nodes), 0);
}

DiscreteMarket DiscreteMarket::multiplicative(int depth) {
    std::vector<Node> nodes;
    int next_id = 1;
    build_mult(nodes, next_id, 0, Rational(1), 0, depth);
    return from_nodes(std::move(nodes), 0);
}

bool DiscreteMarket::is_zcheck_martingale(std::string* where) const {
    for (const auto& n : nodes_) {
        if (n.edges.empty()) continue;
        Rational e = 0;
        for (const auto& [child, prob] : n.edges) e += prob * node(child).zcheck;
        if (e != n.zcheck) {
            if (where) {
                *where = "node " + std::to_string(n.id) + ": E[zcheck_next] = " +
                         rational_str(e) + " != " + rational_str(n.zcheck);
            }
            return false;
        }
    }
    return true;
}

Rational Enumeration::qcheck_prob_tau_gt(int level) const {
    Rational s = 0;
    for (const auto& p : paths) {
        if (p.tau_level < 0 || p.tau_level > level) s += p.qcheck_weight;
    }
    return s;
}

Rational Enumeration::q_total() const {
    // Total Q-mass; equals 1 exactly on martingale trees.
    Rational s = 0;
    for (const auto& p : paths) s += p.q_weight;
    return s;
}

Rational Enumeration::expected_z(int level) const {
    // E_Q[Z_level] = sum over paths of q_weight / zcheck_level; q_weight
    // vanishes on absorbed paths, where 1/zcheck is taken as 0.
    Rational s = 0;
    for (const auto& p : paths) {
        if (p.q_weight == 0) continue;
        s += p.q_weight / p.zcheck_level[static_cast<std::size_t>(level)];
    }
    return s;
}

namespace {

void enumerate_rec(const DiscreteMarket& m, int id, int level, std::vector<int>& trail,
                   Rational weight, int tau_level, Enumeration& out) {
    const Node& n = m.node(id);
    trail.push_back(id);
    if (tau_level < 0 && n.zcheck == 0) tau_level = level;
    if (n.edges.empty() || level == m.depth()) {
        PathAtom atom;
        // Pad absorbed paths to full depth (self-loop).
        atom.node_ids = trail;
        while (static_cast<int>(atom.node_ids.size()) <= m.depth()) {
            atom.node_ids.push_back(id);
        }
        atom.zcheck_level.reserve(atom.node_ids.size());
        for (int nid : atom.node_ids) atom.zcheck_level.push_back(m.node(nid).zcheck);
        atom.qcheck_weight = weight;
        atom.q_weight = weight * n.zcheck;
        atom.tau_level = tau_level;
        out.paths.push_back(std::move(atom));
    } else {
        for (const auto& [child, prob] : n.edges) {
            if (prob == 0) continue;
            enumerate_rec(m, child, level + 1, trail, weight * prob, tau_level, out);
        }
    }
    trail.pop_back();
}

}  // namespace

Enumeration enumerate_measures(const DiscreteMarket& market, bool require_martingale) {
    if (require_martingale) {
        std::string where;
        if (!market.is_zcheck_martingale(&where)) {
            throw std::invalid_argument("enumerate_measures: zcheck is not a martingale (" +
                                        where + ")");
        }
    }
    Enumeration out;
    out.depth = market.depth();
    std::vector<int> trail;
    enumerate_rec(market, market.root(), 0, trail, Rational(1), -1, out);
    return out;
}

IdentityReport verify_foellmer_identities(const DiscreteMarket& market) {
    IdentityReport rep;
    const Enumeration e = enumerate_measures(market, /*require_martingale=*/false);
    const int depth = e.depth;

    auto zcheck_at = [&](const PathAtom& p, int level) -> const Rational& {
        return market.node(p.node_ids[static_cast<std::size_t>(level)]).zcheck;
    };

    // Group paths into atoms by their length-t prefix.  Paths come out
    // of the DFS in lexicographic order, so prefix groups are runs.
    struct Atom {
        std::size_t first, last;  // path index range [first, last)
    };
    auto atoms_at = [&](int level) {
        std::vector<Atom> atoms;
        std::size_t i = 0;
        while (i < e.paths.size()) {
            std::size_t j = i + 1;
            while (j < e.paths.size() &&
                   std::equal(e.paths[i].node_ids.begin(),
                              e.paths[i].node_ids.begin() + level + 1,
                              e.paths[j].node_ids.begin())) {
                ++j;
            }
            atoms.push_back({i, j});
            i = j;
        }
        return atoms;
    };

    for (int t = 0; t <= depth && rep.ok; ++t) {
        for (const Atom& a : atoms_at(t)) {
            ++rep.checked_atoms;
            const PathAtom& head = e.paths[a.first];
            const Rational& zc = zcheck_at(head, t);
            Rational qcheck_A = 0, q_A = 0;
            for (std::size_t i = a.first; i < a.last; ++i) {
                qcheck_A += e.paths[i].qcheck_weight;
                q_A += e.paths[i].q_weight;
            }
            // Density direction: Qcheck[A, tau > t] = E_Q[Z_t 1_A].
            const Rational lhs1 = (zc > 0) ? qcheck_A : Rational(0);
            const Rational rhs1 = (zc > 0) ? Rational(q_A / zc) : Rational(0);
            if (lhs1 != rhs1) {
                rep.ok = false;
                rep.violation = "density direction violated at t=" + std::to_string(t) +
                                ", atom " + path_str(head.node_ids, t) + ": Qcheck[A,tau>t]=" +
                                rational_str(lhs1) + " vs E_Q[Z_t 1_A]=" + rational_str(rhs1);
                break;
            }
            // Inverse direction: Q[A, Z_t > 0] = E_Qcheck[Zcheck_t 1_A].
            const Rational rhs2 = qcheck_A * zc;
            if (q_A != rhs2) {
                rep.ok = false;
                rep.violation = "inverse direction violated at t=" + std::to_string(t) +
                                ", atom " + path_str(head.node_ids, t) + ": Q[A]=" +
                                rational_str(q_A) + " vs E_Qcheck[Zcheck_t 1_A]=" +
                                rational_str(rhs2);
                break;
            }
        }
    }

    // Generalized Bayes formula for indicator functionals H_T = 1_A,
    // conditioned on every level-t atom B with positive Qcheck mass:
    //   1{Z_t>0} E_Qcheck[1_A 1{tau>T} | B] = Zcheck_t(B) E_Q[Z_T 1_A | B].
    for (int t = 0; t <= depth && rep.ok; ++t) {
        const auto atoms_t = atoms_at(t);
        for (int T = t; T <= depth && rep.ok; ++T) {
            for (const Atom& b : atoms_t) {
                const PathAtom& bhead = e.paths[b.first];
                const Rational& zc_b = zcheck_at(bhead, t);
                if (zc_b == 0) continue;  // both sides vanish
                Rational qcheck_B = 0, q_B = 0;
                for (std::size_t i = b.first; i < b.last; ++i) {
                    qcheck_B += e.paths[i].qcheck_weight;
                    q_B += e.paths[i].q_weight;
                }
                if (qcheck_B == 0) continue;
                // Sub-atoms of B at level T.
                std::size_t i = b.first;
                while (i < b.last) {
                    std::size_t j = i + 1;
                    while (j < b.last &&
                           std::equal(e.paths[i].node_ids.begin(),
                                      e.paths[i].node_ids.begin() + T + 1,
                                      e.paths[j].node_ids.begin())) {
                        ++j;
                    }
                    ++rep.checked_bayes;
                    const Rational& zc_a = zcheck_at(e.paths[i], T);
                    Rational qcheck_AB = 0, q_AB = 0;
                    for (std::size_t k = i; k < j; ++k) {
                        qcheck_AB += e.paths[k].qcheck_weight;
                        q_AB += e.paths[k].q_weight;
                    }
                    const Rational lhs = (zc_a > 0) ? Rational(qcheck_AB / qcheck_B)
                                                    : Rational(0);
                    Rational rhs = 0;
                    if (q_B != 0 && zc_a > 0) {
                        rhs = zc_b * (q_AB / zc_a) / q_B;
                    } else if (q_B != 0) {
                        rhs = 0;  // q_AB vanishes with zc_a == 0
                    }
                    if (lhs != rhs) {
                        rep.ok = false;
                        rep.violation =
                            "Bayes formula violated at (t=" + std::to_string(t) +
                            ", T=" + std::to_string(T) + "), B=" + path_str(bhead.node_ids, t) +
                            ", A=" + path_str(e.paths[i].node_ids, T) + ": lhs=" +
                            rational_str(lhs) + " vs rhs=" + rational_str(rhs);
                        break;
                    }
                    i = j;
                }
            }
        }
    }
    return rep;
}

const char* to_string(ZeroApproach z) {
    return z == ZeroApproach::JumpsToZero ? "JumpsToZero" : "ReachesZeroContinuouslyOrNever";
}

JumpReport classify_jump_to_zero(const DiscreteMarket& market) {
    JumpReport rep;
    for (const auto& n : market.nodes()) {
        if (n.zcheck == 0) continue;
        for (const auto& [child, prob] : n.edges) {
            if (prob > 0 && market.node(child).zcheck == 0) {
                rep.classification = ZeroApproach::JumpsToZero;
            }
        }
    }
    const Enumeration e = enumerate_measures(market, /*require_martingale=*/false);
    rep.defect = 1 - e.expected_z(market.depth());
    rep.note =
        "finite discrete time: jump-to-zero is equivalent to a strictly positive terminal "
        "defect 1 - E_Q[Z_depth] = " +
        rational_str(rep.defect);
    return rep;
}

}  // namespace illiq::dtree
