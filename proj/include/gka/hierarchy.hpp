#ifndef GKA_HIERARCHY_HPP
#define GKA_HIERARCHY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gka/ast.hpp"
#include "gka/diagnostics.hpp"

namespace gka {

/// For an (ancestor, descendant) pair: each ancestor site mapped to the
/// set of descendant sites it becomes. An empty image means the site was
/// deleted along every derivation path; images larger than one arise
/// from duplication. Images of distinct sites are disjoint.
struct SiteMap {
  std::string source;
  std::string target;
  std::map<std::string, std::vector<std::string>> images;  // sorted images
};

/// Validated agent DAG. Roots carry declared signatures; every other
/// node's interface is computed by applying edge transforms to its
/// parents' interfaces and merging the per-parent results (alias nodes
/// must agree on shared sites). Immutable after build; all queries are
/// const and safe to run concurrently.
class Hierarchy {
 public:
  struct Edge {
    int parent = -1;
    int child = -1;
    std::vector<Transform> transforms;
    int line = 0;
  };

  struct Node {
    std::string name;
    bool is_root = false;
    std::vector<SiteSignature> interface;
    std::vector<int> parents;   // node ids, declaration order, deduplicated
    std::vector<int> children;  // node ids, deduplicated
    std::vector<int> in_edges;  // edge ids, declaration order

    const SiteSignature* find_site(const std::string& site) const;
  };

  int node_id(const std::string& name) const;  // -1 when unknown
  const Node& node(int id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Reflexive reachability along parent->child edges.
  bool reaches(int ancestor, int descendant) const;
  bool reaches(const std::string& ancestor, const std::string& descendant) const;

  /// Nodes with no children, in declaration order.
  std::vector<std::string> leaves() const;

  /// Nodes with two or more parents, in declaration order.
  std::vector<std::string> aliases() const;

  std::optional<SiteMap> site_map(const std::string& ancestor,
                                  const std::string& descendant,
                                  Diagnostics& diags) const;

  /// Members of `fringe` reachable from `agent` (including `agent`
  /// itself when listed), in `fringe` order.
  std::vector<std::string> fringe_descendants(
      const std::string& agent, const std::vector<std::string>& fringe) const;

  /// Effective interface as a declarable signature: the default state is
  /// moved to the front of each state list, so re-parsing the printed
  /// form preserves defaults.
  AgentSignature interface_signature(int id) const;

  /// Human-readable summary: topological order with interfaces, alias
  /// and leaf lists.
  std::string lint_report() const;

 private:
  friend std::optional<Hierarchy> build_hierarchy(
      const std::vector<AgentSignature>& signatures,
      const std::vector<VariantDecl>& variants, Diagnostics& diags);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, int> by_name_;
  std::vector<int> topo_;                   // topological order, node ids
  std::vector<std::vector<bool>> desc_;     // desc_[a][d]: a reaches d
};

std::optional<Hierarchy> build_hierarchy(
    const std::vector<AgentSignature>& signatures,
    const std::vector<VariantDecl>& variants, Diagnostics& diags);

/// Leaves of the DAG: the concrete agents used when no `%concrete:`
/// directive or --fringe override is given.
std::vector<std::string> default_fringe(const Hierarchy& h);

/// Errors on an empty or unknown-agent fringe; warns when one fringe
/// agent is an ancestor of another (the set is not an antichain).
void validate_fringe(const Hierarchy& h, const std::vector<std::string>& fringe,
                     Diagnostics& diags);

/// The concrete set actually compiled against: the requested agents plus
/// every leaf unrelated to all of them, so selecting one branch leaves
/// the rest of the model at its default resolution. An empty request
/// yields the default fringe.
std::vector<std::string> effective_fringe(const Hierarchy& h,
                                          const std::vector<std::string>& requested);

}  // namespace gka

#endif
