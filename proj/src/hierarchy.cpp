#include "gka/hierarchy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "gka/print.hpp"

namespace gka {

const SiteSignature* Hierarchy::Node::find_site(const std::string& site) const {
  for (const auto& s : interface)
    if (s.name == site) return &s;
  return nullptr;
}

int Hierarchy::node_id(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

bool Hierarchy::reaches(int ancestor, int descendant) const {
  return desc_[ancestor][descendant];
}

bool Hierarchy::reaches(const std::string& ancestor,
                        const std::string& descendant) const {
  int a = node_id(ancestor), d = node_id(descendant);
  return a >= 0 && d >= 0 && reaches(a, d);
}

std::vector<std::string> Hierarchy::leaves() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n.children.empty()) out.push_back(n.name);
  return out;
}

std::vector<std::string> Hierarchy::aliases() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n.parents.size() >= 2) out.push_back(n.name);
  return out;
}

std::vector<std::string> Hierarchy::fringe_descendants(
    const std::string& agent, const std::vector<std::string>& fringe) const {
  std::vector<std::string> out;
  int a = node_id(agent);
  if (a < 0) return out;
  for (const auto& f : fringe) {
    int fid = node_id(f);
    if (fid >= 0 && reaches(a, fid)) out.push_back(f);
  }
  return out;
}

AgentSignature Hierarchy::interface_signature(int id) const {
  const Node& n = nodes_[id];
  AgentSignature sig;
  sig.name = n.name;
  for (const auto& site : n.interface) {
    SiteSignature s = site;
    if (s.default_state && !s.states.empty() && s.states[0] != *s.default_state) {
      auto it = std::find(s.states.begin(), s.states.end(), *s.default_state);
      if (it != s.states.end()) s.states.erase(it);
      s.states.insert(s.states.begin(), *s.default_state);
    }
    sig.sites.push_back(std::move(s));
  }
  return sig;
}

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string image_text(const std::vector<std::string>& image) {
  return "{" + join(image, " ") + "}";
}

// Applies one edge's transforms to a copy of the parent interface.
// Returns nullopt after reporting the offending transform.
std::optional<std::vector<SiteSignature>> apply_transforms(
    const std::string& parent, const std::string& child,
    const std::vector<SiteSignature>& base, const std::vector<Transform>& ts,
    int line, Diagnostics& diags) {
  std::vector<SiteSignature> iface = base;
  auto find = [&](const std::string& site) {
    return std::find_if(iface.begin(), iface.end(),
                        [&](const SiteSignature& s) { return s.name == site; });
  };
  for (const auto& t : ts) {
    switch (t.kind) {
      case Transform::Kind::Delete: {
        auto it = find(t.site);
        if (it == iface.end()) {
          diags.error(line, 1, "unknown site '" + t.site + "': '" + parent +
                                   "' has no such site to delete in '" +
                                   child + "'");
          return std::nullopt;
        }
        iface.erase(it);
        break;
      }
      case Transform::Kind::Rename:
      case Transform::Kind::Duplicate: {
        auto it = find(t.site);
        if (it == iface.end()) {
          diags.error(line, 1, "unknown site '" + t.site + "': '" + parent +
                                   "' has no such site to replace in '" +
                                   child + "'");
          return std::nullopt;
        }
        SiteSignature original = *it;
        std::size_t pos = static_cast<std::size_t>(it - iface.begin());
        iface.erase(it);
        std::vector<SiteSignature> copies;
        for (const auto& name : t.new_names) {
          if (find(name) != iface.end()) {
            diags.error(line, 1, "replacement site '" + name + "' collides "
                                     "with an existing site of '" + child +
                                     "'");
            return std::nullopt;
          }
          SiteSignature copy = original;
          copy.name = name;
          copies.push_back(std::move(copy));
        }
        iface.insert(iface.begin() + pos, copies.begin(), copies.end());
        break;
      }
      case Transform::Kind::Add: {
        if (find(t.added.name) != iface.end()) {
          diags.error(line, 1, "added site '" + t.added.name +
                                   "' already exists on '" + child + "'");
          return std::nullopt;
        }
        iface.push_back(t.added);
        break;
      }
      case Transform::Kind::DefaultOverride: {
        auto it = find(t.site);
        if (it == iface.end()) {
          diags.error(line, 1, "unknown site '" + t.site + "': '" + parent +
                                   "' has no such site to re-default in '" +
                                   child + "'");
          return std::nullopt;
        }
        if (!it->carries_state()) {
          diags.error(line, 1, "site '" + t.site + "' of '" + parent +
                                   "' carries no internal state; '" +
                                   t.new_default + "' is outside its state set");
          return std::nullopt;
        }
        if (std::find(it->states.begin(), it->states.end(), t.new_default) ==
            it->states.end())
          it->states.push_back(t.new_default);
        it->default_state = t.new_default;
        break;
      }
    }
  }
  return iface;
}

bool same_state_set(const SiteSignature& a, const SiteSignature& b) {
  std::set<std::string> sa(a.states.begin(), a.states.end());
  std::set<std::string> sb(b.states.begin(), b.states.end());
  return sa == sb;
}

}  // namespace

std::optional<Hierarchy> build_hierarchy(
    const std::vector<AgentSignature>& signatures,
    const std::vector<VariantDecl>& variants, Diagnostics& diags) {
  Hierarchy h;
  auto add_node = [&](const std::string& name) {
    auto [it, fresh] = h.by_name_.try_emplace(name, (int)h.nodes_.size());
    if (fresh) {
      Hierarchy::Node n;
      n.name = name;
      h.nodes_.push_back(std::move(n));
    }
    return it->second;
  };
  for (const auto& sig : signatures) {
    int id = add_node(sig.name);
    h.nodes_[id].is_root = true;
    h.nodes_[id].interface = sig.sites;
  }
  for (const auto& v : variants) {
    if (h.node_id(v.parent) < 0) {
      diags.error(v.line, 1, "unknown parent agent '" + v.parent + "'");
      return std::nullopt;
    }
    int child = add_node(v.child);
    int parent = h.node_id(v.parent);
    if (h.nodes_[child].is_root) {
      diags.error(v.line, 1, "agent '" + v.child +
                                 "' is declared ab initio and cannot also "
                                 "derive from '" + v.parent + "'");
      return std::nullopt;
    }
    int edge_id = (int)h.edges_.size();
    h.edges_.push_back({parent, child, v.transforms, v.line});
    h.nodes_[child].in_edges.push_back(edge_id);
    auto& ps = h.nodes_[child].parents;
    if (std::find(ps.begin(), ps.end(), parent) == ps.end())
      ps.push_back(parent);
    auto& cs = h.nodes_[parent].children;
    if (std::find(cs.begin(), cs.end(), child) == cs.end())
      cs.push_back(child);
  }

  // Kahn topological order; leftovers identify a cycle.
  std::vector<int> indegree(h.nodes_.size(), 0);
  for (const auto& e : h.edges_) ++indegree[e.child];
  std::vector<int> queue;
  for (std::size_t i = 0; i < h.nodes_.size(); ++i)
    if (indegree[i] == 0) queue.push_back((int)i);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int n = queue[head];
    h.topo_.push_back(n);
    for (const auto& e : h.edges_)
      if (e.parent == n && --indegree[e.child] == 0) queue.push_back(e.child);
  }
  if (h.topo_.size() != h.nodes_.size()) {
    std::vector<std::string> cycle;
    for (std::size_t i = 0; i < h.nodes_.size(); ++i)
      if (indegree[i] > 0) cycle.push_back(h.nodes_[i].name);
    diags.error(0, 0, "agent hierarchy contains a cycle through: " +
                          join(cycle, ", "));
    return std::nullopt;
  }

  // Non-root nodes without parents were never declared.
  for (const auto& n : h.nodes_)
    if (!n.is_root && n.parents.empty()) {
      diags.error(0, 0, "agent '" + n.name + "' has no declaration");
      return std::nullopt;
    }

  // Effective interfaces, parents first. Alias nodes fold their
  // per-parent interfaces together; shared site names must agree on
  // state set and default.
  for (int id : h.topo_) {
    Hierarchy::Node& n = h.nodes_[id];
    if (n.is_root) continue;
    bool first = true;
    for (int edge_id : n.in_edges) {
      const Hierarchy::Edge& e = h.edges_[edge_id];
      auto iface = apply_transforms(h.nodes_[e.parent].name, n.name,
                                    h.nodes_[e.parent].interface,
                                    e.transforms, e.line, diags);
      if (!iface) return std::nullopt;
      if (first) {
        n.interface = std::move(*iface);
        first = false;
        continue;
      }
      for (const auto& site : *iface) {
        const SiteSignature* existing = n.find_site(site.name);
        if (!existing) {
          n.interface.push_back(site);
          continue;
        }
        if (!same_state_set(*existing, site) ||
            existing->default_state != site.default_state) {
          diags.error(e.line, 1,
                      "alias interface conflict: site '" + site.name +
                          "' of '" + n.name +
                          "' differs in states or default between parents");
          return std::nullopt;
        }
      }
    }
    std::set<std::string> seen;
    for (const auto& site : n.interface)
      if (!seen.insert(site.name).second) {
        diags.error(0, 0, "interface of '" + n.name +
                              "' ends up with two sites named '" + site.name +
                              "'");
        return std::nullopt;
      }
  }

  // Reflexive descendant sets, children folded in reverse topo order.
  h.desc_.assign(h.nodes_.size(), std::vector<bool>(h.nodes_.size(), false));
  for (auto it = h.topo_.rbegin(); it != h.topo_.rend(); ++it) {
    int n = *it;
    h.desc_[n][n] = true;
    for (int c : h.nodes_[n].children)
      for (std::size_t d = 0; d < h.nodes_.size(); ++d)
        if (h.desc_[c][d]) h.desc_[n][d] = true;
  }
  return h;
}

std::optional<SiteMap> Hierarchy::site_map(const std::string& ancestor,
                                           const std::string& descendant,
                                           Diagnostics& diags) const {
  int a = node_id(ancestor), d = node_id(descendant);
  if (a < 0 || d < 0 || !reaches(a, d)) {
    diags.error(0, 0, "'" + ancestor + "' is not an ancestor of '" +
                          descendant + "'");
    return std::nullopt;
  }

  // Per node and ancestor site, the set of distinct path images seen so
  // far. Identical paths collapse; the coherence check at the target is
  // pairwise over the surviving image sets.
  using ImageSets = std::map<std::string, std::set<std::vector<std::string>>>;
  std::vector<ImageSets> data(nodes_.size());
  for (const auto& site : nodes_[a].interface)
    data[a][site.name].insert({site.name});

  for (int n : topo_) {
    if (n == a || !reaches(a, n) || !reaches(n, d)) continue;
    for (int edge_id : nodes_[n].in_edges) {
      const Edge& e = edges_[edge_id];
      if (!reaches(a, e.parent) || data[e.parent].empty()) continue;
      // Image of each parent-interface site under this edge.
      std::map<std::string, std::vector<std::string>> edge_img;
      for (const auto& site : nodes_[e.parent].interface)
        edge_img[site.name] = {site.name};
      for (const auto& t : e.transforms) {
        switch (t.kind) {
          case Transform::Kind::Delete: edge_img[t.site].clear(); break;
          case Transform::Kind::Rename:
          case Transform::Kind::Duplicate: edge_img[t.site] = t.new_names; break;
          case Transform::Kind::Add:
          case Transform::Kind::DefaultOverride: break;
        }
      }
      for (const auto& [site, sets] : data[e.parent]) {
        for (const auto& image : sets) {
          std::set<std::string> next;
          for (const auto& s : image) {
            auto it = edge_img.find(s);
            if (it != edge_img.end())
              next.insert(it->second.begin(), it->second.end());
          }
          data[n][site].insert(
              std::vector<std::string>(next.begin(), next.end()));
        }
      }
    }
  }

  SiteMap result;
  result.source = ancestor;
  result.target = descendant;
  for (const auto& site : nodes_[a].interface) {
    const auto& sets = data[d][site.name];
    std::set<std::string> merged;
    for (const auto& image : sets) merged.insert(image.begin(), image.end());
    for (const auto& x : sets)
      for (const auto& y : sets) {
        if (x == y) continue;
        bool overlap = std::any_of(x.begin(), x.end(), [&](const auto& s) {
          return std::find(y.begin(), y.end(), s) != y.end();
        });
        if (overlap) {
          diags.error(0, 0, "site '" + site.name + "' of '" + ancestor +
                                "' maps incoherently to " + image_text(x) +
                                " and " + image_text(y) +
                                " along different derivation paths to '" +
                                descendant + "'");
          return std::nullopt;
        }
      }
    result.images[site.name] =
        std::vector<std::string>(merged.begin(), merged.end());
  }
  return result;
}

std::vector<std::string> default_fringe(const Hierarchy& h) {
  return h.leaves();
}

void validate_fringe(const Hierarchy& h, const std::vector<std::string>& fringe,
                     Diagnostics& diags) {
  if (fringe.empty()) {
    diags.error(0, 0, "the concrete agent set is empty");
    return;
  }
  std::set<std::string> seen;
  for (const auto& name : fringe) {
    if (h.node_id(name) < 0)
      diags.error(0, 0, "unknown concrete agent '" + name + "'");
    if (!seen.insert(name).second)
      diags.warning(0, 0, "concrete agent '" + name + "' listed twice");
  }
  if (diags.has_errors()) return;
  for (const auto& a : fringe)
    for (const auto& b : fringe)
      if (a != b && h.reaches(a, b))
        diags.warning(0, 0, "concrete agents are not independent: '" + b +
                                "' descends from '" + a + "'");
}

std::vector<std::string> effective_fringe(
    const Hierarchy& h, const std::vector<std::string>& requested) {
  if (requested.empty()) return default_fringe(h);
  std::vector<std::string> fringe = requested;
  for (const auto& leaf : h.leaves()) {
    bool related = false;
    for (const auto& r : requested)
      if (h.reaches(r, leaf) || h.reaches(leaf, r)) related = true;
    if (!related) fringe.push_back(leaf);
  }
  return fringe;
}

std::string Hierarchy::lint_report() const {
  std::ostringstream out;
  std::size_t roots = 0;
  for (const auto& n : nodes_)
    if (n.is_root) ++roots;
  out << "agents: " << nodes_.size() << " (" << roots << " declared ab initio, "
      << leaves().size() << " leaves), edges: " << edges_.size() << '\n';
  out << "topological order:\n";
  for (int id : topo_) {
    const Node& n = nodes_[id];
    out << "  " << unparse_signature(interface_signature(id));
    if (n.is_root) {
      out << "  [root]";
    } else {
      std::vector<std::string> ps;
      for (int p : n.parents) ps.push_back(nodes_[p].name);
      out << "  [from " << join(ps, ", ") << "]";
    }
    out << '\n';
  }
  auto as = aliases();
  if (!as.empty()) {
    out << "aliases:\n";
    for (const auto& name : as) {
      const Node& n = nodes_[node_id(name)];
      std::vector<std::string> ps;
      for (int p : n.parents) ps.push_back(nodes_[p].name);
      out << "  " << name << " merges " << join(ps, ", ") << '\n';
    }
  }
  out << "default concrete agents: " << join(leaves(), ", ") << '\n';
  return out.str();
}

}  // namespace gka
