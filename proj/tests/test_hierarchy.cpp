#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "gka/hierarchy.hpp"
#include "gka/parse.hpp"

using namespace gka;

namespace {

Hierarchy build_ok(const std::string& text) {
  Diagnostics diags;
  ModelAST ast = parse_model(text, diags);
  REQUIRE_FALSE(diags.has_errors());
  auto h = build_hierarchy(ast.signatures, ast.variants, diags);
  CAPTURE(diags.to_string("<test>"));
  REQUIRE(h);
  return *h;
}

void build_expect_error(const std::string& text) {
  Diagnostics diags;
  ModelAST ast = parse_model(text, diags);
  REQUIRE_FALSE(diags.has_errors());
  auto h = build_hierarchy(ast.signatures, ast.variants, diags);
  CHECK_FALSE(h);
  CHECK(diags.has_errors());
}

SiteMap map_ok(const Hierarchy& h, const std::string& a, const std::string& d) {
  Diagnostics diags;
  auto m = h.site_map(a, d, diags);
  CAPTURE(diags.to_string("<test>"));
  REQUIRE(m);
  return *m;
}

std::set<std::string> name_set(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

const char* kMkpHierarchy =
    "MAPK(CD,AS,atp,T~u,Y~u,cat~n)\n"
    "MAPKSTP(AS,cat~n)\n"
    "MAPKYP(AS,cat~n)\n"
    "MKP = MAPKSTP[+KIM]\n"
    "MKP = MAPKYP[+KIM]\n"
    "HePTP = MAPKYP\n"
    "ERKP = MKP\nJNKP = MKP\np38P = MKP\n"
    "ERK = MAPK\nJNK = MAPK\np38 = MAPK\n"
    "MKP3 = ERKP\n"
    "MKP1 = ERKP\nMKP1 = JNKP\nMKP1 = p38P\n"
    "DUSP5 = JNKP[cat~y]\nDUSP5 = p38P[cat~y]\n";

const char* kShcHierarchy =
    "Shc(PTB,YXNX~u,SH2)\n"
    "Grb2(SH3n,SH2,SH3c)\n"
    "p66 = Shc[YXNX\\{Y349 Y427}]\n"
    "p52 = Shc[YXNX\\{Y239 Y317}]\n"
    "p46 = Shc[YXNX\\{Y194 Y272}]\n";

}  // namespace

TEST_CASE("alias acquires the added site once and keeps shared interface") {
  Hierarchy h = build_ok(kMkpHierarchy);
  int mkp = h.node_id("MKP");
  REQUIRE(mkp >= 0);
  const auto& iface = h.node(mkp).interface;
  REQUIRE(iface.size() == 3);
  CHECK(iface[0].name == "AS");
  CHECK(iface[1].name == "cat");
  CHECK(iface[1].default_state == "n");
  CHECK(iface[2].name == "KIM");
  CHECK_FALSE(iface[2].carries_state());
}

TEST_CASE("without variants every agent is a root with its own interface") {
  Hierarchy h = build_ok("A(x~u~p)\nB(y)\n");
  for (const auto& n : h.nodes()) {
    CHECK(n.is_root);
    CHECK(n.parents.empty());
  }
  CHECK(h.node(h.node_id("A")).interface[0].states ==
        std::vector<std::string>{"u", "p"});
}

TEST_CASE("default override changes the resting state of the alias") {
  Hierarchy h = build_ok(kMkpHierarchy);
  const auto* cat = h.node(h.node_id("DUSP5")).find_site("cat");
  REQUIRE(cat);
  CHECK(cat->default_state == "y");
  // The override state joins the state set; n stays a member.
  CHECK(name_set(cat->states) == std::set<std::string>{"n", "y"});
  const auto* mkp3cat = h.node(h.node_id("MKP3")).find_site("cat");
  CHECK(mkp3cat->default_state == "n");
}

TEST_CASE("transform on a missing site is an error") {
  build_expect_error("A(x)\nX = A[s\\{t}]\n");
  build_expect_error("A(x)\nX = A[-s]\n");
  build_expect_error("A(x)\nX = A[s~u]\n");
}

TEST_CASE("default override on a stateless site is an error") {
  build_expect_error("A(x)\nX = A[x~u]\n");
}

TEST_CASE("rename collision is an error") {
  build_expect_error("A(x,y)\nB = A[x\\{y}]\n");
}

TEST_CASE("alias interface conflict is an error") {
  build_expect_error("A(s~u)\nB(s~v)\nC = A\nC = B\n");
  // Same states, different defaults.
  build_expect_error("A(s~u~v)\nB(s~v~u)\nC = A\nC = B\n");
}

TEST_CASE("cycles are rejected") {
  build_expect_error("R(x)\nX = Y\nY = X\n");
}

TEST_CASE("site map across a duplication") {
  Hierarchy h = build_ok("C(r,l)\nT = C[r\\{r1 r2}]\n");
  SiteMap m = map_ok(h, "C", "T");
  CHECK(m.images.at("r") == std::vector<std::string>{"r1", "r2"});
  CHECK(m.images.at("l") == std::vector<std::string>{"l"});
}

TEST_CASE("site map of the splice variant family") {
  Hierarchy h = build_ok(kShcHierarchy);
  SiteMap m = map_ok(h, "Shc", "p52");
  CHECK(m.images.at("YXNX") == std::vector<std::string>{"Y239", "Y317"});
  CHECK(m.images.at("PTB") == std::vector<std::string>{"PTB"});
  CHECK(m.images.at("SH2") == std::vector<std::string>{"SH2"});
}

TEST_CASE("site map to self is the identity") {
  Hierarchy h = build_ok(kShcHierarchy);
  SiteMap m = map_ok(h, "Shc", "Shc");
  for (const auto& [site, image] : m.images)
    CHECK(image == std::vector<std::string>{site});
}

TEST_CASE("site map composed across an added site") {
  Hierarchy h = build_ok(kMkpHierarchy);
  SiteMap m = map_ok(h, "MAPKSTP", "MKP");
  CHECK(m.images.at("AS") == std::vector<std::string>{"AS"});
  CHECK(m.images.at("cat") == std::vector<std::string>{"cat"});
  CHECK_FALSE(m.images.count("KIM"));  // added sites have no preimage
}

TEST_CASE("deleted site has an empty image downstream") {
  Hierarchy h = build_ok("A(x,y)\nB = A[-x]\nC = B\n");
  SiteMap m = map_ok(h, "A", "C");
  CHECK(m.images.at("x").empty());
  CHECK(m.images.at("y") == std::vector<std::string>{"y"});
}

TEST_CASE("site map requires ancestry") {
  Hierarchy h = build_ok(kMkpHierarchy);
  Diagnostics diags;
  CHECK_FALSE(h.site_map("ERK", "JNK", diags));
  CHECK(diags.has_errors());
}

TEST_CASE("parallel edges union disjoint renamings") {
  // Two edges from the same parent act like a duplication split across
  // declarations; the per-path images are disjoint and union cleanly.
  Hierarchy h = build_ok("A(s,k)\nB = A[s\\{t}]\nB = A[s\\{u}]\n");
  SiteMap m = map_ok(h, "A", "B");
  CHECK(m.images.at("s") == std::vector<std::string>{"t", "u"});
  CHECK(name_set(h.fringe_descendants("A", {"B"})) ==
        std::set<std::string>{"B"});
}

TEST_CASE("overlapping unequal path images are rejected") {
  // One path keeps s, the other splits it into {s, s2}: neither equal
  // nor disjoint.
  Hierarchy h = build_ok("A(s)\nB = A\nB = A[s\\{s s2}]\n");
  Diagnostics diags;
  CHECK_FALSE(h.site_map("A", "B", diags));
  CHECK(diags.has_errors());
}

TEST_CASE("fringe descendants") {
  Hierarchy h = build_ok(kShcHierarchy);
  std::vector<std::string> fringe{"p66", "p52", "p46"};
  CHECK(name_set(h.fringe_descendants("Shc", fringe)) ==
        std::set<std::string>{"p66", "p52", "p46"});
  CHECK(h.fringe_descendants("Shc", {"Shc"}) ==
        std::vector<std::string>{"Shc"});
  Hierarchy mkp = build_ok(kMkpHierarchy);
  CHECK(mkp.fringe_descendants("JNK", {"ERK"}).empty());
}

TEST_CASE("fringe validation") {
  Hierarchy h = build_ok(kShcHierarchy);
  SUBCASE("default is the leaf set") {
    CHECK(name_set(default_fringe(h)) ==
          std::set<std::string>{"p66", "p52", "p46", "Grb2"});
  }
  SUBCASE("antichain violations warn") {
    Diagnostics diags;
    validate_fringe(h, {"Shc", "p52"}, diags);
    CHECK_FALSE(diags.has_errors());
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.all()[0].severity == Severity::Warning);
  }
  SUBCASE("empty fringe errors") {
    Diagnostics diags;
    validate_fringe(h, {}, diags);
    CHECK(diags.has_errors());
  }
  SUBCASE("unknown agent errors") {
    Diagnostics diags;
    validate_fringe(h, {"Nope"}, diags);
    CHECK(diags.has_errors());
  }
  SUBCASE("requested agents keep unrelated leaves") {
    CHECK(name_set(effective_fringe(h, {"Shc"})) ==
          std::set<std::string>{"Shc", "Grb2"});
    CHECK(name_set(effective_fringe(h, {})) ==
          std::set<std::string>{"p66", "p52", "p46", "Grb2"});
  }
}

TEST_CASE("lint report lists hierarchy structure") {
  Hierarchy h = build_ok(kMkpHierarchy);
  std::string report = h.lint_report();
  CHECK(report.find("MKP merges MAPKSTP, MAPKYP") != std::string::npos);
  CHECK(report.find("DUSP5(KIM,AS,cat~y~n)") != std::string::npos ||
        report.find("DUSP5(AS,cat~y~n,KIM)") != std::string::npos);
  CHECK(report.find("default concrete agents:") != std::string::npos);
}

// ---------------------------------------------------------------------------
// Properties on randomly generated hierarchies.

namespace {

struct RandomHierarchy {
  std::vector<AgentSignature> signatures;
  std::vector<VariantDecl> variants;
  std::vector<std::string> names;  // topological, names[0] is the root
};

// A random single-root tree with random site transforms; trees keep
// every ancestor/descendant path unique, which the composition and
// monotonicity properties quantify over.
RandomHierarchy random_tree(std::mt19937& rng) {
  RandomHierarchy out;
  int fresh = 0;
  AgentSignature root;
  root.name = "N0";
  int n_sites = 1 + static_cast<int>(rng() % 4);
  for (int s = 0; s < n_sites; ++s) {
    SiteSignature ss;
    ss.name = "s" + std::to_string(fresh++);
    if (rng() % 2) {
      ss.states = {"u", "p"};
      ss.default_state = "u";
    }
    root.sites.push_back(ss);
  }
  out.signatures.push_back(root);
  out.names.push_back(root.name);

  std::vector<std::vector<SiteSignature>> ifaces{root.sites};
  int n_nodes = 2 + static_cast<int>(rng() % 5);
  for (int i = 1; i < n_nodes; ++i) {
    int parent = static_cast<int>(rng() % out.names.size());
    VariantDecl v;
    v.child = "N" + std::to_string(i);
    v.parent = out.names[parent];
    std::vector<SiteSignature> iface = ifaces[parent];
    int n_transforms = static_cast<int>(rng() % 3);
    std::set<std::string> touched;
    for (int t = 0; t < n_transforms && !iface.empty(); ++t) {
      int pick = static_cast<int>(rng() % iface.size());
      if (touched.count(iface[pick].name)) continue;
      Transform tr;
      switch (rng() % 4) {
        case 0:
          tr.kind = Transform::Kind::Delete;
          tr.site = iface[pick].name;
          touched.insert(tr.site);
          iface.erase(iface.begin() + pick);
          break;
        case 1: {
          tr.kind = Transform::Kind::Rename;
          tr.site = iface[pick].name;
          touched.insert(tr.site);
          std::string nn = "s" + std::to_string(fresh++);
          tr.new_names = {nn};
          iface[pick].name = nn;
          break;
        }
        case 2: {
          tr.kind = Transform::Kind::Duplicate;
          tr.site = iface[pick].name;
          touched.insert(tr.site);
          int copies = 2 + static_cast<int>(rng() % 2);
          SiteSignature original = iface[pick];
          iface.erase(iface.begin() + pick);
          for (int c = 0; c < copies; ++c) {
            std::string nn = "s" + std::to_string(fresh++);
            tr.new_names.push_back(nn);
            SiteSignature copy = original;
            copy.name = nn;
            iface.push_back(copy);
          }
          break;
        }
        default: {
          tr.kind = Transform::Kind::Add;
          tr.added.name = "s" + std::to_string(fresh++);
          iface.push_back(tr.added);
          break;
        }
      }
      v.transforms.push_back(tr);
    }
    out.variants.push_back(v);
    out.names.push_back(v.child);
    ifaces.push_back(iface);
  }
  return out;
}

// Image-wise union composition of two site maps.
std::map<std::string, std::set<std::string>> compose(const SiteMap& ab,
                                                     const SiteMap& bc) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [site, image] : ab.images) {
    auto& target = out[site];
    for (const auto& mid : image) {
      const auto& further = bc.images.at(mid);
      target.insert(further.begin(), further.end());
    }
  }
  return out;
}

}  // namespace

TEST_CASE("site maps compose along unique derivation paths") {
  std::mt19937 rng(4242);
  for (int iter = 0; iter < 150; ++iter) {
    RandomHierarchy rh = random_tree(rng);
    Diagnostics diags;
    auto h = build_hierarchy(rh.signatures, rh.variants, diags);
    REQUIRE(h);
    for (const auto& a : rh.names)
      for (const auto& b : rh.names) {
        if (!h->reaches(a, b)) continue;
        for (const auto& c : rh.names) {
          if (!h->reaches(b, c)) continue;
          SiteMap ab = map_ok(*h, a, b);
          SiteMap bc = map_ok(*h, b, c);
          SiteMap ac = map_ok(*h, a, c);
          auto composed = compose(ab, bc);
          for (const auto& [site, image] : ac.images)
            CHECK(name_set(image) == composed.at(site));
        }
      }
  }
}

TEST_CASE("deletion is monotone down the tree") {
  std::mt19937 rng(777);
  for (int iter = 0; iter < 150; ++iter) {
    RandomHierarchy rh = random_tree(rng);
    Diagnostics diags;
    auto h = build_hierarchy(rh.signatures, rh.variants, diags);
    REQUIRE(h);
    for (const auto& a : rh.names)
      for (const auto& b : rh.names) {
        if (!h->reaches(a, b)) continue;
        SiteMap ab = map_ok(*h, a, b);
        for (const auto& [site, image] : ab.images) {
          if (!image.empty()) continue;
          for (const auto& c : rh.names)
            if (h->reaches(b, c))
              CHECK(map_ok(*h, a, c).images.at(site).empty());
        }
      }
  }
}

TEST_CASE("alias merge does not depend on parent declaration order") {
  Diagnostics diags;
  ModelAST ast = parse_model(kMkpHierarchy, diags);
  REQUIRE_FALSE(diags.has_errors());
  auto base = build_hierarchy(ast.signatures, ast.variants, diags);
  REQUIRE(base);
  std::mt19937 rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    auto variants = ast.variants;
    std::shuffle(variants.begin(), variants.end(), rng);
    Diagnostics d2;
    auto h = build_hierarchy(ast.signatures, variants, d2);
    REQUIRE(h);
    for (const auto& n : base->nodes()) {
      int id = h->node_id(n.name);
      REQUIRE(id >= 0);
      const auto& other = h->node(id).interface;
      REQUIRE(other.size() == n.interface.size());
      for (const auto& site : n.interface) {
        const auto* o = h->node(id).find_site(site.name);
        REQUIRE(o);
        CHECK(name_set(o->states) == name_set(site.states));
        CHECK(o->default_state == site.default_state);
      }
    }
  }
}
