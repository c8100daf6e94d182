#include "pgr/prospection/structure.hpp"

#include <map>
#include <set>

#include "pgr/core/error.hpp"

namespace pgr {

using nlohmann::json;

namespace {

[[noreturn]] void invalid_tree(const std::string& why) { throw Error(ErrorCode::InvalidTree, why); }

// Constraints may come back as a string or a list of strings.
std::string read_constraints(const json& node) {
  if (!node.contains("constraints") || node["constraints"].is_null()) return "";
  const json& c = node["constraints"];
  if (c.is_string()) return c.get<std::string>();
  if (c.is_array()) {
    std::string out;
    for (const auto& part : c) {
      if (!part.is_string()) throw Error(ErrorCode::MalformedJson, "constraints entry is not text");
      if (!out.empty()) out += ", ";
      out += part.get<std::string>();
    }
    return out;
  }
  throw Error(ErrorCode::MalformedJson, "constraints must be text");
}

std::string id_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  invalid_tree("node id must be text");
}

const json& node_list(const json& j) {
  if (j.is_array()) return j;
  if (j.is_object()) {
    const json* found = nullptr;
    for (const auto& [key, value] : j.items()) {
      if (value.is_array()) {
        if (found) invalid_tree("object holds more than one node list");
        found = &value;
      }
    }
    if (found) return *found;
  }
  invalid_tree("expected a list of nodes");
}

}  // namespace

std::string_view to_string(ProspectionMode m) noexcept { return m == ProspectionMode::Cot ? "cot" : "tot"; }

ProspectionMode parse_mode(std::string_view s) {
  if (s == "cot") return ProspectionMode::Cot;
  if (s == "tot") return ProspectionMode::Tot;
  throw Error(ErrorCode::InvalidArgument, "mode must be cot or tot, got '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Tree

ProspectionTree ProspectionTree::from_json(const json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : node_list(j)) {
    if (!n.is_object()) invalid_tree("node is not an object");
    TreeNode node;
    if (!n.contains("action_id")) invalid_tree("node without action_id");
    node.id = id_text(n["action_id"]);
    if (!n.contains("action") || !n["action"].is_string()) invalid_tree("node " + node.id + " lacks action");
    node.action = n["action"].get<std::string>();
    node.constraints = read_constraints(n);
    if (n.contains("parent") && !n["parent"].is_null()) node.parent = id_text(n["parent"]);
    if (n.contains("children") && !n["children"].is_null()) {
      if (!n["children"].is_array()) invalid_tree("children of " + node.id + " is not a list");
      for (const auto& c : n["children"]) node.children.push_back(id_text(c));
    }
    nodes.push_back(std::move(node));
  }
  return from_nodes(std::move(nodes));
}

ProspectionTree ProspectionTree::from_nodes(std::vector<TreeNode> nodes) {
  if (nodes.empty()) invalid_tree("tree has no nodes");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) invalid_tree("empty action_id");
    if (nodes[i].action.empty()) invalid_tree("node " + nodes[i].id + " has empty action");
    if (!index.emplace(nodes[i].id, i).second) invalid_tree("duplicate action_id " + nodes[i].id);
  }
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (!n.parent) {
      if (root) invalid_tree("more than one root (" + nodes[*root].id + ", " + n.id + ")");
      root = i;
    } else {
      auto p = index.find(*n.parent);
      if (p == index.end()) invalid_tree("node " + n.id + " has missing parent " + *n.parent);
      const auto& siblings = nodes[p->second].children;
      if (std::find(siblings.begin(), siblings.end(), n.id) == siblings.end()) {
        invalid_tree("parent " + *n.parent + " does not list child " + n.id);
      }
    }
    std::set<std::string> seen_children;
    for (const auto& c : n.children) {
      auto ci = index.find(c);
      if (ci == index.end()) invalid_tree("node " + n.id + " points to missing child " + c);
      if (!seen_children.insert(c).second) invalid_tree("node " + n.id + " lists child " + c + " twice");
      if (nodes[ci->second].parent != n.id) invalid_tree("child " + c + " does not name " + n.id + " as parent");
    }
  }
  if (!root) invalid_tree("no root node");

  // Every node reachable from the root exactly once.
  std::vector<bool> visited(nodes.size(), false);
  std::vector<std::size_t> stack{*root};
  std::size_t count = 0;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    if (visited[i]) invalid_tree("cycle through " + nodes[i].id);
    visited[i] = true;
    ++count;
    for (const auto& c : nodes[i].children) stack.push_back(index.at(c));
  }
  if (count != nodes.size()) invalid_tree("nodes unreachable from root " + nodes[*root].id);

  ProspectionTree tree;
  tree.nodes_ = std::move(nodes);
  tree.root_ = *root;
  return tree;
}

const TreeNode& ProspectionTree::root() const {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidTree, "empty tree");
  return nodes_[root_];
}

const TreeNode* ProspectionTree::find(const std::string& id) const {
  for (const auto& n : nodes_) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::vector<const TreeNode*> ProspectionTree::preorder() const {
  std::vector<const TreeNode*> out;
  if (nodes_.empty()) return out;
  std::vector<const TreeNode*> stack{&nodes_[root_]};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    out.push_back(n);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(find(*it));
  }
  return out;
}

std::vector<std::string> ProspectionTree::leaves() const {
  std::vector<std::string> out;
  for (const auto* n : preorder()) {
    if (n->children.empty()) out.push_back(n->id);
  }
  return out;
}

json ProspectionTree::to_json() const {
  json out = json::array();
  for (const auto& n : nodes_) {
    out.push_back({{"action_id", n.id},
                   {"action", n.action},
                   {"constraints", n.constraints},
                   {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                   {"children", n.children}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure

ProspectionStructure ProspectionStructure::chain(std::vector<ProspectionStep> steps) {
  ProspectionStructure s;
  s.mode = ProspectionMode::Cot;
  s.steps = std::move(steps);
  return s;
}

ProspectionStructure ProspectionStructure::of_tree(ProspectionTree tree) {
  ProspectionStructure s;
  s.mode = ProspectionMode::Tot;
  s.tree = std::move(tree);
  return s;
}

ProspectionStructure ProspectionStructure::empty_of(ProspectionMode mode) {
  ProspectionStructure s;
  s.mode = mode;
  return s;
}

ProspectionStructure ProspectionStructure::from_json(ProspectionMode mode, const json& j) {
  if (mode == ProspectionMode::Tot) return of_tree(ProspectionTree::from_json(j));

  const json* list = &j;
  if (j.is_object()) {
    list = nullptr;
    for (const auto& [key, value] : j.items()) {
      if (value.is_array()) {
        if (list) throw Error(ErrorCode::MalformedJson, "object holds more than one step list");
        list = &value;
      }
    }
  }
  if (!list || !list->is_array()) throw Error(ErrorCode::MalformedJson, "expected a JSON list of steps");
  if (list->empty()) throw Error(ErrorCode::MalformedJson, "empty step list");
  std::vector<ProspectionStep> steps;
  for (const auto& item : *list) {
    if (!item.is_object() || !item.contains("action") || !item["action"].is_string()) {
      throw Error(ErrorCode::MalformedJson, "step without action");
    }
    ProspectionStep step{item["action"].get<std::string>(), read_constraints(item)};
    if (step.action.empty()) throw Error(ErrorCode::MalformedJson, "step with empty action");
    steps.push_back(std::move(step));
  }
  return chain(std::move(steps));
}

std::vector<ProspectionStep> ProspectionStructure::probe_steps() const {
  if (mode == ProspectionMode::Cot) return steps;
  std::vector<ProspectionStep> out;
  for (const auto* n : tree.preorder()) out.push_back({n->action, n->constraints});
  return out;
}

std::size_t ProspectionStructure::size() const {
  return mode == ProspectionMode::Cot ? steps.size() : tree.nodes().size();
}

json ProspectionStructure::to_json() const {
  if (mode == ProspectionMode::Tot) return tree.to_json();
  json out = json::array();
  for (const auto& s : steps) out.push_back({{"action", s.action}, {"constraints", s.constraints}});
  return out;
}

std::string probe_text(const ProspectionStep& step, bool with_constraints) {
  if (!with_constraints || step.constraints.empty()) return step.action;
  return step.action + "; " + step.constraints;
}

}  // namespace pgr
