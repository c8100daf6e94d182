#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pgr {

enum class ProspectionMode { Cot, Tot };

std::string_view to_string(ProspectionMode m) noexcept;
/// "cot" or "tot"; throws Error{InvalidArgument}.
ProspectionMode parse_mode(std::string_view s);

struct ProspectionStep {
  std::string action;
  std::string constraints;
  friend bool operator==(const ProspectionStep&, const ProspectionStep&) = default;
};

struct TreeNode {
  std::string id;
  std::string action;
  std::string constraints;
  std::optional<std::string> parent;
  std::vector<std::string> children;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Validated prospection tree: exactly one root, mutually consistent
/// parent/children links, every id resolves, every node reachable from the
/// root (hence acyclic).
class ProspectionTree {
 public:
  ProspectionTree() = default;

  /// Accepts a JSON list of nodes, or an object holding exactly one list of
  /// nodes. Throws Error{InvalidTree} describing the first violation.
  static ProspectionTree from_json(const nlohmann::json& j);
  /// Validates an explicit node list; throws Error{InvalidTree}.
  static ProspectionTree from_nodes(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  const TreeNode& root() const;
  const TreeNode* find(const std::string& id) const;
  /// Depth-first pre-order from the root, children in listed order.
  std::vector<const TreeNode*> preorder() const;
  std::vector<std::string> leaves() const;

  nlohmann::json to_json() const;

  friend bool operator==(const ProspectionTree&, const ProspectionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t root_ = 0;
};

/// S^i: either a chain (CoT) or a tree (ToT) of action/constraint steps.
struct ProspectionStructure {
  ProspectionMode mode = ProspectionMode::Cot;
  std::vector<ProspectionStep> steps;  // cot
  ProspectionTree tree;                // tot

  static ProspectionStructure chain(std::vector<ProspectionStep> steps);
  static ProspectionStructure of_tree(ProspectionTree tree);
  static ProspectionStructure empty_of(ProspectionMode mode);

  /// Parses an LLM reply for `mode`. A chain must be a non-empty list of
  /// {action, constraints}; throws Error{MalformedJson} or
  /// Error{InvalidTree}.
  static ProspectionStructure from_json(ProspectionMode mode, const nlohmann::json& j);

  /// Steps in probe order: the chain itself, or tree nodes in pre-order.
  std::vector<ProspectionStep> probe_steps() const;
  std::size_t size() const;
  nlohmann::json to_json() const;

  friend bool operator==(const ProspectionStructure&, const ProspectionStructure&) = default;
};

/// Retrieval text for a step: "action; constraints" (or just the action).
std::string probe_text(const ProspectionStep& step, bool with_constraints = true);

}  // namespace pgr
