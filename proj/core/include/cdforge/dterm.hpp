#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cdforge {

/// Proof structure: a full binary tree whose leaves carry axiom labels.
/// D(major, minor) is one detachment step.
class DTerm {
public:
	static DTerm leaf(std::string label);
	static DTerm node(DTerm major, DTerm minor);

	bool is_leaf() const { return node_->kids.empty(); }
	bool is_node() const { return !node_->kids.empty(); }
	const std::string& label() const { return node_->label; }
	const DTerm& major() const { return node_->kids[0]; }
	const DTerm& minor() const { return node_->kids[1]; }

	/// Inner node count with multiplicity.
	std::uint64_t tsize() const { return node_->tsize; }
	std::uint64_t height() const { return node_->height; }
	std::size_t hash() const { return node_->hash; }
	bool same_node(const DTerm& o) const { return node_ == o.node_; }

	friend bool operator==(const DTerm& a, const DTerm& b);
	friend bool operator!=(const DTerm& a, const DTerm& b) { return !(a == b); }

private:
	struct Node {
		std::string label;
		std::vector<DTerm> kids;
		std::uint64_t tsize = 0;
		std::uint64_t height = 0;
		std::size_t hash = 0;
	};
	explicit DTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	std::shared_ptr<const Node> node_;
};

struct DTermHash {
	std::size_t operator()(const DTerm& d) const noexcept { return d.hash(); }
};

using DTermSet = std::unordered_set<DTerm, DTermHash>;
template <typename V>
using DTermMap = std::unordered_map<DTerm, V, DTermHash>;

struct DMeasures {
	std::uint64_t tsize = 0;
	std::uint64_t height = 0;
	std::uint64_t csize = 0;
	friend bool operator==(const DMeasures&, const DMeasures&) = default;
};

DMeasures d_measures(const DTerm& d);

/// `D(<sub>,<sub>)` with alphanumeric leaf tokens; whitespace ignored.
DTerm parse_dterm(std::string_view text);
/// Compact form, e.g. "D(D(1,1),1)".
std::string to_string(const DTerm& d);

/// Hash-consed node table in post-order: children precede parents, root last.
struct MinimalDag {
	struct Entry {
		bool is_leaf = true;
		std::string label;
		std::size_t major = 0, minor = 0;
		friend bool operator==(const Entry&, const Entry&) = default;
	};
	std::vector<Entry> entries;
	std::size_t root = 0;

	std::size_t node_count() const;
	friend bool operator==(const MinimalDag&, const MinimalDag&) = default;
};

MinimalDag minimal_dag(const DTerm& d);
DTerm unfold(const MinimalDag& dag);

/// Parses "2 = D(1, 1), 3 = D(1, 2), 4 = D(2, D(3, 3))" (comma or newline
/// separated). The last equation defines the root. A plain D-term without
/// equations is accepted too. Labels that are never defined are leaves;
/// when `axiom_labels` is given they must belong to it.
DTerm parse_factor_equations(std::string_view text, const std::set<std::string>* axiom_labels = nullptr);
/// Labels every compound subproof with two or more incoming DAG edges, plus
/// the root, numbering in post-order after the largest numeric leaf label.
std::string print_factor_equations(const DTerm& d);

/// Distinct subterms (including leaves and d itself), in post-order.
std::vector<DTerm> distinct_subterms(const DTerm& d);
std::vector<DTerm> distinct_compound_subterms(const DTerm& d);
bool is_subterm(const DTerm& sub, const DTerm& d);

struct ClosureEntry {
	DTerm dterm;
	bool is_leaf;
};
/// Smallest superset closed under subterms. Output is deduplicated and
/// ordered by (tsize, text); leaves are kept and flagged.
std::vector<ClosureEntry> subproof_closure(const std::vector<DTerm>& s);

/// Pattern leaves whose label starts with an uppercase letter are variables.
/// Counts (possibly overlapping) subterm occurrences of host that are
/// instances of pattern.
std::uint64_t count_instance_occurrences(const DTerm& pattern, const DTerm& host);

/// Edges entering the node of `sub` in the minimal DAG of `host`.
std::uint64_t dag_incoming_edges(const DTerm& sub, const DTerm& host);
/// Edge count of the shortest root path in `host` to an occurrence of
/// `sub`; nullopt when absent.
std::optional<std::uint64_t> min_depth_of(const DTerm& sub, const DTerm& host);

std::set<std::string> leaf_labels(const DTerm& d);

} // namespace cdforge

template <>
struct std::hash<cdforge::DTerm> {
	std::size_t operator()(const cdforge::DTerm& d) const noexcept { return d.hash(); }
};
