#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdforge {

/// Thrown by the text parsers. `position()` is a byte offset into the input.
class ParseError : public std::runtime_error {
public:
	ParseError(const std::string& what, std::size_t position)
		: std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
	std::size_t position() const noexcept { return position_; }

private:
	std::size_t position_;
};

/// First-order term: a variable or a function symbol applied to arguments
/// (constants are nullary applications). Immutable; copies share structure.
class Term {
public:
	static Term variable(std::string name);
	static Term apply(std::string symbol, std::vector<Term> args);
	static Term constant(std::string symbol) { return apply(std::move(symbol), {}); }

	bool is_variable() const { return node_->is_var; }
	bool is_constant() const { return !node_->is_var && node_->args.empty(); }
	bool is_compound() const { return !node_->is_var && !node_->args.empty(); }
	bool is_ground() const { return node_->ground; }

	/// Variable name or function symbol.
	const std::string& name() const { return node_->name; }
	std::span<const Term> args() const { return node_->args; }
	std::size_t arity() const { return node_->args.size(); }
	const Term& arg(std::size_t i) const { return node_->args[i]; }

	std::size_t hash() const { return node_->hash; }
	bool same_node(const Term& other) const { return node_ == other.node_; }

	friend bool operator==(const Term& a, const Term& b);
	friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
	/// Total order on canonical text; used for deterministic tie-breaking only.
	friend bool operator<(const Term& a, const Term& b);

private:
	struct Node {
		bool is_var;
		bool ground;
		std::string name;
		std::vector<Term> args;
		std::size_t hash;
	};
	explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	std::shared_ptr<const Node> node_;
};

struct TermHash {
	std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

/// Finite map from variable names to terms.
class Substitution {
public:
	using Map = std::map<std::string, Term>;

	Substitution() = default;
	explicit Substitution(Map m) : map_(std::move(m)) {}

	bool empty() const { return map_.empty(); }
	std::size_t size() const { return map_.size(); }
	const Map& bindings() const { return map_; }
	const Term* find(const std::string& var) const;
	void bind(const std::string& var, Term t) { map_.insert_or_assign(var, std::move(t)); }

	/// Simultaneous replacement of bound variables.
	Term apply(const Term& t) const;

	friend bool operator==(const Substitution& a, const Substitution& b) { return a.map_ == b.map_; }

private:
	Map map_;
};

struct TermMeasures {
	std::uint64_t tsize = 0;
	std::uint64_t height = 0;
	std::uint64_t csize = 0;
	std::uint64_t distinct_vars = 0;
	friend bool operator==(const TermMeasures&, const TermMeasures&) = default;
};

/// Decides which identifiers parse as variables in functional notation.
using VariablePredicate = std::function<bool(std::string_view)>;

/// p..z optionally followed by digits.
bool default_is_variable(std::string_view ident);

Term parse_functional(std::string_view text, const VariablePredicate& is_var = default_is_variable);
/// Canonical printing: functional notation, no whitespace.
std::string to_string(const Term& t);

Term parse_polish(std::string_view text);
/// Prints over the {i/2, n/1} fragment. Variables are renamed to single
/// letters (p..z, then a..o) in order of first occurrence.
/// Throws std::invalid_argument outside the fragment or beyond 26 variables.
std::string print_polish(const Term& t);

/// Robinson unification with occurs check. Returns an idempotent mgu.
std::optional<Substitution> unify(const Term& a, const Term& b);
/// Simultaneous unification of several pairs.
std::optional<Substitution> unify_all(std::span<const std::pair<Term, Term>> pairs);

/// One-way matching: a substitution s with general*s == specific, variables
/// of `specific` treated as constants.
std::optional<Substitution> match_onto(const Term& general, const Term& specific);
bool subsumes(const Term& general, const Term& specific);
bool is_variant(const Term& a, const Term& b);

/// Renames all variables of t to fresh names not in `reserved`
/// (v0, v1, ... in first-occurrence order, skipping reserved names).
Term rename_apart(const Term& t, const std::set<std::string>& reserved);

/// Renames variables to p, q, r, ..., z, p1, q1, ... by first occurrence.
/// Variants have identical canonical forms.
Term canonical(const Term& t);
std::string canonical_variable_name(std::size_t index);

void collect_variables(const Term& t, std::set<std::string>& out);
std::set<std::string> variables_of(const Term& t);

TermMeasures term_measures(const Term& t);

/// Checks that every symbol is used with a single arity; throws
/// std::invalid_argument naming the offending symbol.
void check_arity(const Term& t, std::map<std::string, std::size_t>& arities);

} // namespace cdforge

template <>
struct std::hash<cdforge::Term> {
	std::size_t operator()(const cdforge::Term& t) const noexcept { return t.hash(); }
};
