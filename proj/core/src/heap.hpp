#pragma once

// Flat-array term store for the search inner loops. Formulas are compiled
// once into relocatable templates; instantiation is a copy with an address
// offset, and backtracking truncates the store and unwinds a binding trail.

#include "cdforge/term.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cdforge::detail {

enum class Tag : std::uint8_t { Ref, Str, Fun };

struct Cell {
	Tag tag;
	std::int32_t val; // Ref: target (self when unbound); Str: Fun cell; Fun: symbol id
};

class SymbolTable {
public:
	std::int32_t intern(const std::string& name, std::size_t arity);
	const std::string& name(std::int32_t id) const { return names_[static_cast<std::size_t>(id)]; }
	std::size_t arity(std::int32_t id) const { return arities_[static_cast<std::size_t>(id)]; }

private:
	std::unordered_map<std::string, std::int32_t> ids_;
	std::vector<std::string> names_;
	std::vector<std::size_t> arities_;
};

/// Relocatable compiled term; cells[0] is the root.
struct Template {
	std::vector<Cell> cells;
};

Template compile(const Term& t, SymbolTable& symbols);

class Heap {
public:
	struct Mark {
		std::size_t cells, trail;
	};

	explicit Heap(SymbolTable& symbols) : symbols_(symbols) {}

	Mark mark() const { return {cells_.size(), trail_.size()}; }
	void undo(Mark m);

	std::int32_t instantiate(const Template& t);
	std::int32_t instantiate(const Term& t);
	std::int32_t new_var();
	/// New structure f(args...) whose argument cells reference `args`.
	std::int32_t build(std::int32_t symbol, std::initializer_list<std::int32_t> args);

	std::int32_t deref(std::int32_t a) const;
	bool unify(std::int32_t a, std::int32_t b);

	bool is_unbound(std::int32_t a) const;
	/// For a dereferenced Str cell: the symbol and the address of argument k.
	std::int32_t symbol_of(std::int32_t a) const { return cells_[idx(cells_[idx(a)].val)].val; }
	std::int32_t arg_of(std::int32_t a, std::size_t k) const {
		return cells_[idx(a)].val + 1 + static_cast<std::int32_t>(k);
	}

	/// Canonically renamed copy as a Term.
	Term extract(std::int32_t a) const;
	/// Canonical functional text, used as a variant key.
	std::string key(std::int32_t a) const;

private:
	static std::size_t idx(std::int32_t a) { return static_cast<std::size_t>(a); }
	bool occurs(std::int32_t var, std::int32_t t) const;
	void bind(std::int32_t var, std::int32_t target);

	SymbolTable& symbols_;
	std::vector<Cell> cells_;
	std::vector<std::int32_t> trail_;
	mutable std::vector<std::int32_t> stack_;
	std::vector<std::pair<std::int32_t, std::int32_t>> work_;
};

} // namespace cdforge::detail
