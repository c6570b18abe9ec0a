#include "heap.hpp"

#include <functional>

namespace cdforge::detail {

std::int32_t SymbolTable::intern(const std::string& name, std::size_t arity) {
	std::string key = name + '/' + std::to_string(arity);
	auto [it, inserted] = ids_.try_emplace(key, static_cast<std::int32_t>(names_.size()));
	if (inserted) {
		names_.push_back(name);
		arities_.push_back(arity);
	}
	return it->second;
}

namespace {

void place(std::vector<Cell>& cells, std::size_t slot, const Term& t, SymbolTable& symbols,
		   std::unordered_map<std::string, std::int32_t>& vars) {
	if (t.is_variable()) {
		auto [it, first] = vars.try_emplace(t.name(), static_cast<std::int32_t>(slot));
		cells[slot] = {Tag::Ref, it->second};
		return;
	}
	auto f = cells.size();
	cells.push_back({Tag::Fun, symbols.intern(t.name(), t.arity())});
	cells.resize(cells.size() + t.arity());
	cells[slot] = {Tag::Str, static_cast<std::int32_t>(f)};
	for (std::size_t k = 0; k < t.arity(); ++k)
		place(cells, f + 1 + k, t.arg(k), symbols, vars);
}

} // namespace

Template compile(const Term& t, SymbolTable& symbols) {
	Template out;
	out.cells.resize(1);
	std::unordered_map<std::string, std::int32_t> vars;
	place(out.cells, 0, t, symbols, vars);
	return out;
}

void Heap::undo(Mark m) {
	while (trail_.size() > m.trail) {
		std::int32_t v = trail_.back();
		trail_.pop_back();
		cells_[idx(v)] = {Tag::Ref, v};
	}
	cells_.resize(m.cells);
}

std::int32_t Heap::instantiate(const Template& t) {
	auto base = static_cast<std::int32_t>(cells_.size());
	cells_.reserve(cells_.size() + t.cells.size());
	for (Cell c : t.cells) {
		if (c.tag != Tag::Fun)
			c.val += base;
		cells_.push_back(c);
	}
	return base;
}

std::int32_t Heap::instantiate(const Term& t) {
	return instantiate(compile(t, symbols_));
}

std::int32_t Heap::new_var() {
	auto a = static_cast<std::int32_t>(cells_.size());
	cells_.push_back({Tag::Ref, a});
	return a;
}

std::int32_t Heap::build(std::int32_t symbol, std::initializer_list<std::int32_t> args) {
	auto root = static_cast<std::int32_t>(cells_.size());
	cells_.push_back({Tag::Str, root + 1});
	cells_.push_back({Tag::Fun, symbol});
	for (std::int32_t a : args)
		cells_.push_back({Tag::Ref, a});
	return root;
}

std::int32_t Heap::deref(std::int32_t a) const {
	for (;;) {
		const Cell& c = cells_[idx(a)];
		if (c.tag != Tag::Ref || c.val == a)
			return a;
		a = c.val;
	}
}

bool Heap::is_unbound(std::int32_t a) const {
	const Cell& c = cells_[idx(a)];
	return c.tag == Tag::Ref && c.val == a;
}

bool Heap::occurs(std::int32_t var, std::int32_t t) const {
	stack_.clear();
	stack_.push_back(t);
	while (!stack_.empty()) {
		std::int32_t a = deref(stack_.back());
		stack_.pop_back();
		if (a == var)
			return true;
		if (cells_[idx(a)].tag == Tag::Str) {
			std::int32_t f = cells_[idx(a)].val;
			std::size_t n = symbols_.arity(cells_[idx(f)].val);
			for (std::size_t k = 0; k < n; ++k)
				stack_.push_back(f + 1 + static_cast<std::int32_t>(k));
		}
	}
	return false;
}

void Heap::bind(std::int32_t var, std::int32_t target) {
	cells_[idx(var)] = {Tag::Ref, target};
	trail_.push_back(var);
}

bool Heap::unify(std::int32_t a, std::int32_t b) {
	auto& work = work_;
	work.clear();
	work.emplace_back(a, b);
	while (!work.empty()) {
		auto [x, y] = work.back();
		work.pop_back();
		x = deref(x);
		y = deref(y);
		if (x == y)
			continue;
		bool xv = is_unbound(x), yv = is_unbound(y);
		if (xv && yv) {
			// Younger variable points to older.
			if (x < y)
				std::swap(x, y);
			bind(x, y);
			continue;
		}
		if (xv || yv) {
			if (yv)
				std::swap(x, y);
			if (occurs(x, y))
				return false;
			bind(x, y);
			continue;
		}
		std::int32_t fx = cells_[idx(x)].val, fy = cells_[idx(y)].val;
		if (cells_[idx(fx)].val != cells_[idx(fy)].val)
			return false;
		std::size_t n = symbols_.arity(cells_[idx(fx)].val);
		for (std::size_t k = 0; k < n; ++k)
			work.emplace_back(fx + 1 + static_cast<std::int32_t>(k), fy + 1 + static_cast<std::int32_t>(k));
	}
	return true;
}

Term Heap::extract(std::int32_t a) const {
	std::unordered_map<std::int32_t, Term> vars;
	std::function<Term(std::int32_t)> go = [&](std::int32_t x) -> Term {
		x = deref(x);
		if (is_unbound(x)) {
			auto it = vars.find(x);
			if (it == vars.end())
				it = vars.emplace(x, Term::variable(canonical_variable_name(vars.size()))).first;
			return it->second;
		}
		std::int32_t f = cells_[idx(x)].val;
		std::int32_t sym = cells_[idx(f)].val;
		std::size_t n = symbols_.arity(sym);
		std::vector<Term> args;
		args.reserve(n);
		for (std::size_t k = 0; k < n; ++k)
			args.push_back(go(f + 1 + static_cast<std::int32_t>(k)));
		return Term::apply(symbols_.name(sym), std::move(args));
	};
	return go(a);
}

std::string Heap::key(std::int32_t a) const {
	std::unordered_map<std::int32_t, std::size_t> vars;
	std::string out;
	std::function<void(std::int32_t)> go = [&](std::int32_t x) {
		x = deref(x);
		if (is_unbound(x)) {
			auto it = vars.try_emplace(x, vars.size()).first;
			out += '_';
			out += std::to_string(it->second);
			return;
		}
		std::int32_t f = cells_[idx(x)].val;
		std::int32_t sym = cells_[idx(f)].val;
		out += symbols_.name(sym);
		std::size_t n = symbols_.arity(sym);
		if (n == 0)
			return;
		out += '(';
		for (std::size_t k = 0; k < n; ++k) {
			if (k)
				out += ',';
			go(f + 1 + static_cast<std::int32_t>(k));
		}
		out += ')';
	};
	go(a);
	return out;
}

} // namespace cdforge::detail
