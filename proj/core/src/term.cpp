#include "cdforge/term.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace cdforge {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
	return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

Term Term::variable(std::string name) {
	auto n = std::make_shared<Node>();
	n->is_var = true;
	n->ground = false;
	n->hash = mix(0x51ed27, std::hash<std::string>{}(name));
	n->name = std::move(name);
	return Term(std::move(n));
}

Term Term::apply(std::string symbol, std::vector<Term> args) {
	auto n = std::make_shared<Node>();
	n->is_var = false;
	n->ground = std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
	std::size_t h = mix(0xa11ce, std::hash<std::string>{}(symbol));
	for (const Term& a : args)
		h = mix(h, a.hash());
	n->hash = mix(h, args.size());
	n->name = std::move(symbol);
	n->args = std::move(args);
	return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
	if (a.node_ == b.node_)
		return true;
	if (a.node_->hash != b.node_->hash || a.node_->is_var != b.node_->is_var || a.node_->name != b.node_->name ||
		a.node_->args.size() != b.node_->args.size())
		return false;
	for (std::size_t i = 0; i < a.node_->args.size(); ++i)
		if (!(a.node_->args[i] == b.node_->args[i]))
			return false;
	return true;
}

bool operator<(const Term& a, const Term& b) {
	return to_string(a) < to_string(b);
}

const Term* Substitution::find(const std::string& var) const {
	auto it = map_.find(var);
	return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
	if (map_.empty() || t.is_ground())
		return t;
	if (t.is_variable()) {
		const Term* b = find(t.name());
		return b ? *b : t;
	}
	std::vector<Term> args;
	args.reserve(t.arity());
	bool changed = false;
	for (const Term& a : t.args()) {
		args.push_back(apply(a));
		changed = changed || !args.back().same_node(a);
	}
	return changed ? Term::apply(t.name(), std::move(args)) : t;
}

bool default_is_variable(std::string_view ident) {
	if (ident.empty() || ident[0] < 'p' || ident[0] > 'z')
		return false;
	return std::all_of(ident.begin() + 1, ident.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// ---------------------------------------------------------------------------
// Functional notation

namespace {

bool is_ident_char(char c) {
	return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class FunctionalParser {
public:
	FunctionalParser(std::string_view text, const VariablePredicate& is_var) : text_(text), is_var_(is_var) {}

	Term parse() {
		Term t = term();
		skip_ws();
		if (pos_ != text_.size())
			throw ParseError("unexpected trailing input", pos_);
		return t;
	}

private:
	void skip_ws() {
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
	}

	Term term() {
		skip_ws();
		std::size_t start = pos_;
		while (pos_ < text_.size() && is_ident_char(text_[pos_]))
			++pos_;
		if (start == pos_)
			throw ParseError(pos_ < text_.size() ? std::string("unexpected character '") + text_[pos_] + "'" : "unexpected end of input", pos_);
		std::string ident(text_.substr(start, pos_ - start));
		skip_ws();
		if (pos_ < text_.size() && text_[pos_] == '(') {
			if (is_var_(ident))
				throw ParseError("variable '" + ident + "' applied to arguments", start);
			++pos_;
			std::vector<Term> args;
			for (;;) {
				args.push_back(term());
				skip_ws();
				if (pos_ >= text_.size())
					throw ParseError("unexpected end of input", pos_);
				if (text_[pos_] == ',') {
					++pos_;
					continue;
				}
				if (text_[pos_] == ')') {
					++pos_;
					break;
				}
				throw ParseError(std::string("expected ',' or ')' but found '") + text_[pos_] + "'", pos_);
			}
			note_arity(ident, args.size(), start);
			return Term::apply(std::move(ident), std::move(args));
		}
		if (is_var_(ident))
			return Term::variable(std::move(ident));
		note_arity(ident, 0, start);
		return Term::constant(std::move(ident));
	}

	void note_arity(const std::string& symbol, std::size_t arity, std::size_t where) {
		auto [it, inserted] = arities_.emplace(symbol, arity);
		if (!inserted && it->second != arity)
			throw ParseError("symbol '" + symbol + "' used with arity " + std::to_string(arity) + " and " + std::to_string(it->second), where);
	}

	std::string_view text_;
	const VariablePredicate& is_var_;
	std::size_t pos_ = 0;
	std::map<std::string, std::size_t> arities_;
};

void print_functional(const Term& t, std::string& out) {
	out += t.name();
	if (t.arity() == 0)
		return;
	out += '(';
	for (std::size_t i = 0; i < t.arity(); ++i) {
		if (i)
			out += ',';
		print_functional(t.arg(i), out);
	}
	out += ')';
}

} // namespace

Term parse_functional(std::string_view text, const VariablePredicate& is_var) {
	return FunctionalParser(text, is_var).parse();
}

std::string to_string(const Term& t) {
	std::string out;
	print_functional(t, out);
	return out;
}

// ---------------------------------------------------------------------------
// Polish notation (C = i, N = n)

namespace {

Term polish_term(std::string_view text, std::size_t& pos) {
	if (pos >= text.size())
		throw ParseError("truncated Polish formula", pos);
	char c = text[pos];
	std::size_t at = pos++;
	if (c == 'C') {
		Term a = polish_term(text, pos);
		Term b = polish_term(text, pos);
		return Term::apply("i", {a, b});
	}
	if (c == 'N')
		return Term::apply("n", {polish_term(text, pos)});
	if (c >= 'a' && c <= 'z')
		return Term::variable(std::string(1, c));
	throw ParseError(std::string("symbol '") + c + "' outside the Polish alphabet", at);
}

void polish_print(const Term& t, std::map<std::string, char>& names, std::string& out) {
	static constexpr std::string_view letters = "pqrstuvwxyzabcdefghijklmno";
	if (t.is_variable()) {
		auto it = names.find(t.name());
		if (it == names.end()) {
			if (names.size() >= letters.size())
				throw std::invalid_argument("too many variables for Polish notation");
			it = names.emplace(t.name(), letters[names.size()]).first;
		}
		out += it->second;
	} else if (t.name() == "i" && t.arity() == 2) {
		out += 'C';
		polish_print(t.arg(0), names, out);
		polish_print(t.arg(1), names, out);
	} else if (t.name() == "n" && t.arity() == 1) {
		out += 'N';
		polish_print(t.arg(0), names, out);
	} else {
		throw std::invalid_argument("symbol '" + t.name() + "' outside the Polish fragment");
	}
}

} // namespace

Term parse_polish(std::string_view text) {
	std::size_t pos = 0;
	while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
		++pos;
	Term t = polish_term(text, pos);
	while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
		++pos;
	if (pos != text.size())
		throw ParseError("unexpected trailing input", pos);
	return t;
}

std::string print_polish(const Term& t) {
	std::map<std::string, char> names;
	std::string out;
	polish_print(t, names, out);
	return out;
}

// ---------------------------------------------------------------------------
// Unification and matching

namespace {

// Triangular bindings; resolved into an idempotent substitution at the end.
class Unifier {
public:
	bool unify(const Term& a, const Term& b) {
		std::vector<std::pair<Term, Term>> stack{{a, b}};
		while (!stack.empty()) {
			auto [s, t] = std::move(stack.back());
			stack.pop_back();
			s = walk(s);
			t = walk(t);
			if (s.is_variable() && t.is_variable() && s.name() == t.name())
				continue;
			if (s.is_variable()) {
				if (!bind(s.name(), t))
					return false;
			} else if (t.is_variable()) {
				if (!bind(t.name(), s))
					return false;
			} else {
				if (s.name() != t.name() || s.arity() != t.arity())
					return false;
				for (std::size_t i = s.arity(); i-- > 0;)
					stack.emplace_back(s.arg(i), t.arg(i));
			}
		}
		return true;
	}

	Substitution result() {
		Substitution out;
		for (const auto& [v, _] : bindings_)
			out.bind(v, resolve(Term::variable(v)));
		return out;
	}

private:
	Term walk(Term t) const {
		while (t.is_variable()) {
			auto it = bindings_.find(t.name());
			if (it == bindings_.end())
				break;
			t = it->second;
		}
		return t;
	}

	bool occurs(const std::string& var, const Term& t) const {
		Term w = walk(t);
		if (w.is_variable())
			return w.name() == var;
		for (const Term& a : w.args())
			if (!a.is_ground() && occurs(var, a))
				return true;
		return false;
	}

	bool bind(const std::string& var, const Term& t) {
		if (occurs(var, t))
			return false;
		bindings_.emplace(var, t);
		return true;
	}

	Term resolve(const Term& t) {
		if (t.is_ground())
			return t;
		Term w = walk(t);
		if (w.is_variable())
			return w;
		std::vector<Term> args;
		args.reserve(w.arity());
		for (const Term& a : w.args())
			args.push_back(resolve(a));
		return Term::apply(w.name(), std::move(args));
	}

	std::unordered_map<std::string, Term> bindings_;
};

bool match_into(const Term& g, const Term& s, Substitution& sigma) {
	if (g.is_variable()) {
		if (const Term* b = sigma.find(g.name()))
			return *b == s;
		sigma.bind(g.name(), s);
		return true;
	}
	if (s.is_variable() || g.name() != s.name() || g.arity() != s.arity())
		return false;
	if (g.is_ground())
		return g == s;
	for (std::size_t i = 0; i < g.arity(); ++i)
		if (!match_into(g.arg(i), s.arg(i), sigma))
			return false;
	return true;
}

} // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
	Unifier u;
	if (!u.unify(a, b))
		return std::nullopt;
	return u.result();
}

std::optional<Substitution> unify_all(std::span<const std::pair<Term, Term>> pairs) {
	Unifier u;
	for (const auto& [a, b] : pairs)
		if (!u.unify(a, b))
			return std::nullopt;
	return u.result();
}

std::optional<Substitution> match_onto(const Term& general, const Term& specific) {
	Substitution sigma;
	if (!match_into(general, specific, sigma))
		return std::nullopt;
	return sigma;
}

bool subsumes(const Term& general, const Term& specific) {
	return match_onto(general, specific).has_value();
}

bool is_variant(const Term& a, const Term& b) {
	return canonical(a) == canonical(b);
}

// ---------------------------------------------------------------------------
// Renaming

void collect_variables(const Term& t, std::set<std::string>& out) {
	if (t.is_ground())
		return;
	if (t.is_variable()) {
		out.insert(t.name());
		return;
	}
	for (const Term& a : t.args())
		collect_variables(a, out);
}

std::set<std::string> variables_of(const Term& t) {
	std::set<std::string> out;
	collect_variables(t, out);
	return out;
}

namespace {

template <typename NameFn>
Term rename_with(const Term& t, std::unordered_map<std::string, Term>& seen, NameFn&& next_name) {
	if (t.is_ground())
		return t;
	if (t.is_variable()) {
		auto it = seen.find(t.name());
		if (it == seen.end())
			it = seen.emplace(t.name(), Term::variable(next_name())).first;
		return it->second;
	}
	std::vector<Term> args;
	args.reserve(t.arity());
	for (const Term& a : t.args())
		args.push_back(rename_with(a, seen, next_name));
	return Term::apply(t.name(), std::move(args));
}

} // namespace

Term rename_apart(const Term& t, const std::set<std::string>& reserved) {
	std::unordered_map<std::string, Term> seen;
	std::size_t counter = 0;
	return rename_with(t, seen, [&] {
		for (;;) {
			std::string name = "v" + std::to_string(counter++);
			if (!reserved.contains(name))
				return name;
		}
	});
}

std::string canonical_variable_name(std::size_t index) {
	static constexpr std::string_view letters = "pqrstuvwxyz";
	std::string name(1, letters[index % letters.size()]);
	if (std::size_t round = index / letters.size())
		name += std::to_string(round);
	return name;
}

Term canonical(const Term& t) {
	std::unordered_map<std::string, Term> seen;
	std::size_t counter = 0;
	return rename_with(t, seen, [&] { return canonical_variable_name(counter++); });
}

// ---------------------------------------------------------------------------
// Measures

namespace {

std::uint64_t measure(const Term& t, std::unordered_set<Term, TermHash>& compounds, std::set<std::string>& vars,
					  std::uint64_t& tsize) {
	if (t.is_variable()) {
		vars.insert(t.name());
		return 0;
	}
	++tsize;
	if (t.arity() == 0)
		return 0;
	compounds.insert(t);
	std::uint64_t h = 0;
	for (const Term& a : t.args())
		h = std::max(h, measure(a, compounds, vars, tsize));
	return h + 1;
}

} // namespace

TermMeasures term_measures(const Term& t) {
	std::unordered_set<Term, TermHash> compounds;
	std::set<std::string> vars;
	TermMeasures m;
	m.height = measure(t, compounds, vars, m.tsize);
	m.csize = compounds.size();
	m.distinct_vars = vars.size();
	return m;
}

void check_arity(const Term& t, std::map<std::string, std::size_t>& arities) {
	if (t.is_variable())
		return;
	auto [it, inserted] = arities.emplace(t.name(), t.arity());
	if (!inserted && it->second != t.arity())
		throw std::invalid_argument("symbol '" + t.name() + "' used with arity " + std::to_string(t.arity()) + " and " +
									std::to_string(it->second));
	for (const Term& a : t.args())
		check_arity(a, arities);
}

} // namespace cdforge
