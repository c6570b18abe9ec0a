#include "cdforge/tptp.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

namespace cdforge {

namespace {

constexpr const char* kPredicateKey = "tptp.predicate";
constexpr const char* kImplicationKey = "tptp.implication";
constexpr const char* kDetKey = "tptp.det";
constexpr const char* kGoalKey = "tptp.goal";
constexpr const char* kAxiomKeyPrefix = "tptp.axiom.";

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

struct Literal {
	bool negative;
	std::string predicate;
	Term arg;
};

struct Statement {
	std::string name;
	std::string role;
	std::vector<Literal> literals;
};

class Reader {
public:
	explicit Reader(std::string_view text) : text_(text) {}

	std::optional<Statement> next() {
		skip();
		if (pos_ >= text_.size())
			return std::nullopt;
		std::size_t start = pos_;
		std::string kind = word();
		if (kind == "include")
			throw TptpError("", "include directives are not supported (offset " + std::to_string(start) + ")");
		if (kind == "fof" || kind == "tff" || kind == "thf" || kind == "tcf")
			throw TptpError("", kind + " statements are not supported (offset " + std::to_string(start) + ")");
		if (kind != "cnf")
			throw TptpError("", "unexpected '" + (kind.empty() ? std::string(1, text_[start]) : kind) +
									"' at offset " + std::to_string(start));
		Statement s;
		expect('(');
		s.name = name();
		expect(',');
		s.role = word();
		if (s.role.empty())
			fail(s.name, "missing role");
		expect(',');
		std::size_t depth = 0;
		while (peek() == '(') {
			++pos_;
			++depth;
		}
		do
			s.literals.push_back(literal(s.name));
		while (accept('|'));
		for (; depth > 0; --depth)
			expect(')', s.name);
		if (accept(',')) {
			// Annotations are skipped up to the statement's closing parenthesis.
			int nest = 0;
			while (pos_ < text_.size() && !(nest == 0 && text_[pos_] == ')')) {
				if (text_[pos_] == '(' || text_[pos_] == '[')
					++nest;
				else if (text_[pos_] == ')' || text_[pos_] == ']')
					--nest;
				++pos_;
			}
		}
		expect(')', s.name);
		expect('.', s.name);
		return s;
	}

private:
	[[noreturn]] void fail(const std::string& clause, const std::string& what) const {
		throw TptpError(clause, what + " at offset " + std::to_string(pos_));
	}

	void skip() {
		while (pos_ < text_.size()) {
			char c = text_[pos_];
			if (std::isspace(static_cast<unsigned char>(c))) {
				++pos_;
			} else if (c == '%') {
				while (pos_ < text_.size() && text_[pos_] != '\n')
					++pos_;
			} else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
				std::size_t end = text_.find("*/", pos_ + 2);
				if (end == std::string_view::npos)
					fail("", "unterminated comment");
				pos_ = end + 2;
			} else {
				break;
			}
		}
	}

	char peek() {
		skip();
		return pos_ < text_.size() ? text_[pos_] : '\0';
	}

	bool accept(char c) {
		if (peek() != c)
			return false;
		++pos_;
		return true;
	}

	void expect(char c, const std::string& clause = {}) {
		if (!accept(c))
			fail(clause, std::string("expected '") + c + "'");
	}

	std::string word() {
		skip();
		std::size_t start = pos_;
		while (pos_ < text_.size() && is_word(text_[pos_]))
			++pos_;
		return std::string(text_.substr(start, pos_ - start));
	}

	std::string name() {
		if (peek() == '\'') {
			std::size_t end = text_.find('\'', pos_ + 1);
			if (end == std::string_view::npos)
				fail("", "unterminated quoted name");
			std::string n(text_.substr(pos_ + 1, end - pos_ - 1));
			pos_ = end + 1;
			return n;
		}
		std::string n = word();
		if (n.empty())
			fail("", "missing clause name");
		return n;
	}

	Term term(const std::string& clause) {
		std::string w = word();
		if (w.empty())
			fail(clause, "expected a term");
		if (is_upper(w[0]) || w[0] == '_')
			return Term::variable(w);
		std::vector<Term> args;
		if (accept('(')) {
			do
				args.push_back(term(clause));
			while (accept(','));
			expect(')', clause);
		}
		return Term::apply(w, std::move(args));
	}

	/// The predicate may be written in upper case, so the atom head is read
	/// as a symbol regardless of its first letter.
	Literal literal(const std::string& clause) {
		bool neg = accept('~');
		std::string pred = word();
		if (pred.empty() || peek() != '(')
			fail(clause, "literal is not a unary atom");
		expect('(', clause);
		Term arg = term(clause);
		if (peek() != ')')
			fail(clause, "literal is not a unary atom");
		expect(')', clause);
		return {neg, pred, arg};
	}

	std::string_view text_;
	std::size_t pos_ = 0;
};

Term rename_symbol(const Term& t, const std::string& from, const std::string& to) {
	if (t.is_variable())
		return t;
	std::vector<Term> args;
	args.reserve(t.arity());
	for (const Term& a : t.args())
		args.push_back(rename_symbol(a, from, to));
	return Term::apply(t.name() == from ? to : t.name(), std::move(args));
}

bool uses_symbol(const Term& t, const std::string& s) {
	if (t.is_variable())
		return false;
	if (t.name() == s)
		return true;
	return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return uses_symbol(a, s); });
}

/// The implication symbol if the three literals have the shape
/// {~P(f(X,Y)), ~P(X), P(Y)} with X, Y distinct variables.
std::optional<std::string> match_det(const std::vector<Literal>& lits) {
	const Literal* pos = nullptr;
	std::vector<const Literal*> negs;
	for (const auto& l : lits)
		(l.negative ? negs.push_back(&l) : (void)(pos = &l));
	if (!pos || negs.size() != 2 || !pos->arg.is_variable())
		return std::nullopt;
	for (int k = 0; k < 2; ++k) {
		const Term& major = negs[k]->arg;
		const Term& minor = negs[1 - k]->arg;
		if (!major.is_compound() || major.arity() != 2)
			continue;
		const Term& x = major.arg(0);
		const Term& y = major.arg(1);
		if (x.is_variable() && y.is_variable() && x != y && y == pos->arg && minor == x)
			return major.name();
	}
	return std::nullopt;
}

std::string tptp_term(const Term& t, const std::string& implication) {
	if (t.is_variable()) {
		std::string n = t.name();
		if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0])))
			n = "X" + n;
		n[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(n[0])));
		return n;
	}
	std::string out = t.name() == "i" ? implication : t.name();
	if (t.arity() == 0)
		return out;
	out += '(';
	for (std::size_t k = 0; k < t.arity(); ++k) {
		if (k)
			out += ',';
		out += tptp_term(t.arg(k), implication);
	}
	return out + ')';
}

/// X, Y, Z1 become x, y, z1 when every variable of t allows it; otherwise
/// the formula is renamed canonically.
Term lowercase_variables(const Term& t) {
	Substitution s;
	std::set<std::string> used;
	for (const auto& v : variables_of(t)) {
		std::string lower = v;
		for (char& c : lower)
			c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		if (!default_is_variable(lower) || !used.insert(lower).second)
			return canonical(t);
		s.bind(v, Term::variable(lower));
	}
	return s.apply(t);
}

std::string quoted(const std::string& name) {
	bool plain = !name.empty() && !is_upper(name[0]) && name[0] != '_' &&
				 std::all_of(name.begin(), name.end(), [](char c) { return is_word(c) && c != '$'; });
	return plain ? name : "'" + name + "'";
}

std::string meta_or(const Problem& p, const std::string& key, const std::string& fallback) {
	auto it = p.metadata.find(key);
	return it == p.metadata.end() ? fallback : it->second;
}

} // namespace

std::vector<std::string> ordered_axiom_labels(const AxiomMap& axioms) {
	std::vector<std::string> labels;
	for (const auto& [label, f] : axioms)
		labels.push_back(label);
	auto numeric = [](const std::string& s) {
		return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
	};
	std::stable_sort(labels.begin(), labels.end(), [&](const std::string& a, const std::string& b) {
		bool na = numeric(a), nb = numeric(b);
		if (na != nb)
			return na;
		if (na && a.size() != b.size())
			return a.size() < b.size();
		return a < b;
	});
	return labels;
}

Problem parse_tptp_cd(std::string_view text, const std::string& id) {
	Reader reader(text);
	std::vector<Statement> statements;
	while (auto s = reader.next())
		statements.push_back(std::move(*s));

	std::optional<std::string> predicate;
	std::optional<std::string> implication;
	const Statement* det = nullptr;
	const Statement* goal = nullptr;
	std::vector<const Statement*> axioms;
	for (const auto& s : statements) {
		for (const auto& l : s.literals) {
			if (!predicate)
				predicate = l.predicate;
			else if (*predicate != l.predicate)
				throw TptpError(s.name, "predicate '" + l.predicate + "' differs from '" + *predicate +
											"'; only one unary predicate is supported");
		}
		std::size_t neg = static_cast<std::size_t>(
			std::count_if(s.literals.begin(), s.literals.end(), [](const Literal& l) { return l.negative; }));
		std::size_t posc = s.literals.size() - neg;
		if (posc == 1 && neg == 0) {
			axioms.push_back(&s);
		} else if (posc == 0) {
			if (neg != 1)
				throw TptpError(s.name, "negative clause is not a unit clause");
			if (!s.literals[0].arg.is_ground())
				throw TptpError(s.name, "goal is not ground");
			if (goal)
				throw TptpError(s.name, "second negative clause; '" + goal->name + "' is already the goal");
			goal = &s;
		} else if (auto f = match_det(s.literals)) {
			if (det)
				throw TptpError(s.name, "second detachment clause; '" + det->name + "' already is one");
			det = &s;
			implication = *f;
		} else {
			throw TptpError(s.name, "clause is outside the condensed detachment fragment");
		}
	}
	if (!det)
		throw TptpError("", "no detachment clause ~P(i(X,Y)) | ~P(X) | P(Y)");
	if (!goal)
		throw TptpError("", "no negative ground unit clause to serve as the goal");
	if (axioms.empty())
		throw TptpError("", "no axioms");

	auto internal = [&](const Statement& s) {
		const Term& t = s.literals[0].arg;
		if (*implication != "i" && uses_symbol(t, "i"))
			throw TptpError(s.name, "symbol 'i' clashes with the implication symbol '" + *implication + "'");
		return rename_symbol(t, *implication, "i");
	};

	Problem p;
	p.id = id.empty() ? "problem" : id;
	p.metadata[kPredicateKey] = *predicate;
	p.metadata[kImplicationKey] = *implication;
	p.metadata[kDetKey] = det->name;
	p.metadata[kGoalKey] = goal->name;
	std::map<std::string, std::size_t> arities;
	for (std::size_t k = 0; k < axioms.size(); ++k) {
		std::string label = std::to_string(k + 1);
		Term f = lowercase_variables(internal(*axioms[k]));
		try {
			check_arity(f, arities);
		} catch (const std::invalid_argument& e) {
			throw TptpError(axioms[k]->name, e.what());
		}
		p.axioms.emplace(label, f);
		p.metadata[kAxiomKeyPrefix + label] = axioms[k]->name;
	}
	p.goal = internal(*goal);
	try {
		check_arity(p.goal, arities);
	} catch (const std::invalid_argument& e) {
		throw TptpError(goal->name, e.what());
	}
	return p;
}

std::string export_tptp(const Problem& p, const std::vector<LemmaRecord>& lemmas) {
	const std::string pred = meta_or(p, kPredicateKey, "P");
	const std::string imp = meta_or(p, kImplicationKey, "i");
	std::ostringstream out;
	out << "% " << p.id << ": condensed detachment problem";
	if (!lemmas.empty())
		out << " with " << lemmas.size() << " added lemmas";
	out << '\n';
	out << "cnf(" << quoted(meta_or(p, kDetKey, "det")) << ", axiom, ~" << pred << '(' << imp << "(X,Y)) | ~" << pred
		<< "(X) | " << pred << "(Y)).\n";
	for (const auto& label : ordered_axiom_labels(p.axioms))
		out << "cnf(" << quoted(meta_or(p, kAxiomKeyPrefix + label, "axiom_" + label)) << ", axiom, " << pred << '('
			<< tptp_term(p.axioms.at(label), imp) << ")).\n";
	out << "cnf(" << quoted(meta_or(p, kGoalKey, "goal")) << ", negated_conjecture, ~" << pred << '('
		<< tptp_term(p.goal, imp) << ")).\n";
	for (std::size_t k = 0; k < lemmas.size(); ++k)
		out << "cnf(lemma_" << k + 1 << ", axiom, " << pred << '(' << tptp_term(lemmas[k].formula, imp) << ")).\n";
	return out.str();
}

} // namespace cdforge
