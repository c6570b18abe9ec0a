#include "cdforge/dterm.hpp"

#include "cdforge/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace cdforge {

DTerm DTerm::leaf(std::string label) {
	auto n = std::make_shared<Node>();
	n->hash = std::hash<std::string>{}(label) * 0x100000001b3ULL + 0x2545f491;
	n->label = std::move(label);
	return DTerm(std::move(n));
}

DTerm DTerm::node(DTerm major, DTerm minor) {
	auto n = std::make_shared<Node>();
	n->tsize = major.tsize() + minor.tsize() + 1;
	n->height = std::max(major.height(), minor.height()) + 1;
	std::size_t h = major.hash();
	h ^= minor.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
	n->hash = h * 31 + 7;
	n->kids.reserve(2);
	n->kids.push_back(std::move(major));
	n->kids.push_back(std::move(minor));
	return DTerm(std::move(n));
}

bool operator==(const DTerm& a, const DTerm& b) {
	if (a.node_ == b.node_)
		return true;
	if (a.node_->hash != b.node_->hash || a.node_->tsize != b.node_->tsize || a.is_leaf() != b.is_leaf())
		return false;
	if (a.is_leaf())
		return a.node_->label == b.node_->label;
	return a.major() == b.major() && a.minor() == b.minor();
}

DMeasures d_measures(const DTerm& d) {
	return {d.tsize(), d.height(), minimal_dag(d).node_count()};
}

// ---------------------------------------------------------------------------
// Text

namespace {

bool is_token_char(char c) {
	return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class DTermParser {
public:
	using Resolver = std::function<DTerm(const std::string&, std::size_t)>;

	DTermParser(std::string_view text, std::size_t offset, Resolver resolve)
		: text_(text), offset_(offset), resolve_(std::move(resolve)) {}

	DTerm parse_all() {
		DTerm d = parse();
		skip_ws();
		if (pos_ != text_.size())
			throw ParseError("unexpected trailing input in D-term", offset_ + pos_);
		return d;
	}

private:
	void skip_ws() {
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
	}

	void expect(char c) {
		skip_ws();
		if (pos_ >= text_.size() || text_[pos_] != c)
			throw ParseError(std::string("expected '") + c + "'", offset_ + pos_);
		++pos_;
	}

	DTerm parse() {
		skip_ws();
		std::size_t start = pos_;
		while (pos_ < text_.size() && is_token_char(text_[pos_]))
			++pos_;
		if (start == pos_)
			throw ParseError(pos_ < text_.size() ? std::string("unexpected character '") + text_[pos_] + "' in D-term"
												 : "unexpected end of D-term",
							 offset_ + pos_);
		std::string token(text_.substr(start, pos_ - start));
		skip_ws();
		if (token == "D" && pos_ < text_.size() && text_[pos_] == '(') {
			++pos_;
			DTerm a = parse();
			expect(',');
			DTerm b = parse();
			expect(')');
			return DTerm::node(std::move(a), std::move(b));
		}
		return resolve_(token, offset_ + start);
	}

	std::string_view text_;
	std::size_t offset_;
	Resolver resolve_;
	std::size_t pos_ = 0;
};

void print_dterm(const DTerm& d, std::string& out) {
	if (d.is_leaf()) {
		out += d.label();
		return;
	}
	out += "D(";
	print_dterm(d.major(), out);
	out += ',';
	print_dterm(d.minor(), out);
	out += ')';
}

bool is_numeric(const std::string& s) {
	return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

} // namespace

DTerm parse_dterm(std::string_view text) {
	return DTermParser(text, 0, [](const std::string& token, std::size_t) { return DTerm::leaf(token); }).parse_all();
}

std::string to_string(const DTerm& d) {
	std::string out;
	print_dterm(d, out);
	return out;
}

// ---------------------------------------------------------------------------
// Minimal DAG

namespace {

class DagBuilder {
public:
	std::size_t add(const DTerm& d) {
		if (auto it = ids_.find(d); it != ids_.end())
			return it->second;
		MinimalDag::Entry e;
		if (d.is_leaf()) {
			e.label = d.label();
		} else {
			e.is_leaf = false;
			e.major = add(d.major());
			e.minor = add(d.minor());
		}
		dag.entries.push_back(std::move(e));
		std::size_t id = dag.entries.size() - 1;
		ids_.emplace(d, id);
		return id;
	}

	MinimalDag dag;

private:
	DTermMap<std::size_t> ids_;
};

} // namespace

std::size_t MinimalDag::node_count() const {
	return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const Entry& e) { return !e.is_leaf; }));
}

MinimalDag minimal_dag(const DTerm& d) {
	DagBuilder b;
	b.dag.root = b.add(d);
	return std::move(b.dag);
}

DTerm unfold(const MinimalDag& dag) {
	std::vector<DTerm> built;
	built.reserve(dag.entries.size());
	for (const auto& e : dag.entries) {
		if (e.is_leaf)
			built.push_back(DTerm::leaf(e.label));
		else
			built.push_back(DTerm::node(built.at(e.major), built.at(e.minor)));
	}
	return built.at(dag.root);
}

// ---------------------------------------------------------------------------
// Factor equations

namespace {

struct Segment {
	std::string_view text;
	std::size_t offset;
};

std::vector<Segment> split_top_level(std::string_view text) {
	std::vector<Segment> out;
	int depth = 0;
	std::size_t start = 0;
	auto flush = [&](std::size_t end) {
		std::string_view s = text.substr(start, end - start);
		std::size_t lead = 0;
		while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead])))
			++lead;
		s.remove_prefix(lead);
		while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
			s.remove_suffix(1);
		if (!s.empty())
			out.push_back({s, start + lead});
	};
	for (std::size_t i = 0; i < text.size(); ++i) {
		char c = text[i];
		if (c == '(')
			++depth;
		else if (c == ')')
			--depth;
		else if (depth == 0 && (c == ',' || c == '\n' || c == ';')) {
			flush(i);
			start = i + 1;
		}
	}
	flush(text.size());
	return out;
}

} // namespace

DTerm parse_factor_equations(std::string_view text, const std::set<std::string>* axiom_labels) {
	auto segments = split_top_level(text);
	if (segments.empty())
		throw ParseError("empty factor-equation list", 0);

	struct Equation {
		std::string label;
		std::string_view rhs;
		std::size_t offset;
	};
	std::vector<Equation> eqs;
	std::map<std::string, std::size_t> defined_at;
	for (std::size_t i = 0; i < segments.size(); ++i) {
		const auto& seg = segments[i];
		auto eq = seg.text.find('=');
		if (eq == std::string_view::npos) {
			if (i + 1 != segments.size())
				throw ParseError("expected '<label> = <D-term>'", seg.offset);
			eqs.push_back({"", seg.text, seg.offset});
			continue;
		}
		std::string_view lhs = seg.text.substr(0, eq);
		while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back())))
			lhs.remove_suffix(1);
		if (lhs.empty() || !std::all_of(lhs.begin(), lhs.end(), is_token_char))
			throw ParseError("malformed factor label", seg.offset);
		std::string label(lhs);
		if (axiom_labels && axiom_labels->contains(label))
			throw ParseError("factor label '" + label + "' redefines an axiom", seg.offset);
		if (!defined_at.emplace(label, i).second)
			throw ParseError("duplicate definition of '" + label + "'", seg.offset);
		eqs.push_back({label, seg.text.substr(eq + 1), seg.offset + eq + 1});
	}

	std::map<std::string, DTerm> defs;
	std::optional<DTerm> last;
	for (std::size_t i = 0; i < eqs.size(); ++i) {
		const auto& eq = eqs[i];
		auto resolve = [&](const std::string& token, std::size_t where) -> DTerm {
			if (auto it = defs.find(token); it != defs.end())
				return it->second;
			if (auto it = defined_at.find(token); it != defined_at.end())
				throw ParseError(it->second == i ? "cycle: '" + token + "' refers to itself"
												 : "cycle or forward reference to '" + token + "'",
								 where);
			if (axiom_labels && !axiom_labels->contains(token))
				throw ParseError("undefined label '" + token + "'", where);
			return DTerm::leaf(token);
		};
		DTerm d = DTermParser(eq.rhs, eq.offset, resolve).parse_all();
		if (!eq.label.empty())
			defs.emplace(eq.label, d);
		last = std::move(d);
	}
	return *last;
}

std::string print_factor_equations(const DTerm& d) {
	if (d.is_leaf())
		return d.label();
	MinimalDag dag = minimal_dag(d);
	std::vector<std::size_t> incoming(dag.entries.size(), 0);
	unsigned long long first = 1;
	for (const auto& e : dag.entries) {
		if (e.is_leaf) {
			if (is_numeric(e.label))
				first = std::max(first, std::stoull(e.label) + 1);
		} else {
			++incoming[e.major];
			++incoming[e.minor];
		}
	}
	std::vector<std::string> names(dag.entries.size());
	unsigned long long next = first;
	for (std::size_t id = 0; id < dag.entries.size(); ++id) {
		const auto& e = dag.entries[id];
		if (e.is_leaf)
			names[id] = e.label;
		else if (incoming[id] >= 2 || id == dag.root)
			names[id] = std::to_string(next++);
	}

	std::function<void(std::size_t, std::string&)> inline_expr = [&](std::size_t id, std::string& out) {
		const auto& e = dag.entries[id];
		out += "D(";
		for (int k = 0; k < 2; ++k) {
			std::size_t child = k == 0 ? e.major : e.minor;
			if (k == 1)
				out += ", ";
			if (!names[child].empty())
				out += names[child];
			else
				inline_expr(child, out);
		}
		out += ')';
	};

	std::string out;
	for (std::size_t id = 0; id < dag.entries.size(); ++id) {
		if (dag.entries[id].is_leaf || names[id].empty())
			continue;
		if (!out.empty())
			out += ", ";
		out += names[id];
		out += " = ";
		inline_expr(id, out);
	}
	return out;
}

// ---------------------------------------------------------------------------
// Subterms

std::vector<DTerm> distinct_subterms(const DTerm& d) {
	MinimalDag dag = minimal_dag(d);
	std::vector<DTerm> built;
	built.reserve(dag.entries.size());
	for (const auto& e : dag.entries)
		built.push_back(e.is_leaf ? DTerm::leaf(e.label) : DTerm::node(built[e.major], built[e.minor]));
	return built;
}

std::vector<DTerm> distinct_compound_subterms(const DTerm& d) {
	std::vector<DTerm> all = distinct_subterms(d);
	std::erase_if(all, [](const DTerm& t) { return t.is_leaf(); });
	return all;
}

bool is_subterm(const DTerm& sub, const DTerm& d) {
	if (sub.tsize() > d.tsize())
		return false;
	if (sub == d)
		return true;
	if (d.is_leaf())
		return false;
	return is_subterm(sub, d.major()) || is_subterm(sub, d.minor());
}

std::vector<ClosureEntry> subproof_closure(const std::vector<DTerm>& s) {
	DTermSet seen;
	std::vector<DTerm> all;
	for (const DTerm& d : s)
		for (DTerm& sub : distinct_subterms(d))
			if (seen.insert(sub).second)
				all.push_back(std::move(sub));
	std::vector<std::pair<std::string, DTerm>> keyed;
	keyed.reserve(all.size());
	for (DTerm& d : all)
		keyed.emplace_back(to_string(d), std::move(d));
	std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
		if (a.second.tsize() != b.second.tsize())
			return a.second.tsize() < b.second.tsize();
		return a.first < b.first;
	});
	std::vector<ClosureEntry> out;
	out.reserve(keyed.size());
	for (auto& [_, d] : keyed) {
		bool leaf = d.is_leaf();
		out.push_back({std::move(d), leaf});
	}
	return out;
}

namespace {

bool is_pattern_variable(const DTerm& d) {
	return d.is_leaf() && !d.label().empty() && std::isupper(static_cast<unsigned char>(d.label()[0]));
}

bool instance_of(const DTerm& pattern, const DTerm& t, std::map<std::string, DTerm>& binding) {
	if (is_pattern_variable(pattern)) {
		auto [it, inserted] = binding.emplace(pattern.label(), t);
		return inserted || it->second == t;
	}
	if (pattern.is_leaf())
		return t.is_leaf() && t.label() == pattern.label();
	if (t.is_leaf())
		return false;
	return instance_of(pattern.major(), t.major(), binding) && instance_of(pattern.minor(), t.minor(), binding);
}

std::uint64_t count_occurrences(const DTerm& pattern, const DTerm& host, DTermMap<std::uint64_t>& memo) {
	if (auto it = memo.find(host); it != memo.end())
		return it->second;
	std::map<std::string, DTerm> binding;
	std::uint64_t n = instance_of(pattern, host, binding) ? 1 : 0;
	if (host.is_node())
		n += count_occurrences(pattern, host.major(), memo) + count_occurrences(pattern, host.minor(), memo);
	memo.emplace(host, n);
	return n;
}

} // namespace

std::uint64_t count_instance_occurrences(const DTerm& pattern, const DTerm& host) {
	DTermMap<std::uint64_t> memo;
	return count_occurrences(pattern, host, memo);
}

std::uint64_t dag_incoming_edges(const DTerm& sub, const DTerm& host) {
	MinimalDag dag = minimal_dag(host);
	auto subs = distinct_subterms(host);
	std::optional<std::size_t> target;
	for (std::size_t id = 0; id < subs.size(); ++id)
		if (subs[id] == sub) {
			target = id;
			break;
		}
	if (!target)
		return 0;
	std::uint64_t n = 0;
	for (const auto& e : dag.entries)
		if (!e.is_leaf)
			n += (e.major == *target) + (e.minor == *target);
	return n;
}

namespace {

std::optional<std::uint64_t> depth_to(const DTerm& sub, const DTerm& host, DTermMap<std::optional<std::uint64_t>>& memo) {
	if (host == sub)
		return 0;
	if (host.is_leaf() || host.tsize() < sub.tsize())
		return std::nullopt;
	if (auto it = memo.find(host); it != memo.end())
		return it->second;
	auto a = depth_to(sub, host.major(), memo);
	auto b = depth_to(sub, host.minor(), memo);
	std::optional<std::uint64_t> r;
	if (a || b)
		r = 1 + std::min(a.value_or(UINT64_MAX - 1), b.value_or(UINT64_MAX - 1));
	memo.emplace(host, r);
	return r;
}

} // namespace

std::optional<std::uint64_t> min_depth_of(const DTerm& sub, const DTerm& host) {
	DTermMap<std::optional<std::uint64_t>> memo;
	return depth_to(sub, host, memo);
}

std::set<std::string> leaf_labels(const DTerm& d) {
	std::set<std::string> out;
	for (const auto& e : minimal_dag(d).entries)
		if (e.is_leaf)
			out.insert(e.label);
	return out;
}

} // namespace cdforge
