#include "dssat/circuits.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <queue>
#include <set>

namespace dssat {

namespace {

struct KindName {
    NodeKind kind;
    std::string_view name;
};

constexpr KindName kind_names[] = {
    {NodeKind::input, "input"},     {NodeKind::and_gate, "and"}, {NodeKind::or_gate, "or"},
    {NodeKind::nand_gate, "nand"},  {NodeKind::nor_gate, "nor"}, {NodeKind::xor_gate, "xor"},
    {NodeKind::not_gate, "not"},    {NodeKind::black_box, "bb"},
};

[[noreturn]] void invalid(const std::string& why)
{
    throw Error(ErrorCode::invalid_circuit, why);
}

std::string name(NodeId id)
{
    return std::to_string(id.value());
}

bool is_gate(NodeKind k)
{
    return k != NodeKind::input && k != NodeKind::black_box;
}

}  // namespace

std::string_view node_kind_name(NodeKind kind)
{
    for (const auto& k : kind_names) {
        if (k.kind == kind) return k.name;
    }
    return "?";
}

void Circuit::add(Node node)
{
    if (!index_.emplace(node.id, nodes_.size()).second) invalid("node " + name(node.id) + " defined twice");
    nodes_.push_back(std::move(node));
}

const Node& Circuit::node(NodeId id) const
{
    const auto it = index_.find(id);
    if (it == index_.end()) invalid("unknown node " + name(id));
    return nodes_[it->second];
}

std::vector<NodeId> Circuit::inputs() const
{
    std::vector<NodeId> out;
    for (const auto& [id, i] : index_) {
        if (nodes_[i].kind == NodeKind::input) out.push_back(id);
    }
    return out;
}

std::vector<NodeId> Circuit::black_boxes() const
{
    std::vector<NodeId> out;
    for (const auto& [id, i] : index_) {
        if (nodes_[i].kind == NodeKind::black_box) out.push_back(id);
    }
    return out;
}

bool Circuit::has_errors() const
{
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.error_rate != 0.0; });
}

void Circuit::validate() const
{
    for (const auto& n : nodes_) {
        const auto arity = n.fanins.size();
        switch (n.kind) {
        case NodeKind::input:
            if (arity != 0) invalid("input " + name(n.id) + " has fan-ins");
            if (n.error_rate != 0.0) invalid("input " + name(n.id) + " has an error rate");
            if (!(n.probability >= 0.0 && n.probability <= 1.0)) {
                throw Error(ErrorCode::bad_probability, "input " + name(n.id) + " probability outside [0,1]");
            }
            break;
        case NodeKind::not_gate:
            if (arity != 1) invalid("not gate " + name(n.id) + " needs one fan-in");
            break;
        case NodeKind::xor_gate:
            if (arity != 2) invalid("xor gate " + name(n.id) + " needs two fan-ins");
            break;
        case NodeKind::black_box: {
            std::set<NodeId> unique(n.fanins.begin(), n.fanins.end());
            if (unique.size() != arity) invalid("black box " + name(n.id) + " lists a dependency twice");
            break;
        }
        default:
            if (arity == 0) invalid("gate " + name(n.id) + " has no fan-ins");
        }
        if (!(n.error_rate >= 0.0 && n.error_rate <= 1.0)) invalid("error rate of " + name(n.id) + " outside [0,1]");
        for (const auto f : n.fanins) {
            if (!contains(f)) invalid("node " + name(n.id) + " refers to unknown node " + name(f));
        }
    }
    if (outputs_.empty()) invalid("circuit has no outputs");
    for (const auto o : outputs_) {
        if (!contains(o)) invalid("unknown output node " + name(o));
    }
    topological_order();
}

std::vector<NodeId> Circuit::topological_order() const
{
    std::map<NodeId, std::size_t> pending;
    std::map<NodeId, std::vector<NodeId>> fanouts;
    for (const auto& n : nodes_) {
        pending[n.id] = n.fanins.size();
        for (const auto f : n.fanins) {
            if (!contains(f)) invalid("node " + name(n.id) + " refers to unknown node " + name(f));
            fanouts[f].push_back(n.id);
        }
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, count] : pending) {
        if (count == 0) ready.push(id);
    }
    std::vector<NodeId> order;
    while (!ready.empty()) {
        const auto id = ready.top();
        ready.pop();
        order.push_back(id);
        for (const auto out : fanouts[id]) {
            if (--pending[out] == 0) ready.push(out);
        }
    }
    if (order.size() == nodes_.size()) return order;

    // Walk fan-ins among the unplaced nodes until a node repeats; that closes a cycle.
    NodeId at{};
    for (const auto& [id, count] : pending) {
        if (count != 0) {
            at = id;
            break;
        }
    }
    std::vector<NodeId> walk;
    std::map<NodeId, std::size_t> seen;
    while (!seen.count(at)) {
        seen[at] = walk.size();
        walk.push_back(at);
        for (const auto f : node(at).fanins) {
            if (pending[f] != 0) {
                at = f;
                break;
            }
        }
    }
    const bool through_black_box = std::any_of(walk.begin() + static_cast<std::ptrdiff_t>(seen[at]), walk.end(),
                                               [&](NodeId id) { return node(id).kind == NodeKind::black_box; });
    if (through_black_box) {
        throw Error(ErrorCode::cyclic_black_box, "black box at node " + name(at) + " lies on a cycle");
    }
    invalid("cycle through node " + name(at));
}

// ---------------------------------------------------------------- text format

Circuit parse_circuit(std::string_view text)
{
    Circuit circuit;
    std::size_t number = 0;
    auto syntax = [&](const std::string& why) -> void { throw Error(ErrorCode::syntax_error, why, number); };
    auto to_id = [&](std::string_view t) {
        std::uint32_t v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size()) syntax("expected a node id, got '" + std::string(t.substr(0, 32)) + "'");
        return NodeId(v);
    };
    auto to_probability = [&](std::string_view t) {
        double v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size()) syntax("expected a number, got '" + std::string(t.substr(0, 32)) + "'");
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::bad_probability, "probability outside [0,1]", number);
        return v;
    };

    while (!text.empty()) {
        ++number;
        const auto end = text.find('\n');
        auto line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        line = line.substr(0, line.find('#'));
        std::vector<std::string_view> tok;
        for (std::size_t i = 0; i < line.size();) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            const auto start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > start) tok.push_back(line.substr(start, i - start));
        }
        if (tok.empty()) continue;
        if (tok[0] == "output") {
            if (tok.size() < 2) syntax("output line lists no nodes");
            for (std::size_t i = 1; i < tok.size(); ++i) circuit.add_output(to_id(tok[i]));
            continue;
        }
        if (tok.size() < 2) syntax("expected '<id> <kind> ...'");
        Node node;
        node.id = to_id(tok[0]);
        const auto kind = std::find_if(std::begin(kind_names), std::end(kind_names),
                                       [&](const KindName& k) { return k.name == tok[1]; });
        if (kind == std::end(kind_names)) {
            throw Error(ErrorCode::unsupported_gate, "unknown node kind '" + std::string(tok[1].substr(0, 32)) + "'", number);
        }
        node.kind = kind->kind;
        for (std::size_t i = 2; i < tok.size(); ++i) {
            if (tok[i] == "err" || tok[i] == "prob") {
                if (i + 2 != tok.size()) syntax("'" + std::string(tok[i]) + "' must be followed by exactly one value");
                const bool is_input = node.kind == NodeKind::input;
                if ((tok[i] == "prob") != is_input) syntax("'prob' applies to inputs, 'err' to gates and black boxes");
                (is_input ? node.probability : node.error_rate) = to_probability(tok[i + 1]);
                break;
            }
            node.fanins.push_back(to_id(tok[i]));
        }
        try {
            circuit.add(std::move(node));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), number);
        }
    }
    try {
        circuit.validate();
    } catch (const Error& e) {
        throw Error(e.code(), e.what(), number == 0 ? 1 : number);
    }
    return circuit;
}

std::string print_circuit(const Circuit& circuit)
{
    std::string out;
    for (const auto& n : circuit.nodes()) {
        out += fmt::format("{} {}", n.id.value(), node_kind_name(n.kind));
        for (const auto f : n.fanins) out += fmt::format(" {}", f.value());
        if (n.kind == NodeKind::input) {
            out += fmt::format(" prob {}", n.probability);
        } else if (n.error_rate != 0.0) {
            out += fmt::format(" err {}", n.error_rate);
        }
        out += '\n';
    }
    out += "output";
    for (const auto o : circuit.outputs()) out += fmt::format(" {}", o.value());
    out += '\n';
    return out;
}

// ---------------------------------------------------------------- distillation

DistilledCircuit distill(const Circuit& circuit)
{
    circuit.validate();
    const auto order = circuit.topological_order();
    std::uint32_t next = 0;
    for (const auto& n : circuit.nodes()) next = std::max(next, n.id.value() + 1);

    DistilledCircuit result;
    std::map<NodeId, Node> replaced;
    for (const auto id : order) {
        const auto& n = circuit.node(id);
        if (n.error_rate == 0.0) continue;
        Node clean = n;
        clean.id = NodeId(next++);
        clean.error_rate = 0.0;
        const NodeId z(next++);
        result.aux.push_back({z, id, n.error_rate});
        replaced.emplace(id, std::move(clean));
    }
    for (const auto& n : circuit.nodes()) {
        const auto it = replaced.find(n.id);
        if (it == replaced.end()) {
            result.circuit.add(n);
            continue;
        }
        result.circuit.add(it->second);
        result.circuit.add({n.id, NodeKind::xor_gate, {it->second.id, NodeId(it->second.id.value() + 1)}, 0.0, 0.5});
    }
    for (const auto& a : result.aux) result.circuit.add({a.input, NodeKind::input, {}, 0.0, a.probability});
    for (const auto o : circuit.outputs()) result.circuit.add_output(o);
    return result;
}

// ---------------------------------------------------------------- Tseitin

TseitinEncoding tseitin(const Circuit& circuit, const std::map<NodeId, VariableId>& leaves, std::uint32_t first_fresh)
{
    TseitinEncoding enc;
    auto next = first_fresh;
    for (const auto id : circuit.topological_order()) {
        const auto& n = circuit.node(id);
        if (!is_gate(n.kind)) {
            const auto it = leaves.find(id);
            if (it == leaves.end()) invalid("no variable bound to leaf " + name(id));
            enc.node_vars[id] = it->second;
            continue;
        }
        if (n.error_rate != 0.0) {
            throw Error(ErrorCode::unsupported_gate, "gate " + name(id) + " has an error rate; distill first");
        }
        const VariableId g(next++);
        enc.node_vars[id] = g;
        enc.defined.push_back(g);
        std::vector<VariableId> in;
        for (const auto f : n.fanins) in.push_back(enc.node_vars.at(f));
        auto& m = enc.matrix;
        // Conjunction-like gates: output polarity `out` iff every input has polarity `all`.
        auto conjunction = [&](bool out, bool all) {
            const Literal g_out = out ? Literal::pos(g) : Literal::neg(g);
            for (const auto a : in) m.add_clause({~g_out, all ? Literal::pos(a) : Literal::neg(a)});
            Clause c{g_out};
            for (const auto a : in) c.push_back(all ? Literal::neg(a) : Literal::pos(a));
            m.add_clause(std::move(c));
        };
        switch (n.kind) {
        case NodeKind::and_gate: conjunction(true, true); break;
        case NodeKind::nor_gate: conjunction(true, false); break;
        case NodeKind::nand_gate: conjunction(false, true); break;
        case NodeKind::or_gate: conjunction(false, false); break;
        case NodeKind::not_gate:
            m.add_clause({Literal::pos(g), Literal::pos(in[0])});
            m.add_clause({Literal::neg(g), Literal::neg(in[0])});
            break;
        case NodeKind::xor_gate:
            m.add_clause({Literal::neg(g), Literal::pos(in[0]), Literal::pos(in[1])});
            m.add_clause({Literal::neg(g), Literal::neg(in[0]), Literal::neg(in[1])});
            m.add_clause({Literal::pos(g), Literal::neg(in[0]), Literal::pos(in[1])});
            m.add_clause({Literal::pos(g), Literal::pos(in[0]), Literal::neg(in[1])});
            break;
        default:
            throw Error(ErrorCode::unsupported_gate, "unsupported gate kind at node " + name(id));
        }
    }
    return enc;
}

// ---------------------------------------------------------------- partial design

namespace {

void check_spec(const Circuit& spec)
{
    spec.validate();
    if (!spec.black_boxes().empty()) invalid("the specification must not contain black boxes");
    if (spec.has_errors()) throw Error(ErrorCode::error_rates_present, "the specification must be error-free");
}

void check_shared_inputs(const Circuit& spec, const Circuit& impl)
{
    const auto inputs = spec.inputs();
    if (inputs != impl.inputs()) {
        throw Error(ErrorCode::shared_input_mismatch, "specification and implementation have different inputs");
    }
    for (const auto x : inputs) {
        if (spec.node(x).probability != impl.node(x).probability) {
            throw Error(ErrorCode::shared_input_mismatch, "input " + name(x) + " has different probabilities");
        }
    }
    if (spec.outputs().size() != impl.outputs().size()) {
        throw Error(ErrorCode::shared_input_mismatch, "specification and implementation have different output counts");
    }
}

// (Y == E) -> (F == G): a mismatch variable per referenced node and an
// agreement variable per output, each Tseitin-defined.
PartialDesignEncoding encode_partial(const Circuit& spec, const Circuit& original, const DistilledCircuit& distilled)
{
    const auto& impl = distilled.circuit;
    PartialDesignEncoding enc;
    std::vector<PrefixEntry> prefix;
    std::uint32_t next = 1;
    std::vector<VariableId> outer;

    for (const auto x : original.inputs()) {
        const VariableId v(next++);
        enc.inputs[x] = v;
        prefix.push_back({v, Quantifier::random(original.node(x).probability), Domain::boolean()});
        outer.push_back(v);
    }
    enc.aux = distilled.aux;
    for (const auto& a : distilled.aux) {
        const VariableId v(next++);
        enc.aux_vars.push_back(v);
        prefix.push_back({v, Quantifier::random(a.probability), Domain::boolean()});
        outer.push_back(v);
    }
    std::set<NodeId> referenced;
    const auto boxes = impl.black_boxes();
    for (const auto t : boxes) {
        for (const auto d : impl.node(t).fanins) {
            if (!enc.inputs.count(d)) referenced.insert(d);
        }
    }
    for (const auto y : referenced) {
        const VariableId v(next++);
        enc.intermediates[y] = v;
        prefix.push_back({v, Quantifier::universal(), Domain::boolean()});
        outer.push_back(v);
    }
    for (const auto t : boxes) {
        std::vector<VariableId> deps;
        for (const auto d : impl.node(t).fanins) {
            deps.push_back(enc.inputs.count(d) ? enc.inputs.at(d) : enc.intermediates.at(d));
        }
        const VariableId v(next++);
        enc.black_boxes[t] = v;
        prefix.push_back({v, Quantifier::existential(std::move(deps)), Domain::boolean()});
    }

    std::map<NodeId, VariableId> leaves = enc.inputs;
    for (std::size_t i = 0; i < distilled.aux.size(); ++i) leaves[distilled.aux[i].input] = enc.aux_vars[i];
    for (const auto& [t, v] : enc.black_boxes) leaves[t] = v;
    auto impl_enc = tseitin(impl, leaves, next);
    next += static_cast<std::uint32_t>(impl_enc.defined.size());
    auto spec_enc = tseitin(spec, enc.inputs, next);
    next += static_cast<std::uint32_t>(spec_enc.defined.size());

    Matrix matrix = std::move(impl_enc.matrix);
    for (const auto& c : spec_enc.matrix.clauses()) matrix.add_clause(c);
    std::vector<VariableId> defined = std::move(impl_enc.defined);
    defined.insert(defined.end(), spec_enc.defined.begin(), spec_enc.defined.end());

    // Both helpers define d <-> (a xor b) when `differ`, d <-> (a xnor b) otherwise.
    auto define_xor = [&](VariableId a, VariableId b, bool differ) {
        const VariableId d(next++);
        defined.push_back(d);
        const Literal on = differ ? Literal::pos(d) : Literal::neg(d);
        matrix.add_clause({~on, Literal::pos(a), Literal::pos(b)});
        matrix.add_clause({~on, Literal::neg(a), Literal::neg(b)});
        matrix.add_clause({on, Literal::neg(a), Literal::pos(b)});
        matrix.add_clause({on, Literal::pos(a), Literal::neg(b)});
        return d;
    };
    std::vector<VariableId> mismatch;
    for (const auto& [y, v] : enc.intermediates) mismatch.push_back(define_xor(v, impl_enc.node_vars.at(y), true));
    for (std::size_t o = 0; o < impl.outputs().size(); ++o) {
        const auto agree = define_xor(impl_enc.node_vars.at(impl.outputs()[o]), spec_enc.node_vars.at(spec.outputs()[o]), false);
        Clause c;
        for (const auto m : mismatch) c.push_back(Literal::pos(m));
        c.push_back(Literal::pos(agree));
        matrix.add_clause(std::move(c));
    }
    for (const auto d : defined) prefix.push_back({d, Quantifier::existential(outer), Domain::boolean()});

    enc.formula = build_formula(std::move(prefix), std::move(matrix));
    return enc;
}

}  // namespace

PartialDesignEncoding encode_probabilistic_partial(const Circuit& spec, const Circuit& impl)
{
    check_spec(spec);
    impl.validate();
    check_shared_inputs(spec, impl);
    return encode_partial(spec, impl, distill(impl));
}

PartialDesignEncoding encode_approx_partial(const Circuit& spec, const Circuit& impl)
{
    check_spec(spec);
    impl.validate();
    if (impl.has_errors()) throw Error(ErrorCode::error_rates_present, "approximate designs carry no error rates");
    check_shared_inputs(spec, impl);
    return encode_partial(spec, impl, distill(impl));
}

}  // namespace dssat
