#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab::circuit {

/// Perfect nu-ary rooted tree of height h. Node indices run base level first,
/// then level by level up to the root, which gets the last index.
class TreeTopology {
  public:
    TreeTopology(int nu, int h) : nu_(nu), h_(h) {
        if (nu < 2) throw std::invalid_argument("TreeTopology: nu must be >= 2");
        if (h < 1) throw std::invalid_argument("TreeTopology: h must be >= 1");
        base_count_ = 1;
        for (int l = 0; l < h; ++l) base_count_ *= static_cast<std::size_t>(nu);
        level_start_.resize(h + 2);
        std::size_t idx = 0;
        std::size_t w = base_count_;
        for (int l = 0; l <= h; ++l) {
            level_start_[l] = idx;
            idx += w;
            w /= nu;
        }
        level_start_[h + 1] = idx;
        total_nodes_ = idx;
    }

    int nu() const { return nu_; }
    int height() const { return h_; }
    std::size_t base_count() const { return base_count_; }                 // nu^h
    std::size_t total_nodes() const { return total_nodes_; }               // (nu^{h+1}-1)/(nu-1)
    std::size_t internal_count() const { return total_nodes_ - base_count_; }  // s_{nu,h}
    std::size_t root() const { return total_nodes_ - 1; }

    std::size_t level_start(int l) const { return level_start_.at(l); }
    std::size_t level_size(int l) const { return level_start_.at(l + 1) - level_start_.at(l); }

    int level_of(std::size_t node) const {
        for (int l = 0; l <= h_; ++l)
            if (node < level_start_[l + 1]) return l;
        throw std::out_of_range("TreeTopology::level_of: node out of range");
    }

    std::size_t parent(std::size_t node) const {
        if (node == root()) throw std::invalid_argument("TreeTopology::parent: root has no parent");
        const int l = level_of(node);
        return level_start_[l + 1] + (node - level_start_[l]) / nu_;
    }

    /// c-th child (0-based) of an internal node.
    std::size_t child(std::size_t node, int c) const {
        const int l = level_of(node);
        if (l == 0) throw std::invalid_argument("TreeTopology::child: base nodes have no children");
        return level_start_[l - 1] + (node - level_start_[l]) * nu_ + c;
    }

    bool is_internal(std::size_t node) const { return node >= base_count_; }

  private:
    int nu_;
    int h_;
    std::size_t base_count_ = 0;
    std::size_t total_nodes_ = 0;
    std::vector<std::size_t> level_start_;
};

inline TreeTopology build_tree(int nu, int h) { return TreeTopology(nu, h); }

/// A nu-ary Boolean gate given by its truth table of 2^nu bits.
/// Input bit i (the i-th child) selects bit i of the table index, LSB first.
struct Gate {
    std::string name;
    int arity = 0;
    std::vector<std::uint8_t> table;  // length 2^arity, entries 0/1

    Gate() = default;
    Gate(std::string n, int ar, std::vector<std::uint8_t> t)
        : name(std::move(n)), arity(ar), table(std::move(t)) {
        if (table.size() != (std::size_t(1) << arity))
            throw std::invalid_argument("Gate: truth table must have 2^arity entries");
        for (auto b : table)
            if (b > 1) throw std::invalid_argument("Gate: table entries must be 0/1");
    }

    std::uint8_t eval(const std::vector<std::uint8_t>& inputs) const {
        std::size_t idx = 0;
        for (int i = 0; i < arity; ++i)
            if (inputs[i]) idx |= (std::size_t(1) << i);
        return table[idx];
    }
};

/// Assignment of a gate index to every internal node, stored in topology
/// order (base-adjacent level first, root last).
struct GateConfiguration {
    std::vector<int> gate_at;  // length = internal_count, values in [0, m)

    void validate(const TreeTopology& topo, const std::vector<Gate>& gates) const {
        if (gate_at.size() != topo.internal_count())
            throw std::invalid_argument("GateConfiguration: must assign every internal node");
        for (int g : gate_at) {
            if (g < 0 || g >= static_cast<int>(gates.size()))
                throw std::invalid_argument("GateConfiguration: gate index out of range");
            if (gates[g].arity != topo.nu())
                throw std::invalid_argument("GateConfiguration: gate arity mismatch");
        }
    }

    /// Gate index at a tree node (internal nodes only).
    int at(const TreeTopology& topo, std::size_t node) const {
        return gate_at.at(node - topo.base_count());
    }
};

struct EvalResult {
    std::vector<std::uint8_t> internal_values;  // in topology order over internal nodes
    std::uint8_t root_bit = 0;
};

/// Bottom-up evaluation of the configured tree on a window of nu^h input bits.
inline EvalResult evaluate_tree(const TreeTopology& topo, const GateConfiguration& config,
                                const std::vector<Gate>& gates,
                                const std::vector<std::uint8_t>& input) {
    if (input.size() != topo.base_count())
        throw std::invalid_argument("evaluate_tree: input length must be nu^h");
    config.validate(topo, gates);
    std::vector<std::uint8_t> value(topo.total_nodes(), 0);
    for (std::size_t i = 0; i < input.size(); ++i) value[i] = input[i] ? 1 : 0;
    std::vector<std::uint8_t> child_bits(topo.nu());
    for (std::size_t node = topo.base_count(); node < topo.total_nodes(); ++node) {
        for (int c = 0; c < topo.nu(); ++c) child_bits[c] = value[topo.child(node, c)];
        value[node] = gates[config.at(topo, node)].eval(child_bits);
    }
    EvalResult out;
    out.internal_values.assign(value.begin() + topo.base_count(), value.end());
    out.root_bit = value[topo.root()];
    return out;
}

/// Tape window of nu^h cells plus the bits shifted past the window.
/// overflow[j] is the bit that left the window at step j+1 (oldest first), so
/// window ++ reverse(overflow) is the live prefix of the conceptual tape.
struct MachineState {
    std::vector<std::uint8_t> window;
    std::vector<std::uint8_t> overflow;
    std::uint64_t time = 0;
};

inline MachineState make_state(const TreeTopology& topo, std::vector<std::uint8_t> prompt) {
    if (prompt.size() != topo.base_count())
        throw std::invalid_argument("make_state: prompt length must be nu^h");
    return MachineState{std::move(prompt), {}, 0};
}

/// One read/shift/write round: evaluate the tree on the current window, shift
/// every cell forward (the last one into the overflow log), write the root
/// output to cell 0.
inline MachineState step(const MachineState& state, const TreeTopology& topo,
                         const GateConfiguration& config, const std::vector<Gate>& gates) {
    if (state.window.size() != topo.base_count())
        throw std::invalid_argument("step: window length must be nu^h");
    const EvalResult eval = evaluate_tree(topo, config, gates, state.window);
    MachineState next;
    next.window.resize(state.window.size());
    next.window[0] = eval.root_bit;
    for (std::size_t i = 0; i + 1 < state.window.size(); ++i) next.window[i + 1] = state.window[i];
    next.overflow = state.overflow;
    next.overflow.push_back(state.window.back());
    next.time = state.time + 1;
    return next;
}

/// Iterates step; returns the trace [initial, after 1 step, ..., after n steps].
inline std::vector<MachineState> run(const MachineState& initial, const TreeTopology& topo,
                                     const GateConfiguration& config,
                                     const std::vector<Gate>& gates, std::size_t steps) {
    std::vector<MachineState> trace;
    trace.reserve(steps + 1);
    trace.push_back(initial);
    for (std::size_t i = 0; i < steps; ++i) trace.push_back(step(trace.back(), topo, config, gates));
    return trace;
}

// ---- gate presets ----

inline Gate make_and(int nu) {
    std::vector<std::uint8_t> t(std::size_t(1) << nu, 0);
    t.back() = 1;
    return Gate("AND", nu, std::move(t));
}

inline Gate make_or(int nu) {
    std::vector<std::uint8_t> t(std::size_t(1) << nu, 1);
    t.front() = 0;
    return Gate("OR", nu, std::move(t));
}

inline Gate make_proj(int nu, int which) {
    std::vector<std::uint8_t> t(std::size_t(1) << nu, 0);
    for (std::size_t idx = 0; idx < t.size(); ++idx)
        t[idx] = (idx >> which) & 1u;
    return Gate("Proj" + std::to_string(which + 1), nu, std::move(t));
}

inline Gate make_parity(int nu) {
    std::vector<std::uint8_t> t(std::size_t(1) << nu, 0);
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        std::size_t v = idx;
        std::uint8_t p = 0;
        while (v) { p ^= (v & 1u); v >>= 1; }
        t[idx] = p;
    }
    return Gate(nu == 2 ? "XOR" : "PARITY", nu, std::move(t));
}

inline Gate make_majority(int nu) {
    std::vector<std::uint8_t> t(std::size_t(1) << nu, 0);
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
        int ones = 0;
        for (int i = 0; i < nu; ++i) ones += (idx >> i) & 1u;
        t[idx] = (2 * ones > nu) ? 1 : 0;
    }
    return Gate("MAJ", nu, std::move(t));
}

inline std::vector<Gate> default_gate_set(int nu, const std::string& preset) {
    if (preset == "and-or-proj") return {make_and(nu), make_or(nu), make_proj(nu, 0)};
    if (preset == "and-or-parity") return {make_and(nu), make_or(nu), make_parity(nu)};
    if (preset == "majority-family") return {make_and(nu), make_or(nu), make_majority(nu)};
    throw std::invalid_argument("default_gate_set: unknown preset '" + preset + "'");
}

} // namespace looplab::circuit
